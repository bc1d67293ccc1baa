"""Unit tests for environment-driven settings."""

from __future__ import annotations

import pytest

from toruscover.config import DEFAULT_CAP, Settings

ENV_VARS = ("TORUSCOVER_CAP", "TORUSCOVER_LOG_LEVEL", "TORUSCOVER_OUTPUT")


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch):
    for name in ENV_VARS:
        monkeypatch.delenv(name, raising=False)


class TestSettings:
    def test_from_env_defaults(self):
        settings = Settings.from_env()
        assert settings.cap == DEFAULT_CAP
        assert settings.log_level == "WARNING"
        assert settings.output == "json"

    def test_from_env_custom_values(self, monkeypatch):
        monkeypatch.setenv("TORUSCOVER_CAP", "5000")
        monkeypatch.setenv("TORUSCOVER_LOG_LEVEL", "debug")
        monkeypatch.setenv("TORUSCOVER_OUTPUT", "HUMAN")
        settings = Settings.from_env()
        assert settings.cap == 5000
        assert settings.log_level == "DEBUG"
        assert settings.output == "human"

    def test_from_env_invalid_cap(self, monkeypatch):
        monkeypatch.setenv("TORUSCOVER_CAP", "lots")
        with pytest.raises(ValueError, match="TORUSCOVER_CAP"):
            Settings.from_env()

    def test_from_env_nonpositive_cap(self, monkeypatch):
        monkeypatch.setenv("TORUSCOVER_CAP", "0")
        with pytest.raises(ValueError, match="positive"):
            Settings.from_env()

    def test_from_env_invalid_log_level(self, monkeypatch):
        monkeypatch.setenv("TORUSCOVER_LOG_LEVEL", "chatty")
        with pytest.raises(ValueError, match="TORUSCOVER_LOG_LEVEL"):
            Settings.from_env()

    def test_from_env_invalid_output(self, monkeypatch):
        monkeypatch.setenv("TORUSCOVER_OUTPUT", "xml")
        with pytest.raises(ValueError, match="TORUSCOVER_OUTPUT"):
            Settings.from_env()

    def test_overrides_take_precedence(self):
        settings = Settings(cap=10, log_level="INFO", output="json")
        overridden = settings.with_overrides(cap=20, output="human")
        assert overridden == Settings(cap=20, log_level="INFO", output="human")

    def test_missing_overrides_keep_values(self):
        settings = Settings(cap=10)
        assert settings.with_overrides() == settings
