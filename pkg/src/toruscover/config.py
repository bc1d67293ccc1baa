"""Runtime configuration read from the environment."""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass

DEFAULT_CAP = 1_000_000
DEFAULT_LOG_LEVEL = "WARNING"
DEFAULT_OUTPUT = "json"
OUTPUT_MODES = ("human", "json")


@dataclass(frozen=True)
class Settings:
    """Knobs shared by the CLI and the enumeration-heavy operations."""

    cap: int = DEFAULT_CAP
    log_level: str = DEFAULT_LOG_LEVEL
    output: str = DEFAULT_OUTPUT

    @classmethod
    def from_env(cls) -> Settings:
        """Build settings from ``TORUSCOVER_*`` environment variables."""
        raw_cap = os.environ.get("TORUSCOVER_CAP", str(DEFAULT_CAP))
        try:
            cap = int(raw_cap)
        except ValueError as exc:
            raise ValueError(
                f"TORUSCOVER_CAP must be an integer, got {raw_cap!r}"
            ) from exc
        if cap < 1:
            raise ValueError(f"TORUSCOVER_CAP must be positive, got {cap}")

        log_level = os.environ.get(
            "TORUSCOVER_LOG_LEVEL", DEFAULT_LOG_LEVEL
        ).upper()
        if not isinstance(logging.getLevelName(log_level), int):
            raise ValueError(
                f"TORUSCOVER_LOG_LEVEL is not a logging level: {log_level!r}"
            )

        output = os.environ.get("TORUSCOVER_OUTPUT", DEFAULT_OUTPUT).lower()
        if output not in OUTPUT_MODES:
            raise ValueError(
                f"TORUSCOVER_OUTPUT must be one of {OUTPUT_MODES}, got {output!r}"
            )

        return cls(cap=cap, log_level=log_level, output=output)

    def with_overrides(
        self, *, cap: int | None = None, output: str | None = None
    ) -> Settings:
        """Return a copy with CLI flag values taking precedence."""
        return Settings(
            cap=self.cap if cap is None else cap,
            log_level=self.log_level,
            output=self.output if output is None else output,
        )
