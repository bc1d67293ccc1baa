"""Tests for the command-line interface."""

from __future__ import annotations

import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from toruscover import __version__
from toruscover.cli import Request, main, render, run
from toruscover.config import Settings

SRC_DIR = Path(__file__).resolve().parent.parent / "src"

SQRT_X_SQRT_Y = ("--radical", "1,0:2", "--radical", "0,1:2")
SQRT_X_CBRT_Y = ("--radical", "1,0:2", "--radical", "0,1:3")


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch):
    for name in ("TORUSCOVER_CAP", "TORUSCOVER_LOG_LEVEL", "TORUSCOVER_OUTPUT"):
        monkeypatch.delenv(name, raising=False)


def _run(capsys, *argv: str) -> tuple[int, str, str]:
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out.strip(), captured.err.strip()


def _json(capsys, *argv: str):
    code, out, err = _run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


# ---------------------------------------------------------------------------
# Coverings
# ---------------------------------------------------------------------------


class TestCoveringCommands:
    def test_classify_exact_output(self, capsys):
        code, out, _ = _run(capsys, "classify", "--kernel", "[[2,0],[0,3]]")
        assert code == 0
        assert out == '{"s":1,"m":[6],"r":0,"min_inducing_dim":1}'

    def test_classify_from_action(self, capsys):
        doc = _json(capsys, "classify", "--action", "[[1,2,0]]")
        assert doc == {"s": 0, "m": [3], "r": 0, "min_inducing_dim": 1}

    def test_empty_kernel_needs_dim(self, capsys):
        code, _, err = _run(capsys, "classify", "--kernel", "[]")
        assert code == 2
        assert "--dim" in err
        doc = _json(capsys, "classify", "--kernel", "[]", "--dim", "2")
        assert doc == {"s": 0, "m": [], "r": 2, "min_inducing_dim": 2}

    def test_mindim_is_bare_integer(self, capsys):
        code, out, _ = _run(capsys, "mindim", "--kernel", "[[2,0],[0,2]]")
        assert code == 0
        assert out == "2"

    def test_equivalent(self, capsys):
        assert _json(
            capsys, "equivalent", "--kernel", "[[3]]", "--action", "[[1,2,0]]"
        ) is True

    def test_dominates(self, capsys):
        six_over_two = ("dominates", "--kernel", "[[6]]", "--kernel", "[[2]]")
        assert _json(capsys, *six_over_two) is True
        two_over_three = ("dominates", "--kernel", "[[2]]", "--kernel", "[[3]]")
        assert _json(capsys, *two_over_three) is False

    def test_dominates_rejects_disconnected(self, capsys):
        code, _, err = _run(
            capsys, "dominates", "--action", "[[1,0,2]]", "--action", "[[1,0]]"
        )
        assert code == 2
        assert err.startswith("error: disconnected-cover:")

    def test_wrong_covering_count(self, capsys):
        code, _, err = _run(capsys, "equivalent", "--kernel", "[[2]]")
        assert code == 2
        assert "2 covering(s)" in err

    def test_pullback(self, capsys):
        doc = _json(capsys, "pullback", "--kernel", "[[4]]", "--sublattice", "[[2]]")
        assert doc["kernel"] == [[2]]
        assert doc["m"] == [2]

    def test_charclass(self, capsys):
        doc = _json(capsys, "charclass", "--kernel", "[[2,0],[0,2]]")
        assert doc == {"m": 2, "k": 2, "class": [[[1, 2], 1]]}


# ---------------------------------------------------------------------------
# Normal forms and towers
# ---------------------------------------------------------------------------


class TestMatrixCommands:
    def test_snf(self, capsys):
        doc = _json(capsys, "snf", "--matrix", "[[2,4],[6,8]]")
        assert doc["diagonal"] == [2, 4]

    def test_hnf_large_entries_become_strings(self, capsys):
        doc = _json(capsys, "hnf", "--matrix", f"[[{2**60}]]")
        assert doc["H"] == [[str(2**60)]]

    def test_malformed_matrix(self, capsys):
        code, _, err = _run(capsys, "snf", "--matrix", "[[1,2],[3]]")
        assert code == 2
        assert err.startswith("error: dimension-mismatch:")

    def test_invalid_json(self, capsys):
        code, _, err = _run(capsys, "snf", "--matrix", "[[1,2")
        assert code == 2
        assert "not valid JSON" in err


class TestTowerBound:
    def test_bound(self, capsys):
        code, out, _ = _run(capsys, "tower-bound", "--k", "5", "--dims", "1,2")
        assert (code, out) == (0, "2")

    def test_sublattice_chain(self, capsys):
        doc = _json(
            capsys,
            "tower-bound",
            "--dim",
            "2",
            "--sublattice",
            "[[2,0],[0,1]]",
            "--sublattice",
            "[[2,0],[0,2]]",
        )
        assert doc == {"stage_ranks": [1, 1], "composite_rank": 2}

    def test_chain_must_descend(self, capsys):
        code, _, _ = _run(
            capsys,
            "tower-bound",
            "--dim",
            "1",
            "--sublattice",
            "[[2]]",
            "--sublattice",
            "[[3]]",
        )
        assert code == 3

    def test_negative_counts_rejected(self, capsys):
        code, _, err = _run(capsys, "tower-bound", "--k", "-3", "--dims", "1")
        assert code == 2
        assert err.startswith("error: invalid-input:")
        code, _, _ = _run(capsys, "tower-bound", "--k", "3", "--dims", "1,-1")
        assert code == 2

    def test_chain_needs_dim(self, capsys):
        code, _, err = _run(
            capsys, "tower-bound", "--k", "2", "--sublattice", "[[2,0],[0,1]]"
        )
        assert code == 2
        assert "--dim" in err

    def test_bound_needs_k(self, capsys):
        code, _, err = _run(capsys, "tower-bound", "--dims", "1")
        assert code == 2
        assert "--k" in err


# ---------------------------------------------------------------------------
# Klein's problem
# ---------------------------------------------------------------------------


class TestRadicalCommand:
    def test_mindim(self, capsys):
        code, out, _ = _run(
            capsys, "radical", "--vars", "2", *SQRT_X_SQRT_Y, "mindim"
        )
        assert (code, out) == (0, "2")

    def test_classify(self, capsys):
        doc = _json(
            capsys, "radical", "--vars", "2", *SQRT_X_CBRT_Y, "classify"
        )
        assert doc == {"s": 1, "m": [6], "r": 0, "min_inducing_dim": 1}

    def test_infeasible_tower(self, capsys):
        doc = _json(
            capsys, "radical", "--vars", "2", *SQRT_X_SQRT_Y, "--dims", "1", "tower"
        )
        assert doc == {"feasible": False, "essential_dimension": 2}

    def test_feasible_tower(self, capsys):
        doc = _json(
            capsys, "radical", "--vars", "2", *SQRT_X_SQRT_Y, "--dims", "1,1", "tower"
        )
        assert doc["feasible"] is True
        assert len(doc["chain"]) == 2
        assert all(r <= 1 for r in doc["stage_ranks"])

    def test_bad_radical(self, capsys):
        code, _, err = _run(
            capsys, "radical", "--vars", "2", "--radical", "1:0", "mindim"
        )
        assert code == 2
        assert err.startswith("error:")


class TestUniversalCommands:
    def test_quintic(self, capsys):
        doc = _json(capsys, "universal", "--degree", "5")
        assert doc["bound"] == 2
        assert doc["variables"] == ["a1", "a2", "s1", "s2", "a3"]
        assert doc["radicals"] == ["0,0,1,0,0:2", "0,0,0,1,0:2"]
        assert doc["essential_dimension"] == 2

    def test_discriminant_quartic(self, capsys):
        doc = _json(capsys, "universal-disc", "--degree", "4")
        assert doc == {
            "bound": 2,
            "generators": [[1, 0, 3, 2], [2, 3, 0, 1]],
            "cycles": ["(0 1)(2 3)", "(0 2)(1 3)"],
            "even_only": True,
            "rank": 2,
        }


class TestFlagCommand:
    def test_pairing(self, capsys):
        doc = _json(capsys, "flag", "--pairing", "4")
        assert doc["order"] == 4
        assert doc["rank"] == 2
        assert doc["even_only"] is False

    def test_quadruple(self, capsys):
        doc = _json(capsys, "flag", "--quadruple", "4")
        assert doc["stabilizer"] == [
            [0, 1, 2, 3],
            [1, 0, 3, 2],
            [2, 3, 0, 1],
            [3, 2, 1, 0],
        ]
        assert (doc["rank"], doc["even_only"]) == (2, True)

    def test_quadruple_below_four_roots(self, capsys):
        doc = _json(capsys, "flag", "--quadruple", "3")
        assert doc["stabilizer"] == [[0, 1, 2]]
        assert (doc["rank"], doc["even_only"]) == (0, True)

    def test_explicit_steps(self, capsys):
        doc = _json(capsys, "flag", "--steps", "[[[1,-1]],[[1,-1],[1,0]]]")
        assert doc["n"] == 2
        assert doc["rank"] == 1

    def test_steps_must_shrink(self, capsys):
        code, _, err = _run(capsys, "flag", "--steps", "[[[1,-1]],[[2,-2]]]")
        assert code == 3
        assert "smaller subspace" in err

    def test_search_cap(self, capsys):
        code, _, err = _run(capsys, "flag", "--pairing", "9")
        assert code == 3
        assert err.startswith("error: cap-exceeded:")


# ---------------------------------------------------------------------------
# Global options and error handling
# ---------------------------------------------------------------------------


class TestGlobalOptions:
    def test_human_format(self, capsys):
        code, out, _ = _run(
            capsys, "--format", "human", "classify", "--kernel", "[[2,0],[0,2]]"
        )
        assert code == 0
        assert out.splitlines() == ["s: 0", "m: [2, 2]", "r: 0", "min_inducing_dim: 2"]

    def test_format_from_env(self, capsys, monkeypatch):
        monkeypatch.setenv("TORUSCOVER_OUTPUT", "human")
        code, out, _ = _run(capsys, "universal", "--degree", "2")
        assert code == 0
        assert out.startswith("bound: 1")

    def test_cap_exceeded(self, capsys):
        code, _, err = _run(capsys, "--cap", "2", "mindim", "--action", "[[1,2,0]]")
        assert code == 3
        assert "cap 2" in err

    def test_cap_must_be_positive(self, capsys):
        code, _, _ = _run(capsys, "--cap", "0", "universal", "--degree", "3")
        assert code == 2

    def test_invalid_env_config(self, capsys, monkeypatch):
        monkeypatch.setenv("TORUSCOVER_CAP", "many")
        code, _, err = _run(capsys, "universal", "--degree", "3")
        assert code == 2
        assert err.startswith("error: invalid-config:")

    def test_unknown_command(self, capsys):
        code, _, err = _run(capsys, "frobnicate")
        assert code == 2
        assert err.startswith("error: invalid-input:")

    def test_missing_required_option(self, capsys):
        code, _, _ = _run(capsys, "snf")
        assert code == 2

    def test_non_commuting_action(self, capsys):
        code, _, err = _run(capsys, "classify", "--action", "[[1,0,2],[0,2,1]]")
        assert code == 3
        assert err.startswith("error: non-commuting:")


class TestOutputReuse:
    def test_pullback_kernel_feeds_back(self, capsys):
        doc = _json(
            capsys,
            "pullback",
            "--kernel",
            "[[4,0],[0,3]]",
            "--sublattice",
            "[[2,0],[0,1]]",
        )
        assert doc["kernel"] == [[2, 0], [0, 3]]
        kernel = json.dumps(doc["kernel"])
        again = _json(
            capsys, "pullback", "--kernel", kernel, "--sublattice", "[[1,0],[0,1]]"
        )
        assert again == {**doc, "basis": [[1, 0], [0, 1]]}
        classified = _json(capsys, "classify", "--kernel", kernel, "--dim", "2")
        assert classified == {key: doc[key] for key in classified}

    def test_flag_steps_feed_back(self, capsys):
        doc = _json(capsys, "flag", "--quadruple", "4")
        assert _json(capsys, "flag", "--steps", json.dumps(doc["steps"])) == doc

    @pytest.mark.parametrize(
        "argv",
        [
            ("charclass", "--kernel", "[[2,0,0],[0,2,0],[0,0,4]]"),
            ("universal-disc", "--degree", "8"),
            ("flag", "--pairing", "5"),
            ("snf", "--matrix", "[[6,4,2],[3,9,12]]"),
        ],
    )
    def test_repeated_runs_print_identical_bytes(self, capsys, argv):
        first = _run(capsys, *argv)
        second = _run(capsys, *argv)
        assert first[0] == 0
        assert first[:2] == second[:2]


class TestRunAndRender:
    def test_run_unknown_command(self):
        code, text = run(Request("nope"), "json", Settings())
        assert code == 2
        assert "nope" in text

    def test_render_big_integers(self):
        assert render({"x": 2**60, "y": [1, -(2**60)]}, "json") == (
            f'{{"x":"{2**60}","y":[1,"-{2**60}"]}}'
        )

    def test_render_human_scalar(self):
        assert render(True, "human") == "true"


class TestModuleEntryPoint:
    def test_version(self):
        env = {**os.environ, "PYTHONPATH": str(SRC_DIR)}
        result = subprocess.run(
            [sys.executable, "-m", "toruscover", "--version"],
            capture_output=True,
            text=True,
            env=env,
            check=False,
        )
        assert result.returncode == 0
        assert result.stdout.strip() == f"toruscover {__version__}"
