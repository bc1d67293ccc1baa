"""Command-line front door: parse a request, run it, render the result."""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from typing import Any, NoReturn

from toruscover import __version__
from toruscover.charclass import obstruction_class
from toruscover.config import OUTPUT_MODES, Settings
from toruscover.exceptions import (
    DimensionMismatchError,
    DisconnectedCoverError,
    InputError,
    ShapeError,
    ToruscoverError,
)
from toruscover.klein import (
    LinearFlag,
    RadicalSystem,
    essential_dimension,
    flag_rank,
    flag_stabilizer,
    pairing_flag,
    quadruple_flag,
    radical_kernel,
    tower_certificate,
    tower_feasible,
    universal_disc_lower_bound,
    universal_lower_bound,
)
from toruscover.lattice_core import (
    IntMatrix,
    hermite_normal_form,
    lattice_from_rows,
    smith_normal_form,
)
from toruscover.permcover import PermAction, is_even_only, orbits
from toruscover.torus_cover import (
    TorusCovering,
    classify,
    dominates,
    from_perm_action,
    is_equivalent,
    min_inducing_dim,
    pullback,
    tower_rank_bound,
    tower_ranks,
)

logger = logging.getLogger(__name__)

# Largest torus dimension accepted for dense cohomology classes.
MAX_CLASS_DIM = 20
JSON_SAFE_INT = 2**53

LOG_FORMAT = "%(asctime)s %(levelname)-8s %(name)s — %(message)s"


@dataclass
class Request:
    command: str
    payload: dict[str, Any] = field(default_factory=dict)


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        raise InputError(message)


# -- Payload parsing ------------------------------------------------------------


def _parse_json(text: str, what: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{what} is not valid JSON: {exc.msg}") from exc


def _is_int(x: Any) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _check_rows(rows: Any, what: str, cols: int | None = None) -> list[list[int]]:
    """Validate an array of equal-length integer rows."""
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise InputError(f"{what} must be a JSON array of arrays of integers")
    for row in rows:
        if not all(_is_int(x) for x in row):
            raise InputError(f"{what} must contain integers only")
        if cols is None:
            cols = len(row)
        if len(row) != cols:
            raise DimensionMismatchError(cols, len(row), f"{what} row length")
    return rows


def _parse_rows(text: str, what: str, cols: int | None = None) -> list[list[int]]:
    return _check_rows(_parse_json(text, what), what, cols)


def _parse_matrix(text: str, what: str = "matrix") -> IntMatrix:
    rows = _parse_rows(text, what)
    if not rows:
        raise ShapeError(f"{what} must have at least one row")
    return IntMatrix.from_rows(rows)


def _parse_int_list(text: str, what: str) -> list[int]:
    if not text.strip():
        return []
    try:
        return [int(part) for part in text.split(",")]
    except ValueError as exc:
        raise InputError(
            f"{what} must be comma-separated integers, got {text!r}"
        ) from exc


def _parse_action(text: str) -> PermAction:
    images = _parse_rows(text, "action")
    if not images:
        raise InputError("action needs at least one generator")
    return PermAction.from_images(images)


def _coverings(payload: dict[str, Any], cap: int) -> list[TorusCovering]:
    """Coverings given by ``--kernel`` (with ``--dim``) and then ``--action``."""
    dim = payload.get("dim")
    result = []
    for text in payload.get("kernel") or []:
        rows = _parse_rows(text, "kernel", dim)
        if dim is None and not rows:
            raise InputError("--dim is required for an empty kernel")
        n = dim if dim is not None else len(rows[0])
        result.append(TorusCovering.from_kernel_rows(rows, n))
    for text in payload.get("action") or []:
        result.append(from_perm_action(_parse_action(text), cap))
    return result


def _exactly(
    coverings: list[TorusCovering], count: int, command: str
) -> list[TorusCovering]:
    if len(coverings) != count:
        raise InputError(
            f"{command} takes {count} covering(s) via --kernel/--action, "
            f"got {len(coverings)}"
        )
    return coverings


def _connected_coverings(payload: dict[str, Any], cap: int) -> list[TorusCovering]:
    for text in payload.get("action") or []:
        parts = orbits(_parse_action(text))
        if len(parts) > 1:
            raise DisconnectedCoverError(
                f"action has {len(parts)} orbits; domination is decided for "
                "connected coverings only"
            )
    return _coverings(payload, cap)


# -- Commands -------------------------------------------------------------------


def _normal_form_doc(c: TorusCovering) -> dict[str, Any]:
    nf = classify(c)
    return {"s": nf.s, "m": list(nf.m), "r": nf.r, "min_inducing_dim": nf.k}


def _cmd_snf(payload: dict[str, Any], settings: Settings) -> Any:
    decomposition = smith_normal_form(_parse_matrix(payload["matrix"]))
    return {
        "diagonal": list(decomposition.diagonal),
        "U": decomposition.U.to_rows(),
        "D": decomposition.D.to_rows(),
        "V": decomposition.V.to_rows(),
    }


def _cmd_hnf(payload: dict[str, Any], settings: Settings) -> Any:
    H, U = hermite_normal_form(_parse_matrix(payload["matrix"]))
    return {"H": H.to_rows(), "U": U.to_rows()}


def _cmd_classify(payload: dict[str, Any], settings: Settings) -> Any:
    (c,) = _exactly(_coverings(payload, settings.cap), 1, "classify")
    return _normal_form_doc(c)


def _cmd_mindim(payload: dict[str, Any], settings: Settings) -> Any:
    (c,) = _exactly(_coverings(payload, settings.cap), 1, "mindim")
    return min_inducing_dim(c)


def _cmd_equivalent(payload: dict[str, Any], settings: Settings) -> Any:
    c1, c2 = _exactly(_coverings(payload, settings.cap), 2, "equivalent")
    return is_equivalent(c1, c2)


def _cmd_dominates(payload: dict[str, Any], settings: Settings) -> Any:
    c1, c2 = _exactly(_connected_coverings(payload, settings.cap), 2, "dominates")
    return dominates(c1, c2)


def _cmd_pullback(payload: dict[str, Any], settings: Settings) -> Any:
    (c,) = _exactly(_coverings(payload, settings.cap), 1, "pullback")
    H = lattice_from_rows(_parse_rows(payload["sublattice"], "sublattice", c.n), c.n)
    pulled = pullback(c, H)
    return {
        "basis": H.to_rows(),
        "kernel": pulled.kernel.to_rows(),
        **_normal_form_doc(pulled),
    }


def _cmd_tower_bound(payload: dict[str, Any], settings: Settings) -> Any:
    dims = _parse_int_list(payload["dims"], "--dims")
    if payload.get("sublattice"):
        n = payload.get("dim")
        if n is None or n < 1:
            raise InputError("a chain of sublattices needs --dim N with N >= 1")
        chain = [
            lattice_from_rows(_parse_rows(text, "sublattice", n), n)
            for text in payload["sublattice"]
        ]
        stages, composite = tower_ranks(n, chain)
        return {"stage_ranks": stages, "composite_rank": composite}
    if payload.get("k") is None:
        raise InputError("tower-bound needs --k, or --dim with --sublattice")
    return tower_rank_bound(payload["k"], dims)


def _cmd_charclass(payload: dict[str, Any], settings: Settings) -> Any:
    (c,) = _exactly(_coverings(payload, settings.cap), 1, "charclass")
    if c.n > MAX_CLASS_DIM:
        raise InputError(
            f"characteristic classes are limited to dimension {MAX_CLASS_DIM}"
        )
    m, w = obstruction_class(c)
    return {"m": m, "k": w.k, "class": [[S, value] for S, value in w.as_pairs()]}


def _cmd_radical(payload: dict[str, Any], settings: Settings) -> Any:
    rs = RadicalSystem.parse(payload["vars"], payload.get("radical") or [])
    action = payload["action"]
    if action == "mindim":
        return essential_dimension(rs)
    if action == "classify":
        return _normal_form_doc(radical_kernel(rs))
    dims = _parse_int_list(payload.get("dims") or "", "--dims")
    if not tower_feasible(rs, dims):
        return {"feasible": False, "essential_dimension": essential_dimension(rs)}
    chain = tower_certificate(rs, dims)
    stages, _ = tower_ranks(rs.n, chain)
    return {
        "feasible": True,
        "essential_dimension": essential_dimension(rs),
        "chain": [H.to_rows() for H in chain],
        "stage_ranks": stages,
    }


def _parse_flag(payload: dict[str, Any]) -> LinearFlag:
    if payload.get("pairing") is not None:
        return pairing_flag(payload["pairing"])
    if payload.get("quadruple") is not None:
        return quadruple_flag(payload["quadruple"])
    steps = _parse_json(payload["steps"], "flag steps")
    if not isinstance(steps, list) or not steps:
        raise InputError(
            "flag steps must be a non-empty JSON array of equation systems"
        )
    systems = [_check_rows(system, "flag step") for system in steps]
    n = next((len(rows[0]) for rows in systems if rows), None)
    if n is None:
        raise InputError("flag steps carry no equations")
    for rows in systems:
        for row in rows:
            if len(row) != n:
                raise DimensionMismatchError(n, len(row), "equation length")
    return LinearFlag(n, tuple(IntMatrix.from_rows(rows, n) for rows in systems))


def _cmd_flag(payload: dict[str, Any], settings: Settings) -> Any:
    flag = _parse_flag(payload)
    stabilizer = flag_stabilizer(flag)
    rank, even_only = flag_rank(flag, settings.cap)
    return {
        "n": flag.n,
        "steps": flag.to_rows(),
        "stabilizer": [list(g.images) for g in stabilizer],
        "order": len(stabilizer),
        "rank": rank,
        "even_only": even_only,
    }


def _cmd_universal(payload: dict[str, Any], settings: Settings) -> Any:
    bound, certificate = universal_lower_bound(payload["degree"])
    return {
        "bound": bound,
        "variables": list(certificate.variables),
        "radicals": [r.render() for r in certificate.radicals],
        "essential_dimension": essential_dimension(certificate),
    }


def _cmd_universal_disc(payload: dict[str, Any], settings: Settings) -> Any:
    bound, certificate = universal_disc_lower_bound(payload["degree"])
    return {
        "bound": bound,
        "generators": certificate.to_images(),
        "cycles": [str(g) for g in certificate.generators],
        "even_only": is_even_only(certificate.generators),
        "rank": min_inducing_dim(from_perm_action(certificate, settings.cap)),
    }


HANDLERS: dict[str, Callable[[dict[str, Any], Settings], Any]] = {
    "snf": _cmd_snf,
    "hnf": _cmd_hnf,
    "classify": _cmd_classify,
    "mindim": _cmd_mindim,
    "equivalent": _cmd_equivalent,
    "dominates": _cmd_dominates,
    "pullback": _cmd_pullback,
    "tower-bound": _cmd_tower_bound,
    "charclass": _cmd_charclass,
    "radical": _cmd_radical,
    "flag": _cmd_flag,
    "universal": _cmd_universal,
    "universal-disc": _cmd_universal_disc,
}


# -- Rendering ----------------------------------------------------------------


def _json_safe(value: Any) -> Any:
    if _is_int(value) and abs(value) > JSON_SAFE_INT:
        return str(value)
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, list | tuple):
        return [_json_safe(v) for v in value]
    return value


def render(result: Any, output_mode: str) -> str:
    safe = _json_safe(result)
    if output_mode == "json":
        return json.dumps(safe, separators=(",", ":"))
    if isinstance(safe, dict):
        return "\n".join(
            f"{key}: {value if isinstance(value, str) else json.dumps(value)}"
            for key, value in safe.items()
        )
    return safe if isinstance(safe, str) else json.dumps(safe)


def run(request: Request, output_mode: str, settings: Settings) -> tuple[int, str]:
    """Execute one request; returns the exit code and the text to print."""
    handler = HANDLERS.get(request.command)
    if handler is None:
        message = f"unknown command {request.command!r}"
        return InputError.exit_code, f"error: {InputError.code}: {message}"

    logger.info("Running %s", request.command)
    start_time = time.monotonic()
    try:
        result = handler(request.payload, settings)
    except ToruscoverError as exc:
        elapsed_ms = int((time.monotonic() - start_time) * 1000)
        logger.error("%s failed after %dms: %s", request.command, elapsed_ms, exc)
        return exc.exit_code, f"error: {exc.code}: {exc}"

    elapsed_ms = int((time.monotonic() - start_time) * 1000)
    logger.info("Finished %s in %dms", request.command, elapsed_ms)
    return 0, render(result, output_mode)


# -- Argument parsing -----------------------------------------------------------


def _add_covering_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--kernel",
        action="append",
        help="kernel lattice basis as a JSON matrix (repeatable)",
    )
    parser.add_argument("--dim", type=int, help="torus dimension of --kernel")
    parser.add_argument(
        "--action",
        action="append",
        help="monodromy as JSON one-line images of the generators (repeatable)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="toruscover",
        description="Coverings of tori, Smith forms and Klein resolvent bounds.",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    parser.add_argument("--format", choices=OUTPUT_MODES, help="output format")
    parser.add_argument("--cap", type=int, help="enumeration cap for group closures")
    parser.add_argument("--verbose", action="store_true", help="log at DEBUG level")
    sub = parser.add_subparsers(
        dest="command", required=True, parser_class=_ArgumentParser
    )

    for name in ("snf", "hnf"):
        cmd = sub.add_parser(name, help=f"{name.upper()} with transforms")
        cmd.add_argument("--matrix", required=True, help="JSON integer matrix")

    for name in ("classify", "mindim", "equivalent", "dominates", "charclass"):
        _add_covering_args(sub.add_parser(name))

    cmd = sub.add_parser("pullback")
    _add_covering_args(cmd)
    cmd.add_argument(
        "--sublattice", required=True, help="JSON basis of a full-rank sublattice"
    )

    cmd = sub.add_parser("tower-bound")
    cmd.add_argument("--k", type=int, help="rank of the base monodromy")
    cmd.add_argument("--dims", default="", help="comma-separated stage dimensions")
    cmd.add_argument("--dim", type=int, help="torus dimension of --sublattice")
    cmd.add_argument(
        "--sublattice",
        action="append",
        help="tower stage as a JSON basis in Z^dim (repeatable, outermost first)",
    )

    cmd = sub.add_parser("radical")
    cmd.add_argument(
        "--vars", type=int, required=True, help="number of torus variables"
    )
    cmd.add_argument(
        "--radical", action="append", help="radical 'a1,...,an:m' (repeatable)"
    )
    cmd.add_argument("--dims", help="comma-separated tower dimensions")
    cmd.add_argument("action", choices=("mindim", "classify", "tower"))

    cmd = sub.add_parser("flag")
    group = cmd.add_mutually_exclusive_group(required=True)
    group.add_argument("--pairing", type=int, metavar="N")
    group.add_argument("--quadruple", type=int, metavar="N")
    group.add_argument("--steps", help="JSON list of cumulative equation systems")

    for name in ("universal", "universal-disc"):
        sub.add_parser(name).add_argument("--degree", type=int, required=True)

    return parser


def _request_from_args(args: argparse.Namespace) -> Request:
    payload = {
        key: value
        for key, value in vars(args).items()
        if key not in {"command", "format", "cap", "verbose"}
    }
    return Request(command=args.command, payload=payload)


def main(argv: Sequence[str] | None = None) -> int:
    try:
        settings = Settings.from_env()
    except ValueError as exc:
        print(f"error: invalid-config: {exc}", file=sys.stderr)
        return InputError.exit_code

    try:
        args = build_parser().parse_args(argv)
    except InputError as exc:
        print(f"error: {exc.code}: {exc}", file=sys.stderr)
        return exc.exit_code

    if args.cap is not None and args.cap < 1:
        print(f"error: {InputError.code}: --cap must be positive", file=sys.stderr)
        return InputError.exit_code
    settings = settings.with_overrides(cap=args.cap, output=args.format)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else settings.log_level,
        format=LOG_FORMAT,
        datefmt="%Y-%m-%d %H:%M:%S",
        stream=sys.stderr,
    )

    code, text = run(_request_from_args(args), settings.output, settings)
    print(text, file=sys.stdout if code == 0 else sys.stderr)
    return code
