"""Command-line front end: parameter sweeps written as CSV, and the acceptance suite.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 numerical error.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from .acceptance import CRITERIA, format_result, run_acceptance
from .density import entropy_trace, purity
from .errors import NHDMError
from .evolution import swanson_rdm1_state, swanson_thermal_state, two_state_rdm_closed
from .matcore import DEFAULT_TOL, Tolerances, condition_number
from .models import RegionTag, SwansonParams, TwoStateParams, gdm_rho, swanson_region, two_state_region

__all__ = ["SweepConfig", "SweepResult", "run_sweep", "write_csv", "build_parser", "main"]

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

COLUMNS = ("parameter", "trace_real", "trace_imag", "purity", "entropy_trace", "region", "cond_R")

SWEEP_COMMANDS = ("swanson-rdm1", "swanson-thermal", "two-state", "gdm")

# reconstructed default grids covering the interesting region of each model
DEFAULT_RANGES = {
    "swanson-rdm1": (-0.4999, -0.45, 50),
    "swanson-thermal": (-0.49, 10.0, 50),
    "two-state": (-0.5, 0.5, 51),
    "gdm": (0.0, 1.0, 101),
}


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class SweepConfig:
    command: str
    start: float
    stop: float
    count: int
    alpha1: float = 1.0
    beta: float = 1.0
    time: float = 0.0
    allow_ep: bool = False
    tol: Tolerances = DEFAULT_TOL

    def __post_init__(self):
        if self.command not in SWEEP_COMMANDS:
            raise UsageError(f"unknown sweep command {self.command!r}")
        if self.count < 2:
            raise UsageError("range count must be at least 2")
        if self.start == self.stop:
            raise UsageError("range start and stop must differ")
        if not (math.isfinite(self.start) and math.isfinite(self.stop)):
            raise UsageError("range endpoints must be finite")

    def grid(self) -> np.ndarray:
        return np.sort(np.linspace(self.start, self.stop, self.count))


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[tuple, ...]


def parse_range(text: str) -> tuple[float, float, int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"range must be START:STOP:COUNT, got {text!r}")
    try:
        return float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise UsageError(f"bad range {text!r}: {exc}") from None


def _is_exceptional(cfg: SweepConfig, x: float) -> bool:
    if cfg.command in ("swanson-rdm1", "swanson-thermal"):
        return swanson_region(SwansonParams(cfg.alpha1, x)).tag is RegionTag.EXCEPTIONAL
    return False


def _row(x: float, state, region: str, cond: float) -> tuple:
    tr = complex(np.trace(state.mat))
    return (x, tr.real, tr.imag, purity(state), entropy_trace(state), region, cond)


def _point(cfg: SweepConfig, x: float) -> tuple:
    tol = cfg.tol
    if cfg.command == "gdm":
        return _row(x, gdm_rho(cfg.alpha1, x, tol), RegionTag.EXCEPTIONAL.value, math.inf)
    if cfg.command == "two-state":
        y = math.sin(x)
        state = two_state_rdm_closed(cfg.time, y, tol)
        region = two_state_region(TwoStateParams(1.0, 0.5, x)).tag.value
        return _row(x, state, region, condition_number(state.R.R))
    p = SwansonParams(cfg.alpha1, x)
    region = swanson_region(p).tag
    if region is RegionTag.EXCEPTIONAL:
        # all weights coalesce to 1/3 on the exceptional hyperbola
        return _row(x, gdm_rho(cfg.alpha1, 1 / 3, tol), region.value, math.inf)
    if cfg.command == "swanson-rdm1":
        state = swanson_rdm1_state(p, cfg.time, tol)
    else:
        state = swanson_thermal_state(cfg.beta, p, tol)
    return _row(x, state, region.value, condition_number(state.R.R))


def run_sweep(cfg: SweepConfig) -> SweepResult:
    """Evaluate the model pipeline at every grid point, in ascending order.

    Raises
    ------
    UsageError
        If a grid point lies on the exceptional set and ``allow_ep`` is off.
    """
    grid = cfg.grid()
    if not cfg.allow_ep:
        hits = [x for x in grid if _is_exceptional(cfg, float(x))]
        if hits:
            raise UsageError(f"grid hits the exceptional point at {hits[0]:.12g}; pass --allow-ep")
    return SweepResult(tuple(_point(cfg, float(x)) for x in grid))


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    return "%.12g" % v


def write_csv(result: SweepResult, stream) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(COLUMNS)
    for row in result.rows:
        writer.writerow([_fmt(v) for v in row])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nhdm", description="Density matrices for non-Hermitian models.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--tol", type=float, help="override eq_tol (also via NHDM_TOL)")

    for name, helptext, swept in (
        ("swanson-rdm1", "Riesz state with |mu|^2 weights, sweeping alpha2", "alpha2"),
        ("swanson-thermal", "thermal Riesz state, sweeping alpha2", "alpha2"),
        ("two-state", "deformed two-state trajectory, sweeping theta", "theta"),
        ("gdm", "generalized state at the exceptional point, sweeping lambda1", "lambda1"),
    ):
        p = sub.add_parser(name, help=helptext)
        start, stop, count = DEFAULT_RANGES[name]
        p.add_argument("--range", dest="range_", metavar="START:STOP:COUNT",
                       default=f"{start}:{stop}:{count}", help=f"grid over {swept}")
        p.add_argument("--out", help="output CSV path (default stdout)")
        if name != "two-state":
            p.add_argument("--alpha1", type=float, default=1.0)
        if name == "swanson-thermal":
            p.add_argument("--beta", type=float, default=1.0)
        if name in ("swanson-rdm1", "two-state"):
            p.add_argument("--time", type=float, default=0.0)
        if name in ("swanson-rdm1", "swanson-thermal"):
            p.add_argument("--allow-ep", action="store_true",
                           help="evaluate exceptional points through the generalized state")
        common(p)

    v = sub.add_parser("verify", help="run the acceptance suite")
    v.add_argument("--only", action="append", metavar="NAME",
                   help=f"criterion name or number, repeatable or comma separated ({', '.join(CRITERIA)})")
    v.add_argument("--verbose", action="store_true", help="list every sub-check")
    common(v)
    return parser


def _resolve_tol(arg: float | None) -> float | None:
    if arg is not None:
        value = arg
    elif os.environ.get("NHDM_TOL"):
        try:
            value = float(os.environ["NHDM_TOL"])
        except ValueError:
            raise UsageError(f"NHDM_TOL is not a number: {os.environ['NHDM_TOL']!r}") from None
    else:
        return None
    if not (value > 0 and math.isfinite(value)):
        raise UsageError(f"tolerance must be positive, got {value}")
    return value


def _join_range(argv: list[str]) -> list[str]:
    # "--range -0.5:0.5:11" would otherwise be read as an option
    out, i = [], 0
    while i < len(argv):
        if argv[i] == "--range" and i + 1 < len(argv):
            out.append(f"--range={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def _verify(args, override: float | None) -> int:
    only = None
    if args.only:
        only = [k for item in args.only for k in item.split(",") if k.strip()]
    results = run_acceptance(only=only, tol=override)
    for r in results:
        print(format_result(r, verbose=args.verbose))
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY


def _sweep(args, override: float | None) -> int:
    start, stop, count = parse_range(args.range_)
    tol = DEFAULT_TOL if override is None else Tolerances(eq_tol=override)
    cfg = SweepConfig(
        command=args.command, start=start, stop=stop, count=count,
        alpha1=getattr(args, "alpha1", 1.0), beta=getattr(args, "beta", 1.0),
        time=getattr(args, "time", 0.0), allow_ep=getattr(args, "allow_ep", False), tol=tol,
    )
    result = run_sweep(cfg)
    buf = io.StringIO()
    write_csv(result, buf)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    return EXIT_OK


def main(argv=None) -> int:
    argv = _join_range(list(sys.argv[1:] if argv is None else argv))
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        override = _resolve_tol(args.tol)
        if args.command == "verify":
            return _verify(args, override)
        return _sweep(args, override)
    except (UsageError, KeyError) as exc:
        print(f"nhdm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"nhdm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NHDMError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"nhdm: numerical error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
