"""Command-line front end.

Exit codes: 0 success / satisfiable, 1 unsatisfiable (or a failed check),
2 any error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from .ec3_core import InstanceError, ResourceError, brute_force_solve, load_instance, random_instance
from .evolution import METHODS, NumericalError, PropagatorSpec
from .experiment import (
    SimulationParams,
    analytic_prediction,
    extract_solutions,
    run_algorithm,
    solve,
    sweep_omega,
    sweep_tau,
)
from .verify import run_checks

log = logging.getLogger("ec3probe")

EXIT_OK, EXIT_UNSAT, EXIT_ERROR = 0, 1, 2
DEFAULT_TAU_GRID = "0:1600:25"


class UsageError(ValueError):
    pass


def fmt(x: float) -> str:
    return format(float(x), ".12g")


def _round_floats(obj):
    if isinstance(obj, float):
        return float(fmt(obj))
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    return obj


def dumps(doc: dict) -> str:
    return json.dumps(_round_floats(doc), indent=2) + "\n"


def parse_grid(spec: str) -> np.ndarray:
    """``start:stop:step`` -> inclusive grid (stop kept when it lies on the grid)."""
    try:
        start, stop, step = (float(x) for x in spec.split(":"))
    except ValueError:
        raise UsageError(f"grid spec must be start:stop:step, got {spec!r}") from None
    if not step > 0:
        raise UsageError("grid step must be positive")
    if stop < start:
        raise UsageError("grid stop must be >= start")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(count)


def load_grid(args: argparse.Namespace, default: str | None) -> np.ndarray:
    if getattr(args, "grid_file", None):
        values = json.loads(Path(args.grid_file).read_text(encoding="utf-8"))
        if not isinstance(values, list) or not values:
            raise UsageError("grid file must hold a non-empty JSON array")
        return np.asarray(values, dtype=float)
    spec = args.grid or default
    if spec is None:
        raise UsageError("a --grid is required")
    return parse_grid(spec)


def _write(text: str, output: str | None) -> None:
    if output:
        with open(output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _sim_params(args: argparse.Namespace, tau: float | None = None) -> SimulationParams:
    L = None if args.L in (None, "auto") else int(args.L)
    spec = PropagatorSpec(method=args.method, trotter_steps=L, strang=args.strang)
    return SimulationParams(
        omega=args.omega,
        c=args.c,
        tau=args.tau if tau is None else tau,
        propagator=spec,
        shots=args.shots,
        seed=args.seed,
    )


# --- commands -----------------------------------------------------------------


def cmd_spectrum(args: argparse.Namespace) -> int:
    summary = brute_force_solve(load_instance(args.instance))
    _write(dumps(summary.to_dict()), args.output)
    return EXIT_OK if summary.satisfiable else EXIT_UNSAT


def cmd_run(args: argparse.Namespace) -> int:
    inst = load_instance(args.instance)
    sp = _sim_params(args)
    dr = run_algorithm(inst, sp)
    summary = brute_force_solve(inst)
    m = summary.num_solutions
    doc = {
        "params": sp.to_dict(),
        "satisfiable": dr.p_decay > 0.5,
        "p_decay": dr.p_decay,
        "chosen_L": dr.chosen_L,
        "solutions": [str(a) for a in extract_solutions(dr, args.threshold)],
        "analytics": analytic_prediction(inst, sp, m, summary).to_dict() if m else None,
    }
    if dr.samples is not None:
        doc["samples"] = dr.samples
    _write(dumps(doc), args.output)
    return EXIT_OK


def cmd_sweep_tau(args: argparse.Namespace) -> int:
    inst = load_instance(args.instance)
    taus = load_grid(args, DEFAULT_TAU_GRID)
    sweep = sweep_tau(inst, _sim_params(args, tau=0.0), taus)
    lines = ["tau,p_decay,p_analytic,abs_err"]
    lines += [",".join(fmt(x) for x in row) for row in sweep.rows()]
    _write("\n".join(lines) + "\n", args.output)
    return EXIT_OK


def cmd_sweep_omega(args: argparse.Namespace) -> int:
    inst = load_instance(args.instance)
    default = f"1:{inst.num_clauses + 1}:1"
    omegas = load_grid(args, default)
    sweep = sweep_omega(inst, _sim_params(args, tau=0.0), omegas, tau=args.tau_override)
    lines = ["omega,tau,p_decay"]
    lines += [",".join(fmt(x) for x in row) for row in zip(sweep.omegas, sweep.taus, sweep.p_decay)]
    _write("\n".join(lines) + "\n", args.output)
    first = sweep.first_resonant_omega
    print(f"first_resonant_omega = {fmt(first) if first is not None else 'none'}", file=sys.stderr)
    return EXIT_OK


def cmd_solve(args: argparse.Namespace) -> int:
    inst = load_instance(args.instance)
    report = solve(inst, _sim_params(args), threshold=args.threshold)
    _write(dumps(report.to_dict()), args.output)
    if report.satisfiable:
        return EXIT_OK
    if report.first_resonant_omega is not None:
        hint = ", ".join(str(a) for a in report.minimal_violation) or "none above threshold"
        print(
            f"unsatisfiable; first_resonant_omega = {fmt(report.first_resonant_omega)}; "
            f"minimal-violation assignments: {hint}",
            file=sys.stderr,
        )
    return EXIT_UNSAT


def cmd_verify(args: argparse.Namespace) -> int:
    if args.instance:
        inst = load_instance(args.instance)
    else:
        rng = np.random.default_rng(args.seed)
        inst = random_instance(rng, args.n, max(1, args.n))
    results = run_checks(
        inst,
        omega=args.omega,
        c=args.c,
        seed=7 if args.seed is None else args.seed,
        inject_fault=args.inject_fault,
        trotter=not args.skip_trotter,
    )
    for r in results:
        print(r.line())
    failed = [r.name for r in results if not r.passed]
    if failed:
        print(f"failed checks: {', '.join(failed)}", file=sys.stderr)
        return EXIT_UNSAT
    return EXIT_OK


# --- argument parsing ---------------------------------------------------------


def _add_physics(p: argparse.ArgumentParser) -> None:
    p.add_argument("--omega", type=float, default=1.0, help="probe frequency (default 1)")
    p.add_argument("--c", type=float, default=0.002, help="coupling strength (default 0.002)")
    p.add_argument("--method", choices=METHODS, default="exact")
    p.add_argument("--L", default="auto", help="Trotter steps, or 'auto' (default)")
    p.add_argument("--strang", action="store_true", help="symmetric Trotter splitting")
    p.add_argument("--shots", type=int, default=None, help="also draw this many sampled runs")
    p.add_argument("--seed", type=int, default=None, help="RNG seed for shots mode")
    p.add_argument("-o", "--output", default=None, help="write to file instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ec3probe", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="brute-force level table and solutions")
    p.add_argument("instance")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("run", help="single run at fixed tau")
    p.add_argument("instance")
    _add_physics(p)
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--threshold", type=float, default=0.1)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep-tau", help="decay probability versus evolution time (CSV)")
    p.add_argument("instance")
    _add_physics(p)
    p.add_argument("--grid", default=None, help=f"start:stop:step (default {DEFAULT_TAU_GRID})")
    p.add_argument("--grid-file", default=None, help="JSON array of times")
    p.set_defaults(func=cmd_sweep_tau, tau=0.0)

    p = sub.add_parser("sweep-omega", help="decay probability versus probe frequency (CSV)")
    p.add_argument("instance")
    _add_physics(p)
    p.add_argument("--grid", default=None, help="start:stop:step (default 1:M+1:1)")
    p.add_argument("--grid-file", default=None, help="JSON array of frequencies")
    p.add_argument("--tau", dest="tau_override", type=float, default=None,
                   help="fixed evolution time (default: m-doubling search per point)")
    p.set_defaults(func=cmd_sweep_omega, tau=0.0)

    p = sub.add_parser("solve", help="decide satisfiability and extract solutions")
    p.add_argument("instance")
    _add_physics(p)
    p.add_argument("--threshold", type=float, default=None)
    p.set_defaults(func=cmd_solve, tau=0.0)

    p = sub.add_parser("verify", help="oracle cross-checks (n <= 6)")
    p.add_argument("instance", nargs="?", default=None)
    p.add_argument("--n", type=int, default=4, help="size of a random instance when no file is given")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--omega", type=float, default=1.0)
    p.add_argument("--c", type=float, default=0.002)
    p.add_argument("--skip-trotter", action="store_true")
    p.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (InstanceError, UsageError, ResourceError, NumericalError, OSError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
