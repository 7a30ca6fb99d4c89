#!/usr/bin/env python3
"""Trotter error against the exact propagator as the step count doubles."""

from __future__ import annotations

import argparse

from ec3probe.ec3_core import load_instance
from ec3probe.evolution import propagate_exact, trotter_convergence
from ec3probe.operators import make_params, prepare_reference


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("instance")
    ap.add_argument("--tau", type=float, default=50.0)
    ap.add_argument("--c", type=float, default=0.002)
    ap.add_argument("--omega", type=float, default=1.0)
    ap.add_argument("--lmin", type=int, default=64)
    ap.add_argument("--lmax", type=int, default=4096)
    args = ap.parse_args()

    inst = load_instance(args.instance)
    p = make_params(inst, omega=args.omega, c=args.c)
    psi = prepare_reference(inst.n)
    steps = [args.lmin]
    while steps[-1] * 2 <= args.lmax:
        steps.append(steps[-1] * 2)
    exact = propagate_exact(p, psi, args.tau)
    errors, order, const = trotter_convergence(p, psi, args.tau, steps, exact)
    print(f"{'L':>6s} {'inf-norm error':>15s} {'ratio':>7s}")
    for k, (L, e) in enumerate(zip(steps, errors)):
        ratio = f"{errors[k - 1] / e:7.3f}" if k else ""
        print(f"{L:6d} {e:15.6e} {ratio}")
    print(f"fitted order {order:.3f}, error ~ {const:.3g} / L")


if __name__ == "__main__":
    main()
