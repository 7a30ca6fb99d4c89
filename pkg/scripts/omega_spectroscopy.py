#!/usr/bin/env python3
"""Step the probe frequency upward and report where the probe first decays.

The first resonant frequency omega locates the lowest problem level at
energy omega - 1; the register then holds the minimal-violation strings.
"""

from __future__ import annotations

import argparse

import numpy as np

from ec3probe.ec3_core import brute_force_solve, load_instance
from ec3probe.experiment import SimulationParams, extract_solutions, sweep_omega


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("instance")
    ap.add_argument("--c", type=float, default=0.002)
    ap.add_argument("--max-omega", type=float, default=None)
    args = ap.parse_args()

    inst = load_instance(args.instance)
    top = args.max_omega or inst.num_clauses + 1
    sweep = sweep_omega(inst, SimulationParams(c=args.c), np.arange(1.0, top + 0.5))
    for w, tau, p in zip(sweep.omegas, sweep.taus, sweep.p_decay):
        flag = " <- resonant" if p > sweep.threshold else ""
        print(f"omega = {w:4g}  tau = {tau:8.2f}  p_decay = {p:.6f}{flag}")

    oracle = brute_force_solve(inst)
    first = sweep.first_resonant_omega
    print(f"\nfirst resonant omega: {first}  (oracle: lowest level {oracle.min_energy} -> omega {oracle.min_energy + 1})")
    if first is not None:
        found = extract_solutions(sweep.result_at(first), 0.05)
        print("register readout :", " ".join(map(str, found)))
        print("oracle minimizers:", " ".join(map(str, oracle.minimizers)))


if __name__ == "__main__":
    main()
