"""Cross-checks between the matrix-free code paths and dense/independent oracles."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from . import dense
from .ec3_core import EC3Instance, ResourceError, build_hp_diagonal
from .evolution import (
    coupling_step_circuit,
    coupling_step_direct,
    diagonal_step,
    propagate_exact,
    propagate_krylov,
    propagate_trotter,
    trotter_convergence,
    EigenPropagator,
)
from .operators import HamiltonianParams, apply_excitation, apply_full_h, build_htilde, prepare_reference

VERIFY_MAX_BITS = 6
TROTTER_STEPS = (64, 128, 256, 512, 1024, 2048, 4096)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    value: float
    limit: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: {self.value:.3e} (limit {self.limit:.1e})"


def _random_state(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def _faulty_full_h(p: HamiltonianParams, psi: np.ndarray) -> np.ndarray:
    # negative control: flips the sign of the probe 1 -> 0 coupling branch
    out = apply_full_h(p, psi)
    halves = psi.reshape(2, -1)
    out = out.reshape(2, -1).copy()
    out[0] -= 2 * p.c * apply_excitation(halves[1])
    return out.ravel()


def _check(name: str, value: float, limit: float) -> CheckResult:
    return CheckResult(name, bool(value <= limit), float(value), limit)


def run_checks(
    inst: EC3Instance,
    omega: float = 1.0,
    c: float = 0.002,
    seed: int = 7,
    inject_fault: bool = False,
    trotter: bool = True,
) -> list[CheckResult]:
    """Run every oracle comparison for ``inst``; refuses n above VERIFY_MAX_BITS."""
    n = inst.n
    if n > VERIFY_MAX_BITS:
        raise ResourceError(f"dense checks need n <= {VERIFY_MAX_BITS}, got {n}")
    rng = np.random.default_rng(seed)
    p = HamiltonianParams(omega=omega, c=c, htilde=build_htilde(inst))
    hp = build_hp_diagonal(inst).astype(float)
    h_dense = dense.full_hamiltonian(omega, c, hp)
    matvec = _faulty_full_h if inject_fault else apply_full_h
    results = []

    a_sum, a_tensor = dense.excitation_sum_form(n), dense.excitation_tensor_form(n)
    results.append(_check("excitation sum form == tensor form", np.abs(a_sum - a_tensor).max(), 1e-12))
    v = _random_state(rng, 2 << n)
    results.append(
        _check("matrix-free A == dense A", np.abs(apply_excitation(v) - a_tensor @ v).max(), 1e-12)
    )

    u, w = _random_state(rng, p.dim), _random_state(rng, p.dim)
    results.append(
        _check("matrix-free H == dense H", np.abs(matvec(p, u) - h_dense @ u).max(), 1e-12)
    )
    herm = abs(np.vdot(u, matvec(p, w)) - np.conj(np.vdot(w, matvec(p, u))))
    results.append(_check("H hermitian", herm, 1e-12))

    dt = float(rng.uniform(0, 1))
    u_coup = expm(-1j * dt * dense.coupling_generator(c, n)) @ u
    results.append(
        _check("coupling circuit == dense exp", np.abs(coupling_step_circuit(p, u, dt) - u_coup).max(), 1e-10)
    )
    results.append(
        _check("coupling direct == dense exp", np.abs(coupling_step_direct(p, u, dt) - u_coup).max(), 1e-10)
    )
    u_diag = expm(-1j * dt * dense.diagonal_generator(omega, hp)) @ u
    results.append(
        _check("diagonal step == dense exp", np.abs(diagonal_step(p, u, dt) - u_diag).max(), 1e-12)
    )

    tau = float(rng.uniform(1, 100))
    eig = EigenPropagator(p).evolve(u, tau)
    kry = propagate_krylov(p, u, tau)
    results.append(_check("eigen propagator == dense exp", np.abs(eig - expm(-1j * tau * h_dense) @ u).max(), 1e-8))
    results.append(_check("eigen == krylov", np.abs(eig - kry).max(), 1e-8))
    results.append(_check("eigen norm drift", abs(np.linalg.norm(eig) - 1), 1e-9))
    results.append(_check("krylov norm drift", abs(np.linalg.norm(kry) - 1), 1e-9))
    results.append(
        _check("trotter norm drift", abs(np.linalg.norm(propagate_trotter(p, u, tau, 1000)) - 1), 1e-9)
    )

    if trotter:
        psi = prepare_reference(n)
        exact = propagate_exact(p, psi, 50.0)
        _, order, _ = trotter_convergence(p, psi, 50.0, TROTTER_STEPS, exact)
        results.append(_check("trotter order |order - 1|", abs(order - 1.0), 0.2))
    return results
