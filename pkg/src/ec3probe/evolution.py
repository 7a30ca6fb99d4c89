"""Time evolution: exact propagators and the first-order Trotter circuit."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import eigh, eigh_tridiagonal

from .operators import HamiltonianParams, apply_full_h, hamiltonian_matrix

log = logging.getLogger(__name__)

#: Largest Hilbert-space dimension handled by dense eigendecomposition.
EIG_CROSSOVER = 4096

METHODS = ("exact", "exact_eig", "exact_krylov", "trotter")


class NumericalError(RuntimeError):
    pass


@dataclass(frozen=True)
class PropagatorSpec:
    """How to evolve a state.

    ``method="exact"`` picks the eigendecomposition path up to
    ``EIG_CROSSOVER`` and Krylov above it.  ``trotter_steps=None`` with the
    trotter method means "select L automatically".
    """

    method: str = "exact"
    trotter_steps: int | None = None
    krylov_dim: int = 30
    tolerance: float = 1e-10
    auto_tol: float = 1e-3
    strang: bool = False
    coupling: str = "circuit"

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if self.trotter_steps is not None and self.trotter_steps < 1:
            raise ValueError("trotter_steps must be >= 1")
        if self.krylov_dim < 2:
            raise ValueError("krylov_dim must be >= 2")
        if not 0 < self.tolerance < 1:
            raise ValueError("tolerance must lie in (0, 1)")
        if self.coupling not in ("circuit", "direct"):
            raise ValueError(f"unknown coupling implementation {self.coupling!r}")


# --- Trotter pieces ----------------------------------------------------------


def hadamard_all(psi: np.ndarray) -> np.ndarray:
    """Apply a Hadamard gate to every qubit (fast Walsh-Hadamard transform)."""
    k = psi.size.bit_length() - 1
    out = np.asarray(psi, dtype=complex)
    for q in range(k):
        out = out.reshape(1 << q, 2, -1)
        out = np.stack([out[:, 0] + out[:, 1], out[:, 0] - out[:, 1]], axis=1)
    return out.ravel() * 2.0 ** (-k / 2)


def diagonal_step(p: HamiltonianParams, psi: np.ndarray, dt: float) -> np.ndarray:
    return np.exp(-1j * dt * p.diagonal()) * psi


def _coupling_angle(p: HamiltonianParams, dt: float) -> float:
    return p.c * dt * 2.0 ** (p.n / 2)


def coupling_step_circuit(p: HamiltonianParams, psi: np.ndarray, dt: float) -> np.ndarray:
    """``exp(-i c dt sigma_x (x) A)`` as a Hadamard-conjugated controlled phase.

    After Hadamards on every qubit the generator is
    ``c 2**(n/2) Z_probe Z_ancilla |0><0|^n``: a phase conditioned on all
    register qubits being 0, with sign set by probe/ancilla parity.
    """
    theta = _coupling_angle(p, dt)
    rot = hadamard_all(psi).reshape(2, 2, -1)
    same, diff = np.exp(-1j * theta), np.exp(1j * theta)
    rot[0, 0, 0] *= same
    rot[1, 1, 0] *= same
    rot[0, 1, 0] *= diff
    rot[1, 0, 0] *= diff
    return hadamard_all(rot.ravel())


def coupling_step_direct(p: HamiltonianParams, psi: np.ndarray, dt: float) -> np.ndarray:
    """Same unitary from the rank-2 structure: ``(1-P) + P exp(-i theta XX)``."""
    theta = _coupling_angle(p, dt)
    blocks = np.asarray(psi, dtype=complex).reshape(4, -1)
    scale = blocks.shape[1] ** -0.5
    s = blocks.sum(axis=1) * scale
    # XX maps (probe, ancilla) row r = 2*probe + ancilla to 3 - r
    rotated = np.cos(theta) * s - 1j * np.sin(theta) * s[::-1]
    return (blocks + ((rotated - s) * scale)[:, None]).ravel()


def coupling_step(
    p: HamiltonianParams, psi: np.ndarray, dt: float, method: str = "circuit"
) -> np.ndarray:
    if method == "circuit":
        return coupling_step_circuit(p, psi, dt)
    if method == "direct":
        return coupling_step_direct(p, psi, dt)
    raise ValueError(f"unknown coupling method {method!r}")


def propagate_trotter(
    p: HamiltonianParams,
    psi: np.ndarray,
    tau: float,
    L: int,
    strang: bool = False,
    coupling: str = "circuit",
) -> np.ndarray:
    """L repetitions of (diagonal step, then coupling step), each of length tau/L."""
    if tau < 0:
        raise ValueError("tau must be non-negative")
    if L < 1:
        raise ValueError("L must be >= 1")
    psi = np.asarray(psi, dtype=complex)
    if psi.size != p.dim:
        raise ValueError(f"state length {psi.size} != {p.dim}")
    dt = tau / L
    step = coupling_step_circuit if coupling == "circuit" else coupling_step_direct
    diag = p.diagonal()
    if strang:
        half = np.exp(-0.5j * dt * diag)
        for _ in range(L):
            psi = half * step(p, half * psi, dt)
        return psi
    phase = np.exp(-1j * dt * diag)
    for _ in range(L):
        psi = step(p, phase * psi, dt)
    return psi


def probe_decay_probability(psi: np.ndarray) -> float:
    """Probability that the probe qubit reads |0>."""
    half = np.asarray(psi).reshape(2, -1)[0]
    return float(np.vdot(half, half).real)


def select_trotter_steps(
    p: HamiltonianParams,
    psi: np.ndarray,
    tau: float,
    tol: float = 1e-3,
    start: int = 8,
    max_steps: int = 1 << 20,
    strang: bool = False,
    coupling: str = "circuit",
) -> tuple[np.ndarray, int]:
    """Double L until the decay probability moves by less than ``tol``.

    Returns the state at the finer of the two converged step counts and
    that step count.
    """
    L = start
    prev = propagate_trotter(p, psi, tau, L, strang, coupling)
    while True:
        if 2 * L > max_steps:
            raise NumericalError(f"Trotter steps did not converge below L = {max_steps}")
        cur = propagate_trotter(p, psi, tau, 2 * L, strang, coupling)
        delta = abs(probe_decay_probability(cur) - probe_decay_probability(prev))
        L *= 2
        if delta < tol:
            break
        prev = cur
    log.info(
        "auto-selected L = %d (tau = %g, ~%d elementary gates per coupling step)",
        L,
        tau,
        (p.n + 2) ** 2,
    )
    return cur, L


def trotter_convergence(
    p: HamiltonianParams,
    psi: np.ndarray,
    tau: float,
    steps: Sequence[int],
    exact: np.ndarray | None = None,
) -> tuple[np.ndarray, float, float]:
    """Infinity-norm Trotter errors for each L, fitted order and prefactor.

    The fit is ``err ~ C / L**order`` by least squares in log-log space.
    """
    if exact is None:
        exact = propagate_exact(p, psi, tau)
    errors = np.array(
        [np.max(np.abs(propagate_trotter(p, psi, tau, L) - exact)) for L in steps]
    )
    slope, intercept = np.polyfit(np.log(steps), np.log(errors), 1)
    return errors, float(-slope), float(np.exp(intercept))


# --- exact propagators -------------------------------------------------------


class EigenPropagator:
    """Dense Hermitian eigendecomposition of H, reusable across many times."""

    def __init__(self, p: HamiltonianParams):
        if p.dim > EIG_CROSSOVER:
            log.warning("dense eigendecomposition at dimension %d", p.dim)
        self.params = p
        self.energies, self.vectors = eigh(hamiltonian_matrix(p))

    def coefficients(self, psi: np.ndarray) -> np.ndarray:
        return self.vectors.conj().T @ psi

    def evolve(self, psi: np.ndarray, tau: float) -> np.ndarray:
        return self.evolve_coefficients(self.coefficients(psi), tau)

    def evolve_coefficients(self, coeffs: np.ndarray, tau: float) -> np.ndarray:
        return self.vectors @ (np.exp(-1j * self.energies * tau) * coeffs)


def lanczos_basis(
    matvec: Callable[[np.ndarray], np.ndarray], v: np.ndarray, m: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray, float]:
    """Orthonormal Krylov basis with full reorthogonalization.

    Returns (basis, alpha, beta, beta_next); beta_next is the residual norm
    after the last vector, zero on an invariant subspace.
    """
    norm0 = np.linalg.norm(v)
    basis = np.zeros((v.size, m), dtype=complex)
    alpha = np.zeros(m)
    beta = np.zeros(m)
    basis[:, 0] = v / norm0
    k = m
    for j in range(m):
        w = matvec(basis[:, j])
        alpha[j] = np.vdot(basis[:, j], w).real
        w = w - basis[:, : j + 1] @ (basis[:, : j + 1].conj().T @ w)
        w = w - basis[:, : j + 1] @ (basis[:, : j + 1].conj().T @ w)
        b = np.linalg.norm(w)
        beta[j] = b
        if b < 1e-12 * max(1.0, abs(alpha[j])):
            k = j + 1
            beta[j] = 0.0
            break
        if j + 1 < m:
            basis[:, j + 1] = w / b
    return basis[:, :k], alpha[:k], beta[: k - 1], beta[k - 1]


def propagate_krylov(
    p: HamiltonianParams,
    psi: np.ndarray,
    tau: float,
    krylov_dim: int = 30,
    tolerance: float = 1e-10,
    max_restarts: int = 1_000_000,
) -> np.ndarray:
    """Restarted Lanczos exponential using only ``apply_full_h``.

    Each restart takes the longest sub-step (halving from the remaining
    time) whose a-posteriori error estimate stays below ``tolerance``.
    """
    if tau < 0:
        raise ValueError("tau must be non-negative")
    psi = np.asarray(psi, dtype=complex).copy()
    remaining = float(tau)
    matvec = lambda x: apply_full_h(p, x)  # noqa: E731
    dt_hint = remaining
    for restart in range(max_restarts):
        if remaining <= 0:
            return psi
        norm0 = np.linalg.norm(psi)
        basis, alpha, beta, beta_next = lanczos_basis(matvec, psi, min(krylov_dim, psi.size))
        if alpha.size == 1:
            lam, vec = alpha, np.ones((1, 1))
        else:
            lam, vec = eigh_tridiagonal(alpha, beta)
        dt = min(remaining, 2 * dt_hint)
        while True:
            small = vec @ (np.exp(-1j * lam * dt) * vec[0].conj())
            err = norm0 * beta_next * abs(small[-1])
            if err <= tolerance or beta_next == 0.0:
                break
            dt *= 0.5
            if dt < 1e-14 * max(1.0, tau):
                raise NumericalError(
                    f"Krylov step collapsed at t = {tau - remaining:g}; residual {err:.3e}"
                )
        psi = norm0 * (basis @ small)
        remaining -= dt
        dt_hint = dt
    raise NumericalError(
        f"Krylov propagation exceeded {max_restarts} restarts; {remaining:g} time left"
    )


def propagate_exact(
    p: HamiltonianParams,
    psi: np.ndarray,
    tau: float,
    spec: PropagatorSpec | None = None,
) -> np.ndarray:
    """``exp(-i H tau) psi`` by eigendecomposition or Krylov, depending on size."""
    spec = spec or PropagatorSpec()
    if tau < 0:
        raise ValueError("tau must be non-negative")
    if tau == 0:
        return np.array(psi, dtype=complex)
    method = spec.method
    if method in ("exact", "trotter"):
        method = "exact_eig" if p.dim <= EIG_CROSSOVER else "exact_krylov"
    if method == "exact_eig":
        return EigenPropagator(p).evolve(np.asarray(psi, dtype=complex), tau)
    return propagate_krylov(p, psi, tau, spec.krylov_dim, spec.tolerance)


class Propagator:
    """Evolves a fixed initial state to many times under one PropagatorSpec.

    The eigendecomposition (when used) is computed once and shared, so
    sweeps over ``tau`` cost one diagonalization.
    """

    def __init__(self, p: HamiltonianParams, spec: PropagatorSpec | None = None):
        self.params = p
        self.spec = spec or PropagatorSpec()
        method = self.spec.method
        if method == "exact":
            method = "exact_eig" if p.dim <= EIG_CROSSOVER else "exact_krylov"
        self.method = method
        self._eig = EigenPropagator(p) if method == "exact_eig" else None

    def bind(self, psi: np.ndarray) -> Callable[[float], tuple[np.ndarray, int | None]]:
        """Fix the initial state; the eigenbasis overlap is computed once."""
        psi = np.array(psi, dtype=complex)
        if self._eig is None:
            return lambda tau: self(psi, tau)
        coeffs = self._eig.coefficients(psi)

        def evolve(tau: float) -> tuple[np.ndarray, int | None]:
            if tau < 0:
                raise ValueError("tau must be non-negative")
            if tau == 0:
                return psi.copy(), None
            return self._eig.evolve_coefficients(coeffs, tau), None

        return evolve

    def __call__(self, psi: np.ndarray, tau: float) -> tuple[np.ndarray, int | None]:
        if tau < 0:
            raise ValueError("tau must be non-negative")
        s = self.spec
        if tau == 0:
            return np.array(psi, dtype=complex), (s.trotter_steps if self.method == "trotter" else None)
        if self.method == "exact_eig":
            return self._eig.evolve(psi, tau), None
        if self.method == "exact_krylov":
            return propagate_krylov(self.params, psi, tau, s.krylov_dim, s.tolerance), None
        if s.trotter_steps is not None:
            out = propagate_trotter(self.params, psi, tau, s.trotter_steps, s.strang, s.coupling)
            return out, s.trotter_steps
        return select_trotter_steps(
            self.params, psi, tau, tol=s.auto_tol, strang=s.strang, coupling=s.coupling
        )
