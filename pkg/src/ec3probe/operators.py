"""Matrix-free Hamiltonian actions on the (probe, ancilla, register) state.

State vectors have length ``2**(n+2)``; qubit significance runs probe,
ancilla, z1, ..., zn, so an amplitude array reshapes to ``(2, 2, 2**n)``.

The probe term uses ``sigma_z|1> = +|1>``: the probe's excited state is
``|1>`` and a decay ``|1>|ref> -> |0>|excited>`` conserves energy exactly when
``omega`` equals the register transition energy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ec3_core import MAX_BITS, Assignment, EC3Instance, build_hp_diagonal

#: Energy of the ancilla-0 ("reference") block of the register Hamiltonian.
REFERENCE_ENERGY = -1.0


@dataclass(frozen=True, eq=False)
class HtildeDiagonal:
    """Diagonal of the block register Hamiltonian ``diag(-I_N, H_P)``."""

    values: np.ndarray
    n: int

    @property
    def problem_block(self) -> np.ndarray:
        return self.values[1 << self.n :]


@dataclass(frozen=True, eq=False)
class HamiltonianParams:
    omega: float
    c: float
    htilde: HtildeDiagonal

    def __post_init__(self) -> None:
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        if not self.c > 0:
            raise ValueError(f"c must be positive, got {self.c}")

    @property
    def n(self) -> int:
        return self.htilde.n

    @property
    def dim(self) -> int:
        return 1 << (self.n + 2)

    def probe_energies(self) -> np.ndarray:
        """Probe-term eigenvalues for probe bit 0 and 1."""
        return np.array([-0.5 * self.omega, 0.5 * self.omega])

    def diagonal(self) -> np.ndarray:
        """Diagonal (probe + register) part of H over the full basis."""
        return (self.probe_energies()[:, None] + self.htilde.values[None, :]).ravel()


def build_htilde(inst: EC3Instance, max_bits: int = MAX_BITS) -> HtildeDiagonal:
    hp = build_hp_diagonal(inst, max_bits=max_bits).astype(float)
    values = np.concatenate([np.full(hp.size, REFERENCE_ENERGY), hp])
    return HtildeDiagonal(values=values, n=inst.n)


def make_params(inst: EC3Instance, omega: float = 1.0, c: float = 0.002) -> HamiltonianParams:
    return HamiltonianParams(omega=omega, c=c, htilde=build_htilde(inst))


def _register_size(length: int) -> int:
    k = length.bit_length() - 1
    if length <= 0 or (1 << k) != length:
        raise ValueError(f"vector length {length} is not a power of two")
    return k


def apply_excitation(v: np.ndarray, n: int | None = None) -> np.ndarray:
    """Apply the excitation operator A to an (ancilla, register) vector.

    ``(I + sigma_x)/sqrt(2)`` equals ``sqrt(2)|+><+|``, so
    ``A = 2**(n/2) sigma_x(ancilla) (x) |+><+|^n``: each ancilla block is
    summed and the (scaled) sum is spread uniformly over the other block.
    """
    v = np.asarray(v)
    k = _register_size(v.size) - 1
    if n is not None and k != n:
        raise ValueError(f"expected length {1 << (n + 1)}, got {v.size}")
    blocks = v.reshape(2, 1 << k)
    s = blocks.sum(axis=1) * 2.0 ** (-k / 2)
    out = np.empty(blocks.shape, dtype=np.result_type(v.dtype, np.complex128))
    out[0, :] = s[1]
    out[1, :] = s[0]
    return out.ravel()


def apply_full_h(p: HamiltonianParams, psi: np.ndarray) -> np.ndarray:
    """Return ``H @ psi`` without forming H."""
    psi = np.asarray(psi)
    if psi.size != p.dim:
        raise ValueError(f"state length {psi.size} != 2**(n+2) = {p.dim}")
    out = p.diagonal() * psi
    halves = psi.reshape(2, -1)
    coupled = np.empty_like(halves, dtype=complex)
    coupled[0] = apply_excitation(halves[1])
    coupled[1] = apply_excitation(halves[0])
    return out + p.c * coupled.ravel()


def hamiltonian_matrix(p: HamiltonianParams) -> np.ndarray:
    """Dense H built from the block structure (used by the eigen propagator)."""
    n, dim = p.n, p.dim
    N = 1 << n
    h = np.diag(p.diagonal()).astype(complex)
    amp = p.c * 2.0 ** (-n / 2)
    # probe flip (x) ancilla flip (x) all-ones register block
    for probe in (0, 1):
        for anc in (0, 1):
            r0 = (probe << (n + 1)) | (anc << n)
            c0 = ((1 - probe) << (n + 1)) | ((1 - anc) << n)
            h[r0 : r0 + N, c0 : c0 + N] += amp
    assert h.shape == (dim, dim)
    return h


def prepare_reference(n: int) -> np.ndarray:
    """Probe in |1>, ancilla in |0>, register in the uniform superposition."""
    if n < 3:
        raise ValueError(f"n must be at least 3, got {n}")
    N = 1 << n
    psi = np.zeros(4 * N, dtype=complex)
    psi[2 * N : 3 * N] = N ** -0.5
    return psi


def reference_register(n: int) -> np.ndarray:
    """Reference state of the (ancilla, register) part alone."""
    N = 1 << n
    v = np.zeros(2 * N, dtype=complex)
    v[:N] = N ** -0.5
    return v


def solution_register(n: int, solutions: list[Assignment]) -> np.ndarray:
    """Uniform superposition of ``|1>|mu_i>`` over the given assignments."""
    N = 1 << n
    v = np.zeros(2 * N, dtype=complex)
    for a in solutions:
        v[N + a.index] = 1.0
    return v / np.sqrt(len(solutions))


def excitation_matrix_element(n: int, solutions: list[Assignment]) -> complex:
    """``<Psi_1|A|Psi_0>`` for the solution superposition ``Psi_1``."""
    if not solutions:
        raise ValueError("no satisfying assignments; matrix element undefined")
    return complex(np.vdot(solution_register(n, solutions), apply_excitation(reference_register(n))))
