"""Kronecker-product assembly of the same operators, for small-n cross checks.

Nothing here shares code with the matrix-free routines in ``operators`` or
``evolution``; it is the reference those are checked against.
"""

from __future__ import annotations

import itertools
from functools import reduce

import numpy as np

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
# sigma_z with |1> as the +1 eigenstate (probe convention)
SZ_PROBE = np.diag([-1.0, 1.0]).astype(complex)

DENSE_MAX_BITS = 8


def kron_all(mats) -> np.ndarray:
    return reduce(np.kron, mats)


def _guard(n: int, limit: int = DENSE_MAX_BITS) -> None:
    if n > limit:
        raise ValueError(f"dense assembly refused for n = {n} > {limit}")


def excitation_sum_form(n: int) -> np.ndarray:
    """A as (1/sqrt(N)) * sum of sigma_x(ancilla) (x) every sigma_x/identity string."""
    _guard(n)
    terms = [
        kron_all([SX] + [SX if flip else I2 for flip in pattern])
        for pattern in itertools.product((0, 1), repeat=n)
    ]
    return sum(terms) / np.sqrt(2**n)


def excitation_tensor_form(n: int) -> np.ndarray:
    """A as sigma_x (x) [(I + sigma_x)/sqrt(2)]^(x)n."""
    _guard(n)
    return kron_all([SX] + [(I2 + SX) / np.sqrt(2)] * n)


def register_hamiltonian(hp_diag: np.ndarray) -> np.ndarray:
    N = hp_diag.size
    h = np.zeros((2 * N, 2 * N), dtype=complex)
    h[:N, :N] = -np.eye(N)
    h[N:, N:] = np.diag(hp_diag)
    return h


def full_hamiltonian(omega: float, c: float, hp_diag: np.ndarray) -> np.ndarray:
    n = int(np.log2(hp_diag.size))
    _guard(n)
    dim_reg = 2 * hp_diag.size
    return (
        0.5 * omega * np.kron(SZ_PROBE, np.eye(dim_reg))
        + np.kron(I2, register_hamiltonian(hp_diag))
        + c * np.kron(SX, excitation_tensor_form(n))
    )


def coupling_generator(c: float, n: int) -> np.ndarray:
    return c * np.kron(SX, excitation_tensor_form(n))


def diagonal_generator(omega: float, hp_diag: np.ndarray) -> np.ndarray:
    dim_reg = 2 * hp_diag.size
    return 0.5 * omega * np.kron(SZ_PROBE, np.eye(dim_reg)) + np.kron(
        I2, register_hamiltonian(hp_diag)
    )
