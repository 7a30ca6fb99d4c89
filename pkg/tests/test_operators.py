import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ec3probe import dense
from ec3probe.ec3_core import EC3Instance, brute_force_solve, build_hp_diagonal
from ec3probe.operators import (
    HamiltonianParams,
    apply_excitation,
    apply_full_h,
    build_htilde,
    excitation_matrix_element,
    hamiltonian_matrix,
    make_params,
    prepare_reference,
    reference_register,
)
from conftest import QUOTED_CASES


def _rand(rng, dim):
    return rng.normal(size=dim) + 1j * rng.normal(size=dim)


def small_instance(n, seed=0):
    rng = np.random.default_rng(seed)
    clauses = tuple(tuple(int(x) + 1 for x in rng.choice(n, 3, replace=False)) for _ in range(n))
    return EC3Instance(n, clauses)


def test_htilde_single_clause():
    ht = build_htilde(EC3Instance(3, ((1, 2, 3),)))
    assert ht.values.tolist() == [-1.0] * 8 + [1, 0, 0, 1, 0, 1, 1, 1]


def test_htilde_case_i_unique_zero(case_i):
    ht = build_htilde(case_i)
    assert np.all(ht.values[:256] == -1)
    assert np.flatnonzero(ht.problem_block == 0).tolist() == [23]
    assert ht.values[256 + 23] == 0


@pytest.mark.parametrize("seed", range(5))
def test_htilde_minimum_matches_oracle(seed):
    inst = small_instance(5, seed)
    assert build_htilde(inst).problem_block.min() == brute_force_solve(inst).min_energy


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_sum_form_equals_tensor_form(n):
    assert np.abs(dense.excitation_sum_form(n) - dense.excitation_tensor_form(n)).max() < 1e-12


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_excitation_hermitian(n):
    a = dense.excitation_tensor_form(n)
    assert np.abs(a - a.conj().T).max() < 1e-12


def test_excitation_n2_on_basis_state():
    # A|0,00> from the 8x8 sum-form matrix: uniform over |1,zz>, amplitude 1/2 each
    v = np.zeros(8, dtype=complex)
    v[0] = 1
    expected = dense.excitation_sum_form(2) @ v
    assert np.allclose(expected, [0, 0, 0, 0, 0.5, 0.5, 0.5, 0.5])
    assert np.allclose(apply_excitation(v), expected)
    assert np.linalg.norm(apply_excitation(v)) == pytest.approx(1.0)


@pytest.mark.parametrize("n", range(1, 11))
def test_excitation_amplifies_reference(n):
    v = reference_register(n)
    out = apply_excitation(v)
    N = 2**n
    assert np.linalg.norm(out) == pytest.approx(2 ** (n / 2), rel=1e-12)
    assert np.allclose(out[N:], 1.0)  # 2**(n/2) |1>|+...+>
    assert np.allclose(out[:N], 0.0)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_excitation_matches_dense(n):
    rng = np.random.default_rng(n)
    v = _rand(rng, 2 ** (n + 1))
    assert np.abs(apply_excitation(v) - dense.excitation_tensor_form(n) @ v).max() < 1e-12


def test_excitation_shape_error():
    with pytest.raises(ValueError):
        apply_excitation(np.ones(6))
    with pytest.raises(ValueError):
        apply_excitation(np.ones(8), n=3)


@pytest.mark.parametrize("name", sorted(QUOTED_CASES))
def test_matrix_element_sqrt_m(name, request):
    inst = request.getfixturevalue(name)
    solutions = brute_force_solve(inst).minimizers
    m = len(solutions)
    elem = excitation_matrix_element(inst.n, solutions)
    assert abs(elem) == pytest.approx(np.sqrt(m), abs=1e-12)


def test_reference_state():
    psi = prepare_reference(3)
    nz = np.flatnonzero(psi)
    # probe = 1, ancilla = 0 -> indices 16..23
    assert nz.tolist() == list(range(16, 24))
    assert np.allclose(psi[nz], 1 / np.sqrt(8))
    assert np.linalg.norm(psi) == pytest.approx(1.0)


def test_reference_is_htilde_eigenstate(case_i):
    reg = reference_register(8)
    ht = build_htilde(case_i).values
    assert np.vdot(reg, ht * reg).real == pytest.approx(-1.0)
    assert np.allclose(ht * reg, -reg)


def test_probe_sign_convention_on_reference(case_i):
    p = make_params(case_i, omega=1.0)
    psi = prepare_reference(8)
    diag_part = p.diagonal() * psi
    # probe |1> contributes +omega/2, reference block -1
    assert np.allclose(diag_part, -0.5 * psi)


@pytest.mark.parametrize("n", [3, 4])
def test_full_h_matches_dense(n):
    inst = small_instance(n, seed=n)
    rng = np.random.default_rng(11)
    p = make_params(inst, omega=1.3, c=0.07)
    h = dense.full_hamiltonian(1.3, 0.07, build_hp_diagonal(inst).astype(float))
    psi = _rand(rng, p.dim)
    assert np.abs(apply_full_h(p, psi) - h @ psi).max() < 1e-12
    assert np.abs(hamiltonian_matrix(p) - h).max() < 1e-14


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_full_h_hermitian(n):
    inst = small_instance(n, seed=2 * n)
    p = make_params(inst, omega=0.8, c=0.1)
    rng = np.random.default_rng(n)
    u, v = _rand(rng, p.dim), _rand(rng, p.dim)
    lhs = np.vdot(u, apply_full_h(p, v))
    rhs = np.conj(np.vdot(v, apply_full_h(p, u)))
    assert abs(lhs - rhs) < 1e-12 * max(1.0, abs(lhs))


@settings(max_examples=30, deadline=None)
@given(
    st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
    st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
    st.integers(0, 2**31 - 1),
)
def test_full_h_linear(alpha, beta, seed):
    p = make_params(small_instance(4, 1), omega=1.0, c=0.002)
    rng = np.random.default_rng(seed)
    u, v = _rand(rng, p.dim), _rand(rng, p.dim)
    lhs = apply_full_h(p, alpha * u + beta * v)
    rhs = alpha * apply_full_h(p, u) + beta * apply_full_h(p, v)
    assert np.abs(lhs - rhs).max() < 1e-12 * max(1.0, np.abs(lhs).max())


def test_params_validation(case_i):
    ht = build_htilde(case_i)
    with pytest.raises(ValueError):
        HamiltonianParams(omega=0.0, c=0.002, htilde=ht)
    with pytest.raises(ValueError):
        HamiltonianParams(omega=1.0, c=-1.0, htilde=ht)
    with pytest.raises(ValueError):
        apply_full_h(make_params(case_i), np.ones(16))
