import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st

from pseudobosons.errors import DimensionError, ExpOverflowError
from pseudobosons.fock import (UNIT_ROUNDOFF, adjoint, commutator, identity, make_ladder_pair,
                               op_exp, position_operators, window_residual)


def test_ladder_d2():
    a, ad = make_ladder_pair(2)
    np.testing.assert_array_equal(a, [[0, 1], [0, 0]])
    np.testing.assert_array_equal(ad, [[0, 0], [1, 0]])


def test_ladder_matrix_element():
    a, _ = make_ladder_pair(4)
    assert a[2, 3] == math.sqrt(3)


@pytest.mark.parametrize("D", [0, 1, 2.5])
def test_ladder_rejects_bad_dimension(D):
    with pytest.raises(DimensionError):
        make_ladder_pair(D)


def test_commutator_truncation_edge():
    a, ad = make_ladder_pair(8)
    expected = np.eye(8)
    expected[7, 7] = -7
    np.testing.assert_allclose(commutator(a, ad), expected, atol=1e-14)


@pytest.mark.parametrize("D", [3, 17, 128])
def test_commutator_interior_is_exact_identity(D):
    a, ad = make_ladder_pair(D)
    c = commutator(a, ad)
    np.testing.assert_allclose(c[:-1, :-1], np.eye(D - 1), atol=4 * D * UNIT_ROUNDOFF)


def test_self_commutator_vanishes():
    a, ad = make_ladder_pair(6)
    X = a @ ad + 2j * a
    assert not np.any(commutator(X, X))


def test_commutator_shape_mismatch():
    with pytest.raises(DimensionError):
        commutator(identity(3), identity(4))


def test_shifted_pair_commutator():
    a, ad = make_ladder_pair(64)
    A = a - 0.5 * identity(64)
    B = ad + 0.5 * identity(64)
    assert window_residual(commutator(A, B), 1.0, 32) < 1e-12


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 12), st.integers(0, 2 ** 31 - 1))
def test_adjoint_involution(D, seed):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(D, D)) + 1j * rng.normal(size=(D, D))
    np.testing.assert_array_equal(adjoint(adjoint(X)), X)


def test_exp_zero():
    np.testing.assert_array_equal(op_exp(np.zeros((5, 5))), np.eye(5))


def test_exp_diagonal():
    X = np.diag([0.0, math.log(2), math.log(3)])
    np.testing.assert_allclose(op_exp(X), np.diag([1.0, 2.0, 3.0]), rtol=1e-15, atol=1e-15)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 10), st.floats(0.01, 30.0), st.integers(0, 2 ** 31 - 1))
def test_exp_matches_scipy(D, scale, seed):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(D, D)) + 1j * rng.normal(size=(D, D))
    X *= scale / np.abs(X).sum(axis=0).max()
    ref = scipy.linalg.expm(X)
    err = np.abs(op_exp(X) - ref).max() / np.abs(ref).max()
    assert err < 1e-12


def test_exp_of_hermitian_is_hermitian():
    a, ad = make_ladder_pair(64)
    E = op_exp((a + ad) / 2)
    assert window_residual(E, E.conj().T, 32) < UNIT_ROUNDOFF * np.abs(E).max()


def test_exp_of_antihermitian_is_unitary():
    a, ad = make_ladder_pair(64)
    U = op_exp(0.3 * (a @ a - ad @ ad))
    assert window_residual(U @ U.conj().T, 1.0, 32) < 100 * UNIT_ROUNDOFF * 64


def test_exp_inverse_on_window():
    a, ad = make_ladder_pair(64)
    G = (a + ad) / 2
    assert window_residual(op_exp(G) @ op_exp(-G), 1.0, 32) < 1e-10


def test_exp_overflow_names_scale():
    X = np.diag([800.0, 0.0]) + 0j
    with pytest.raises(ExpOverflowError, match=r"2\*\*-"):
        op_exp(X)


def test_exp_rejects_nonfinite():
    with pytest.raises(DimensionError):
        op_exp(np.array([[np.nan, 0], [0, 0]]))


def test_window_residual_zero():
    X = np.arange(16.0).reshape(4, 4)
    assert window_residual(X, X, 2) == 0


def test_window_residual_single_perturbation():
    X = np.eye(10, dtype=complex)
    E = np.zeros_like(X)
    E[4, 4] = 1e-3
    assert window_residual(X + E, X, 5) == pytest.approx(1e-3, rel=1e-12)


def test_window_residual_ignores_outside():
    X = np.eye(10)
    E = np.zeros_like(X)
    E[9, 9] = 5.0
    assert window_residual(X + E, X, 9) == 0


def test_window_residual_scalar_means_multiple_of_identity():
    assert window_residual(2 * np.eye(6), 2.0, 6) == 0


def test_window_larger_than_dimension():
    with pytest.raises(DimensionError):
        window_residual(np.eye(4), 0.0, 5)


def test_position_operators_canonical():
    x, p = position_operators(40)
    assert window_residual(commutator(x, p), 1j, 39) < 1e-13


@pytest.mark.xfail(strict=True, reason="rounding grows with |W| |W^-1|; see decisions ledger")
@pytest.mark.parametrize("D", [128, 256])
def test_exp_inverse_full_range_at_100_roundoff(D):
    a, ad = make_ladder_pair(D)
    gens = [(a + ad) / b for b in (1.0, 1.5, 2.0, 3.0)]
    gens += [0.5j * t * (a @ a - ad @ ad) for t in (math.pi / 8, math.pi / 6, math.pi / 5)]
    worst = max(window_residual(op_exp(G) @ op_exp(-G), 1.0, D // 2) for G in gens)
    assert worst < 100 * UNIT_ROUNDOFF
