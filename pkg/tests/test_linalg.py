import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from grouse.linalg import (
    NumericalError,
    least_squares,
    nearest_orthogonal,
    orthonormalize,
    singular_values,
    sym_eigenvalues,
)


def test_orthonormalize_identity():
    q = orthonormalize(np.eye(3))
    assert np.allclose(np.abs(q), np.eye(3), atol=1e-14)
    assert np.linalg.norm(q.T @ q - np.eye(3)) <= 1e-12


def test_orthonormalize_column_scaling():
    a = np.array([[2.0, 0.0], [0.0, 3.0], [0.0, 0.0]])
    q = orthonormalize(a)
    assert np.allclose(np.abs(q), np.array([[1, 0], [0, 1], [0, 0]]), atol=1e-14)


def test_orthonormalize_matches_normal_equations_projector():
    rng = np.random.default_rng(50)
    a = rng.standard_normal((50, 4))
    q = orthonormalize(a)
    assert np.linalg.norm(q.T @ q - np.eye(4)) < 1e-12
    # independent oracle: projector from the normal equations
    proj = a @ np.linalg.solve(a.T @ a, a.T)
    assert np.linalg.norm(proj - q @ q.T) < 1e-10


def test_orthonormalize_errors():
    with pytest.raises(NumericalError, match="rank deficient"):
        orthonormalize(np.array([[1.0, 2.0], [2.0, 4.0], [3.0, 6.0]]))
    with pytest.raises(ValueError, match="shape"):
        orthonormalize(np.ones((2, 3)))
    with pytest.raises(ValueError):
        orthonormalize(np.array([[np.nan, 0.0], [0.0, 1.0], [1.0, 0.0]]))


def test_least_squares_identity_design():
    w = least_squares(np.eye(2), np.array([3.0, 4.0]))
    assert np.allclose(w, [3.0, 4.0], atol=1e-14)


def test_least_squares_mean_of_two_points():
    w = least_squares(np.array([[1.0], [1.0]]), np.array([1.0, 3.0]))
    assert np.allclose(w, [2.0], atol=1e-14)


def test_least_squares_exact_fit_recovery():
    rng = np.random.default_rng(51)
    c = rng.standard_normal((30, 3))
    truth = np.array([1.0, -2.0, 5.0])
    w = least_squares(c, c @ truth)
    assert np.linalg.norm(w - truth) < 1e-10


def test_least_squares_residual_orthogonality():
    rng = np.random.default_rng(52)
    for k in range(10):
        c = rng.standard_normal((25, 4))
        b = rng.standard_normal(25)
        w = least_squares(c, b)
        resid = c @ w - b
        bound = 1e-10 * np.linalg.norm(c, 2) * np.linalg.norm(b)
        assert np.abs(c.T @ resid).max() <= bound


def test_least_squares_singular():
    c = np.array([[1.0, 1.0], [2.0, 2.0], [3.0, 3.0]])
    with pytest.raises(NumericalError, match="singular normal equations"):
        least_squares(c, np.array([1.0, 2.0, 3.0]))


def test_singular_values_diag_and_zero():
    assert np.allclose(singular_values(np.diag([3.0, 1.0])), [3.0, 1.0])
    assert np.allclose(singular_values(np.zeros((4, 2))), 0.0)


def test_singular_values_match_gram_eigenvalues():
    rng = np.random.default_rng(53)
    a = rng.standard_normal((6, 3))
    sv = singular_values(a)
    assert np.all(np.diff(sv) <= 0) and np.all(sv >= 0)
    gram_eigs = sym_eigenvalues(a.T @ a)
    assert np.allclose(sv**2, gram_eigs, rtol=1e-9, atol=1e-12)
    # squares sum to the squared Frobenius norm
    assert np.isclose(np.sum(sv**2), np.sum(a * a), rtol=1e-10)


def test_nearest_orthogonal_fixed_points():
    rng = np.random.default_rng(54)
    v = orthonormalize(rng.standard_normal((3, 3)))
    assert np.allclose(nearest_orthogonal(v), v, atol=1e-13)
    assert np.allclose(nearest_orthogonal(2.0 * np.eye(3)), np.eye(3), atol=1e-14)


def test_nearest_orthogonal_recovers_rotation():
    c, s = np.cos(0.3), np.sin(0.3)
    rot = np.array([[c, -s], [s, c]])
    out = nearest_orthogonal(rot @ np.diag([1.0, 0.9]))
    assert np.allclose(out, rot, atol=1e-12)


def test_nearest_orthogonal_spd_invariance():
    rng = np.random.default_rng(55)
    for k in range(6):
        v = orthonormalize(rng.standard_normal((4, 4)))
        b = rng.standard_normal((4, 4))
        spd = b @ b.T + 4.0 * np.eye(4)
        assert np.allclose(nearest_orthogonal(v @ spd), v, atol=1e-9)


def test_nearest_orthogonal_errors():
    with pytest.raises(NumericalError, match="singular alignment"):
        nearest_orthogonal(np.array([[1.0, 0.0], [0.0, 0.0]]))
    with pytest.raises(ValueError, match="shape"):
        nearest_orthogonal(np.ones((3, 2)))


def test_sym_eigenvalues_basics():
    assert np.allclose(sym_eigenvalues(np.diag([5.0, 2.0, 2.0])), [5.0, 2.0, 2.0])
    assert np.allclose(sym_eigenvalues(np.eye(4)), 1.0)
    g = np.diag([1.0, 2.0, 3.0])
    assert np.isclose(np.sum(sym_eigenvalues(g)), np.trace(g), rtol=1e-10)


def test_sym_eigenvalues_rejects_asymmetric():
    with pytest.raises(ValueError, match="not symmetric"):
        sym_eigenvalues(np.array([[1.0, 2.0], [0.0, 1.0]]))


@settings(max_examples=25, deadline=None, derandomize=True)
@given(
    seed=st.integers(0, 10_000),
    m=st.integers(2, 12),
    k=st.integers(1, 6),
)
def test_property_singular_values_square_to_gram_spectrum(seed, m, k):
    k = min(k, m)
    a = np.random.default_rng(seed).standard_normal((m, k))
    sv = singular_values(a)
    gram = a.T @ a
    eigs = sym_eigenvalues(gram) if k > 1 else gram.ravel()
    scale = max(1.0, eigs[0])
    assert np.all(np.abs(sv**2 - eigs) <= 1e-9 * scale)


@settings(max_examples=25, deadline=None, derandomize=True)
@given(seed=st.integers(0, 10_000), n=st.integers(2, 20), d=st.integers(1, 6))
def test_property_orthonormalize_contract(seed, n, d):
    d = min(d, n)
    a = np.random.default_rng(seed).standard_normal((n, d))
    q = orthonormalize(a)
    assert np.linalg.norm(q.T @ q - np.eye(d)) <= 1e-12
