"""Dense linear-algebra kernel used by every other module.

All routines are deterministic, pure functions on plain ndarrays.  The
factorization routes are fixed by design: Householder QR for
orthonormalization and least squares (never normal equations), thin SVD
for the orthogonal Procrustes factor.  Sampled submatrices near the gate
boundary can be poorly conditioned, which is why QR/SVD routes are used
throughout.
"""
from __future__ import annotations

import numpy as np
from scipy.linalg import solve_triangular

# Default tolerances: 100-1000x double eps, scaled by dimension where the
# contract says so.  Callers may override per call.
ORTHO_TOL = 1e-12
SYM_TOL = 1e-12
RANK_RTOL = 1e-13


class NumericalError(ValueError):
    """A numerically singular or degenerate input reached a kernel routine."""


def _as_matrix(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError("shape: expected a 2-d matrix with positive dimensions")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    return a


def _as_vector(b) -> np.ndarray:
    b = np.asarray(b, dtype=float)
    if b.ndim != 1 or b.shape[0] < 1:
        raise ValueError("shape: expected a 1-d vector with positive length")
    if not np.all(np.isfinite(b)):
        raise ValueError("vector entries must be finite")
    return b


def orthonormalize(a, *, rank_rtol: float = RANK_RTOL) -> np.ndarray:
    """Return Q with orthonormal columns and range(Q) = range(a).

    Householder QR route.  Raises ``ValueError("shape")`` when the input is
    wider than tall and ``NumericalError("rank deficient")`` when a column
    is numerically dependent on the others.
    """
    a = _as_matrix(a)
    n, d = a.shape
    if n < d:
        raise ValueError("shape: need rows >= cols to orthonormalize columns")
    q, r = np.linalg.qr(a)
    diag = np.abs(np.diag(r))
    if diag.min() <= rank_rtol * max(diag.max(), np.finfo(float).tiny):
        raise NumericalError("rank deficient")
    return q


def least_squares(c, b, *, rank_rtol: float = RANK_RTOL) -> np.ndarray:
    """Minimize ||c w - b||_2 via Householder QR of c (not normal equations)."""
    c = _as_matrix(c)
    b = _as_vector(b)
    m, d = c.shape
    if b.shape[0] != m:
        raise ValueError("shape: rhs length must match row count")
    if m < d:
        raise NumericalError("singular normal equations")
    q, r = np.linalg.qr(c)
    diag = np.abs(np.diag(r))
    if diag.min() <= rank_rtol * max(diag.max(), np.finfo(float).tiny):
        raise NumericalError("singular normal equations")
    return solve_triangular(r, q.T @ b)


def singular_values(a) -> np.ndarray:
    """Singular values of a, sorted descending (all nonnegative)."""
    a = _as_matrix(a)
    return np.linalg.svd(a, compute_uv=False)


def nearest_orthogonal(a, *, rank_rtol: float = RANK_RTOL) -> np.ndarray:
    """Orthogonal matrix minimizing ||a - V||_F (polar factor via thin SVD).

    Defined for square nonsingular a; the zero-singular-value case has no
    unique minimizer and raises ``NumericalError("singular alignment")``.
    """
    a = _as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ValueError("shape: expected a square matrix")
    u, s, vt = np.linalg.svd(a)
    if s.min() <= rank_rtol * max(s.max(), np.finfo(float).tiny):
        raise NumericalError("singular alignment")
    return u @ vt


def sym_eigenvalues(g, *, sym_tol: float = SYM_TOL) -> np.ndarray:
    """Eigenvalues of a symmetric matrix, sorted descending."""
    g = _as_matrix(g)
    if g.shape[0] != g.shape[1]:
        raise ValueError("shape: expected a square matrix")
    scale = max(1.0, float(np.abs(g).max()))
    if np.abs(g - g.T).max() > sym_tol * scale:
        raise ValueError("not symmetric")
    return np.linalg.eigvalsh(g)[::-1]
