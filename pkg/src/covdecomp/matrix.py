"""Dense symmetric-matrix helpers.

Matrices are plain ``float64`` NumPy arrays. :func:`as_symmetric` is the
single validation point; every public routine that takes a matrix runs its
input through it.
"""
from pathlib import Path

import numpy as np
from scipy.linalg import lapack

from .errors import InvalidInput, NoConvergence, NotPositiveDefinite

PIVOT_TOL = 1e-12
SYMMETRY_TOL = 1e-9


def as_symmetric(m, tol=SYMMETRY_TOL):
    """Return a float64 copy of ``m`` after checking it is square and symmetric.

    Entries that disagree with their transpose by at most ``tol`` are
    averaged so the result is exactly symmetric. Larger asymmetry is an error.
    """
    a = np.array(m, dtype=float, copy=True)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise InvalidInput(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidInput("matrix has non-finite entries")
    asym = np.max(np.abs(a - a.T))
    if asym > tol:
        raise InvalidInput(f"matrix is not symmetric (max |m - m.T| = {asym:.3g})")
    if asym > 0:
        a = 0.5 * (a + a.T)
    return a


def cholesky(m):
    """Lower-triangular ``L`` with ``m = L @ L.T``.

    Raises
    ------
    NotPositiveDefinite
        If LAPACK rejects the matrix or any pivot ``L[k, k]**2`` is at most
        ``PIVOT_TOL``.
    """
    a = as_symmetric(m)
    return _cholesky_unchecked(a)


def _cholesky_unchecked(a):
    c, info = lapack.dpotrf(a, lower=1, clean=1, overwrite_a=0)
    if info != 0:
        raise NotPositiveDefinite(f"matrix is not positive definite (LAPACK pivot {info})")
    pivots = np.diag(c) ** 2
    if pivots.min() <= PIVOT_TOL:
        raise NotPositiveDefinite(f"pivot {pivots.min():.3g} below tolerance {PIVOT_TOL}")
    return c


def inverse_spd(m):
    """Inverse of a symmetric positive definite matrix via its Cholesky factor."""
    inv, _ = inverse_and_logdet(as_symmetric(m))
    return inv


def inverse_and_logdet(a):
    """Return ``(inv(a), log det a)`` for an already-validated SPD array.

    This is the solver's hot path, so ``a`` is not re-validated here.
    """
    c = _cholesky_unchecked(a)
    logdet = 2.0 * float(np.sum(np.log(np.diag(c))))
    inv, info = lapack.dpotri(c, lower=1)
    if info != 0:
        raise NotPositiveDefinite(f"dpotri failed with info={info}")
    inv = np.tril(inv)
    inv = inv + np.tril(inv, -1).T
    return inv, logdet


def logdet_spd(m):
    """``log det m`` computed from the Cholesky pivots."""
    c = cholesky(m)
    return 2.0 * float(np.sum(np.log(np.diag(c))))


def is_positive_definite(m):
    try:
        cholesky(m)
    except NotPositiveDefinite:
        return False
    return True


def elementwise_linf_off(m):
    """Largest absolute off-diagonal entry; 0 for a 1x1 matrix."""
    a = np.asarray(m, dtype=float)
    if a.shape[0] < 2:
        return 0.0
    off = np.abs(a[~np.eye(a.shape[0], dtype=bool)])
    return float(off.max())


def elementwise_linf(m):
    return float(np.max(np.abs(np.asarray(m, dtype=float))))


def linf_operator_norm(m):
    """Maximum absolute row sum."""
    return float(np.max(np.sum(np.abs(np.asarray(m, dtype=float)), axis=1)))


def l1_operator_norm(m):
    """Maximum absolute column sum."""
    return float(np.max(np.sum(np.abs(np.asarray(m, dtype=float)), axis=0)))


def spectral_radius(m, tol=1e-10, max_iter=10_000):
    """Largest absolute eigenvalue of a symmetric matrix by power iteration.

    The start vector is the normalised all-ones vector, which always overlaps
    the Perron vector of an entrywise non-negative matrix. Matrices with
    negative entries get a deterministic ramp added to the start so that it is
    not orthogonal to the dominant eigenvector by symmetry alone.

    Convergence is declared when successive estimates of ``||A x||`` differ
    by at most ``tol * (1 + estimate)``.
    """
    a = as_symmetric(m)
    p = a.shape[0]
    x = np.ones(p)
    if np.any(a < 0):
        x = x + np.arange(1, p + 1) / (p + 1.0)
    x /= np.linalg.norm(x)
    est = 0.0
    for _ in range(max_iter):
        y = a @ x
        norm = np.linalg.norm(y)
        if norm == 0.0:
            return 0.0
        if abs(norm - est) <= tol * (1.0 + norm):
            return float(norm)
        est = norm
        x = y / norm
    raise NoConvergence(f"power iteration did not reach tol={tol} in {max_iter} iterations")


def load_matrix(path, tol=SYMMETRY_TOL):
    """Read a symmetric matrix from a headerless comma-separated file."""
    a = np.loadtxt(Path(path), delimiter=",", ndmin=2)
    return as_symmetric(a, tol=tol)


def save_matrix(path, m):
    """Write ``m`` as headerless CSV with round-trip precision."""
    np.savetxt(Path(path), np.asarray(m, dtype=float), delimiter=",", fmt="%.17g")
