"""Support-recovery and error metrics."""
from dataclasses import dataclass

import numpy as np

from .errors import CompositeNotPD, DimMismatch, NotPositiveDefinite
from .matrix import as_symmetric, inverse_spd
from .model import support_off


@dataclass(frozen=True)
class ConsistencyVerdict:
    sparsistent: bool
    sign_consistent: bool
    support_errors: int
    linf_error: float


def edit_distance(a, b):
    """Number of edges in exactly one of the two supports."""
    if a.dim != b.dim:
        raise DimMismatch(f"support dimensions differ: {a.dim} vs {b.dim}")
    return len(a.pairs ^ b.pairs)


def linf_error(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise DimMismatch(f"shapes differ: {a.shape} vs {b.shape}")
    return float(np.max(np.abs(a - b)))


def consistency(estimate, truth, threshold=None):
    """Support and sign agreement of ``estimate`` with ``truth``.

    The truth support is its exact nonzero pattern; the estimate is
    thresholded (scale-aware default when ``threshold`` is None).
    """
    est = support_off(estimate, threshold)
    true = support_off(truth, 0.0)
    errors = edit_distance(est, true)
    sparsistent = errors == 0
    signs = sparsistent and all(
        np.sign(estimate[i, j]) == np.sign(truth[i, j]) for i, j in true.pairs
    )
    return ConsistencyVerdict(sparsistent, bool(signs), errors, linf_error(estimate, truth))


def composite_precision(j_m_hat, sigma_r_hat):
    """``inv(inv(j_m_hat) + sigma_r_hat)``.

    Raises
    ------
    CompositeNotPD
        The composed covariance is not positive definite.
    """
    sigma = inverse_spd(j_m_hat) + as_symmetric(sigma_r_hat)
    try:
        return inverse_spd(sigma)
    except NotPositiveDefinite as exc:
        raise CompositeNotPD(f"estimated composite covariance is not PD: {exc}") from exc
