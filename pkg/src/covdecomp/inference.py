"""Gaussian loopy belief propagation and walk-summability diagnostics."""
from dataclasses import dataclass, field

import numpy as np

from ._backend import kernels
from .errors import InvalidInput
from .matrix import as_symmetric, cholesky, inverse_spd, spectral_radius

DIVERGENCE_LIMIT = 1e12


@dataclass(frozen=True, eq=False)
class InfoModel:
    """Information-form Gaussian: density proportional to ``exp(-x'Jx/2 + h'x)``."""

    j: np.ndarray
    h: np.ndarray

    def __post_init__(self):
        j = as_symmetric(self.j)
        h = np.asarray(self.h, dtype=float).reshape(-1)
        if h.shape[0] != j.shape[0]:
            raise InvalidInput("h must have length p")
        cholesky(j)
        object.__setattr__(self, "j", j)
        object.__setattr__(self, "h", h)

    @classmethod
    def from_mean(cls, j, mean):
        j = as_symmetric(j)
        return cls(j, j @ np.asarray(mean, dtype=float))


@dataclass
class LbpTrace:
    iterations: int = 0
    mean_error: list = field(default_factory=list)
    variance_error: list = field(default_factory=list)
    converged: bool = False
    diverged: bool = False
    rho_bar: float = float("nan")
    means: np.ndarray | None = None
    variances: np.ndarray | None = None


def partial_correlation_abs(j):
    """``|J_ij| / sqrt(J_ii J_jj)`` off the diagonal, zero on it."""
    j = as_symmetric(j)
    d = np.diag(j)
    if np.any(d <= 0):
        raise InvalidInput("partial correlations need a strictly positive diagonal")
    scale = np.sqrt(d)
    r = np.abs(j) / np.outer(scale, scale)
    np.fill_diagonal(r, 0.0)
    return r


def walk_summable(j, tol=1e-10):
    """``(rho < 1, rho)`` with ``rho`` the spectral radius of the partial correlations."""
    rho = spectral_radius(partial_correlation_abs(j), tol)
    return rho < 1.0, rho


def exact_moments(model):
    """Marginal means ``J^-1 h`` and variances ``diag(J^-1)``."""
    cov = inverse_spd(model.j)
    return cov @ model.h, np.diag(cov).copy()


def _edge_arrays(j):
    src, dst = np.nonzero(j - np.diag(np.diag(j)))
    src = np.ascontiguousarray(src, dtype=np.intp)
    dst = np.ascontiguousarray(dst, dtype=np.intp)
    p = j.shape[0]
    key = src * p + dst
    order = np.argsort(key)
    rev = np.empty_like(src)
    rev[:] = order[np.searchsorted(key[order], dst * p + src)]
    weight = np.ascontiguousarray(j[src, dst])
    return src, dst, weight, rev


def gabp_run(model, max_iterations=1000, tol=1e-10, damping=0.0):
    """Synchronous (flooding) Gaussian BP with per-iteration error trace.

    Messages ``i -> j`` carry a precision and a potential, both starting at
    zero. After each sweep the node beliefs are compared with
    :func:`exact_moments`. The run stops when the largest message change is
    below ``tol`` (converged), when any belief precision is not positive or
    any parameter exceeds ``DIVERGENCE_LIMIT`` in magnitude (diverged, trace
    truncated there), or at ``max_iterations``.
    """
    if not 0.0 <= damping < 1.0:
        raise InvalidInput("damping must lie in [0, 1)")
    if max_iterations < 1:
        raise InvalidInput("max_iterations must be positive")
    j, h = model.j, model.h
    true_mean, true_var = exact_moments(model)
    src, dst, weight, rev = _edge_arrays(j)
    jdiag = np.ascontiguousarray(np.diag(j))
    m = src.shape[0]
    msg_p, msg_h = np.zeros(m), np.zeros(m)
    new_p, new_h = np.zeros(m), np.zeros(m)
    _, rho = walk_summable(j) if j.shape[0] > 1 else (True, 0.0)
    trace = LbpTrace(rho_bar=rho)

    for it in range(1, max_iterations + 1):
        change = kernels.gabp_sweep(jdiag, h, src, dst, weight, rev, msg_p, msg_h,
                                    new_p, new_h, damping)
        if change < 0 or not np.isfinite(change):
            trace.diverged = True
            break
        msg_p, new_p = new_p, msg_p
        msg_h, new_h = new_h, msg_h
        prec, pot = kernels.gabp_beliefs(jdiag, h, dst, msg_p, msg_h)
        if (prec.min() <= 0.0
                or max(np.abs(msg_p).max(initial=0.0), np.abs(msg_h).max(initial=0.0),
                       np.abs(pot).max()) > DIVERGENCE_LIMIT):
            trace.diverged = True
            break
        means = pot / prec
        variances = 1.0 / prec
        trace.iterations = it
        trace.mean_error.append(float(np.mean(np.abs(means - true_mean))))
        trace.variance_error.append(float(np.mean(np.abs(variances - true_var))))
        trace.means, trace.variances = means, variances
        if change < tol:
            trace.converged = True
            break
    return trace


def lbp_compare(model_markov, model_composite, iterations=1000, tol=1e-10, damping=0.0):
    """Run :func:`gabp_run` with identical settings on two models."""
    if model_markov.j.shape != model_composite.j.shape:
        raise InvalidInput("models must have the same dimension")
    return (
        gabp_run(model_markov, iterations, tol, damping),
        gabp_run(model_composite, iterations, tol, damping),
    )
