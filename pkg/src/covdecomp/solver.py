"""Proximal-gradient solver for the box-constrained, l1-penalised log-det program.

The primal problem over symmetric ``J``::

    minimise    <S, J> - log det J + gamma * sum_{i != j} |J_ij|
    subject to  |J_ij| <= lam  for i != j,   J > 0

``gamma = 0`` gives the exact-statistics program. ``lam = inf`` gives the
plain l1-penalised MLE (graphical lasso). The residual covariance is read
off the box multipliers once ``J`` is optimal; see :func:`recover_dual`.
"""
import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from ._backend import kernels
from .errors import DualInfeasible, InvalidInput, MaxIterationsExceeded, NotPositiveDefinite
from .matrix import as_symmetric, cholesky, inverse_and_logdet
from .model import DecompositionEstimate

STEP_FLOOR = 1e-20
STEP_CEIL = 1e10


@dataclass(frozen=True)
class SolverOptions:
    gamma: float = 0.0
    lam: float = math.inf
    tol: float = 1e-8
    max_iterations: int = 50_000
    active_tol: float = 1e-7
    initial_step: float = 1.0
    backtrack_factor: float = 0.5

    def __post_init__(self):
        if not self.gamma >= 0:
            raise InvalidInput("gamma must be non-negative")
        if not self.lam > 0:
            raise InvalidInput("lam must be positive (inf allowed)")
        if not self.tol > 0 or not self.active_tol > 0:
            raise InvalidInput("tolerances must be positive")
        if self.max_iterations < 1:
            raise InvalidInput("max_iterations must be positive")
        if not self.initial_step > 0:
            raise InvalidInput("initial_step must be positive")
        if not 0 < self.backtrack_factor < 1:
            raise InvalidInput("backtrack_factor must lie in (0, 1)")


@dataclass(frozen=True)
class ScheduleConfig:
    c1: float = 0.5
    c2: float = 0.5
    lambda_star: float = 0.0

    def __post_init__(self):
        if self.c1 <= 0 or self.c2 <= 0:
            raise InvalidInput("c1 and c2 must be positive")
        if self.lambda_star < 0:
            raise InvalidInput("lambda_star must be non-negative")


@dataclass(frozen=True)
class KktReport:
    stationarity_residual: float
    dual_feasibility_residual: float
    box_violation: float

    @property
    def worst(self):
        return max(self.stationarity_residual, self.dual_feasibility_residual, self.box_violation)


@dataclass
class PrimalResult:
    j: np.ndarray
    j_inv: np.ndarray
    objective: float
    iterations: int
    converged: bool
    kkt: KktReport
    objective_history: list = field(default_factory=list, repr=False)


def regularization_schedule(p, n, schedule):
    """``gamma = c1 sqrt(ln p / n)`` and ``lam = lambda_star + c2 sqrt(ln p / n)``."""
    if p < 2 or n < 1:
        raise InvalidInput("need p >= 2 and n >= 1")
    rate = math.sqrt(math.log(p) / n)
    return schedule.c1 * rate, schedule.lambda_star + schedule.c2 * rate


def _offdiag_l1(j):
    return float(np.abs(j).sum() - np.abs(np.diag(j)).sum())


def objective(sigma_hat, j, gamma):
    """``<sigma_hat, j> - log det j + gamma * ||j||_{1,off}``."""
    chol = cholesky(j)
    logdet = 2.0 * float(np.sum(np.log(np.diag(chol))))
    return float(np.sum(np.asarray(sigma_hat) * j)) - logdet + gamma * _offdiag_l1(j)


def gradient(sigma_hat, j):
    """Gradient ``sigma_hat - inv(j)`` of the smooth part ``<S, J> - log det J``."""
    j_inv, _ = inverse_and_logdet(as_symmetric(j))
    return as_symmetric(sigma_hat) - j_inv


def prox_l1_box(value, gamma, lam):
    """Minimiser of ``(x - value)**2 / 2 + gamma |x|`` over ``|x| <= lam``."""
    shrunk = math.copysign(max(abs(value) - gamma, 0.0), value)
    return min(max(shrunk, -lam), lam)


def _box_active(j, lam, active_tol):
    if not math.isfinite(lam):
        return np.zeros(j.shape, dtype=bool)
    active = lam - np.abs(j) <= active_tol
    np.fill_diagonal(active, False)
    return active


def _residual_from_gradient(grad, j, gamma, lam, active_tol):
    sigma_r = np.where(_box_active(j, lam, active_tol), grad + gamma * np.sign(j), 0.0)
    np.fill_diagonal(sigma_r, 0.0)
    return sigma_r


def _kkt(grad, j, sigma_r, gamma, lam, active_tol):
    """KKT report given ``grad = sigma_hat - inv(j)``."""
    p = j.shape[0]
    off = ~np.eye(p, dtype=bool)
    d = grad - sigma_r
    sign = np.sign(j)
    np.fill_diagonal(sign, 0.0)
    stat = np.where(sign != 0, np.abs(d + gamma * sign), np.maximum(np.abs(d) - gamma, 0.0))
    np.fill_diagonal(stat, np.abs(np.diag(d)))
    # A nonzero residual is a box multiplier: the box must be active and the
    # residual must point against the sign of j.
    bad = (sigma_r != 0) & (~_box_active(j, lam, active_tol) | (np.sign(sigma_r) * sign > 0))
    stat = np.where(bad & off, np.maximum(stat, np.abs(sigma_r)), stat)
    stationarity = float(stat.max())
    if p > 1:
        dual = max(0.0, float(np.abs(d[off]).max()) - gamma)
        box = max(0.0, float(np.abs(j[off]).max()) - lam)
    else:
        dual = box = 0.0
    return KktReport(stationarity, dual, box)


def kkt_residual(sigma_hat, j, sigma_r, options):
    """Optimality certificate for a candidate ``(j, sigma_r)``.

    The stationarity residual is the largest violation of
    ``sigma_hat - inv(j) - sigma_r + gamma * Z = 0`` over valid subgradients
    ``Z`` of the off-diagonal l1 norm, where nonzero ``sigma_r`` entries must
    also be valid box multipliers (box active, sign opposite to ``j``).
    """
    sigma_hat = as_symmetric(sigma_hat)
    j = as_symmetric(j)
    sigma_r = as_symmetric(sigma_r)
    j_inv, _ = inverse_and_logdet(j)
    return _kkt(sigma_hat - j_inv, j, sigma_r, options.gamma, options.lam, options.active_tol)


def _validate_input(sigma_hat, options):
    s = as_symmetric(sigma_hat)
    if np.any(np.diag(s) <= 0):
        raise InvalidInput("sample covariance must have a strictly positive diagonal")
    if options.gamma == 0:
        try:
            cholesky(s)
        except NotPositiveDefinite as exc:
            raise InvalidInput(
                "gamma = 0 needs a positive definite covariance; use gamma > 0"
            ) from exc
    return s


def solve_primal(sigma_hat, options, j0=None):
    """Minimise the primal program by proximal gradient with backtracking.

    Each trial step ``eta`` is seeded by a Barzilai-Borwein estimate and
    halved (by ``backtrack_factor``) until the candidate is positive definite
    and passes the sufficient-decrease test of the smooth part, which keeps
    the composite objective non-increasing. Iteration stops when the KKT
    stationarity residual drops to ``options.tol``.

    A :class:`MaxIterationsExceeded` warning is issued if the cap is hit;
    the last (and best) iterate is still returned with ``converged=False``.
    """
    s = _validate_input(sigma_hat, options)
    gamma, lam, beta = options.gamma, options.lam, options.backtrack_factor
    if j0 is None:
        j = np.diag(1.0 / np.diag(s))
    else:
        j = kernels.prox_offdiag(np.ascontiguousarray(as_symmetric(j0)), 0.0, lam)
    j_inv, logdet = inverse_and_logdet(j)
    smooth = float(np.sum(s * j)) - logdet
    grad = s - j_inv
    history = [smooth + gamma * _offdiag_l1(j)]
    eta = options.initial_step
    converged = False
    iterations = 0
    kkt = None

    for iterations in range(options.max_iterations + 1):
        sigma_r = _residual_from_gradient(grad, j, gamma, lam, options.active_tol)
        kkt = _kkt(grad, j, sigma_r, gamma, lam, options.active_tol)
        if kkt.stationarity_residual <= options.tol:
            converged = True
            break
        if iterations == options.max_iterations:
            break

        slack = 1e-12 * (1.0 + abs(smooth))
        while True:
            cand = kernels.prox_offdiag(np.ascontiguousarray(j - eta * grad), eta * gamma, lam)
            try:
                cand_inv, cand_logdet = inverse_and_logdet(cand)
            except NotPositiveDefinite:
                eta *= beta
            else:
                cand_smooth = float(np.sum(s * cand)) - cand_logdet
                step = cand - j
                bound = smooth + float(np.sum(grad * step)) + float(np.sum(step * step)) / (2 * eta)
                if cand_smooth <= bound + slack:
                    break
                eta *= beta
            if eta < STEP_FLOOR:
                break
        if eta < STEP_FLOOR:
            break

        cand_grad = s - cand_inv
        ds = cand - j
        dg = cand_grad - grad
        curv = float(np.sum(ds * dg))
        eta = float(np.sum(ds * ds)) / curv if curv > 0 else eta / beta
        eta = min(max(eta, STEP_FLOOR * 1e4), STEP_CEIL)

        j, j_inv, smooth, grad = cand, cand_inv, cand_smooth, cand_grad
        history.append(smooth + gamma * _offdiag_l1(j))

    if not converged:
        warnings.warn(
            f"solver stopped after {iterations} iterations with stationarity "
            f"{kkt.stationarity_residual:.3g} > tol {options.tol:.3g}",
            MaxIterationsExceeded,
            stacklevel=2,
        )
    return PrimalResult(j, j_inv, history[-1], iterations, converged, kkt, history)


def recover_dual(sigma_hat, j_m_hat, options, j_inv=None):
    """Residual covariance from the box multipliers of an optimal ``j_m_hat``.

    Off-diagonal entries where the box is active (within ``active_tol``) get
    ``sigma_hat - inv(j) + gamma * sign(j)``; all others are zero.

    Raises
    ------
    DualInfeasible
        The result breaks ``||sigma_hat - inv(j) - sigma_r||_{inf,off} <= gamma``
        by more than ``10 * tol``, i.e. ``j_m_hat`` is not optimal.
    """
    s = as_symmetric(sigma_hat)
    j = as_symmetric(j_m_hat)
    if j_inv is None:
        j_inv, _ = inverse_and_logdet(j)
    grad = s - j_inv
    sigma_r = _residual_from_gradient(grad, j, options.gamma, options.lam, options.active_tol)
    kkt = _kkt(grad, j, sigma_r, options.gamma, options.lam, options.active_tol)
    if kkt.dual_feasibility_residual > 10 * options.tol:
        raise DualInfeasible(
            f"recovered residual violates dual feasibility by {kkt.dual_feasibility_residual:.3g}"
        )
    return sigma_r


def decompose(sigma_hat, options):
    """Solve the primal program and recover the residual covariance."""
    res = solve_primal(sigma_hat, options)
    if res.converged:
        sigma_r = recover_dual(sigma_hat, res.j, options, j_inv=res.j_inv)
    else:
        s = as_symmetric(sigma_hat)
        sigma_r = _residual_from_gradient(s - res.j_inv, res.j, options.gamma, options.lam,
                                          options.active_tol)
    kkt = _kkt(as_symmetric(sigma_hat) - res.j_inv, res.j, sigma_r, options.gamma, options.lam,
               options.active_tol)
    return DecompositionEstimate(
        j_m_hat=res.j,
        sigma_m_hat=res.j_inv,
        sigma_r_hat=sigma_r,
        iterations=res.iterations,
        final_objective=res.objective,
        kkt_residual=kkt.stationarity_residual,
        converged=res.converged,
        kkt=kkt,
        objective_history=res.objective_history,
    )


def decompose_exact(sigma, lam, options=None):
    """Exact-statistics decomposition: ``gamma = 0`` and box bound ``lam``."""
    options = replace(options or SolverOptions(), gamma=0.0, lam=lam)
    return decompose(sigma, options)
