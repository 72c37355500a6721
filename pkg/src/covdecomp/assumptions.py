"""Identifiability and incoherence checks for a ground-truth model.

Hessian blocks are submatrices of ``Gamma = Sigma_M kron Sigma_M`` indexed
by ordered node pairs in lexicographic order, so row ``(i, j)`` of the full
Kronecker product is row ``i * p + j``.
"""
from dataclasses import asdict, dataclass

import numpy as np
from scipy.linalg import cho_solve

from ._backend import kernels
from .errors import IndexOutOfRange, InvalidInput, NotPositiveDefinite, SingularGamma
from .matrix import as_symmetric, cholesky, elementwise_linf_off, linf_operator_norm
from .model import build_partition, max_degree, support_off

GAMMA_COND_LIMIT = 1e12
M_SEARCH_MAX = 10**6


@dataclass
class AssumptionReport:
    a0_pd: bool
    a1_lambda_star: float
    a2_support_ok: bool
    a2_reverse_ok: bool
    a3_signs_ok: bool
    a4_incoherence_lhs: float = float("nan")
    a4_alpha: float | None = None
    a4_k_ssr: float = float("nan")
    a5_k_ss: float = float("nan")
    a5_m_feasible: int | None = None
    k_m: float = float("nan")
    degree: int = 0
    j_min: float = 0.0
    sigma_r_min: float = 0.0
    a2_detail: str = ""

    @property
    def exact_ok(self):
        """(A.0)-(A.3) all hold."""
        return self.a0_pd and self.a2_support_ok and self.a3_signs_ok

    @property
    def a4_ok(self):
        return self.a4_alpha is not None and self.a4_k_ssr < 0.25

    @property
    def a5_ok(self):
        return self.a5_m_feasible is not None

    def verdicts(self):
        return {
            "A.0": self.a0_pd,
            "A.1": self.a1_lambda_star > 0,
            "A.2": self.a2_support_ok,
            "A.3": self.a3_signs_ok,
            "A.4": self.a4_ok,
            "A.5": self.a5_ok,
        }

    def to_lines(self):
        lines = [f"{k}={_fmt(v)}" for k, v in asdict(self).items()]
        lines += [f"{name}={'PASS' if ok else 'FAIL'}" for name, ok in self.verdicts().items()]
        exact = all(self.verdicts()[k] for k in ("A.0", "A.1", "A.2", "A.3"))
        lines.append(f"summary={'PASS' if exact else 'FAIL'} (A.0-A.3)")
        return lines


def _fmt(v):
    if v is None:
        return "none"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def lambda_star(j_m):
    return elementwise_linf_off(j_m)


def check_exact(j_m, sigma_r, tol=1e-9):
    """Conditions (A.0)-(A.3) as a partial :class:`AssumptionReport`.

    ``a2_support_ok`` requires a zero residual diagonal and that every
    nonzero residual sits on an entry with ``|J_M| = lambda_star`` (relative
    tolerance ``tol``). The converse direction (every maximal entry carries a
    residual) is reported separately in ``a2_reverse_ok``.
    """
    j_m = as_symmetric(j_m)
    sigma_r = as_symmetric(sigma_r)
    if j_m.shape != sigma_r.shape:
        raise InvalidInput("j_m and sigma_r must share a dimension")
    p = j_m.shape[0]
    try:
        cholesky(j_m)
        a0 = True
    except NotPositiveDefinite:
        a0 = False
    lam = elementwise_linf_off(j_m)
    off = ~np.eye(p, dtype=bool)
    maximal = off & (np.abs(np.abs(j_m) - lam) <= tol * max(lam, 1.0)) & (lam > 0)
    resid = off & (sigma_r != 0)
    diag_ok = bool(np.all(np.diag(sigma_r) == 0))
    forward_ok = bool(np.all(maximal[resid]))
    reverse_ok = bool(np.all(resid[maximal]))
    detail = []
    if not diag_ok:
        detail.append("nonzero residual diagonal")
    if not forward_ok:
        detail.append("residual on a non-maximal entry")
    if not reverse_ok:
        detail.append("converse fails: some maximal entry carries no residual (informational)")
    # (A.3) concerns edges only; the diagonal is covered by (A.2).
    a3 = bool(np.all((np.sign(sigma_r) * np.sign(j_m))[off] <= 0))
    return AssumptionReport(
        a0_pd=a0,
        a1_lambda_star=lam,
        a2_support_ok=diag_ok and forward_ok,
        a2_reverse_ok=reverse_ok,
        a3_signs_ok=a3,
        a2_detail="; ".join(detail) or "ok",
    )


def _as_pairs(pairs, p):
    arr = np.array(sorted(pairs), dtype=np.intp).reshape(-1, 2)
    if arr.size and (arr.min() < 0 or arr.max() >= p):
        raise IndexOutOfRange(f"pair index outside [0, {p})")
    return np.ascontiguousarray(arr)


def hessian_submatrix(sigma_m, rows, cols):
    """Block of ``sigma_m kron sigma_m`` for the given ordered pairs.

    Entry ``((i, j), (k, l))`` is ``sigma_m[i, k] * sigma_m[j, l]``. Rows and
    columns follow the sorted order of the pairs. The full ``p**2 x p**2``
    matrix is never built.
    """
    s = np.ascontiguousarray(as_symmetric(sigma_m))
    p = s.shape[0]
    return kernels.kron_block(s, _as_pairs(rows, p), _as_pairs(cols, p))


def _norm(block):
    return linf_operator_norm(block) if block.size else 0.0


def _smallest_m(k_ss, alpha):
    """Smallest integer m > 4 with ``k_ss <= (m - 4) alpha / (4 (m - (m - 1) alpha))``."""

    def ok(m):
        return k_ss <= (m - 4) * alpha / (4.0 * (m - (m - 1) * alpha))

    if not ok(M_SEARCH_MAX):
        return None
    lo, hi = 5, M_SEARCH_MAX  # bound is increasing in m
    while lo < hi:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid + 1
    return lo


def incoherence(sigma_m, partition):
    """Mutual-incoherence and covariance-control quantities.

    Returns a dict with ``a4_incoherence_lhs``, ``a4_alpha``, ``a4_k_ssr``,
    ``a5_k_ss``, ``a5_m_feasible`` and ``k_m``.

    Raises
    ------
    SingularGamma
        ``Gamma_SS`` is not positive definite or its condition number
        exceeds ``GAMMA_COND_LIMIT``.
    """
    sigma_m = np.ascontiguousarray(as_symmetric(sigma_m))
    if not partition.s:
        raise InvalidInput("partition.s is empty")
    s_idx = partition.s
    g_ss = hessian_submatrix(sigma_m, s_idx, s_idx)
    try:
        chol = cholesky(g_ss)
    except NotPositiveDefinite as exc:
        raise SingularGamma(f"Gamma_SS is not positive definite: {exc}") from exc
    cond = (np.diag(chol).max() / np.diag(chol).min()) ** 2
    if cond > GAMMA_COND_LIMIT or np.linalg.cond(g_ss) > GAMMA_COND_LIMIT:
        raise SingularGamma(f"Gamma_SS condition number above {GAMMA_COND_LIMIT:g}")

    def solve(rhs):
        return cho_solve((chol, True), rhs)

    g_s_r = hessian_submatrix(sigma_m, s_idx, partition.s_r)
    g_ss_inv_s_r = solve(g_s_r) if g_s_r.size else g_s_r
    k_ssr = _norm(g_ss_inv_s_r)

    if partition.s_m_complement:
        g_c_s = hessian_submatrix(sigma_m, partition.s_m_complement, s_idx)
        # Gamma_cs inv(Gamma_ss) = (inv(Gamma_ss) Gamma_sc)^T by symmetry.
        g_c_s_inv = solve(g_c_s.T).T
        lhs2 = _norm(g_c_s_inv)
        if partition.s_r:
            g_c_r = hessian_submatrix(sigma_m, partition.s_m_complement, partition.s_r)
            lhs1 = _norm(g_c_s_inv @ g_s_r - g_c_r)
        else:
            lhs1 = 0.0
    else:
        lhs1 = lhs2 = 0.0

    lhs = max(lhs1, lhs2)
    alpha = 1.0 - lhs if lhs < 1.0 else None
    k_ss = _norm(g_ss)
    return {
        "a4_incoherence_lhs": lhs,
        "a4_lhs_terms": (lhs1, lhs2),
        "a4_alpha": alpha,
        "a4_k_ssr": k_ssr,
        "a5_k_ss": k_ss,
        "a5_m_feasible": _smallest_m(k_ss, alpha) if alpha is not None else None,
        "k_m": linf_operator_norm(sigma_m),
    }


def check_all(model, tol=1e-9):
    """Full (A.0)-(A.5) report for a :class:`GroundTruthModel`."""
    report = check_exact(model.j_m, model.sigma_r, tol)
    markov = support_off(model.j_m, 0.0)
    resid = support_off(model.sigma_r, 0.0)
    report.degree = max_degree(markov)
    report.j_min = min((abs(model.j_m[i, j]) for i, j in markov.pairs), default=0.0)
    report.sigma_r_min = min((abs(model.sigma_r[i, j]) for i, j in resid.pairs), default=0.0)
    if report.a0_pd:
        partition = build_partition(model.j_m, model.sigma_r, 0.0)
        inc = incoherence(model.sigma_m, partition)
        inc.pop("a4_lhs_terms")
        for key, value in inc.items():
            setattr(report, key, value)
    return report
