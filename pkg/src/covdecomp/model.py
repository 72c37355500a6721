"""Value types for the Markov-plus-residual covariance model.

Node indices are 0-based everywhere in the Python API. Files written for
humans (edge lists) use 1-based indices.
"""
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import CompositeNotPD, InvalidInput, NotPositiveDefinite, SupportViolation
from .matrix import (
    as_symmetric,
    cholesky,
    elementwise_linf_off,
    inverse_spd,
    load_matrix,
    save_matrix,
)


def default_threshold(m):
    """Scale-aware cutoff for deciding that an estimated entry is nonzero."""
    return 1e-6 * (1.0 + float(np.max(np.abs(m))))


@dataclass(frozen=True)
class SupportSet:
    """Unordered off-diagonal node pairs ``(i, j)`` with ``i < j``."""

    dim: int
    pairs: frozenset = frozenset()

    def __post_init__(self):
        if self.dim < 1:
            raise InvalidInput("dim must be >= 1")
        canon = set()
        for i, j in self.pairs:
            i, j = int(i), int(j)
            if i == j:
                raise InvalidInput(f"diagonal pair ({i}, {j}) in a support set")
            if not (0 <= i < self.dim and 0 <= j < self.dim):
                raise InvalidInput(f"pair ({i}, {j}) out of range for dim {self.dim}")
            canon.add((min(i, j), max(i, j)))
        object.__setattr__(self, "pairs", frozenset(canon))

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.edges())

    def __contains__(self, pair):
        i, j = pair
        return (min(i, j), max(i, j)) in self.pairs

    def edges(self):
        """Pairs in sorted order."""
        return sorted(self.pairs)

    def ordered(self):
        """Both orientations of every pair."""
        return frozenset(self.pairs) | frozenset((j, i) for i, j in self.pairs)

    def degrees(self):
        deg = np.zeros(self.dim, dtype=int)
        for i, j in self.pairs:
            deg[i] += 1
            deg[j] += 1
        return deg

    def save(self, path):
        lines = [f"{i + 1},{j + 1}" for i, j in self.edges()]
        Path(path).write_text("".join(line + "\n" for line in lines))

    @classmethod
    def load(cls, path, dim):
        pairs = []
        for line in Path(path).read_text().splitlines():
            line = line.strip()
            if not line:
                continue
            i, j = (int(tok) for tok in line.split(","))
            if i >= j:
                raise InvalidInput(f"edge line {line!r} must satisfy i < j")
            pairs.append((i - 1, j - 1))
        return cls(dim, frozenset(pairs))


def support_off(m, threshold=None):
    """Off-diagonal pairs with ``|m[i, j]| > threshold``."""
    a = np.asarray(m, dtype=float)
    if threshold is None:
        threshold = default_threshold(a)
    if threshold < 0:
        raise InvalidInput("threshold must be non-negative")
    iu, ju = np.triu_indices(a.shape[0], k=1)
    keep = np.abs(a[iu, ju]) > threshold
    return SupportSet(a.shape[0], frozenset(zip(iu[keep].tolist(), ju[keep].tolist())))


def max_degree(support):
    if len(support) == 0:
        return 0
    return int(support.degrees().max())


@dataclass(frozen=True)
class SupportPartition:
    """Ordered-pair index sets over ``range(dim) x range(dim)``.

    ``s_m`` holds the Markov edges plus the diagonal, ``s_r`` the residual
    edges, ``s = s_m - s_r`` and ``s_m_complement`` everything else. The last
    three partition all ``dim**2`` ordered pairs.
    """

    dim: int
    s_m: frozenset
    s_r: frozenset
    s: frozenset
    s_m_complement: frozenset

    def index(self, name):
        """Sorted ``(k, 2)`` integer array of the named set's pairs."""
        pairs = sorted(getattr(self, name))
        return np.array(pairs, dtype=np.intp).reshape(-1, 2)


def build_partition(j_m, sigma_r, threshold=None):
    j_m = np.asarray(j_m, dtype=float)
    sigma_r = np.asarray(sigma_r, dtype=float)
    if j_m.shape != sigma_r.shape:
        raise InvalidInput("j_m and sigma_r must have the same shape")
    p = j_m.shape[0]
    markov = support_off(j_m, 0.0 if threshold is None else threshold)
    resid = support_off(sigma_r, 0.0 if threshold is None else threshold)
    diag = frozenset((i, i) for i in range(p))
    s_m = markov.ordered() | diag
    s_r = resid.ordered()
    if not s_r <= s_m:
        outside = sorted(s_r - s_m)[:5]
        raise SupportViolation(f"residual support not inside Markov support, e.g. {outside}")
    everything = frozenset((i, j) for i in range(p) for j in range(p))
    return SupportPartition(p, s_m, s_r, s_m - s_r, everything - s_m)


@dataclass(frozen=True, eq=False)
class GroundTruthModel:
    """A composite model ``sigma = inv(j_m) + sigma_r``.

    ``mean`` is only used to build potential vectors for belief propagation;
    samples for covariance estimation are always zero-mean.
    """

    j_m: np.ndarray
    sigma_r: np.ndarray
    sigma: np.ndarray
    lambda_star: float
    mean: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    @property
    def p(self):
        return self.j_m.shape[0]

    @property
    def sigma_m(self):
        return inverse_spd(self.j_m)

    @property
    def j_composite(self):
        """Overall precision matrix ``inv(sigma)``."""
        return inverse_spd(self.sigma)

    def save(self, directory):
        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        save_matrix(d / "j_m.csv", self.j_m)
        save_matrix(d / "sigma_r.csv", self.sigma_r)
        save_matrix(d / "sigma.csv", self.sigma)
        meta = {"p": self.p, "lambda_star": repr(float(self.lambda_star))}
        meta.update(self.meta)
        if self.mean is not None:
            meta["mean"] = ",".join(repr(float(v)) for v in self.mean)
        write_keyvalue(d / "metadata.txt", meta)

    @classmethod
    def load(cls, directory):
        d = Path(directory)
        meta = read_keyvalue(d / "metadata.txt")
        j_m = load_matrix(d / "j_m.csv")
        sigma_r = load_matrix(d / "sigma_r.csv")
        sigma = load_matrix(d / "sigma.csv")
        mean = meta.pop("mean", None)
        if mean is not None:
            mean = np.array([float(v) for v in mean.split(",")])
        lam = float(meta.pop("lambda_star", elementwise_linf_off(j_m)))
        meta.pop("p", None)
        model = cls(j_m, sigma_r, sigma, lam, mean, meta)
        if np.max(np.abs(inverse_spd(j_m) + sigma_r - sigma)) > 1e-8:
            raise InvalidInput(f"{d}: sigma.csv does not equal inv(j_m) + sigma_r")
        return model


def compose(j_m, sigma_r, mean=None, meta=None):
    """Build a :class:`GroundTruthModel` from its Markov and residual parts.

    Raises
    ------
    NotPositiveDefinite
        ``j_m`` is not positive definite.
    CompositeNotPD
        ``inv(j_m) + sigma_r`` is not positive definite.
    """
    j_m = as_symmetric(j_m)
    sigma_r = as_symmetric(sigma_r)
    if j_m.shape != sigma_r.shape:
        raise InvalidInput("j_m and sigma_r must have the same shape")
    if np.any(np.diag(sigma_r) != 0.0):
        raise InvalidInput("sigma_r must have an exactly zero diagonal")
    sigma_m = inverse_spd(j_m)
    sigma = sigma_m + sigma_r
    try:
        cholesky(sigma)
    except NotPositiveDefinite as exc:
        raise CompositeNotPD(f"composite covariance is not positive definite: {exc}") from exc
    if mean is not None:
        mean = np.asarray(mean, dtype=float).copy()
        if mean.shape != (j_m.shape[0],):
            raise InvalidInput("mean must have length p")
    return GroundTruthModel(j_m, sigma_r, sigma, elementwise_linf_off(j_m), mean, dict(meta or {}))


@dataclass
class DecompositionEstimate:
    """Solver output: the Markov precision, its inverse and the residual."""

    j_m_hat: np.ndarray
    sigma_m_hat: np.ndarray
    sigma_r_hat: np.ndarray
    iterations: int
    final_objective: float
    kkt_residual: float
    converged: bool = True
    kkt: object = None
    objective_history: list = field(default_factory=list, repr=False)


def write_keyvalue(path, mapping):
    Path(path).write_text("".join(f"{k}={v}\n" for k, v in mapping.items()))


def read_keyvalue(path):
    out = {}
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise InvalidInput(f"{path}: malformed line {line!r}")
        out[key.strip()] = value.strip()
    return out
