"""Gaussian sampling and the zero-mean sample covariance."""
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidInput
from .matrix import cholesky
from .rng import standard_normal


@dataclass(frozen=True, eq=False)
class SampleSet:
    data: np.ndarray  # shape (n, p)

    def __post_init__(self):
        if self.data.ndim != 2 or self.data.shape[0] < 1:
            raise InvalidInput("samples must be a non-empty (n, p) array")

    @property
    def n(self):
        return self.data.shape[0]

    @property
    def dim(self):
        return self.data.shape[1]

    def save(self, path):
        np.savetxt(Path(path), self.data, delimiter=",", fmt="%.17g")

    @classmethod
    def load(cls, path):
        return cls(np.loadtxt(Path(path), delimiter=",", ndmin=2))


def sample_gaussian(sigma, n, rng):
    """``n`` draws of ``L z`` with ``L = cholesky(sigma)`` and ``z`` standard normal."""
    if n < 1:
        raise InvalidInput("n must be positive")
    chol = cholesky(sigma)
    p = chol.shape[0]
    z = standard_normal(rng, n * p).reshape(n, p)
    return SampleSet(z @ chol.T)


def sample_covariance(samples, centered=False):
    """``(1/n) sum_k x_k x_k^T``.

    No mean is subtracted unless ``centered`` is set; the divisor is ``n``
    either way.
    """
    x = samples.data if isinstance(samples, SampleSet) else np.asarray(samples, dtype=float)
    if centered:
        x = x - x.mean(axis=0)
    cov = x.T @ x / x.shape[0]
    return 0.5 * (cov + cov.T)
