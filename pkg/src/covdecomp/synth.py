"""Synthetic ground-truth models on 2-D grids."""
from dataclasses import asdict, dataclass

import numpy as np

from .errors import CompositeNotPD, GenerationFailed, InvalidInput
from .model import SupportSet, compose, support_off
from .rng import choose_without_replacement, make_rng

MAX_RESIDUAL_ATTEMPTS = 100


@dataclass(frozen=True)
class SynthConfig:
    rows: int = 8
    cols: int = 8
    edge_weight_magnitude: float = 0.5
    residual_fraction: float = 0.2
    residual_magnitude: float = 0.2
    pd_margin: float = 0.35
    seed: int = 0

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise InvalidInput("rows and cols must be positive")
        if not 0.0 <= self.residual_fraction <= 1.0:
            raise InvalidInput("residual_fraction must lie in [0, 1]")
        if self.edge_weight_magnitude <= 0 or self.residual_magnitude <= 0:
            raise InvalidInput("magnitudes must be positive")
        if self.pd_margin <= 0:
            raise InvalidInput("pd_margin must be positive")
        if not 0 <= self.seed < 2**64:
            raise InvalidInput("seed must be an unsigned 64-bit integer")


def grid_graph(rows, cols):
    """4-nearest-neighbour grid; node ``(r, c)`` has index ``r * cols + c``."""
    if rows * cols < 1:
        raise InvalidInput("grid must have at least one node")
    pairs = []
    for r in range(rows):
        for c in range(cols):
            k = r * cols + c
            if c + 1 < cols:
                pairs.append((k, k + 1))
            if r + 1 < rows:
                pairs.append((k, k + cols))
    return SupportSet(rows * cols, frozenset(pairs))


def gen_markov(support, magnitude, pd_margin, rng):
    """Random +/-``magnitude`` edge weights with a uniform diagonal.

    The diagonal is ``|lambda_min(O)| + pd_margin`` where ``O`` holds the
    off-diagonal weights, so the smallest eigenvalue is exactly ``pd_margin``.
    """
    if magnitude <= 0 or pd_margin <= 0:
        raise InvalidInput("magnitude and pd_margin must be positive")
    p = support.dim
    off = np.zeros((p, p))
    for i, j in support.edges():
        w = magnitude if rng.integers(0, 2) else -magnitude
        off[i, j] = off[j, i] = w
    lam_min = np.linalg.eigvalsh(off)[0] if p > 1 else 0.0
    c = abs(lam_min) + pd_margin
    return off + c * np.eye(p)


def round_half_up(x):
    return int(np.floor(x + 0.5))


def gen_residual(j_m, fraction, magnitude, rng):
    """Residual covariance on a random ``fraction`` of the Markov edges.

    Each selected entry is ``magnitude`` with the opposite sign of the
    Markov weight it overlaps.
    """
    if not 0.0 <= fraction <= 1.0:
        raise InvalidInput("fraction must lie in [0, 1]")
    j_m = np.asarray(j_m, dtype=float)
    edges = support_off(j_m, 0.0).edges()
    k = round_half_up(fraction * len(edges))
    out = np.zeros_like(j_m)
    for i, j in choose_without_replacement(rng, edges, k):
        out[i, j] = out[j, i] = -np.sign(j_m[i, j]) * magnitude
    return out


def gen_model(config, support=None):
    """Grid, Markov weights, node means, then residual edges composed into a model.

    Residual placement is redrawn when the composite covariance is not
    positive definite. Passing ``support`` replaces the grid with an
    arbitrary Markov graph (``rows``/``cols`` are then ignored).

    Raises
    ------
    GenerationFailed
        No valid residual placement in ``MAX_RESIDUAL_ATTEMPTS`` draws.
    """
    rng = make_rng(config.seed)
    if support is None:
        support = grid_graph(config.rows, config.cols)
    j_m = gen_markov(support, config.edge_weight_magnitude, config.pd_margin, rng)
    mean = rng.random(support.dim)
    meta = {"rows": config.rows, "cols": config.cols}
    meta.update({k: v for k, v in asdict(config).items() if k not in meta})
    for attempt in range(1, MAX_RESIDUAL_ATTEMPTS + 1):
        sigma_r = gen_residual(j_m, config.residual_fraction, config.residual_magnitude, rng)
        try:
            model = compose(j_m, sigma_r, mean=mean, meta={**meta, "attempts": attempt})
        except CompositeNotPD:
            continue
        return model
    raise GenerationFailed(
        f"no positive definite composite covariance after {MAX_RESIDUAL_ATTEMPTS} residual draws"
    )
