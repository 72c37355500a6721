"""Seeded random streams.

All randomness goes through NumPy's Philox4x64-10 bit generator, a
counter-based generator whose output is fixed by the seed on every platform.
Normal variates use the Box-Muller transform on top of it rather than
NumPy's ziggurat sampler so the algorithm is fully documented here.
"""
import hashlib

import numpy as np

SEED_MASK = (1 << 64) - 1


def make_rng(seed):
    """Philox-backed ``numpy.random.Generator`` for an unsigned 64-bit seed."""
    return np.random.Generator(np.random.Philox(int(seed) & SEED_MASK))


def derive_seed(seed, *labels):
    """Combine ``seed`` with a stable hash of ``labels``.

    Used to give each (n, replicate, method) cell of a sweep its own
    independent, reproducible stream.
    """
    key = ":".join(str(label) for label in labels).encode()
    digest = hashlib.blake2b(key, digest_size=8).digest()
    return (int(seed) ^ int.from_bytes(digest, "little")) & SEED_MASK


def standard_normal(rng, size):
    """Independent N(0, 1) draws by Box-Muller."""
    size = int(np.prod(size)) if np.ndim(size) else int(size)
    half = (size + 1) // 2
    u1 = rng.random(half)
    u2 = rng.random(half)
    # 1 - u1 lies in (0, 1], so the log is finite.
    radius = np.sqrt(-2.0 * np.log1p(-u1))
    theta = 2.0 * np.pi * u2
    z = np.empty(2 * half)
    z[0::2] = radius * np.cos(theta)
    z[1::2] = radius * np.sin(theta)
    return z[:size]


def choose_without_replacement(rng, population, k):
    """First ``k`` items of a Fisher-Yates shuffle of ``population``."""
    items = list(population)
    if not 0 <= k <= len(items):
        raise ValueError(f"cannot choose {k} of {len(items)} items")
    for i in range(k):
        j = int(rng.integers(i, len(items)))
        items[i], items[j] = items[j], items[i]
    return items[:k]
