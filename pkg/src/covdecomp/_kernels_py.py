"""NumPy implementations of the hot kernels.

These mirror ``_kernels.pyx`` one-for-one and are used when the compiled
extension is unavailable (or ``COVDECOMP_PURE=1`` is set).
"""
import numpy as np


def prox_offdiag(y, gamma, lam):
    """Soft-threshold by ``gamma`` then clip to ``[-lam, lam]``, off-diagonal only."""
    out = np.sign(y) * np.maximum(np.abs(y) - gamma, 0.0)
    if np.isfinite(lam):
        np.clip(out, -lam, lam, out=out)
    idx = np.diag_indices_from(y)
    out[idx] = y[idx]
    return out


def kron_block(sigma, rows, cols):
    """``out[a, b] = sigma[i_a, k_b] * sigma[j_a, l_b]`` for pair arrays ``rows``, ``cols``."""
    i = rows[:, 0][:, None]
    j = rows[:, 1][:, None]
    k = cols[:, 0][None, :]
    l = cols[:, 1][None, :]
    return sigma[i, k] * sigma[j, l]


def gabp_sweep(jdiag, h, src, dst, weight, rev, msg_p, msg_h, new_p, new_h, damping):
    """One synchronous update of every directed message.

    Writes into ``new_p`` / ``new_h`` and returns the largest absolute change
    of any message parameter, or -1.0 if some cavity precision is not
    positive (the update is undefined there).
    """
    p = jdiag.shape[0]
    prec = jdiag + np.bincount(dst, weights=msg_p, minlength=p)
    pot = h + np.bincount(dst, weights=msg_h, minlength=p)
    cav_p = prec[src] - msg_p[rev]
    cav_h = pot[src] - msg_h[rev]
    if cav_p.size and cav_p.min() <= 0.0:
        return -1.0
    np.divide(-(weight * weight), cav_p, out=new_p)
    np.divide(-weight * cav_h, cav_p, out=new_h)
    if damping:
        new_p *= 1.0 - damping
        new_p += damping * msg_p
        new_h *= 1.0 - damping
        new_h += damping * msg_h
    if not new_p.size:
        return 0.0
    return float(max(np.abs(new_p - msg_p).max(), np.abs(new_h - msg_h).max()))


def gabp_beliefs(jdiag, h, dst, msg_p, msg_h):
    """Node precisions and potentials from the incoming messages."""
    p = jdiag.shape[0]
    prec = jdiag + np.bincount(dst, weights=msg_p, minlength=p)
    pot = h + np.bincount(dst, weights=msg_h, minlength=p)
    return prec, pot
