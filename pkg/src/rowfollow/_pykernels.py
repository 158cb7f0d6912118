"""Pure numpy versions of the compiled kernels in ``_ckernels.pyx``."""
import numpy as np


def raycast_discs(cos_a, sin_a, ox, oy, cx, cy, radius, max_range):
    """Range along each ray to the nearest disc, ``inf`` when nothing is hit.

    A ray starting inside a disc reports range 0.
    """
    cos_a = np.asarray(cos_a, dtype=np.float64)[:, None]
    sin_a = np.asarray(sin_a, dtype=np.float64)[:, None]
    n_rays = cos_a.shape[0]
    if len(cx) == 0:
        return np.full(n_rays, np.inf)

    dx = np.asarray(cx, dtype=np.float64)[None, :] - ox
    dy = np.asarray(cy, dtype=np.float64)[None, :] - oy
    radius = np.asarray(radius, dtype=np.float64)[None, :]
    t = cos_a * dx + sin_a * dy
    perp = cos_a * dy - sin_a * dx
    rr = radius * radius
    p2 = perp * perp
    crosses = p2 <= rr
    half = np.sqrt(np.where(crosses, rr - p2, 0.0))
    near = t - half
    hit = np.where(near >= 0.0, near, np.where(t + half >= 0.0, 0.0, np.inf))
    hit = np.where(crosses, hit, np.inf)
    best = hit.min(axis=1)
    return np.where(best <= max_range, best, np.inf)


def zero_runs(bins):
    """Inclusive (starts, ends) of every maximal run of zeros, left to right."""
    is_zero = np.concatenate(([False], np.asarray(bins) == 0, [False]))
    edges = np.flatnonzero(np.diff(is_zero.astype(np.int8)))
    return edges[0::2].astype(np.int64), (edges[1::2] - 1).astype(np.int64)
