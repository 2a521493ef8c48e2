"""Pure-numpy fallback for the compiled kernels.

Used when the extension is unavailable or ``AUDIGEST_PURE_PYTHON`` is set.
Distances are direct per-dimension differences (no dot-product expansion)
so results match the compiled path.
"""

import numpy as np
from scipy.spatial.distance import cdist


def nearest_centroids(points, centroids):
    """For each point, index of and squared distance to the closest centroid."""
    points = np.asarray(points, dtype=np.float64)
    centroids = np.asarray(centroids, dtype=np.float64)
    if points.shape[1] != centroids.shape[1]:
        raise ValueError("dimension mismatch")
    d2 = cdist(points, centroids, "sqeuclidean")
    labels = d2.argmin(axis=1).astype(np.int64)
    return labels, d2[np.arange(len(points)), labels]


def sampler_select(frames_w, draws_w, n_select, mean_shift):
    """Greedy nearest-frame selection in whitened coordinates."""
    frames_w = np.asarray(frames_w, dtype=np.float64)
    draws_w = np.asarray(draws_w, dtype=np.float64)
    n, d = frames_w.shape
    if draws_w.shape[0] < n_select or draws_w.shape[1] != d:
        raise ValueError("draws shape does not cover the selection")
    if n_select > n:
        raise ValueError("cannot select more frames than exist")
    taken = np.zeros(n, dtype=bool)
    diff = np.zeros(d)
    out = np.empty(n_select, dtype=np.int64)
    for t in range(n_select):
        adj = draws_w[t] - diff
        delta = frames_w - adj
        dist = np.einsum("ij,ij->i", delta, delta)
        dist[taken] = np.inf
        best = int(np.argmin(dist))
        out[t] = best
        taken[best] = True
        if mean_shift:
            diff = adj - frames_w[best]
    return out
