"""In-repo spectral clustering baseline for comparison runs.

Top-k eigenvectors of the similarity matrix, rows normalized, clustered by
seeded Lloyd k-means. Kept deliberately simple; it is the comparison point,
not the method under study.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .model import Partition
from .rng import generator


def _lloyd(points: np.ndarray, k: int, rng: np.random.Generator, iters: int = 100) -> tuple[np.ndarray, float]:
    n = points.shape[0]
    centers = points[rng.choice(n, size=k, replace=False)].copy()
    labels = np.zeros(n, dtype=np.int64)
    for _ in range(iters):
        d2 = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        new_labels = np.argmin(d2, axis=1)
        for a in range(k):
            members = points[new_labels == a]
            if members.shape[0]:
                centers[a] = members.mean(axis=0)
            else:
                # re-seed empty cluster at the worst-served point
                centers[a] = points[int(np.argmax(d2[np.arange(n), new_labels]))]
        if (new_labels == labels).all():
            break
        labels = new_labels
    d2 = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    labels = np.argmin(d2, axis=1)
    inertia = float(d2[np.arange(n), labels].sum())
    return labels, inertia


def spectral_baseline(a: np.ndarray, k: int, restarts: int = 10, seed: int = 0) -> Partition:
    """Cluster nodes from the top-k eigenvectors of the similarity matrix."""
    a = np.asarray(a, dtype=np.float64)
    n = a.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    vals, vecs = scipy.linalg.eigh(a, check_finite=False)
    points = vecs[:, np.argsort(vals)[::-1][:k]]
    norms = np.linalg.norm(points, axis=1, keepdims=True)
    points = np.where(norms > 1e-300, points / np.maximum(norms, 1e-300), points)
    best_labels, best_inertia = None, np.inf
    for r in range(restarts):
        labels, inertia = _lloyd(points, k, generator(seed, 0x5BA, r))
        if inertia < best_inertia - 1e-12:
            best_labels, best_inertia = labels, inertia
    assert best_labels is not None
    return Partition(labels=tuple(int(v) + 1 for v in best_labels), k=k)
