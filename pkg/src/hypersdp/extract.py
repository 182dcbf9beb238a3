"""Rounding SDP solutions to explicit partitions and scoring them.

Rows of the solution matrix are clustered by multi-restart alternating
k-medoids under the l1 distance (with a PAM swap pass on plateaus), and
partitions are compared by the permutation-minimal misclustering fraction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import cdist

from .model import Partition, WeightedHypergraph
from .rng import generator
from .sdp import SdpProblem, SdpSolution, SolverConfig, solve
from .similarity import build_similarity


@dataclass(frozen=True)
class KMedoidsResult:
    labels: Partition
    medoids: tuple[int, ...]  # 0-based row indices
    cost: float
    cost_trace: tuple[float, ...]  # per accepted step of the best restart


def _assign(dist: np.ndarray, medoids: np.ndarray) -> tuple[np.ndarray, float]:
    # ties go to the lowest medoid position; medoids are kept sorted
    sub = dist[:, medoids]
    labels = np.argmin(sub, axis=1)
    return labels, float(sub[np.arange(dist.shape[0]), labels].sum())


def _update_medoids(dist: np.ndarray, medoids: np.ndarray, labels: np.ndarray) -> np.ndarray:
    new = medoids.copy()
    for a in range(medoids.size):
        members = np.flatnonzero(labels == a)
        if members.size:
            within = dist[np.ix_(members, members)].sum(axis=0)
            new[a] = members[int(np.argmin(within))]
    return new


def _best_swap(dist: np.ndarray, medoids: np.ndarray, cost: float) -> tuple[float, int, int]:
    """Cheapest single medoid-for-nonmedoid exchange (PAM scan)."""
    n = dist.shape[0]
    sub = dist[:, medoids]
    order = np.argsort(sub, axis=1)
    closest = order[:, 0]
    d1 = sub[np.arange(n), closest]
    d2 = sub[np.arange(n), order[:, 1]] if medoids.size > 1 else np.full(n, np.inf)
    best = (cost, -1, -1)
    candidates = np.setdiff1d(np.arange(n), medoids)
    for o in range(medoids.size):
        # distance to the nearest remaining medoid once o is removed
        drop = np.where(closest == o, d2, d1)
        for c in candidates:
            swapped = float(np.minimum(drop, dist[:, c]).sum())
            if swapped < best[0] - 1e-12:
                best = (swapped, o, int(c))
    return best


def kmedoids_rows(x: np.ndarray, k: int, restarts: int = 10, seed: int = 0) -> KMedoidsResult:
    """Cluster the rows of x into k groups, minimizing summed l1 distance to medoid rows.

    Alternates assignment and medoid recomputation from seeded random starts,
    applying the best improving PAM swap whenever alternation plateaus. Ties
    break to the lowest index, best restart wins (earliest on equal cost).
    """
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    dist = cdist(x, x, metric="cityblock")
    best: tuple[float, int, np.ndarray, np.ndarray, list[float]] | None = None
    for r in range(restarts):
        rng = generator(seed, 0x3ED, r)
        medoids = np.sort(rng.choice(n, size=k, replace=False))
        labels, cost = _assign(dist, medoids)
        trace = [cost]
        while True:
            new_medoids = np.sort(_update_medoids(dist, medoids, labels))
            new_labels, new_cost = _assign(dist, new_medoids)
            if new_cost < cost - 1e-12:
                medoids, labels, cost = new_medoids, new_labels, new_cost
                trace.append(cost)
                continue
            swap_cost, out, cand = _best_swap(dist, medoids, cost)
            if out >= 0:
                medoids = np.sort(np.concatenate([np.delete(medoids, out), [cand]]))
                labels, cost = _assign(dist, medoids)
                trace.append(cost)
                continue
            break
        if best is None or cost < best[0] - 1e-12:
            best = (cost, r, medoids, labels, trace)
    assert best is not None
    cost, _, medoids, labels, trace = best
    partition = Partition(labels=tuple(int(v) + 1 for v in labels), k=k)
    return KMedoidsResult(
        labels=partition,
        medoids=tuple(int(v) for v in medoids),
        cost=cost,
        cost_trace=tuple(trace),
    )


def round_solution(x, k: int, restarts: int = 10, seed: int = 0) -> Partition:
    """Extract a partition from an SDP solution by k-medoids on its rows."""
    if isinstance(x, SdpSolution):
        x = x.x
    return kmedoids_rows(np.asarray(x), k, restarts=restarts, seed=seed).labels


def round_outlier_solution(x, k: int, restarts: int = 10, seed: int = 0) -> Partition:
    """Partition with outlier label k+1 for rows whose diagonal entry is below 1/2.

    The constrained relaxation drives inlier diagonals to 1 and outlier
    diagonals to 0; remaining rows are clustered as usual.
    """
    if isinstance(x, SdpSolution):
        x = x.x
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[0]
    inliers = np.flatnonzero(np.diag(x) >= 0.5)
    labels = np.full(n, k + 1, dtype=np.int64)
    if inliers.size:
        k_eff = min(k, inliers.size)
        inner = kmedoids_rows(x[inliers], k_eff, restarts=restarts, seed=seed)
        labels[inliers] = np.asarray(inner.labels.labels)
    return Partition(labels=tuple(int(v) for v in labels), k=k)


def misclustering_error(est: Partition, truth: Partition) -> float:
    """Fraction of misassigned nodes, minimized over label permutations.

    Computed exactly via maximum-weight assignment on the confusion matrix,
    padded square when the label counts differ; an outlier label takes part
    as an ordinary extra label.
    """
    if est.n != truth.n:
        raise ValueError(f"partition lengths differ: {est.n} vs {truth.n}")
    m = max(max(est.labels), max(truth.labels))
    confusion = np.zeros((m, m), dtype=np.int64)
    for t, e in zip(truth.labels, est.labels):
        confusion[t - 1, e - 1] += 1
    rows, cols = linear_sum_assignment(confusion, maximize=True)
    return 1.0 - float(confusion[rows, cols].sum()) / truth.n


@dataclass(frozen=True)
class PipelineResult:
    partition: Partition
    solution: SdpSolution
    similarity: np.ndarray


def cluster_hypergraph(
    w: WeightedHypergraph,
    k: int,
    lam: float,
    solver: SolverConfig | None = None,
    restarts: int = 10,
    seed: int = 0,
) -> PipelineResult:
    """Full pipeline: similarity matrix -> penalized SDP -> k-medoids rounding."""
    if lam < 0:
        raise ValueError("lambda must be >= 0")
    a = build_similarity(w)
    solution = solve(SdpProblem.penalized(a, lam), solver)
    partition = round_solution(solution, k, restarts=restarts, seed=seed)
    return PipelineResult(partition=partition, solution=solution, similarity=a)
