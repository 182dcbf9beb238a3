"""Truncation of a weighted hypergraph to its pairwise similarity matrix.

A_ij sums the weights of all edges containing both i and j (zero diagonal).
Also provides the model-level expected similarities and the recovery-regime
predicates used for diagnostics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .combin import binom
from .model import ModelParams, Partition, WeightedHypergraph


@dataclass(frozen=True)
class SimilarityProfile:
    """Expected similarities per community pair.

    ``delta[a, b]`` is the expected similarity between a node of community
    a+1 and one of community b+1; ``p_minus``/``q_plus`` are the minimum
    within-cluster and maximum cross-cluster values.
    """

    delta: np.ndarray
    p_minus: float
    q_plus: float


@dataclass(frozen=True)
class RecoveryCheck:
    """Both sides of the recovery condition, for reporting."""

    satisfied: bool
    lhs: float
    rhs: float

    @property
    def margin(self) -> float:
        return self.lhs / self.rhs if self.rhs > 0 else math.inf


def build_similarity(w: WeightedHypergraph) -> np.ndarray:
    """Dense symmetric n x n similarity matrix of the hypergraph."""
    a = np.zeros((w.n, w.n))
    idx = w.nodes - 1
    for i in range(w.d):
        for j in range(i + 1, w.d):
            np.add.at(a, (idx[:, i], idx[:, j]), w.weights)
    a += a.T
    return a


def expected_similarity(params: ModelParams, partition: Partition) -> tuple[np.ndarray, SimilarityProfile]:
    """E[A] of the block model, expanded to n x n, plus its community profile."""
    if partition.has_outliers:
        raise ValueError("expected similarity is defined for partitions without outliers")
    if partition.n != params.n or partition.k != params.k:
        raise ValueError("partition does not match params")
    if params.p < params.q:
        raise ValueError("assortative parameters expected (p >= q); complement the hypergraph first")
    n, d, k = params.n, params.d, params.k
    cross = binom(n - 2, d - 2) * params.q
    delta = np.full((k, k), cross)
    for a in range(k):
        s_a = partition.sizes[a]
        delta[a, a] = binom(s_a - 2, d - 2) * (params.p - params.q) + cross
    labs = np.asarray(partition.labels) - 1
    ea = delta[np.ix_(labs, labs)].copy()
    np.fill_diagonal(ea, 0.0)
    # cross-cluster entries are all equal, so q_plus = cross even when k = 1
    profile = SimilarityProfile(delta=delta, p_minus=float(delta.diagonal().min()), q_plus=float(cross))
    return ea, profile


def recovery_condition(params: ModelParams, s_min: int, c1: float = 1.0) -> RecoveryCheck:
    """Diagnostic predicate for the exact-recovery regime (natural log).

    Checks s_min^2 C(s_min-2, d-2)^2 (p-q)^2 >= c1 C(n-2, d-2) p (s_min log n + n).
    Never used to gate the solver.
    """
    if c1 <= 0:
        raise ValueError("c1 must be positive")
    n, d = params.n, params.d
    lhs = s_min**2 * binom(s_min - 2, d - 2) ** 2 * (params.p - params.q) ** 2
    rhs = c1 * binom(n - 2, d - 2) * params.p * (s_min * math.log(n) + n)
    return RecoveryCheck(satisfied=lhs >= rhs, lhs=float(lhs), rhs=float(rhs))


def lambda_window(profile: SimilarityProfile, c: float = 0.25) -> tuple[float, float]:
    """Admissible interval [c p^- + (1-c) q^+, (1-c) p^- + c q^+] for the tuning parameter."""
    if not 0 < c <= 0.5:
        raise ValueError("window constant must lie in (0, 1/2]")
    if profile.p_minus < profile.q_plus:
        raise ValueError("p_minus < q_plus: disassortative input was not complemented")
    lo = c * profile.p_minus + (1 - c) * profile.q_plus
    hi = (1 - c) * profile.p_minus + c * profile.q_plus
    return lo, hi


def lambda_midpoint(profile: SimilarityProfile) -> float:
    """Default tuning parameter (p^- + q^+) / 2."""
    return 0.5 * (profile.p_minus + profile.q_plus)


def write_matrix(path, a: np.ndarray) -> None:
    """Plain-text dump: ``n`` header then n rows of n decimals."""
    a = np.asarray(a)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{a.shape[0]}\n")
        for row in a:
            fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")


def read_matrix(path) -> np.ndarray:
    with open(path, "r", encoding="utf-8") as fh:
        n = int(fh.readline())
        rows = [[float(v) for v in fh.readline().split()] for _ in range(n)]
    a = np.asarray(rows)
    if a.shape != (n, n):
        raise ValueError("matrix body does not match header dimension")
    return a
