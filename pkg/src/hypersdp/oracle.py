"""Brute-force reference estimators for tiny instances (test oracles).

Exhaustive search over set partitions certifies the relaxation: the penalized
SDP must dominate the best combinatorial objective, and an integral SDP
solution must coincide with the exhaustive argmax.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .combin import binom
from .model import Partition, WeightedHypergraph

_MAX_ORACLE_N = 10


@dataclass(frozen=True)
class MleConfig:
    """Bernoulli edge-weight likelihood parameters with the derived regularizer."""

    p: float
    q: float

    def __post_init__(self):
        if not 0.0 < self.q < self.p < 1.0:
            raise ValueError(f"need 0 < q < p < 1, got p={self.p}, q={self.q}")

    @property
    def mu(self) -> float:
        """Log-odds-weighted mean of p and q; always lies strictly between them."""
        num = math.log(1.0 - self.q) - math.log(1.0 - self.p)
        den = math.log(self.p) + math.log(1.0 - self.q) - math.log(self.q) - math.log(1.0 - self.p)
        return num / den


def set_partitions(n: int, max_blocks: int) -> Iterator[tuple[int, ...]]:
    """All partitions of [n] into at most max_blocks nonempty communities.

    Emitted as canonical label tuples (restricted growth strings, 1-based) in
    lexicographic order.
    """
    labels = [1] * n

    def rec(i: int, used: int):
        if i == n:
            yield tuple(labels)
            return
        for lab in range(1, min(used + 1, max_blocks) + 1):
            labels[i] = lab
            yield from rec(i + 1, max(used, lab))

    yield from rec(1, 1)


def _check_oracle_size(n: int) -> None:
    if n > _MAX_ORACLE_N:
        raise ValueError(f"brute-force oracle refuses n={n} > {_MAX_ORACLE_N}")


def brute_force_mle(w: WeightedHypergraph, k: int, cfg: MleConfig) -> Partition:
    """Exhaustive maximizer of sum over homogeneous slots of (W_e - mu), binary weights.

    Absent slots count with weight 0. Ties break to the lexicographically
    smallest label sequence.
    """
    _check_oracle_size(w.n)
    if w.weights.size and not np.isin(w.weights, (0.0, 1.0)).all():
        raise ValueError("exact likelihood oracle is defined for binary weights")
    mu = cfg.mu
    edge_rows = w.nodes - 1
    best_obj, best_labels = -math.inf, None
    for labels in set_partitions(w.n, k):
        labs = np.asarray(labels)
        edge_labs = labs[edge_rows]
        hom_weight = w.weights[(edge_labs == edge_labs[:, :1]).all(axis=1)].sum() if w.m else 0.0
        hom_slots = sum(binom(int(np.sum(labs == a)), w.d) for a in range(1, k + 1))
        obj = float(hom_weight) - mu * hom_slots
        if obj > best_obj + 1e-12:
            best_obj, best_labels = obj, labels
    assert best_labels is not None
    return Partition(labels=best_labels, k=k)


def brute_force_truncated(a: np.ndarray, k: int, lam: float) -> tuple[Partition, float]:
    """Exhaustive maximizer of the pairwise objective sum_{i != j} (A_ij - lam) X_ij.

    Returns the argmax partition and its objective value. The value runs over
    distinct pairs only; it differs from the matrix inner product
    <A - lam*J, X> by the constant n*lam contributed by the unit diagonal.
    """
    a = np.asarray(a, dtype=np.float64)
    n = a.shape[0]
    _check_oracle_size(n)
    b = a - lam
    np.fill_diagonal(b, 0.0)
    best_obj, best_labels = -math.inf, None
    for labels in set_partitions(n, k):
        labs = np.asarray(labels)
        same = labs[:, None] == labs[None, :]
        obj = float(b[same].sum())
        if obj > best_obj + 1e-12:
            best_obj, best_labels = obj, labels
    assert best_labels is not None
    return Partition(labels=best_labels, k=k), best_obj


def polynomial_term(w: WeightedHypergraph, mu: float, y: np.ndarray, order: int) -> float:
    """Degree-``order`` term of the penalized-correlation polynomial, from its definition.

    Sums, over all index sets I of the given size, the centered weight mass of
    edges containing I times sum_j prod_{i in I} Y_ij.
    """
    _check_oracle_size(w.n)
    y = np.asarray(y, dtype=np.float64)
    n = w.n
    edge_sets = [frozenset(int(v) for v in row) for row in w.nodes]
    slots_per_subset = binom(n - order, w.d - order)
    total = 0.0
    for subset in itertools.combinations(range(1, n + 1), order):
        ss = set(subset)
        w_sum = sum(float(wt) for es, wt in zip(edge_sets, w.weights) if ss <= es)
        coeff = w_sum - mu * slots_per_subset
        rows = [i - 1 for i in subset]
        factor = float(y[rows, :].prod(axis=0).sum()) if order else float(y.shape[1])
        total += coeff * factor
    return total


def mle_polynomial_terms(w: WeightedHypergraph, partition: Partition, cfg: MleConfig) -> tuple[float, float, float]:
    """Terms of order 0..2 evaluated at the signed membership matrix Y = 2Z - 1."""
    y = 2.0 * partition.membership_matrix() - 1.0
    return tuple(polynomial_term(w, cfg.mu, y, order) for order in range(3))
