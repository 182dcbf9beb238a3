"""Weighted d-uniform hypergraph block models: partitions, samplers, transforms, file I/O.

Node indices are 1-based in memory and 0-based in files. Edges are stored
sparsely as sorted d-tuples keyed by colex rank; zero-weight entries are
omitted. All samplers draw each edge slot from a counter-based stream keyed
by the slot's rank, so results are independent of enumeration order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .combin import all_dsets, binom, rank_colex, unrank_colex
from .rng import counter_uniforms, derive_seed, generator

# Transforms that must materialize every edge slot (complement, constant law
# with q > 0, partial observation) refuse beyond this many slots.
DENSE_SLOT_CAP = 1 << 24

_SCAN_CHUNK = 1 << 22


@dataclass(frozen=True)
class Partition:
    """Community assignment of n nodes into labels 1..k, with k+1 marking outliers."""

    labels: tuple[int, ...]
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if not self.labels:
            raise ValueError("partition must cover at least one node")
        for lab in self.labels:
            if not 1 <= lab <= self.k + 1:
                raise ValueError(f"label {lab} outside [1, {self.k + 1}]")

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def sizes(self) -> tuple[int, ...]:
        counts = [0] * self.k
        for lab in self.labels:
            if lab <= self.k:
                counts[lab - 1] += 1
        return tuple(counts)

    @property
    def n_outliers(self) -> int:
        return sum(1 for lab in self.labels if lab == self.k + 1)

    @property
    def has_outliers(self) -> bool:
        return self.n_outliers > 0

    @property
    def s_min(self) -> int:
        return min(self.sizes)

    @property
    def s_max(self) -> int:
        return max(self.sizes)

    @property
    def is_balanced(self) -> bool:
        return self.s_min == self.s_max

    def members(self, label: int) -> np.ndarray:
        """1-based node ids carrying the given label."""
        labs = np.asarray(self.labels)
        return np.flatnonzero(labs == label) + 1

    def membership_matrix(self) -> np.ndarray:
        """n x k binary matrix; outlier rows are all-zero."""
        z = np.zeros((self.n, self.k))
        for i, lab in enumerate(self.labels):
            if lab <= self.k:
                z[i, lab - 1] = 1.0
        return z

    def cluster_matrix(self) -> np.ndarray:
        """n x n binary matrix with 1 where two nodes share a community."""
        z = self.membership_matrix()
        return z @ z.T


def make_partition(sizes, n_outliers: int = 0) -> Partition:
    """Contiguous partition: community 1 gets the first s_1 nodes, outliers last."""
    sizes = [int(s) for s in sizes]
    if any(s < 1 for s in sizes):
        raise ValueError(f"community sizes must be >= 1, got {sizes}")
    if n_outliers < 0:
        raise ValueError("n_outliers must be >= 0")
    labels: list[int] = []
    for a, s in enumerate(sizes, start=1):
        labels.extend([a] * s)
    labels.extend([len(sizes) + 1] * n_outliers)
    return Partition(labels=tuple(labels), k=len(sizes))


@dataclass(frozen=True)
class ModelParams:
    """Parameters of the weighted d-uniform hypergraph block model."""

    n: int
    d: int
    k: int
    p: float
    q: float
    weight_law: str = "bernoulli"
    seed: int = 0

    def __post_init__(self):
        if not 2 <= self.d <= self.n:
            raise ValueError(f"need 2 <= d <= n, got d={self.d}, n={self.n}")
        if not 1 <= self.k <= self.n:
            raise ValueError(f"need 1 <= k <= n, got k={self.k}, n={self.n}")
        for name, v in (("p", self.p), ("q", self.q)):
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        if self.weight_law not in ("bernoulli", "constant"):
            raise ValueError(f"unknown weight_law {self.weight_law!r}")


class WeightedHypergraph:
    """Sparse weighted d-uniform hypergraph on nodes 1..n.

    Edges are kept as an (m, d) array of strictly increasing 1-based node
    tuples with weights in [0, 1], sorted by colex rank; exact-zero weights
    are dropped on construction.
    """

    def __init__(self, n: int, d: int, nodes: np.ndarray, weights: np.ndarray):
        nodes = np.asarray(nodes, dtype=np.int64).reshape(-1, d)
        weights = np.asarray(weights, dtype=np.float64).reshape(-1)
        if nodes.shape[0] != weights.shape[0]:
            raise ValueError("edge tuples and weights disagree in length")
        if nodes.size:
            if nodes.min() < 1 or nodes.max() > n:
                raise ValueError(f"node index outside [1, {n}]")
            if not (np.diff(nodes, axis=1) > 0).all():
                raise ValueError("edge tuples must be strictly increasing")
        if weights.size and (weights.min() < 0.0 or weights.max() > 1.0):
            raise ValueError("weights must lie in [0, 1]")
        keep = weights != 0.0
        nodes, weights = nodes[keep], weights[keep]
        ranks = rank_colex(nodes - 1) if nodes.size else np.empty(0, dtype=np.int64)
        order = np.argsort(ranks)
        if nodes.size and np.unique(ranks).size != ranks.size:
            raise ValueError("duplicate edge tuples")
        self.n = int(n)
        self.d = int(d)
        self.nodes = nodes[order]
        self.weights = weights[order]
        self.ranks = ranks[order]

    @property
    def m(self) -> int:
        return self.nodes.shape[0]

    @property
    def edges(self) -> list[tuple[tuple[int, ...], float]]:
        return [(tuple(int(v) for v in row), float(w)) for row, w in zip(self.nodes, self.weights)]

    def total_slots(self) -> int:
        return binom(self.n, self.d)

    def total_weight(self) -> float:
        return float(self.weights.sum())

    def same_weights(self, other: "WeightedHypergraph") -> bool:
        """Equality as weight functions on d-sets (zero entries ignored)."""
        return (
            self.n == other.n
            and self.d == other.d
            and np.array_equal(self.ranks, other.ranks)
            and np.array_equal(self.weights, other.weights)
        )


class ObservedHypergraph(WeightedHypergraph):
    """Partially observed hypergraph: stored edges are the observed nonzero slots.

    ``observed_ranks`` lists the colex ranks of every observed slot, including
    zero-weight ones; unobserved slots carry no weight information.
    """

    def __init__(self, n, d, nodes, weights, observed_ranks: np.ndarray):
        super().__init__(n, d, nodes, weights)
        observed_ranks = np.sort(np.asarray(observed_ranks, dtype=np.int64))
        if self.ranks.size and not _in_sorted(self.ranks, observed_ranks).all():
            raise ValueError("stored edge not marked observed")
        self.observed_ranks = observed_ranks

    @property
    def n_observed(self) -> int:
        return int(self.observed_ranks.size)


def is_homogeneous(partition: Partition, edge_nodes) -> bool:
    """True iff every node of the d-set carries the same community label <= k."""
    labs = {partition.labels[int(i) - 1] for i in edge_nodes}
    return len(labs) == 1 and next(iter(labs)) <= partition.k


def _homogeneous_ranks(partition: Partition, d: int) -> np.ndarray:
    """Sorted colex ranks of all d-sets lying inside a single community."""
    pieces = []
    for a in range(1, partition.k + 1):
        members = partition.members(a)
        if members.size >= d:
            pieces.append(rank_colex(all_dsets(members - 1, d)))
    if not pieces:
        return np.empty(0, dtype=np.int64)
    return np.sort(np.concatenate(pieces))


def _in_sorted(values: np.ndarray, sorted_arr: np.ndarray) -> np.ndarray:
    if sorted_arr.size == 0:
        return np.zeros(values.shape, dtype=bool)
    pos = np.searchsorted(sorted_arr, values)
    pos = np.minimum(pos, sorted_arr.size - 1)
    return sorted_arr[pos] == values


def _sample_two_level(n, d, p, q, hom_ranks, weight_law, seed) -> WeightedHypergraph:
    """Sample edges whose mean is p on ``hom_ranks`` slots and q elsewhere."""
    total = binom(n, d)
    if weight_law == "constant":
        if q == 0.0:
            ranks = hom_ranks
            weights = np.full(ranks.shape, p)
        else:
            if total > DENSE_SLOT_CAP:
                raise ValueError(f"constant law with q > 0 materializes all {total} slots (cap {DENSE_SLOT_CAP})")
            ranks = np.arange(total, dtype=np.int64)
            weights = np.full(total, q)
            weights[_in_sorted(ranks, hom_ranks)] = p
        nodes = unrank_colex(ranks, n, d) + 1 if ranks.size else np.empty((0, d))
        return WeightedHypergraph(n, d, nodes, weights)

    kept = []
    for lo in range(0, total, _SCAN_CHUNK):
        ranks = np.arange(lo, min(lo + _SCAN_CHUNK, total), dtype=np.int64)
        u = counter_uniforms(seed, ranks)
        mean = np.where(_in_sorted(ranks, hom_ranks), p, q)
        kept.append(ranks[u < mean])
    ranks = np.concatenate(kept) if kept else np.empty(0, dtype=np.int64)
    nodes = unrank_colex(ranks, n, d) + 1 if ranks.size else np.empty((0, d))
    return WeightedHypergraph(n, d, nodes, np.ones(ranks.shape))


def sample_whsbm(params: ModelParams, partition: Partition) -> WeightedHypergraph:
    """Draw a hypergraph whose homogeneous edges have mean p and the rest mean q."""
    if partition.has_outliers:
        raise ValueError("block model without outliers expected; use sample_whpcm")
    if partition.n != params.n or partition.k != params.k:
        raise ValueError("partition does not match params")
    hom = _homogeneous_ranks(partition, params.d)
    return _sample_two_level(params.n, params.d, params.p, params.q, hom, params.weight_law, params.seed)


def sample_whpcm(params: ModelParams, partition: Partition) -> WeightedHypergraph:
    """Balanced-community variant allowing outlier nodes (label k+1).

    Edges fully inside one community have mean p; every edge touching an
    outlier, or straddling communities, has mean q.
    """
    if partition.n != params.n or partition.k != params.k:
        raise ValueError("partition does not match params")
    if not partition.is_balanced:
        raise ValueError("outlier model is defined for equal-sized communities")
    hom = _homogeneous_ranks(partition, params.d)
    return _sample_two_level(params.n, params.d, params.p, params.q, hom, params.weight_law, params.seed)


def sample_planted_clique(n: int, s: int, d: int, seed: int = 0) -> tuple[WeightedHypergraph, Partition]:
    """Plant an s-clique: edges inside a hidden s-set appear w.p. 1, others w.p. 1/2.

    Returns the sample together with the hidden set as a one-community
    partition with n - s outliers.
    """
    if not d <= s <= n:
        raise ValueError(f"need d <= s <= n, got d={d}, s={s}, n={n}")
    hidden = np.sort(generator(seed, 0xC11).choice(n, size=s, replace=False)) + 1
    labels = np.full(n, 2, dtype=np.int64)
    labels[hidden - 1] = 1
    partition = Partition(labels=tuple(int(v) for v in labels), k=1)
    params = ModelParams(n=n, d=d, k=1, p=1.0, q=0.5, weight_law="bernoulli", seed=seed)
    return sample_whpcm(params, partition), partition


def partial_observe(w: WeightedHypergraph, eps: float, seed: int = 0) -> ObservedHypergraph:
    """Mark every edge slot observed independently with probability eps."""
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"eps must lie in [0, 1], got {eps}")
    total = w.total_slots()
    if total > DENSE_SLOT_CAP:
        raise ValueError(f"partial observation materializes all {total} slots (cap {DENSE_SLOT_CAP})")
    obs_seed = derive_seed(seed, 0x0B5)
    kept = []
    for lo in range(0, total, _SCAN_CHUNK):
        ranks = np.arange(lo, min(lo + _SCAN_CHUNK, total), dtype=np.int64)
        kept.append(ranks[counter_uniforms(obs_seed, ranks) < eps])
    observed = np.concatenate(kept) if kept else np.empty(0, dtype=np.int64)
    mask = _in_sorted(w.ranks, observed)
    return ObservedHypergraph(w.n, w.d, w.nodes[mask], w.weights[mask], observed)


def zero_impute(obs: ObservedHypergraph) -> WeightedHypergraph:
    """Treat unobserved slots as weight 0, yielding an ordinary hypergraph."""
    return WeightedHypergraph(obs.n, obs.d, obs.nodes, obs.weights)


def complement(w: WeightedHypergraph) -> WeightedHypergraph:
    """Weight map e -> 1 - W_e over every slot (turns disassortative into assortative)."""
    total = w.total_slots()
    if total > DENSE_SLOT_CAP:
        raise ValueError(f"complement materializes all {total} slots (cap {DENSE_SLOT_CAP})")
    weights = np.ones(total)
    weights[w.ranks] = 1.0 - w.weights
    nodes = unrank_colex(np.arange(total, dtype=np.int64), w.n, w.d) + 1
    return WeightedHypergraph(w.n, w.d, nodes, weights)


def write_hypergraph(path, w: WeightedHypergraph) -> None:
    """Text format: header ``n d m`` then one ``i1 ... id weight`` line per edge (0-based)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{w.n} {w.d} {w.m}\n")
        for row, weight in zip(w.nodes - 1, w.weights):
            fh.write(" ".join(str(int(v)) for v in row) + f" {weight:.17g}\n")


def read_hypergraph(path) -> WeightedHypergraph:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 3:
            raise ValueError("hypergraph header must be 'n d m'")
        n, d, m = (int(v) for v in header)
        nodes = np.empty((m, d), dtype=np.int64)
        weights = np.empty(m)
        for i in range(m):
            parts = fh.readline().split()
            if len(parts) != d + 1:
                raise ValueError(f"edge line {i + 2}: expected {d} indices and a weight")
            nodes[i] = [int(v) for v in parts[:d]]
            weights[i] = float(parts[d])
    return WeightedHypergraph(n, d, nodes + 1, weights)


def write_partition(path, partition: Partition) -> None:
    """Text format: header ``n k [n_outliers]`` then one 1-based label per line."""
    with open(path, "w", encoding="utf-8") as fh:
        if partition.has_outliers:
            fh.write(f"{partition.n} {partition.k} {partition.n_outliers}\n")
        else:
            fh.write(f"{partition.n} {partition.k}\n")
        for lab in partition.labels:
            fh.write(f"{lab}\n")


def read_partition(path) -> Partition:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) not in (2, 3):
            raise ValueError("partition header must be 'n k [n_outliers]'")
        n, k = int(header[0]), int(header[1])
        labels = tuple(int(fh.readline()) for _ in range(n))
    part = Partition(labels=labels, k=k)
    if len(header) == 3 and part.n_outliers != int(header[2]):
        raise ValueError("outlier count in header disagrees with labels")
    return part
