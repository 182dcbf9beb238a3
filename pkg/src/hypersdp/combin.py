"""Combinatorial helpers: degenerate-safe binomials and colex (un)ranking of d-sets.

Every d-set of nodes is identified by its colexicographic rank
``sum_j C(c_j, j+1)`` over the 0-based sorted members ``c_0 < ... < c_{d-1}``.
Ranks are the canonical edge keys used for storage and for keying per-edge
random draws.
"""

from __future__ import annotations

import itertools
import math

import numpy as np


def binom(a: int, b: int) -> int:
    """C(a, b) with the convention C(a, b) = 0 whenever a < b or b < 0."""
    if b < 0 or a < b:
        return 0
    return math.comb(a, b)


def binom_table(n: int, d: int) -> np.ndarray:
    """Table T[i, j] = C(i, j) for 0 <= i <= n, 0 <= j <= d (float64 exact up to 2^53)."""
    table = np.zeros((n + 1, d + 1), dtype=np.float64)
    table[:, 0] = 1.0
    for j in range(1, d + 1):
        table[j:, j] = np.cumsum(table[j - 1 :, j - 1])[:-1]
    return table


def rank_colex(nodes0: np.ndarray) -> np.ndarray:
    """Colex ranks of d-sets given as an (m, d) array of 0-based sorted members."""
    nodes0 = np.asarray(nodes0, dtype=np.int64)
    if nodes0.ndim == 1:
        nodes0 = nodes0[None, :]
    d = nodes0.shape[1]
    table = binom_table(int(nodes0.max(initial=0)), d)
    ranks = np.zeros(nodes0.shape[0], dtype=np.int64)
    for j in range(d):
        ranks += table[nodes0[:, j], j + 1].astype(np.int64)
    return ranks


def unrank_colex(ranks: np.ndarray, n: int, d: int) -> np.ndarray:
    """Invert :func:`rank_colex`: ranks -> (m, d) array of 0-based sorted members."""
    ranks = np.asarray(ranks, dtype=np.int64)
    table = binom_table(n, d)
    rem = ranks.astype(np.float64)
    out = np.empty((ranks.shape[0], d), dtype=np.int64)
    for j in range(d, 0, -1):
        # largest c with C(c, j) <= rem
        c = np.searchsorted(table[:, j], rem, side="right") - 1
        out[:, j - 1] = c
        rem -= table[c, j]
    return out


def all_dsets(members: np.ndarray | list[int], d: int) -> np.ndarray:
    """All d-subsets of ``members`` as an (m, d) array in sorted-member order."""
    members = sorted(int(v) for v in members)
    combos = list(itertools.combinations(members, d))
    if not combos:
        return np.empty((0, d), dtype=np.int64)
    return np.asarray(combos, dtype=np.int64)
