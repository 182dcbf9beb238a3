"""Monte-Carlo measurement of similarity-matrix spectral concentration.

For independently weighted hypergraphs with edge means at most mu, the
centered similarity matrix concentrates at scale sqrt(n * C(n-2, d-2) * mu);
these helpers measure the per-trial ratio against that scale.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .combin import binom
from .model import ModelParams, WeightedHypergraph, make_partition, sample_whsbm
from .rng import derive_seed
from .similarity import build_similarity, expected_similarity


@dataclass(frozen=True)
class ConcentrationReport:
    n: int
    d: int
    mu_n: float
    trials: int
    ratios: tuple[float, ...]

    @property
    def max_ratio(self) -> float:
        return max(self.ratios)


def spectral_deviation(w: WeightedHypergraph, ea: np.ndarray) -> float:
    """Spectral norm of A - E[A] (largest absolute eigenvalue)."""
    diff = build_similarity(w) - np.asarray(ea, dtype=np.float64)
    eigs = scipy.linalg.eigh(diff, eigvals_only=True, check_finite=False)
    return float(np.abs(eigs).max())


def deviation_scale(n: int, d: int, mu: float) -> float:
    """The concentration scale sqrt(n * C(n-2, d-2) * mu)."""
    return math.sqrt(n * binom(n - 2, d - 2) * mu)


def verify_bound(grid, trials: int, seed: int = 0, weight_law: str = "bernoulli") -> list[ConcentrationReport]:
    """Sample hypergraphs over a (n, d, mu) grid and report per-trial deviation ratios.

    Grid points violating the hypothesis n * C(n-2, d-2) * mu >= log(n) are
    skipped with a warning. Every edge gets mean mu (single-community model).
    """
    reports = []
    for n, d, mu in grid:
        n, d, mu = int(n), int(d), float(mu)
        if n * binom(n - 2, d - 2) * mu < math.log(n):
            warnings.warn(f"grid point (n={n}, d={d}, mu={mu}) violates the density hypothesis; skipped")
            continue
        partition = make_partition([n])
        scale = deviation_scale(n, d, mu)
        ratios = []
        for t in range(trials):
            params = ModelParams(n=n, d=d, k=1, p=mu, q=mu, weight_law=weight_law, seed=derive_seed(seed, n, d, t))
            w = sample_whsbm(params, partition)
            ea, _ = expected_similarity(params, partition)
            ratios.append(spectral_deviation(w, ea) / scale)
        reports.append(ConcentrationReport(n=n, d=d, mu_n=mu, trials=trials, ratios=tuple(ratios)))
    return reports
