"""Experiment grids: benchmark runs, outlier/clique runs, CSV and SVG reporting.

Every run embeds its configuration and master seed in the result files;
per-trial seeds derive deterministically from (master seed, cell, trial), so
re-running a config reproduces the same results (wall-clock columns aside).
"""

from __future__ import annotations

import dataclasses
import json
import math
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .baseline import spectral_baseline
from .combin import binom
from .extract import misclustering_error, round_outlier_solution, round_solution
from .model import ModelParams, make_partition, sample_planted_clique, sample_whpcm, sample_whsbm
from .rng import derive_seed
from .sdp import SdpProblem, SolverConfig, balanced_totals, solve
from .similarity import build_similarity, expected_similarity, lambda_midpoint
from .subspace import SubspaceConfig, generate_lines, pick_lambda, triple_weights

BENCH_CSV_HEADER = "algorithm,n,p,q,k,sizes,trial,seed,err,runtime_ms,iterations,converged"


def density(coeff: float, n: int, d: int) -> float:
    """Edge mean coeff * n * log(n) / C(n, d), clamped to [0, 1] with a warning."""
    raw = coeff * n * math.log(n) / binom(n, d)
    if raw > 1.0:
        warnings.warn(f"density {raw:.3g} for coeff={coeff}, n={n} clamped to 1")
        return 1.0
    return raw


def community_sizes(n: int, k: int, fractions=None) -> list[int]:
    """Split n nodes into k communities, balanced or by fractions (largest remainder)."""
    if fractions is None:
        fractions = [1.0 / k] * k
    if len(fractions) != k:
        raise ValueError("fractions must have one entry per community")
    raw = [f * n for f in fractions]
    sizes = [int(v) for v in raw]
    remainder = n - sum(sizes)
    order = np.argsort([s - r for s, r in zip(sizes, raw)])
    for i in range(remainder):
        sizes[int(order[i % k])] += 1
    if any(s < 1 for s in sizes):
        raise ValueError(f"sizes {sizes} leave an empty community for n={n}")
    return sizes


@dataclass(frozen=True)
class BenchConfig:
    n_values: tuple[int, ...] = (48, 96)
    p_values: tuple[float, ...] = (15.0, 25.0)
    q: float = 5.0
    k: int = 3
    d: int = 3
    size_fractions: tuple[float, ...] | None = None  # None = balanced
    trials: int = 10
    seed: int = 0
    jobs: int = 1
    max_iter: int = 1500
    kmedoids_restarts: int = 10


@dataclass(frozen=True)
class OutlierConfig:
    k: int = 3
    s: int = 20
    n_o_values: tuple[int, ...] = (12, 30)
    p_values: tuple[float, ...] = (0.9,)
    q: float = 0.1
    d: int = 3
    mode: str = "whpcm"  # "whpcm" | "clique"
    clique_s: int = 20
    clique_n: int = 60
    trials: int = 10
    seed: int = 0
    jobs: int = 1
    max_iter: int = 2000
    kmedoids_restarts: int = 10


@dataclass(frozen=True)
class SubspaceRunConfig:
    sizes: tuple[int, ...] = (8, 8, 8)
    sigma: float = 0.0
    bandwidth: float | None = None
    trials: int = 10
    seed: int = 0
    jobs: int = 1
    max_iter: int = 1500


@dataclass(frozen=True)
class ConcentrationConfig:
    n_values: tuple[int, ...] = (40, 80, 160)
    d: int = 3
    mu: float = 0.5
    trials: int = 20
    seed: int = 0
    jobs: int = 1


@dataclass(frozen=True)
class TrialRecord:
    algorithm: str
    n: int
    p: float
    q: float
    k: int
    sizes: tuple[int, ...]
    trial: int
    seed: int
    err: float
    runtime_ms: int
    iterations: int
    converged: bool

    def csv_row(self) -> str:
        sizes = "/".join(str(s) for s in self.sizes)
        return (
            f"{self.algorithm},{self.n},{self.p:.17g},{self.q:.17g},{self.k},{sizes},"
            f"{self.trial},{self.seed},{self.err:.17g},{self.runtime_ms},{self.iterations},"
            f"{str(self.converged).lower()}"
        )


def _config_line(cfg) -> str:
    payload = dataclasses.asdict(cfg)
    return "# config: " + json.dumps(payload, sort_keys=True, default=list)


def write_records(path, cfg, records: list[TrialRecord]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(_config_line(cfg) + "\n")
        fh.write(BENCH_CSV_HEADER + "\n")
        for rec in records:
            fh.write(rec.csv_row() + "\n")


def _map_trials(fn, tasks, jobs: int):
    if jobs <= 1:
        return [fn(t) for t in tasks]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks))


def _bench_cell(cfg: BenchConfig, n: int, p_coeff: float, trial: int) -> list[TrialRecord]:
    sizes = community_sizes(n, cfg.k, cfg.size_fractions)
    p_n = density(p_coeff, n, cfg.d)
    q_n = density(cfg.q, n, cfg.d)
    seed = derive_seed(cfg.seed, n, int(p_coeff * 1000), trial)
    partition = make_partition(sizes)
    params = ModelParams(n=n, d=cfg.d, k=cfg.k, p=p_n, q=q_n, seed=seed)
    w = sample_whsbm(params, partition)
    a = build_similarity(w)
    _, profile = expected_similarity(params, partition)
    lam = lambda_midpoint(profile)
    solver = SolverConfig(max_iter=cfg.max_iter)

    t0 = time.perf_counter()
    solution = solve(SdpProblem.penalized(a, lam), solver)
    est = round_solution(solution, cfg.k, restarts=cfg.kmedoids_restarts, seed=seed)
    sdp_ms = int(round(1000 * (time.perf_counter() - t0)))
    sdp_err = misclustering_error(est, partition)

    t0 = time.perf_counter()
    base = spectral_baseline(a, cfg.k, seed=seed)
    base_ms = int(round(1000 * (time.perf_counter() - t0)))
    base_err = misclustering_error(base, partition)

    common = dict(n=n, p=p_coeff, q=cfg.q, k=cfg.k, sizes=tuple(sizes), trial=trial, seed=seed)
    return [
        TrialRecord(algorithm="sdp", err=sdp_err, runtime_ms=sdp_ms, iterations=solution.iterations, converged=solution.converged, **common),
        TrialRecord(algorithm="spectral", err=base_err, runtime_ms=base_ms, iterations=0, converged=True, **common),
    ]


def run_bench(cfg: BenchConfig) -> list[TrialRecord]:
    """Grid of (n, p) cells, trials through the SDP pipeline and the spectral baseline."""
    tasks = []
    for n in cfg.n_values:
        for p_coeff in cfg.p_values:
            if p_coeff * n * math.log(n) / binom(n, cfg.d) > 1.0:
                warnings.warn(f"cell (n={n}, p={p_coeff}) is infeasible (edge mean > 1); skipped")
                continue
            for trial in range(cfg.trials):
                tasks.append((n, p_coeff, trial))
    nested = _map_trials(lambda t: _bench_cell(cfg, *t), tasks, cfg.jobs)
    return [rec for pair in nested for rec in pair]


def _outlier_cell(cfg: OutlierConfig, n_o: int, p: float, trial: int) -> list[TrialRecord]:
    n = cfg.k * cfg.s + n_o
    seed = derive_seed(cfg.seed, n_o, int(p * 1000), trial)
    partition = make_partition([cfg.s] * cfg.k, n_outliers=n_o)
    params = ModelParams(n=n, d=cfg.d, k=cfg.k, p=p, q=cfg.q, seed=seed)
    w = sample_whpcm(params, partition)
    a = build_similarity(w)
    solver = SolverConfig(max_iter=cfg.max_iter)

    t0 = time.perf_counter()
    solution = solve(SdpProblem.constrained(a, *balanced_totals(cfg.k, cfg.s)), solver)
    est = round_outlier_solution(solution, cfg.k, restarts=cfg.kmedoids_restarts, seed=seed)
    sdp_ms = int(round(1000 * (time.perf_counter() - t0)))
    sdp_err = misclustering_error(est, partition)

    t0 = time.perf_counter()
    base = spectral_baseline(a, cfg.k, seed=seed)
    base_ms = int(round(1000 * (time.perf_counter() - t0)))
    base_err = misclustering_error(base, partition)

    common = dict(n=n, p=p, q=cfg.q, k=cfg.k, sizes=tuple([cfg.s] * cfg.k), trial=trial, seed=seed)
    return [
        TrialRecord(algorithm="sdp", err=sdp_err, runtime_ms=sdp_ms, iterations=solution.iterations, converged=solution.converged, **common),
        TrialRecord(algorithm="spectral", err=base_err, runtime_ms=base_ms, iterations=0, converged=True, **common),
    ]


def _clique_trial(cfg: OutlierConfig, trial: int) -> TrialRecord:
    seed = derive_seed(cfg.seed, 0xC11, trial)
    w, partition = sample_planted_clique(cfg.clique_n, cfg.clique_s, cfg.d, seed=seed)
    a = build_similarity(w)
    t0 = time.perf_counter()
    solution = solve(SdpProblem.constrained(a, *balanced_totals(1, cfg.clique_s)), SolverConfig(max_iter=cfg.max_iter))
    est = round_outlier_solution(solution, 1, restarts=cfg.kmedoids_restarts, seed=seed)
    ms = int(round(1000 * (time.perf_counter() - t0)))
    err = misclustering_error(est, partition)
    return TrialRecord(
        algorithm="sdp",
        n=cfg.clique_n,
        p=1.0,
        q=0.5,
        k=1,
        sizes=(cfg.clique_s,),
        trial=trial,
        seed=seed,
        err=err,
        runtime_ms=ms,
        iterations=solution.iterations,
        converged=solution.converged,
    )


def run_outliers(cfg: OutlierConfig) -> list[TrialRecord]:
    """Outlier-model grid via the constrained relaxation, or planted-clique trials."""
    if cfg.mode == "clique":
        return _map_trials(lambda t: _clique_trial(cfg, t), range(cfg.trials), cfg.jobs)
    tasks = [(n_o, p, t) for n_o in cfg.n_o_values for p in cfg.p_values for t in range(cfg.trials)]
    nested = _map_trials(lambda t: _outlier_cell(cfg, *t), tasks, cfg.jobs)
    return [rec for pair in nested for rec in pair]


def run_subspace(cfg: SubspaceRunConfig) -> list[TrialRecord]:
    """Paired line-clustering trials: SDP pipeline vs spectral baseline on shared clouds."""

    def one(trial: int) -> list[TrialRecord]:
        seed = derive_seed(cfg.seed, 0x5C1, trial)
        sub = SubspaceConfig(sizes=cfg.sizes, sigma=cfg.sigma, seed=seed)
        cloud = generate_lines(sub)
        w = triple_weights(cloud, cfg.bandwidth)
        a = build_similarity(w)
        lam = pick_lambda(a, balanced=len(set(cfg.sizes)) == 1, seed=seed)
        t0 = time.perf_counter()
        solution = solve(SdpProblem.penalized(a, lam), SolverConfig(max_iter=cfg.max_iter))
        est = round_solution(solution, sub.k, seed=seed)
        sdp_ms = int(round(1000 * (time.perf_counter() - t0)))
        t0 = time.perf_counter()
        base = spectral_baseline(a, sub.k, seed=seed)
        base_ms = int(round(1000 * (time.perf_counter() - t0)))
        common = dict(n=sub.n, p=cfg.sigma, q=0.0, k=sub.k, sizes=tuple(cfg.sizes), trial=trial, seed=seed)
        return [
            TrialRecord(algorithm="sdp", err=misclustering_error(est, cloud.truth), runtime_ms=sdp_ms, iterations=solution.iterations, converged=solution.converged, **common),
            TrialRecord(algorithm="spectral", err=misclustering_error(base, cloud.truth), runtime_ms=base_ms, iterations=0, converged=True, **common),
        ]

    nested = _map_trials(one, range(cfg.trials), cfg.jobs)
    return [rec for pair in nested for rec in pair]


def mean_errors(records: list[TrialRecord], algorithm: str, x_field: str, y_field: str):
    """Collapse records to a {(x, y): mean err} table for heatmaps."""
    sums: dict[tuple, list[float]] = {}
    for rec in records:
        if rec.algorithm != algorithm:
            continue
        key = (getattr(rec, x_field), getattr(rec, y_field))
        sums.setdefault(key, []).append(rec.err)
    return {key: float(np.mean(v)) for key, v in sums.items()}


def heatmap_svg(x_values, y_values, means: dict, title: str) -> str:
    """Deterministic SVG heatmap; cell shade is a pure function of the mean error.

    Lighter cells mean lower error (shade 255 at err=0 down to 0 at err=1).
    """
    cell, margin_left, margin_top = 60, 80, 40
    width = margin_left + cell * len(x_values) + 20
    height = margin_top + cell * len(y_values) + 40
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<text x="{margin_left}" y="20" font-family="monospace" font-size="14">{title}</text>',
    ]
    for j, y in enumerate(y_values):
        for i, x in enumerate(x_values):
            err = means.get((x, y))
            if err is None:
                fill = "none"
                label = ""
            else:
                shade = int(round(255 * (1.0 - min(max(err, 0.0), 1.0))))
                fill = f"rgb({shade},{shade},{shade})"
                label = f"{err:.3f}"
            px, py = margin_left + i * cell, margin_top + j * cell
            lines.append(f'<rect x="{px}" y="{py}" width="{cell}" height="{cell}" fill="{fill}" stroke="black"/>')
            if label:
                text_shade = 0 if err < 0.5 else 255
                lines.append(
                    f'<text x="{px + cell // 2}" y="{py + cell // 2 + 4}" font-family="monospace" font-size="11" '
                    f'fill="rgb({text_shade},{text_shade},{text_shade})" text-anchor="middle">{label}</text>'
                )
    for i, x in enumerate(x_values):
        lines.append(
            f'<text x="{margin_left + i * cell + cell // 2}" y="{margin_top + cell * len(y_values) + 16}" '
            f'font-family="monospace" font-size="11" text-anchor="middle">{x}</text>'
        )
    for j, y in enumerate(y_values):
        lines.append(
            f'<text x="{margin_left - 8}" y="{margin_top + j * cell + cell // 2 + 4}" '
            f'font-family="monospace" font-size="11" text-anchor="end">{y}</text>'
        )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
