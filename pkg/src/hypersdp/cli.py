"""Command-line interface.

Subcommands: generate, cluster, tune, bench, outliers, subspace,
concentration, oracle. Exit codes: 0 ok, 2 input error, 3 solver
non-convergence, 4 config error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from . import bench as bench_mod
from .concentration import deviation_scale, verify_bound
from .extract import misclustering_error, round_solution
from .model import (
    ModelParams,
    make_partition,
    read_hypergraph,
    read_partition,
    sample_whsbm,
    write_hypergraph,
    write_partition,
)
from .oracle import MleConfig, brute_force_mle, brute_force_truncated
from .sdp import SdpProblem, SolverConfig, solve
from .similarity import build_similarity
from .tune import estimate

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NOCONV = 3
EXIT_CONFIG = 4


class ConfigError(Exception):
    pass


def _load_config(cls, path: str | None, overrides: dict):
    payload = {}
    if path:
        try:
            payload = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
    payload.update({k: v for k, v in overrides.items() if v is not None})
    field_names = {f.name for f in dataclasses.fields(cls)}
    unknown = set(payload) - field_names
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    for f in dataclasses.fields(cls):
        if f.name in payload and isinstance(payload[f.name], list):
            payload[f.name] = tuple(payload[f.name])
    try:
        return cls(**payload)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_generate(args) -> int:
    out = _out_dir(args)
    if args.sizes:
        sizes = [int(v) for v in args.sizes.split(",")]
    else:
        sizes = bench_mod.community_sizes(args.n - args.outliers, args.k)
    partition = make_partition(sizes, n_outliers=args.outliers)
    params = ModelParams(n=args.n, d=args.d, k=len(sizes), p=args.p, q=args.q, weight_law=args.law, seed=args.seed)
    if args.outliers:
        from .model import sample_whpcm

        w = sample_whpcm(params, partition)
    else:
        w = sample_whsbm(params, partition)
    write_hypergraph(out / "hypergraph.txt", w)
    write_partition(out / "partition.txt", partition)
    print(f"wrote {out / 'hypergraph.txt'} ({w.m} edges) and {out / 'partition.txt'}")
    return EXIT_OK


def cmd_cluster(args) -> int:
    try:
        w = read_hypergraph(args.input)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    a = build_similarity(w)
    if args.auto:
        lam = max(0.0, estimate(a, seed=args.seed).lambda_hat)
    elif args.lam is not None:
        lam = args.lam
    else:
        print("error: provide --lambda or --auto", file=sys.stderr)
        return EXIT_CONFIG
    solver = SolverConfig(max_iter=args.max_iter)
    solution = solve(SdpProblem.penalized(a, lam), solver)
    partition = round_solution(solution, args.k, seed=args.seed)
    out = _out_dir(args)
    write_partition(out / "partition.txt", partition)
    diagnostics = {
        "lambda": lam,
        "objective": solution.objective,
        "iterations": solution.iterations,
        "primal_residual": solution.primal_residual,
        "dual_residual": solution.dual_residual,
        "converged": solution.converged,
        "integrality_gap": solution.integrality_gap(),
        "seed": args.seed,
    }
    (out / "diagnostics.json").write_text(json.dumps(diagnostics, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"wrote {out / 'partition.txt'}")
    if not solution.converged:
        print("warning: solver did not converge; partial result written", file=sys.stderr)
        return EXIT_NOCONV
    return EXIT_OK


def cmd_tune(args) -> int:
    try:
        w = read_hypergraph(args.input)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    est = estimate(build_similarity(w), seed=args.seed)
    print(
        json.dumps(
            {
                "k_hat": est.k_hat,
                "s_hat": est.s_hat,
                "p_minus_hat": est.p_minus_hat,
                "q_plus_hat": est.q_plus_hat,
                "lambda_hat": est.lambda_hat,
            },
            indent=2,
            sort_keys=True,
        )
    )
    return EXIT_OK


def cmd_oracle(args) -> int:
    try:
        w = read_hypergraph(args.input)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    result: dict = {}
    if args.mle:
        cfg = MleConfig(p=args.p, q=args.q)
        part = brute_force_mle(w, args.k, cfg)
        result["mle_labels"] = list(part.labels)
        result["mu"] = cfg.mu
    if args.lam is not None:
        part, value = brute_force_truncated(build_similarity(w), args.k, args.lam)
        result["truncated_labels"] = list(part.labels)
        result["truncated_objective"] = value
    if not result:
        print("error: provide --lambda and/or --mle with --p/--q", file=sys.stderr)
        return EXIT_CONFIG
    print(json.dumps(result, indent=2, sort_keys=True))
    return EXIT_OK


def _write_heatmaps(out: Path, records, x_field: str, y_field: str, stem: str) -> None:
    xs = sorted({getattr(r, x_field) for r in records})
    ys = sorted({getattr(r, y_field) for r in records})
    for algorithm in ("sdp", "spectral"):
        means = bench_mod.mean_errors(records, algorithm, x_field, y_field)
        if not means:
            continue
        svg = bench_mod.heatmap_svg(xs, ys, means, f"{stem} mean err ({algorithm})")
        (out / f"{stem}_{algorithm}.svg").write_text(svg, encoding="utf-8")


def cmd_bench(args) -> int:
    cfg = _load_config(
        bench_mod.BenchConfig, args.config, {"seed": args.seed, "jobs": args.jobs, "trials": args.trials}
    )
    records = bench_mod.run_bench(cfg)
    out = _out_dir(args)
    bench_mod.write_records(out / "bench.csv", cfg, records)
    _write_heatmaps(out, records, "n", "p", "bench")
    print(f"wrote {out / 'bench.csv'} ({len(records)} rows)")
    return EXIT_OK


def cmd_outliers(args) -> int:
    cfg = _load_config(
        bench_mod.OutlierConfig, args.config, {"seed": args.seed, "jobs": args.jobs, "trials": args.trials}
    )
    records = bench_mod.run_outliers(cfg)
    out = _out_dir(args)
    bench_mod.write_records(out / "outliers.csv", cfg, records)
    if cfg.mode == "whpcm":
        _write_heatmaps(out, records, "n", "p", "outliers")
    print(f"wrote {out / 'outliers.csv'} ({len(records)} rows)")
    return EXIT_OK


def cmd_subspace(args) -> int:
    cfg = _load_config(
        bench_mod.SubspaceRunConfig, args.config, {"seed": args.seed, "jobs": args.jobs, "trials": args.trials}
    )
    records = bench_mod.run_subspace(cfg)
    out = _out_dir(args)
    bench_mod.write_records(out / "subspace.csv", cfg, records)
    sdp_mean = np.mean([r.err for r in records if r.algorithm == "sdp"])
    base_mean = np.mean([r.err for r in records if r.algorithm == "spectral"])
    print(f"wrote {out / 'subspace.csv'}; mean err sdp={sdp_mean:.4f} spectral={base_mean:.4f}")
    return EXIT_OK


def cmd_concentration(args) -> int:
    cfg = _load_config(
        bench_mod.ConcentrationConfig, args.config, {"seed": args.seed, "jobs": args.jobs, "trials": args.trials}
    )
    grid = [(n, cfg.d, cfg.mu) for n in cfg.n_values]
    reports = verify_bound(grid, cfg.trials, seed=cfg.seed)
    out = _out_dir(args)
    path = out / "concentration.csv"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(bench_mod._config_line(cfg) + "\n")
        fh.write("n,d,mu,trial,deviation,ratio\n")
        for rep in reports:
            scale = deviation_scale(rep.n, rep.d, rep.mu_n)
            for trial, ratio in enumerate(rep.ratios):
                fh.write(f"{rep.n},{rep.d},{rep.mu_n:.17g},{trial},{ratio * scale:.17g},{ratio:.17g}\n")
    print(f"wrote {path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hypersdp", description="Hypergraph clustering via SDP relaxation")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--seed", type=int, default=None, help="master seed (default 0)")
        p.add_argument("--jobs", type=int, default=None, help="worker threads")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--trials", type=int, default=None, help="trials per cell")

    g = sub.add_parser("generate", help="sample a block-model hypergraph")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--d", type=int, default=3)
    g.add_argument("--k", type=int, default=3)
    g.add_argument("--p", type=float, required=True)
    g.add_argument("--q", type=float, required=True)
    g.add_argument("--law", choices=["bernoulli", "constant"], default="bernoulli")
    g.add_argument("--sizes", help="comma-separated community sizes (default balanced)")
    g.add_argument("--outliers", type=int, default=0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", default=".")
    g.set_defaults(fn=cmd_generate)

    c = sub.add_parser("cluster", help="cluster a hypergraph file")
    c.add_argument("input")
    c.add_argument("--k", type=int, required=True)
    c.add_argument("--lambda", dest="lam", type=float, default=None)
    c.add_argument("--auto", action="store_true", help="estimate lambda from the data (balanced assumption)")
    c.add_argument("--max-iter", type=int, default=5000)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--out", default=".")
    c.set_defaults(fn=cmd_cluster)

    t = sub.add_parser("tune", help="estimate (k, s, p^-, q^+, lambda) from a hypergraph file")
    t.add_argument("input")
    t.add_argument("--seed", type=int, default=0)
    t.set_defaults(fn=cmd_tune)

    o = sub.add_parser("oracle", help="brute-force reference solutions for tiny instances")
    o.add_argument("input")
    o.add_argument("--k", type=int, required=True)
    o.add_argument("--lambda", dest="lam", type=float, default=None)
    o.add_argument("--mle", action="store_true")
    o.add_argument("--p", type=float, default=0.8)
    o.add_argument("--q", type=float, default=0.2)
    o.set_defaults(fn=cmd_oracle)

    for name, fn in (
        ("bench", cmd_bench),
        ("outliers", cmd_outliers),
        ("subspace", cmd_subspace),
        ("concentration", cmd_concentration),
    ):
        p = sub.add_parser(name, help=f"run the {name} experiment grid")
        common(p)
        p.set_defaults(fn=fn)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
