"""Command line surface: generate / build / verify / stats / bench / audit.

Exit codes: 0 on success, 1 when a verification or audit fails, 2 on usage
errors (bad flags, malformed files, cap violations).
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from .baselines import ThetaConfig, greedy_naive, theta_graph, wspd_spanner
from .core import SpannerGraph
from .datasets import (
    GeneratorSpec,
    generate,
    graph_from_edges,
    read_edges,
    read_points,
    write_edges,
    write_points,
)
from .greedy import GreedyConfig, greedy_spanner_build
from .verify import audit_wspd, audit_one_edge_per_pair, max_dilation_exact, max_dilation_sampled
from .wspd import build_split_tree, compute_wspd

# Dilation checks allow this much relative slack for floating-point path sums.
DILATION_SLACK = 1e-9

BENCH_FIELDS = [
    "algo",
    "n",
    "t_or_k",
    "seed",
    "edge_count",
    "max_degree",
    "total_weight",
    "wall_time_ms",
    "pair_count_m",
    "peak_queue",
    "sssp_runs",
    "peak_memory_bytes",
]


class UsageError(Exception):
    pass


def _peak_memory_bytes():
    try:
        import resource

        rss = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss
        return int(rss) * 1024  # Linux reports kilobytes
    except Exception:
        return 0


def _build_graph(algo, ps, args) -> tuple[SpannerGraph, dict]:
    extra = {"pair_count_m": 0, "peak_queue": 0, "sssp_runs": 0}
    if algo == "greedy":
        cfg = GreedyConfig(
            t=args.t,
            use_astar=not args.no_astar,
            use_saved_path_skip=not args.no_path_skip,
            prune_rule=args.prune,
        )
        g, report = greedy_spanner_build(ps, cfg)
        extra = {
            "pair_count_m": report.pair_count,
            "peak_queue": report.peak_queue_size,
            "sssp_runs": report.sssp_runs,
            "closest_pair_calls": report.closest_pair_calls,
            "skipped_by_coverage": report.skipped_by_coverage,
            "pairs_pruned_by_distance": report.pairs_pruned_by_distance,
            "covered_sources_total": report.covered_sources_total,
            "saved_paths_count": report.saved_paths_count,
        }
    elif algo == "greedy-naive":
        g = greedy_naive(ps, args.t)
    elif algo == "theta":
        g = theta_graph(ps, ThetaConfig(k=args.k))
    elif algo == "wspd":
        g = wspd_spanner(ps, args.t)
    else:
        raise UsageError(f"unknown algorithm {algo!r}")
    return g, extra


def _require(cond, message):
    if not cond:
        raise UsageError(message)


def _cmd_generate(args) -> int:
    spec = GeneratorSpec(kind=args.kind, n=args.n, seed=args.seed)
    ps = generate(spec)
    write_points(args.out, ps)
    print(f"wrote {len(ps)} {args.kind} points (seed {args.seed}) to {args.out}")
    return 0


def _cmd_build(args) -> int:
    ps = read_points(args.points)
    needs_t = args.algo in ("greedy", "greedy-naive", "wspd")
    _require(not (needs_t and args.t is None), f"--t is required for --algo {args.algo}")
    _require(not (args.algo == "theta" and args.k is None), "--k is required for --algo theta")
    start = time.perf_counter()
    g, extra = _build_graph(args.algo, ps, args)
    elapsed_ms = (time.perf_counter() - start) * 1e3
    write_edges(args.out_edges, g)
    stats = g.stats()
    print(
        f"{args.algo}: n={len(ps)} edges={stats.edge_count} "
        f"max_degree={stats.max_degree} total_weight={stats.total_weight!r} "
        f"wall_ms={elapsed_ms:.1f}"
    )
    if args.report:
        import json

        payload = {
            "algo": args.algo,
            "n": len(ps),
            "t": args.t,
            "k": args.k,
            "edge_count": stats.edge_count,
            "max_degree": stats.max_degree,
            "total_weight": stats.total_weight,
            "wall_time_ms": elapsed_ms,
            "peak_memory_bytes": _peak_memory_bytes(),
            **extra,
        }
        with open(args.report, "w") as f:
            json.dump(payload, f, indent=2, sort_keys=True)
            f.write("\n")
    return 0


def _cmd_verify(args) -> int:
    ps = read_points(args.points)
    n, edges = read_edges(args.edges)
    g = graph_from_edges(ps, n, edges)
    if args.sample is None:
        report = max_dilation_exact(g, ps)
    else:
        report = max_dilation_sampled(g, ps, args.sample, args.seed)
    ok = report.max_dilation <= args.t * (1.0 + DILATION_SLACK)
    verdict = "PASS" if ok else "FAIL"
    print(
        f"{verdict} max_dilation={report.max_dilation!r} t={args.t} "
        f"witness={report.witness} checked_pairs={report.checked_pairs} mode={report.mode}"
    )
    return 0 if ok else 1


def _cmd_stats(args) -> int:
    ps = read_points(args.points)
    n, edges = read_edges(args.edges)
    g = graph_from_edges(ps, n, edges)
    stats = g.stats()
    print(f"edge_count={stats.edge_count}")
    print(f"max_degree={stats.max_degree}")
    print(f"total_weight={stats.total_weight!r}")
    return 0


def _cmd_audit(args) -> int:
    ps = read_points(args.points)
    s = 2.0 * args.t / (args.t - 1.0)
    wspd_report = audit_wspd(ps, s)
    cov = "skipped" if not wspd_report.coverage_checked else ("ok" if wspd_report.coverage_ok else "FAIL")
    print(
        f"wspd: pairs={wspd_report.pair_count} coverage={cov} "
        f"separation={'ok' if wspd_report.separation_ok else 'FAIL'} "
        f"sandwich={'ok' if wspd_report.sandwich_ok else 'FAIL'}"
    )
    cfg = GreedyConfig(t=args.t)
    wspd = compute_wspd(build_split_tree(ps), cfg.separation)
    g, _ = greedy_spanner_build(ps, cfg, wspd=wspd)
    edge_report = audit_one_edge_per_pair(g, wspd)
    print(f"one-edge-per-pair: edges={g.edge_count} {'ok' if edge_report.ok else 'FAIL'}")
    for msg in wspd_report.failures + edge_report.failures:
        print(f"  {msg}")
    return 0 if wspd_report.ok and edge_report.ok else 1


def _bench_one(task) -> dict:
    algo = task["algo"]
    spec = GeneratorSpec(kind=task["kind"], n=task["n"], seed=task["seed"])
    ps = generate(spec)
    row = dict.fromkeys(BENCH_FIELDS, 0)
    row.update(algo=algo, n=task["n"], t_or_k=task["t_or_k"], seed=task["seed"])
    start = time.perf_counter()
    if algo == "greedy":
        cfg = GreedyConfig(t=task["t_or_k"])
        g, report = greedy_spanner_build(ps, cfg)
        row.update(
            pair_count_m=report.pair_count,
            peak_queue=report.peak_queue_size,
            sssp_runs=report.sssp_runs,
        )
    elif algo == "greedy-naive":
        g = greedy_naive(ps, task["t_or_k"])
    elif algo == "theta":
        g = theta_graph(ps, ThetaConfig(k=int(task["t_or_k"])))
    elif algo == "wspd":
        g = wspd_spanner(ps, task["t_or_k"])
    else:
        raise UsageError(f"unknown algorithm {algo!r}")
    row["wall_time_ms"] = (time.perf_counter() - start) * 1e3
    stats = g.stats()
    row.update(
        edge_count=stats.edge_count,
        max_degree=stats.max_degree,
        total_weight=stats.total_weight,
        peak_memory_bytes=_peak_memory_bytes(),
    )
    return row


def _cmd_bench(args) -> int:
    values = [v for v in args.values.split(",") if v]
    _require(values, "--values must list at least one value")
    seeds = [int(s) for s in args.seeds.split(",") if s]
    _require(seeds, "--seeds must list at least one seed")

    tasks = []
    if args.sweep == "n":
        _require(args.t is not None or args.algo == "theta", "--t is required for --sweep n")
        param = float(args.t) if args.algo != "theta" else float(args.k)
        for v in values:
            for seed in seeds:
                tasks.append(
                    {"algo": args.algo, "kind": args.kind, "n": int(v), "seed": seed, "t_or_k": param}
                )
    else:  # sweep == "t"
        _require(args.n is not None, "--n is required for --sweep t")
        for v in values:
            for seed in seeds:
                tasks.append(
                    {"algo": args.algo, "kind": args.kind, "n": args.n, "seed": seed, "t_or_k": float(v)}
                )

    workers = int(os.environ.get("SPANNER_THREADS", "1"))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_bench_one, tasks))
    else:
        rows = [_bench_one(task) for task in tasks]

    with open(args.out, "w", newline="") as f:
        f.write(
            f"# spannertools bench sweep={args.sweep} kind={args.kind} "
            f"generator=pcg64 domain=[0,sqrt(n))^2 cluster_extent=1.0\n"
        )
        writer = csv.DictWriter(f, fieldnames=BENCH_FIELDS)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


def _make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spannertools",
        description="Geometric t-spanner toolkit: greedy spanner, baselines, verification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a point set file")
    p.add_argument("--kind", choices=("uniform", "clustered", "gamma"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("build", help="build a spanner and write its edge file")
    p.add_argument("--algo", choices=("greedy", "greedy-naive", "theta", "wspd"), required=True)
    p.add_argument("--t", type=float)
    p.add_argument("--k", type=int)
    p.add_argument("--points", required=True)
    p.add_argument("--out-edges", required=True)
    p.add_argument("--no-astar", action="store_true")
    p.add_argument("--no-path-skip", action="store_true")
    p.add_argument("--prune", choices=("basic", "sharpened"), default="sharpened")
    p.add_argument("--report", help="write a JSON build report here")
    p.set_defaults(func=_cmd_build)

    p = sub.add_parser("verify", help="check the dilation of an edge file")
    p.add_argument("--points", required=True)
    p.add_argument("--edges", required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--exact", action="store_true", default=False)
    p.add_argument("--sample", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("stats", help="edge count, max degree, total weight of an edge file")
    p.add_argument("--points", required=True)
    p.add_argument("--edges", required=True)
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("bench", help="run a parameter sweep and write CSV")
    p.add_argument("--sweep", choices=("n", "t"), required=True)
    p.add_argument("--kind", choices=("uniform", "clustered", "gamma"), required=True)
    p.add_argument("--values", required=True, help="comma-separated sweep values")
    p.add_argument("--algo", choices=("greedy", "greedy-naive", "theta", "wspd"), default="greedy")
    p.add_argument("--t", type=float)
    p.add_argument("--k", type=int, default=6)
    p.add_argument("--n", type=int)
    p.add_argument("--seeds", default="0")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("audit", help="WSPD coverage/separation audits plus one-edge-per-pair")
    p.add_argument("--points", required=True)
    p.add_argument("--t", type=float, required=True)
    p.set_defaults(func=_cmd_audit)

    return parser


def main(argv=None) -> int:
    parser = _make_parser()
    args = parser.parse_args(argv)
    if args.command == "verify" and args.exact and args.sample is not None:
        parser.error("--exact and --sample are mutually exclusive")
    try:
        return args.func(args)
    except (UsageError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
