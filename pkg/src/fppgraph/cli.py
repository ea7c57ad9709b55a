"""Command-line front end: partitioning, app runs, benchmarks."""

from __future__ import annotations

import argparse
import json
import math
import sys
import time

import numpy as np

from . import apps, metrics_bench
from .engine import EngineConfig, default_worker_count, make_queries, run_fpp
from .graph import (Graph, GraphFormatError, build_partitions, load_edge_list,
                    make_undirected, partition_count_for_budget,
                    partition_import, partition_random)
from .kernels import QueryKind, QueryParams
from .metrics_bench import (bench_schedulers, bench_yield_sweep,
                            grid_graph, preferential_attachment, random_graph,
                            verify_states)
from .scheduler import Functor, YieldPolicy

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_VERIFY = 3


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _load_graph(args) -> Graph:
    if getattr(args, "gen", None):
        return _generate(args.gen, getattr(args, "seed", 0), args.weighted)
    if not args.graph:
        raise CliError("either --graph or --gen is required", EXIT_USAGE)
    try:
        g = load_edge_list(args.graph, weighted=args.weighted)
    except GraphFormatError as exc:
        raise CliError(f"cannot parse {args.graph}: {exc}", EXIT_IO)
    except OSError as exc:
        raise CliError(f"cannot read {args.graph}: {exc}", EXIT_IO)
    if getattr(args, "undirected", False):
        g = make_undirected(g)
    return g


def _generate(spec: str, seed: int, weighted: bool) -> Graph:
    kind, _, rest = spec.partition(":")
    try:
        if kind == "grid":
            w, h = rest.split("x")
            return grid_graph(int(w), int(h), seed, weighted)
        if kind == "random":
            n, m = rest.split(":")
            return random_graph(int(n), int(m), seed, weighted)
        if kind == "pa":
            n, m = rest.split(":")
            return preferential_attachment(int(n), int(m), seed, weighted)
    except (ValueError, TypeError) as exc:
        raise CliError(f"bad --gen spec {spec!r}: {exc}", EXIT_USAGE)
    raise CliError(f"unknown generator {kind!r} "
                   "(expected grid:WxH, random:N:M, pa:N:M)", EXIT_USAGE)


def _partition_plan(args, graph: Graph):
    chosen = [x for x in (args.random, args.import_path,
                          args.auto and "auto" or None) if x]
    if len(chosen) != 1:
        raise CliError("exactly one of --random K, --import PATH, --auto "
                       "is required", EXIT_USAGE)
    if args.random:
        k = int(args.random)
        if k < 1:
            raise CliError("partition count must be >= 1", EXIT_USAGE)
        return partition_random(graph, k, args.seed)
    if args.import_path:
        try:
            return partition_import(args.import_path, graph)
        except (GraphFormatError, ValueError) as exc:
            raise CliError(str(exc), EXIT_IO)
        except OSError as exc:
            raise CliError(str(exc), EXIT_IO)
    k = partition_count_for_budget(graph.byte_size(), args.cache_bytes)
    return partition_random(graph, k, args.seed)


def _emit(payload: dict, args) -> None:
    if not args.no_timestamp:
        payload["generated_at"] = time.strftime("%Y-%m-%dT%H:%M:%S")
    payload["schema_version"] = SCHEMA_VERSION
    text = json.dumps(payload, indent=2) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_partition(args) -> int:
    graph = _load_graph(args)
    plan = _partition_plan(args, graph)
    parts = build_partitions(graph, plan)
    if args.part_out:
        with open(args.part_out, "w") as fh:
            for pid in plan.partition_of:
                fh.write(f"{int(pid)}\n")
    stats = {
        "vertex_count": graph.vertex_count,
        "edge_count": graph.edge_count,
        "graph_bytes": graph.byte_size(),
        "cache_bytes": args.cache_bytes,
        "partition_count": len(parts),
        "cut_edges": sum(p.cut_edge_count for p in parts),
        "partitions": [
            {"id": p.id, "vertices": p.vertex_count,
             "local_edges": p.local_edge_count, "cut_edges": p.cut_edge_count}
            for p in parts
        ],
    }
    _emit(stats, args)
    return EXIT_OK


_APP_KINDS = {"sssp": QueryKind.SSSP, "bfs": QueryKind.BFS,
              "ppr": QueryKind.PPR, "rw": QueryKind.RW}


def _engine_config(args) -> EngineConfig:
    workers = args.workers if args.workers else default_worker_count()
    return EngineConfig(
        functor=Functor(args.scheduler),
        yield_policy=YieldPolicy.parse(getattr(args, "yield_spec")),
        worker_count=workers,
        bucket_count=args.buckets,
        consolidation=args.consolidation,
        seed=args.seed,
    )


def _sources(args, graph: Graph, count_default: int = 8) -> list[int]:
    if args.sources:
        try:
            srcs = [int(s) for s in args.sources.split(",")]
        except ValueError as exc:
            raise CliError(f"bad --sources: {exc}", EXIT_USAGE)
    else:
        rng = np.random.default_rng(args.seed)
        n = min(count_default, graph.vertex_count)
        srcs = [int(v) for v in rng.choice(graph.vertex_count, n,
                                           replace=False)]
    for s in srcs:
        if not 0 <= s < graph.vertex_count:
            raise CliError(f"source {s} out of range", EXIT_USAGE)
    return srcs


def cmd_run(args) -> int:
    graph = _load_graph(args)
    config = _engine_config(args)
    app = args.app
    if app in _APP_KINDS:
        kind = _APP_KINDS[app]
        if kind is QueryKind.SSSP and not graph.weighted:
            raise CliError("sssp needs --weighted input", EXIT_USAGE)
        sources = _sources(args, graph)
        params = [
            QueryParams(kind, alpha=args.alpha, epsilon=args.epsilon,
                        walk_length=args.walk_length,
                        rng_seed=args.seed + i if kind is QueryKind.RW else 0)
            for i in range(len(sources))
        ]
        plan = _partition_plan(args, graph)
        partitions = build_partitions(graph, plan)
        queries = make_queries(params, sources, graph.vertex_count)
        states, metrics = run_fpp(graph, partitions, None, queries, config)
        verified = verify_states(graph, states) if args.verify else None
        payload = {
            "app": app,
            "sources": sources,
            "metrics": {
                "edges_processed": metrics.edges_processed,
                "ops_executed": metrics.ops_executed,
                "ops_filtered_stale": metrics.ops_filtered_stale,
                "ops_discarded": metrics.ops_discarded,
                "partition_visits": metrics.partition_visits,
                "yields": metrics.yields,
                "work_ratio": (
                    metrics.edges_processed
                    / max(metrics_bench.baseline_edges(graph, params, sources), 1)),
            },
            "results": _serialize_states(states),
        }
        if verified is not None:
            payload["verified"] = verified
        _emit(payload, args)
        return EXIT_OK if verified in (None, True) else EXIT_VERIFY

    if app == "bc":
        result = apps.run_bc(graph, args.samples, args.seed, config,
                             partition_count=args.parts)
    elif app == "ncp":
        result = apps.run_ncp(graph, args.seed_fraction, args.alpha,
                              args.epsilon, args.seed, config,
                              partition_count=args.parts)
    elif app == "ll":
        try:
            result = apps.run_ll(graph, args.landmarks, args.seed, config,
                                 partition_count=args.parts,
                                 unit_weight_fallback=args.unit_weights)
        except ValueError as exc:
            raise CliError(str(exc), EXIT_USAGE)
    else:
        raise CliError(f"unknown app {app!r}", EXIT_USAGE)

    if args.format == "csv":
        rows = result.to_csv_rows()
        out = sys.stdout if not args.output else open(args.output, "w")
        try:
            for row in rows:
                out.write(",".join(str(c) for c in row) + "\n")
        finally:
            if args.output:
                out.close()
        return EXIT_OK
    _emit({"app": app, **result.to_json_dict()}, args)
    return EXIT_OK


def _serialize_states(states) -> list:
    out = []
    for st in states:
        if st.labels is not None:
            out.append([None if not math.isfinite(x) else x
                        for x in st.labels.tolist()])
        elif st.p is not None:
            out.append({"p": st.p.tolist(), "r": st.r.tolist()})
        else:
            out.append(st.walk)
    return out


def cmd_bench(args) -> int:
    graph = _load_graph(args)
    if not graph.weighted and args.kind == "sssp":
        raise CliError("sssp bench needs weighted input", EXIT_USAGE)
    kind = _APP_KINDS[args.kind]
    rng = np.random.default_rng(args.seed)
    n = min(args.queries, graph.vertex_count)
    sources = [int(v) for v in rng.choice(graph.vertex_count, n, replace=False)]
    params = [QueryParams(kind, alpha=args.alpha, epsilon=args.epsilon,
                          walk_length=args.walk_length,
                          rng_seed=args.seed + i if kind is QueryKind.RW else 0)
              for i in range(n)]
    if args.mode == "schedulers":
        seeds = list(range(args.seed, args.seed + args.repeats))
        report = bench_schedulers(graph, params, sources,
                                  YieldPolicy.parse(args.yield_spec), seeds,
                                  partition_count=args.parts)
    else:
        mults = ([None] + [float(t) for t in args.thresholds.split(",")]
                 if args.thresholds else [None, 0.25, 0.5, 1.0, 2.0, 4.0])
        report = bench_yield_sweep(graph, params, sources,
                                   Functor(args.scheduler), mults,
                                   partition_count=args.parts, seed=args.seed)
    include_wall = not args.no_timestamp
    if args.format == "csv":
        out = sys.stdout if not args.output else open(args.output, "w")
        try:
            report.write_csv(out, include_wall=include_wall)
        finally:
            if args.output:
                out.close()
    else:
        payload = report.to_json_dict(include_wall=include_wall)
        _emit(payload, args)
    return EXIT_OK


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--graph", help="edge-list file")
    p.add_argument("--gen", help="synthetic graph: grid:WxH | random:N:M | pa:N:M")
    p.add_argument("--weighted", action="store_true")
    p.add_argument("--undirected", action="store_true",
                   help="symmetrize the input edge list")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", "-o")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--no-timestamp", action="store_true")


def _add_partitioning(p: argparse.ArgumentParser) -> None:
    p.add_argument("--random", metavar="K", help="random partitioning into K parts")
    p.add_argument("--import", dest="import_path", metavar="PATH",
                   help="METIS-style partition file")
    p.add_argument("--auto", action="store_true",
                   help="size partitions to --cache-bytes")
    p.add_argument("--cache-bytes", type=int, default=13_750_000)


def _add_engine(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scheduler", choices=[f.value for f in Functor],
                   default=Functor.FIFO.value)
    p.add_argument("--yield", dest="yield_spec", default="none",
                   help="none | edges:<multiplier> | band:<delta>")
    p.add_argument("--workers", type=int, default=0,
                   help="0 = use FPP_WORKERS env or cpu count")
    p.add_argument("--buckets", type=int, default=None)
    p.add_argument("--consolidation", choices=("sort", "scan"), default="sort")


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="fppgraph")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("partition", help="partition a graph and print stats")
    _add_common(p)
    _add_partitioning(p)
    p.add_argument("--part-out", help="write the partition vector here")
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("run", help="run queries or an application")
    _add_common(p)
    _add_partitioning(p)
    _add_engine(p)
    p.add_argument("--app", required=True,
                   choices=("sssp", "bfs", "ppr", "rw", "bc", "ncp", "ll"))
    p.add_argument("--sources", help="comma-separated source vertices")
    p.add_argument("--verify", action="store_true")
    p.add_argument("--alpha", type=float, default=0.15)
    p.add_argument("--epsilon", type=float, default=1e-6)
    p.add_argument("--walk-length", type=int, default=80)
    p.add_argument("--samples", type=int, default=16, help="BC sources")
    p.add_argument("--seed-fraction", type=float, default=0.001)
    p.add_argument("--landmarks", type=int, default=16)
    p.add_argument("--unit-weights", action="store_true",
                   help="let ll fall back to hop counts on unweighted input")
    p.add_argument("--parts", type=int, default=4)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("bench", help="scheduler / yield benchmark matrices")
    _add_common(p)
    _add_engine(p)
    p.add_argument("--mode", choices=("schedulers", "yield"),
                   default="schedulers")
    p.add_argument("--kind", choices=("sssp", "bfs", "ppr", "rw"),
                   default="sssp")
    p.add_argument("--queries", type=int, default=16)
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--thresholds", help="comma-separated edge-budget multipliers")
    p.add_argument("--alpha", type=float, default=0.15)
    p.add_argument("--epsilon", type=float, default=1e-6)
    p.add_argument("--walk-length", type=int, default=80)
    p.add_argument("--parts", type=int, default=8)
    p.set_defaults(func=cmd_bench)
    return top


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
