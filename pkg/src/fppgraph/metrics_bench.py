"""Synthetic graphs, sequential baselines, and benchmark harnesses.

Operation and edge counters are the acceptance currency; wall time is
reported but machine-dependent and never asserted on.
"""

from __future__ import annotations

import csv
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .engine import EngineConfig, RunMetrics, compute_work_ratio, make_queries, run_fpp
from .graph import (Graph, build_partitions, from_edges, make_undirected,
                    partition_contiguous, partition_random)
from .kernels import (QueryKind, QueryParams, QueryState, bfs_oracle,
                      ppr_oracle, rw_oracle, sssp_oracle)
from .scheduler import Functor, YieldPolicy

REPORT_COLUMNS = ("functor", "yield", "K", "workers", "seed", "ops_executed",
                  "edges_processed", "work_ratio", "partition_visits",
                  "yields", "correct")


# ---------------------------------------------------------------------------
# desk-scale graph generators

def random_graph(n: int, m: int, seed: int, weighted: bool = True) -> Graph:
    """Uniform G(n, m) with weights uniform in [1, log n)."""
    rng = np.random.default_rng(seed)
    src = rng.integers(0, n, m)
    dst = rng.integers(0, n, m)
    w = rng.uniform(1.0, max(np.log(n), 1.0 + 1e-9), m) if weighted else None
    return make_undirected(from_edges(src, dst, w, vertex_count=n))


def grid_graph(width: int, height: int, seed: int = 0,
               weighted: bool = True) -> Graph:
    """Road-like lattice: high diameter, where scheduling matters most."""
    n = width * height
    srcs, dsts = [], []
    idx = np.arange(n).reshape(height, width)
    srcs.append(idx[:, :-1].ravel())
    dsts.append(idx[:, 1:].ravel())
    srcs.append(idx[:-1, :].ravel())
    dsts.append(idx[1:, :].ravel())
    src = np.concatenate(srcs)
    dst = np.concatenate(dsts)
    if weighted:
        rng = np.random.default_rng(seed)
        w = rng.uniform(1.0, max(np.log(n), 1.0 + 1e-9), len(src))
    else:
        w = None
    return make_undirected(from_edges(src, dst, w, vertex_count=n))


def preferential_attachment(n: int, edges_per_vertex: int, seed: int,
                            weighted: bool = True) -> Graph:
    """Barabasi-Albert style power-law graph."""
    if edges_per_vertex < 1 or n <= edges_per_vertex:
        raise ValueError("need n > edges_per_vertex >= 1")
    rng = np.random.default_rng(seed)
    srcs = []
    dsts = []
    targets = list(range(edges_per_vertex))
    repeated: list[int] = list(targets)
    for v in range(edges_per_vertex, n):
        chosen = rng.choice(len(repeated), edges_per_vertex, replace=False)
        for c in chosen:
            u = repeated[c]
            srcs.append(v)
            dsts.append(u)
            repeated.append(u)
        repeated.extend([v] * edges_per_vertex)
    src = np.asarray(srcs)
    dst = np.asarray(dsts)
    w = (rng.uniform(1.0, max(np.log(n), 1.0 + 1e-9), len(src))
         if weighted else None)
    return make_undirected(from_edges(src, dst, w, vertex_count=n))


# ---------------------------------------------------------------------------
# sequential baselines

def oracle_run(graph: Graph, params: QueryParams, source: int):
    """(labels-or-walk, edge count) from the sequential kernel."""
    if params.kind is QueryKind.SSSP:
        return sssp_oracle(graph, source)
    if params.kind is QueryKind.BFS:
        return bfs_oracle(graph, source)
    if params.kind is QueryKind.PPR:
        p, r, edges = ppr_oracle(graph, source, params.alpha, params.epsilon)
        return (p, r), edges
    walk = rw_oracle(graph, source, params.walk_length, params.rng_seed)
    return walk, max(len(walk) - 1, 0)


def run_naive_concurrent(graph: Graph, params_list: list[QueryParams],
                         sources: list[int],
                         worker_count: int = 1) -> tuple[list, int]:
    """Each query on its own worker with the whole-graph kernel: the
    uncoordinated baseline; total edges = sum of oracle edges."""
    if worker_count < 1:
        raise ValueError("worker_count must be >= 1")
    jobs = list(zip(params_list, sources))
    if worker_count == 1:
        outs = [oracle_run(graph, p, s) for p, s in jobs]
    else:
        with ThreadPoolExecutor(max_workers=worker_count) as pool:
            outs = list(pool.map(lambda j: oracle_run(graph, *j), jobs))
    results = [o[0] for o in outs]
    edges = int(sum(o[1] for o in outs))
    return results, edges


def baseline_edges(graph: Graph, params_list: list[QueryParams],
                   sources: list[int]) -> int:
    return run_naive_concurrent(graph, params_list, sources)[1]


def verify_states(graph: Graph, states: list[QueryState]) -> bool:
    """Oracle equivalence of a finished run (exact for SSSP/BFS/RW,
    conservation + threshold predicates for PPR)."""
    for st in states:
        if st.kind is QueryKind.SSSP:
            d, _ = sssp_oracle(graph, st.source)
            if not np.array_equal(st.labels, d):
                return False
        elif st.kind is QueryKind.BFS:
            d, _ = bfs_oracle(graph, st.source)
            if not np.array_equal(st.labels, d):
                return False
        elif st.kind is QueryKind.PPR:
            if abs(st.p.sum() + st.r.sum() - 1.0) > 1e-9:
                return False
            deg = np.maximum(graph.out_degrees(), 1)
            if (st.r >= st.params.epsilon * deg).any():
                return False
        else:
            if st.walk != rw_oracle(graph, st.source, st.params.walk_length,
                                    st.params.rng_seed):
                return False
    return True


# ---------------------------------------------------------------------------
# benchmark harness

@dataclass
class BenchReport:
    rows: list[dict] = field(default_factory=list)
    baseline_edges: int = 0
    summary: dict = field(default_factory=dict)

    def add_cell(self, functor: Functor, yield_policy: YieldPolicy, k: int,
                 workers: int, seed: int, metrics: RunMetrics, correct: bool,
                 wall_seconds: float) -> dict:
        if not correct:
            ratio = float("nan")
        else:
            ratio = (compute_work_ratio(metrics, self.baseline_edges)
                     if self.baseline_edges > 0 else float("nan"))
        row = {
            "functor": functor.value,
            "yield": yield_policy.describe(),
            "K": k,
            "workers": workers,
            "seed": seed,
            "ops_executed": metrics.ops_executed,
            "edges_processed": metrics.edges_processed,
            "work_ratio": ratio,
            "partition_visits": metrics.partition_visits,
            "yields": metrics.yields,
            "correct": correct,
            "wall_seconds": wall_seconds,
        }
        self.rows.append(row)
        return row

    def to_json_dict(self, include_wall: bool = True) -> dict:
        rows = self.rows
        if not include_wall:
            rows = [{k: v for k, v in r.items() if k != "wall_seconds"}
                    for r in rows]
        return {"baseline_edges": self.baseline_edges, "rows": rows,
                "summary": self.summary}

    def write_csv(self, fh, include_wall: bool = True) -> None:
        cols = list(REPORT_COLUMNS) + (["wall_seconds"] if include_wall else [])
        writer = csv.DictWriter(fh, fieldnames=cols, extrasaction="ignore")
        writer.writeheader()
        for row in self.rows:
            writer.writerow(row)

    def write_json(self, fh, include_wall: bool = True) -> None:
        json.dump(self.to_json_dict(include_wall), fh, indent=2)
        fh.write("\n")


def _make_plan(graph, partition_count: int, seed: int, partitioner: str):
    if partitioner == "contiguous":
        return partition_contiguous(graph, partition_count)
    if partitioner == "random":
        return partition_random(graph, partition_count, seed)
    raise ValueError(f"unknown partitioner {partitioner!r}")


def _bench_cell(graph, partitions, params_list, sources, config,
                report: BenchReport, seed: int) -> dict:
    queries = make_queries(params_list, sources, graph.vertex_count)
    t0 = time.perf_counter()
    states, metrics = run_fpp(graph, partitions, None, queries, config)
    wall = time.perf_counter() - t0
    correct = verify_states(graph, states)
    return report.add_cell(config.functor, config.yield_policy,
                           config.effective_buckets(len(queries)),
                           config.worker_count, seed, metrics, correct, wall)


def bench_schedulers(graph: Graph, params_list: list[QueryParams],
                     sources: list[int], yield_policy: YieldPolicy,
                     seeds: list[int],
                     partition_count: int = 8,
                     functors: tuple[Functor, ...] = tuple(Functor),
                     worker_count: int = 1,
                     partitioner: str = "contiguous") -> BenchReport:
    """Same workload under each functor; summary reports how often
    priority <= FIFO <= random holds on ops_executed."""
    if len(functors) < 2:
        raise ValueError("need at least two functors to compare")
    report = BenchReport(baseline_edges=baseline_edges(graph, params_list,
                                                       sources))
    wins_priority = 0
    ordered = 0
    for seed in seeds:
        partitions = build_partitions(graph, _make_plan(
            graph, partition_count, seed, partitioner))
        per_functor = {}
        for functor in functors:
            cfg = EngineConfig(functor=functor, yield_policy=yield_policy,
                               worker_count=worker_count, seed=seed)
            row = _bench_cell(graph, partitions, params_list, sources, cfg,
                              report, seed)
            per_functor[functor] = row["ops_executed"]
        if (Functor.BEST in per_functor and Functor.FIFO in per_functor
                and per_functor[Functor.BEST] <= per_functor[Functor.FIFO]):
            wins_priority += 1
            if (Functor.RANDOM in per_functor
                    and per_functor[Functor.FIFO] <= per_functor[Functor.RANDOM]):
                ordered += 1
    report.summary = {
        "seeds": len(seeds),
        "priority_le_fifo_fraction": wins_priority / len(seeds) if seeds else 0.0,
        "priority_le_fifo_le_random_fraction": ordered / len(seeds) if seeds else 0.0,
    }
    return report


def bench_yield_sweep(graph: Graph, params_list: list[QueryParams],
                      sources: list[int], functor: Functor,
                      thresholds: list[float | None],
                      partition_count: int = 8, seed: int = 0,
                      worker_count: int = 1,
                      partitioner: str = "contiguous") -> BenchReport:
    """EdgeBudget sweep (None = no yielding) under one functor."""
    if not thresholds:
        raise ValueError("thresholds must be non-empty")
    report = BenchReport(baseline_edges=baseline_edges(graph, params_list,
                                                       sources))
    partitions = build_partitions(graph, _make_plan(
        graph, partition_count, seed, partitioner))
    curve = {}
    for t in thresholds:
        yp = YieldPolicy.none() if t is None else YieldPolicy.edge_budget(t)
        cfg = EngineConfig(functor=functor, yield_policy=yp,
                           worker_count=worker_count, seed=seed)
        row = _bench_cell(graph, partitions, params_list, sources, cfg,
                          report, seed)
        curve[yp.describe()] = row["edges_processed"]
    report.summary = {"edges_by_threshold": curve}
    return report
