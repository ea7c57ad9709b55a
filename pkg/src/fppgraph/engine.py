"""Main processing loop: schedule, consolidate, compute, flush.

One coordinator thread pops partitions from the scheduler queue; a worker
pool runs the consolidated batch's per-query kernels in parallel (each
query state is uniquely owned, so compute is race-free and the result is
independent of worker count); remote operations accumulate in per-query
outboxes and are flushed in canonical order after the pass barrier.
"""

from __future__ import annotations

import hashlib
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .buffers import PartitionBuffer, consolidate_buffer, init_buffers
from .graph import Graph, Partition
from .kernels import (ComputeOutcome, QueryKind, QueryParams, QueryState,
                      compute_in_partition, make_query_state)
from .scheduler import (Functor, SchedulerQueue, YieldPolicy, make_yield_check)


class EngineError(RuntimeError):
    pass


@dataclass
class EngineConfig:
    functor: Functor = Functor.FIFO
    yield_policy: YieldPolicy = field(default_factory=YieldPolicy.none)
    worker_count: int = 1
    bucket_count: int | None = None  # default: max(4 * workers, 1), capped |Q|
    consolidation: str = "sort"  # sort | scan
    seed: int = 0
    cache_budget_bytes: int | None = None
    max_passes: int | None = None  # safety valve; default scales with work

    def __post_init__(self):
        if self.worker_count < 1:
            raise EngineError("worker_count must be >= 1")
        if self.bucket_count is not None and self.bucket_count < 1:
            raise EngineError("bucket_count must be >= 1")
        if self.consolidation not in ("sort", "scan"):
            raise EngineError(f"unknown consolidation: {self.consolidation}")

    def effective_buckets(self, query_count: int) -> int:
        k = self.bucket_count
        if k is None:
            k = max(4 * self.worker_count, 1)
        return max(1, min(k, query_count))


@dataclass
class RunMetrics:
    """Work accounting for one run; per-query arrays plus totals."""

    query_count: int
    edges_per_query: np.ndarray = field(default=None)
    ops_executed_per_query: np.ndarray = field(default=None)
    ops_stale_per_query: np.ndarray = field(default=None)
    yields_per_query: np.ndarray = field(default=None)
    ops_appended: int = 0
    ops_seeded: int = 0  # consolidated ops handed to kernels as seeds
    ops_discarded: int = 0  # merged away during consolidation
    partition_visits: int = 0
    scheduling_steps: int = 0
    pass_digests: list[str] = field(default_factory=list)
    pass_partitions: list[int] = field(default_factory=list)

    def __post_init__(self):
        if self.edges_per_query is None:
            z = lambda: np.zeros(self.query_count, dtype=np.int64)
            self.edges_per_query = z()
            self.ops_executed_per_query = z()
            self.ops_stale_per_query = z()
            self.yields_per_query = z()

    @property
    def edges_processed(self) -> int:
        return int(self.edges_per_query.sum())

    @property
    def ops_executed(self) -> int:
        return int(self.ops_executed_per_query.sum())

    @property
    def ops_filtered_stale(self) -> int:
        return int(self.ops_stale_per_query.sum())

    @property
    def yields(self) -> int:
        return int(self.yields_per_query.sum())

    def validate(self) -> None:
        for arr in (self.edges_per_query, self.ops_executed_per_query,
                    self.ops_stale_per_query, self.yields_per_query):
            if (arr < 0).any():
                raise AssertionError("negative counter")
        # every appended op is either merged away at consolidation or
        # handed to a kernel as a seed (where it executes or is stale)
        accounted = self.ops_seeded + self.ops_discarded
        if accounted != self.ops_appended:
            raise AssertionError(
                f"lost work: appended {self.ops_appended}, "
                f"accounted {accounted}")
        if self.ops_filtered_stale > self.ops_seeded:
            raise AssertionError("stale count exceeds seeded count")


def compute_work_ratio(metrics: RunMetrics, oracle_edges: int) -> float:
    """Engine edges over sequential baseline edges."""
    if oracle_edges <= 0:
        raise ValueError("oracle baseline must be positive")
    return metrics.edges_processed / oracle_edges


def make_queries(params_list: list[QueryParams], sources: list[int],
                 vertex_count: int) -> list[QueryState]:
    if len(params_list) != len(sources):
        raise ValueError("params/sources length mismatch")
    return [make_query_state(i, p, s, vertex_count)
            for i, (p, s) in enumerate(zip(params_list, sources))]


def _batch_digest(pid: int, runs: dict) -> str:
    h = hashlib.sha256()
    h.update(pid.to_bytes(8, "little"))
    for qid in sorted(runs):
        verts, vals = runs[qid]
        h.update(int(qid).to_bytes(8, "little"))
        h.update(np.ascontiguousarray(verts, dtype=np.int64).tobytes())
        h.update(np.ascontiguousarray(vals, dtype=np.float64).tobytes())
    return h.hexdigest()


def process_partition_pass(partition: Partition, batch_runs: dict,
                           states: list[QueryState], yield_policy: YieldPolicy,
                           query_count: int,
                           pool: ThreadPoolExecutor | None) -> dict[int, ComputeOutcome]:
    """Run every query of the consolidated batch; one task per query."""

    def run_one(qid: int) -> ComputeOutcome:
        verts, vals = batch_runs[qid]
        first = float(vals[0]) if len(vals) else 0.0
        check = make_yield_check(yield_policy, partition, query_count,
                                 first, states[qid].kind)
        return compute_in_partition(states[qid], partition, verts, vals, check)

    qids = sorted(batch_runs)
    if pool is None or len(qids) <= 1:
        return {q: run_one(q) for q in qids}
    return dict(zip(qids, pool.map(run_one, qids)))


def flush_outboxes(outcomes: dict[int, ComputeOutcome], active_pid: int,
                   buffers: list[PartitionBuffer], queue: SchedulerQueue,
                   metrics: RunMetrics) -> None:
    """Append this pass's remote and residual ops to target buffers.

    Batches merge across queries per target partition; queries iterate in
    ascending id so buffer contents are canonical for any worker count.
    """
    per_target: dict[int, list[tuple[int, np.ndarray, np.ndarray]]] = {}
    for qid in sorted(outcomes):
        out = outcomes[qid]
        if len(out.residual_verts):
            per_target.setdefault(active_pid, []).append(
                (qid, out.residual_verts, out.residual_vals))
        if len(out.remote_verts):
            for tgt in np.unique(out.remote_parts):
                sel = out.remote_parts == tgt
                per_target.setdefault(int(tgt), []).append(
                    (qid, out.remote_verts[sel], out.remote_vals[sel]))
    for tgt in sorted(per_target):
        chunks = per_target[tgt]
        qids = np.concatenate([np.full(len(v), q, dtype=np.int64)
                               for q, v, _ in chunks])
        verts = np.concatenate([v for _, v, _ in chunks])
        vals = np.concatenate([x for _, _, x in chunks])
        buffers[tgt].append(qids, verts, vals)
        metrics.ops_appended += len(qids)
        queue.notify_append(tgt, vals, len(qids))


def _check_termination(states: list[QueryState], graph: Graph) -> None:
    for st in states:
        if st.kind is QueryKind.PPR:
            thresh = st.params.epsilon * np.maximum(graph.out_degrees(), 1)
            if (st.r >= thresh).any():
                raise AssertionError(
                    f"query {st.query_id}: residual above threshold at exit")
            st.done = True
        elif st.kind in (QueryKind.SSSP, QueryKind.BFS):
            st.done = True


def run_fpp(graph: Graph, partitions: list[Partition],
            buffers: list[PartitionBuffer] | None,
            queries: list[QueryState],
            config: EngineConfig) -> tuple[list[QueryState], RunMetrics]:
    """Execute a homogeneous query batch over the partitioned graph."""
    if not queries:
        raise EngineError("empty query batch")
    kinds = {st.kind for st in queries}
    if len(kinds) > 1:
        raise EngineError(f"heterogeneous query kinds: {sorted(k.value for k in kinds)}")
    kind = queries[0].kind
    for i, st in enumerate(queries):
        if st.query_id != i:
            raise EngineError("query ids must be 0..n-1 in order")

    part_of = np.empty(graph.vertex_count, dtype=np.int64)
    for p in partitions:
        part_of[p.local_vertices] = p.id

    n_buckets = config.effective_buckets(len(queries))
    if buffers is None:
        buffers = init_buffers(partitions, part_of, queries, n_buckets)
    metrics = RunMetrics(query_count=len(queries))
    metrics.ops_appended += sum(b.op_count() for b in buffers)

    queue = SchedulerQueue(len(partitions), config.functor, kind, config.seed)
    for b in buffers:
        n = b.op_count()
        if n:
            # value functors need the buffered values for the seed priority
            all_vals = np.concatenate(
                [bk.vals[:len(bk)] for bk in b.buckets if len(bk)])
            queue.notify_append(b.partition_id, all_vals, n)

    max_passes = config.max_passes
    if max_passes is None:
        max_passes = 1000 * max(len(partitions), 1) * max(len(queries), 1)

    pool = (ThreadPoolExecutor(max_workers=config.worker_count)
            if config.worker_count > 1 else None)
    active_pass = False  # single-active-partition token
    try:
        while True:
            pid = queue.schedule_next()
            metrics.scheduling_steps += 1
            if pid is None:
                break
            if metrics.partition_visits >= max_passes:
                raise EngineError(f"pass limit {max_passes} exceeded")
            assert not active_pass, "two partitions drained at once"
            active_pass = True
            queue.notify_drained(pid)
            drained = buffers[pid].drain()
            batch = consolidate_buffer(
                drained, kind, config.consolidation,
                bucket_queries=[
                    [q for q in range(len(queries))
                     if buffers[pid].bucket_of_query(q) == i]
                    for i in range(len(buffers[pid].buckets))]
                if config.consolidation == "scan" else None)
            metrics.ops_discarded += batch.discarded
            metrics.ops_seeded += batch.op_count()
            metrics.partition_visits += 1
            metrics.pass_digests.append(_batch_digest(pid, batch.runs))
            metrics.pass_partitions.append(pid)

            outcomes = process_partition_pass(
                partitions[pid], batch.runs, queries, config.yield_policy,
                len(queries), pool)
            for qid, out in outcomes.items():
                metrics.edges_per_query[qid] += out.edges_processed
                metrics.ops_executed_per_query[qid] += out.ops_executed
                metrics.ops_stale_per_query[qid] += out.ops_stale
                if out.yielded:
                    metrics.yields_per_query[qid] += 1
            active_pass = False

            flush_outboxes(outcomes, pid, buffers, queue, metrics)
    finally:
        if pool is not None:
            pool.shutdown(wait=True)

    assert all(b.op_count() == 0 for b in buffers)
    _check_termination(queries, graph)
    metrics.validate()
    return queries, metrics


def default_worker_count() -> int:
    env = os.environ.get("FPP_WORKERS")
    if env:
        return max(1, int(env))
    return min(8, os.cpu_count() or 1)
