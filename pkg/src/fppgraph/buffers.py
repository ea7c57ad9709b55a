"""Per-partition multi-bucket operation buffers and per-query consolidation."""

from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Operation:
    """One unit of deferred query work: (query, vertex, value)."""

    query_id: int
    vertex: int
    value: float


class _Bucket:
    """Growable parallel arrays with reservation-range concurrent append.

    Appenders take a short lock to reserve an index range (growing the
    arrays if needed), then copy into their range without coordination.
    """

    __slots__ = ("qids", "verts", "vals", "count", "_lock")

    def __init__(self, capacity: int = 16):
        self.qids = np.empty(capacity, dtype=np.int64)
        self.verts = np.empty(capacity, dtype=np.int64)
        self.vals = np.empty(capacity, dtype=np.float64)
        self.count = 0
        self._lock = threading.Lock()

    def reserve(self, n: int) -> int:
        with self._lock:
            start = self.count
            need = start + n
            if need > len(self.qids):
                cap = max(2 * len(self.qids), need)
                for name in ("qids", "verts", "vals"):
                    old = getattr(self, name)
                    new = np.empty(cap, dtype=old.dtype)
                    new[:start] = old[:start]
                    setattr(self, name, new)
            self.count = need
            return start

    def append(self, qids, verts, vals) -> None:
        n = len(qids)
        if n == 0:
            return
        start = self.reserve(n)
        self.qids[start:start + n] = qids
        self.verts[start:start + n] = verts
        self.vals[start:start + n] = vals

    def take(self):
        out = (self.qids[:self.count].copy(), self.verts[:self.count].copy(),
               self.vals[:self.count].copy())
        self.count = 0
        return out

    def __len__(self):
        return self.count


class PartitionBuffer:
    """K independent buckets; query -> bucket assignment is query_id mod K."""

    def __init__(self, partition_id: int, bucket_count: int):
        if bucket_count < 1:
            raise ValueError("bucket_count must be >= 1")
        self.partition_id = partition_id
        self.bucket_count = bucket_count
        self.buckets = [_Bucket() for _ in range(bucket_count)]

    def bucket_of_query(self, query_id: int) -> int:
        return query_id % self.bucket_count

    def append(self, qids, verts, vals) -> None:
        """Route an operation batch into its buckets."""
        qids = np.asarray(qids, dtype=np.int64)
        verts = np.asarray(verts, dtype=np.int64)
        vals = np.asarray(vals, dtype=np.float64)
        if self.bucket_count == 1:
            self.buckets[0].append(qids, verts, vals)
            return
        b = qids % self.bucket_count
        for k in np.unique(b):
            sel = b == k
            self.buckets[int(k)].append(qids[sel], verts[sel], vals[sel])

    def append_ops(self, ops: list[Operation]) -> None:
        if not ops:
            return
        self.append([o.query_id for o in ops], [o.vertex for o in ops],
                    [o.value for o in ops])

    def drain(self):
        """Return and empty all buckets; caller must hold exclusive access."""
        return [bucket.take() for bucket in self.buckets]

    def op_count(self) -> int:
        return sum(len(b) for b in self.buckets)

    def __len__(self):
        return self.op_count()


@dataclass
class ConsolidatedBatch:
    """Per-query priority-ordered operation runs plus the discard count."""

    runs: dict[int, tuple[np.ndarray, np.ndarray]]  # qid -> (verts, vals)
    discarded: int

    def query_ids(self) -> list[int]:
        return sorted(self.runs)

    def op_count(self) -> int:
        return sum(len(v) for v, _ in self.runs.values())


def _merge_run(verts: np.ndarray, vals: np.ndarray, minimize: bool):
    """Merge duplicate vertices of one query's ops.

    Input must be grouped by vertex with buffer order preserved inside each
    group, so the PPR sum order is canonical. Returns the run in priority
    order (ascending value for min-kinds, descending for PPR) with ties
    broken by vertex id ascending, plus the number of merged-away ops.
    """
    if len(verts) == 0:
        return verts, vals, 0
    uverts, start = np.unique(verts, return_index=True)
    if minimize:
        mvals = np.minimum.reduceat(vals, start)
        order = np.lexsort((uverts, mvals))
    else:
        mvals = np.add.reduceat(vals, start)
        order = np.lexsort((uverts, -mvals))
    return uverts[order], mvals[order], len(verts) - len(uverts)


def consolidate_sort(qids, verts, vals, kind) -> ConsolidatedBatch:
    """Sort-based consolidation: stable sort by (query, vertex), then merge
    per-vertex duplicates and order each run by the kind's priority."""
    from .kernels import QueryKind

    minimize = kind in (QueryKind.SSSP, QueryKind.BFS)
    runs: dict[int, tuple[np.ndarray, np.ndarray]] = {}
    discarded = 0
    if len(qids) == 0:
        return ConsolidatedBatch(runs, 0)
    order = np.lexsort((verts, qids))  # stable: buffer order kept per (q, v)
    qids = qids[order]
    verts = verts[order]
    vals = vals[order]
    if kind is QueryKind.RW:
        # at most one live operation per query: no per-vertex merge
        for q in np.unique(qids):
            sel = qids == q
            runs[int(q)] = (verts[sel], vals[sel])
        return ConsolidatedBatch(runs, 0)
    for q in np.unique(qids):
        sel = qids == q
        rv, rl, d = _merge_run(verts[sel], vals[sel], minimize)
        runs[int(q)] = (rv, rl)
        discarded += d
    return ConsolidatedBatch(runs, discarded)


def consolidate_scan(qids, verts, vals, kind, query_ids_in_bucket) -> ConsolidatedBatch:
    """Scan-based consolidation: one pass over the bucket per query.

    Produces bit-identical output to consolidate_sort.
    """
    from .kernels import QueryKind

    minimize = kind in (QueryKind.SSSP, QueryKind.BFS)
    runs: dict[int, tuple[np.ndarray, np.ndarray]] = {}
    discarded = 0
    for q in sorted(query_ids_in_bucket):
        sel = qids == q
        if not np.any(sel):
            continue
        sv = verts[sel]
        sl = vals[sel]
        if kind is QueryKind.RW:
            runs[int(q)] = (sv, sl)
            continue
        # group by vertex, buffer order inside each group (stable sort)
        order = np.argsort(sv, kind="stable")
        rv, rl, d = _merge_run(sv[order], sl[order], minimize)
        runs[int(q)] = (rv, rl)
        discarded += d
    return ConsolidatedBatch(runs, discarded)


def consolidate_buffer(buffer_batches, kind, method: str = "sort",
                       bucket_queries=None) -> ConsolidatedBatch:
    """Consolidate a drained buffer (list of per-bucket arrays) into one
    batch; queries never span buckets so runs merge disjointly."""
    runs: dict[int, tuple[np.ndarray, np.ndarray]] = {}
    discarded = 0
    for i, (qids, verts, vals) in enumerate(buffer_batches):
        if method == "sort":
            b = consolidate_sort(qids, verts, vals, kind)
        elif method == "scan":
            qs = (bucket_queries[i] if bucket_queries is not None
                  else np.unique(qids))
            b = consolidate_scan(qids, verts, vals, kind, qs)
        else:
            raise ValueError(f"unknown consolidation method: {method}")
        runs.update(b.runs)
        discarded += b.discarded
    return ConsolidatedBatch(runs, discarded)


def init_buffers(partitions, plan_part_of, queries, bucket_count: int) -> list[PartitionBuffer]:
    """One buffer per partition, seeded with each query's initial operation."""
    from .kernels import seed_operation

    buffers = [PartitionBuffer(p.id, bucket_count) for p in partitions]
    for q in queries:
        pid = int(plan_part_of[q.source])
        op = seed_operation(q.params, q.query_id, q.source)
        buffers[pid].append([op.query_id], [op.vertex], [op.value])
    return buffers
