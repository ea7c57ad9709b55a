"""Graph loading, CSR representation, and cache-budget partitioning."""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

MAGIC = b"FPPG"
SNAPSHOT_VERSION = 1


class GraphFormatError(ValueError):
    """Raised for malformed edge lists, partition files, or snapshots."""


@dataclass
class Graph:
    """Immutable CSR adjacency, optionally edge-weighted."""

    vertex_count: int
    edge_offsets: np.ndarray  # int64, len = vertex_count + 1
    adjacency: np.ndarray  # int64 target vertex ids
    weights: np.ndarray | None = None  # float64, same length as adjacency
    directed: bool = True

    @property
    def edge_count(self) -> int:
        return int(self.edge_offsets[-1])

    @property
    def weighted(self) -> bool:
        return self.weights is not None

    def out_degree(self, v: int) -> int:
        return int(self.edge_offsets[v + 1] - self.edge_offsets[v])

    def out_degrees(self) -> np.ndarray:
        return np.diff(self.edge_offsets)

    def neighbors(self, v: int) -> np.ndarray:
        return self.adjacency[self.edge_offsets[v]:self.edge_offsets[v + 1]]

    def byte_size(self) -> int:
        """Bytes of the offsets, adjacency and weights arrays."""
        n = self.edge_offsets.nbytes + self.adjacency.nbytes
        if self.weights is not None:
            n += self.weights.nbytes
        return n

    def validate(self) -> None:
        off = self.edge_offsets
        if off[0] != 0 or len(off) != self.vertex_count + 1:
            raise GraphFormatError("bad edge_offsets shape")
        if np.any(np.diff(off) < 0):
            raise GraphFormatError("edge_offsets must be non-decreasing")
        if off[-1] != len(self.adjacency):
            raise GraphFormatError("edge_offsets[-1] != edge count")
        if len(self.adjacency) and (self.adjacency.min() < 0
                                    or self.adjacency.max() >= self.vertex_count):
            raise GraphFormatError("adjacency entry out of range")
        if self.weights is not None:
            if len(self.weights) != len(self.adjacency):
                raise GraphFormatError("weights length mismatch")
            if len(self.weights) and (not np.all(np.isfinite(self.weights))
                                      or self.weights.min() < 0):
                raise GraphFormatError("weights must be finite and non-negative")


@dataclass
class PartitionPlan:
    """Assignment of every vertex to one of partition_count disjoint parts."""

    partition_of: np.ndarray  # int64, len = vertex_count
    partition_count: int

    def validate(self) -> None:
        if len(self.partition_of) == 0:
            raise GraphFormatError("empty partition plan")
        if self.partition_of.min() < 0 or self.partition_of.max() >= self.partition_count:
            raise GraphFormatError("partition id out of range")
        counts = np.bincount(self.partition_of, minlength=self.partition_count)
        empty = np.nonzero(counts == 0)[0]
        if len(empty):
            raise GraphFormatError(f"empty partition: id {int(empty[0])}")


@dataclass
class Partition:
    """One part of the graph: local subgraph plus routed cut edges.

    local_csr arrays are indexed by local vertex index; cut edges keep
    global target ids and target partition ids so the engine can route
    remote operations without a plan lookup.
    """

    id: int
    local_vertices: np.ndarray  # sorted global ids
    local_offsets: np.ndarray  # int64, len = nloc + 1
    local_adjacency: np.ndarray  # local indices
    local_weights: np.ndarray | None
    cut_offsets: np.ndarray  # int64, len = nloc + 1
    cut_targets: np.ndarray  # global ids
    cut_weights: np.ndarray | None
    cut_target_parts: np.ndarray  # partition ids
    global_degrees: np.ndarray = field(default=None, repr=False)  # full-graph out-degrees
    # references to the source graph and plan, for kernels (random walks)
    # that must follow the full-graph adjacency order
    source_graph: "Graph" = field(default=None, repr=False)
    part_of: np.ndarray = field(default=None, repr=False)

    @property
    def vertex_count(self) -> int:
        return len(self.local_vertices)

    @property
    def local_edge_count(self) -> int:
        return int(self.local_offsets[-1])

    @property
    def cut_edge_count(self) -> int:
        return int(self.cut_offsets[-1])

    @property
    def edge_count(self) -> int:
        return self.local_edge_count + self.cut_edge_count

    def global_to_local(self, v) -> np.ndarray | int:
        """Map global vertex id(s) to local index; raises if not local."""
        idx = np.searchsorted(self.local_vertices, v)
        if np.any(idx >= len(self.local_vertices)) or np.any(self.local_vertices[idx] != v):
            raise KeyError(f"vertex {v} not in partition {self.id}")
        return idx

    def contains(self, v: int) -> bool:
        idx = int(np.searchsorted(self.local_vertices, v))
        return idx < len(self.local_vertices) and int(self.local_vertices[idx]) == v


def load_edge_list(path: str, weighted: bool = False) -> Graph:
    """Parse a whitespace-separated "u v [w]" edge list into a CSR graph.

    Lines starting with '#' or '%' are comments. Duplicate edges are kept.
    """
    srcs: list[int] = []
    dsts: list[int] = []
    wts: list[float] = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            s = line.strip()
            if not s or s.startswith("#") or s.startswith("%"):
                continue
            parts = s.split()
            try:
                u = int(parts[0])
                v = int(parts[1])
            except (ValueError, IndexError):
                raise GraphFormatError(f"{path}:{lineno}: cannot parse edge: {s!r}")
            if u < 0 or v < 0:
                raise GraphFormatError(f"{path}:{lineno}: negative vertex id")
            if weighted:
                try:
                    w = float(parts[2])
                except (ValueError, IndexError):
                    raise GraphFormatError(f"{path}:{lineno}: missing or bad weight")
                if not math.isfinite(w) or w < 0:
                    raise GraphFormatError(f"{path}:{lineno}: weight negative or non-finite")
                wts.append(w)
            srcs.append(u)
            dsts.append(v)
    if not srcs:
        raise GraphFormatError(f"{path}: empty edge list")
    return from_edges(srcs, dsts, wts if weighted else None)


def from_edges(srcs, dsts, wts=None, vertex_count: int | None = None,
               directed: bool = True) -> Graph:
    """Build a CSR Graph from parallel edge arrays."""
    srcs = np.asarray(srcs, dtype=np.int64)
    dsts = np.asarray(dsts, dtype=np.int64)
    n = vertex_count
    if n is None:
        n = int(max(srcs.max(), dsts.max())) + 1 if len(srcs) else 0
    order = np.argsort(srcs, kind="stable")
    srcs_s = srcs[order]
    dsts_s = dsts[order]
    offsets = np.zeros(n + 1, dtype=np.int64)
    np.add.at(offsets, srcs + 1, 1)
    np.cumsum(offsets, out=offsets)
    weights = None
    if wts is not None:
        weights = np.asarray(wts, dtype=np.float64)[order]
    g = Graph(n, offsets, dsts_s, weights, directed=directed)
    g.validate()
    return g


def make_undirected(graph: Graph) -> Graph:
    """Symmetrize: every edge appears in both directions."""
    srcs = np.repeat(np.arange(graph.vertex_count, dtype=np.int64), graph.out_degrees())
    dsts = graph.adjacency
    both_s = np.concatenate([srcs, dsts])
    both_d = np.concatenate([dsts, srcs])
    wts = None
    if graph.weights is not None:
        wts = np.concatenate([graph.weights, graph.weights])
    return from_edges(both_s, both_d, wts, vertex_count=graph.vertex_count,
                      directed=False)


def partition_count_for_budget(graph_bytes, cache_bytes) -> int:
    """ceil(graph_bytes / cache_bytes), minimum 1, exact arithmetic."""
    if graph_bytes <= 0 or cache_bytes <= 0:
        raise ValueError("byte counts must be positive")
    k = math.ceil(Fraction(graph_bytes) / Fraction(cache_bytes))
    return max(1, k)


def partition_random(graph: Graph, k: int, seed: int) -> PartitionPlan:
    """Deterministic random partition into parts of near-equal size."""
    n = graph.vertex_count
    if not 1 <= k <= n:
        raise ValueError(f"k={k} out of range for {n} vertices")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    part = np.empty(n, dtype=np.int64)
    # round-robin over the permutation: sizes differ by at most 1
    part[perm] = np.arange(n, dtype=np.int64) % k
    plan = PartitionPlan(part, k)
    plan.validate()
    return plan


def partition_contiguous(graph: Graph, k: int) -> PartitionPlan:
    """Split the vertex id range into k near-equal contiguous blocks.

    Preserves whatever locality the vertex numbering carries (spatial for
    lattices and road networks), which is what makes partition scheduling
    order matter.
    """
    n = graph.vertex_count
    if not 1 <= k <= n:
        raise ValueError(f"k={k} out of range for {n} vertices")
    bounds = np.linspace(0, n, k + 1).astype(np.int64)
    part = np.repeat(np.arange(k, dtype=np.int64), np.diff(bounds))
    plan = PartitionPlan(part, k)
    plan.validate()
    return plan


def partition_import(path: str, graph: Graph) -> PartitionPlan:
    """Read a METIS-style partition file (one partition id per line)."""
    ids: list[int] = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            s = line.strip()
            if not s:
                continue
            try:
                ids.append(int(s))
            except ValueError:
                raise GraphFormatError(f"{path}:{lineno}: non-integer partition id")
    if len(ids) != graph.vertex_count:
        raise GraphFormatError(
            f"{path}: line count {len(ids)} != vertex count {graph.vertex_count}")
    part = np.asarray(ids, dtype=np.int64)
    if part.min() < 0:
        raise GraphFormatError(f"{path}: negative partition id")
    plan = PartitionPlan(part, int(part.max()) + 1)
    plan.validate()
    return plan


def build_partitions(graph: Graph, plan: PartitionPlan) -> list[Partition]:
    """Split the graph along the plan; every edge lands in exactly one
    partition, either locally or as an annotated cut edge."""
    if len(plan.partition_of) != graph.vertex_count:
        raise ValueError("plan does not match graph")
    part_of = plan.partition_of
    degrees = graph.out_degrees()
    partitions = []
    for pid in range(plan.partition_count):
        loc = np.nonzero(part_of == pid)[0].astype(np.int64)  # sorted
        nloc = len(loc)
        loc_off = np.zeros(nloc + 1, dtype=np.int64)
        cut_off = np.zeros(nloc + 1, dtype=np.int64)
        loc_adj: list[np.ndarray] = []
        loc_w: list[np.ndarray] = []
        cut_tgt: list[np.ndarray] = []
        cut_w: list[np.ndarray] = []
        cut_p: list[np.ndarray] = []
        for j, u in enumerate(loc):
            lo, hi = graph.edge_offsets[u], graph.edge_offsets[u + 1]
            tgts = graph.adjacency[lo:hi]
            is_local = part_of[tgts] == pid
            lt = tgts[is_local]
            loc_adj.append(np.searchsorted(loc, lt))
            ct = tgts[~is_local]
            cut_tgt.append(ct)
            cut_p.append(part_of[ct])
            if graph.weights is not None:
                ws = graph.weights[lo:hi]
                loc_w.append(ws[is_local])
                cut_w.append(ws[~is_local])
            loc_off[j + 1] = loc_off[j] + len(lt)
            cut_off[j + 1] = cut_off[j] + len(ct)
        partitions.append(Partition(
            id=pid,
            local_vertices=loc,
            local_offsets=loc_off,
            local_adjacency=(np.concatenate(loc_adj) if loc_adj
                             else np.empty(0, dtype=np.int64)).astype(np.int64),
            local_weights=(np.concatenate(loc_w).astype(np.float64)
                           if graph.weights is not None and loc_w else
                           (np.empty(0, dtype=np.float64)
                            if graph.weights is not None else None)),
            cut_offsets=cut_off,
            cut_targets=(np.concatenate(cut_tgt) if cut_tgt
                         else np.empty(0, dtype=np.int64)).astype(np.int64),
            cut_weights=(np.concatenate(cut_w).astype(np.float64)
                         if graph.weights is not None and cut_w else
                         (np.empty(0, dtype=np.float64)
                          if graph.weights is not None else None)),
            cut_target_parts=(np.concatenate(cut_p) if cut_p
                              else np.empty(0, dtype=np.int64)).astype(np.int64),
            global_degrees=degrees,
            source_graph=graph,
            part_of=part_of,
        ))
    return partitions


def save_snapshot(graph: Graph, path: str) -> None:
    """Write the binary snapshot: magic, version, flags, counts, arrays."""
    flags = (1 if graph.weighted else 0) | (2 if graph.directed else 0)
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<BB", SNAPSHOT_VERSION, flags))
        fh.write(struct.pack("<QQ", graph.vertex_count, graph.edge_count))
        fh.write(graph.edge_offsets.astype("<i8").tobytes())
        fh.write(graph.adjacency.astype("<i8").tobytes())
        if graph.weights is not None:
            fh.write(graph.weights.astype("<f8").tobytes())


def load_snapshot(path: str) -> Graph:
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:4] != MAGIC:
        raise GraphFormatError(f"{path}: bad magic")
    version, flags = struct.unpack_from("<BB", data, 4)
    if version != SNAPSHOT_VERSION:
        raise GraphFormatError(f"{path}: unsupported snapshot version {version}")
    n, m = struct.unpack_from("<QQ", data, 6)
    pos = 22
    offsets = np.frombuffer(data, dtype="<i8", count=n + 1, offset=pos).astype(np.int64)
    pos += (n + 1) * 8
    adjacency = np.frombuffer(data, dtype="<i8", count=m, offset=pos).astype(np.int64)
    pos += m * 8
    weights = None
    if flags & 1:
        weights = np.frombuffer(data, dtype="<f8", count=m, offset=pos).astype(np.float64)
    g = Graph(int(n), offsets, adjacency, weights, directed=bool(flags & 2))
    g.validate()
    return g
