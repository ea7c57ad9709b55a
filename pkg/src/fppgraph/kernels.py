"""Query kinds, per-query state, sequential oracles, and the in-partition
compute step used by the engine."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import _kernels
from .buffers import Operation
from .graph import Graph, Partition


class QueryKind(Enum):
    SSSP = "sssp"
    BFS = "bfs"
    PPR = "ppr"
    RW = "rw"


@dataclass
class QueryParams:
    """Kind-specific parameters; validated on construction."""

    kind: QueryKind
    alpha: float = 0.15
    epsilon: float = 1e-6
    walk_length: int = 0
    rng_seed: int = 0

    def __post_init__(self):
        if self.kind is QueryKind.PPR:
            if not 0.0 < self.alpha < 1.0:
                raise ValueError(f"alpha must be in (0,1), got {self.alpha}")
            if self.epsilon <= 0.0:
                raise ValueError(f"epsilon must be > 0, got {self.epsilon}")
        if self.kind is QueryKind.RW and self.walk_length < 0:
            raise ValueError("walk_length must be >= 0")


@dataclass
class QueryState:
    """Per-query labels and work counters, owned by one worker at a time."""

    query_id: int
    params: QueryParams
    source: int
    labels: np.ndarray | None = None  # SSSP/BFS distances-levels
    p: np.ndarray | None = None  # PPR settled mass
    r: np.ndarray | None = None  # PPR residual mass
    walk: list[int] = field(default_factory=list)  # RW visited sequence
    walk_remaining: int = 0
    edges_processed: int = 0
    done: bool = False

    @property
    def kind(self) -> QueryKind:
        return self.params.kind


def make_query_state(query_id: int, params: QueryParams, source: int,
                     vertex_count: int) -> QueryState:
    state = QueryState(query_id, params, source)
    if params.kind in (QueryKind.SSSP, QueryKind.BFS):
        state.labels = np.full(vertex_count, np.inf)
    elif params.kind is QueryKind.PPR:
        state.p = np.zeros(vertex_count)
        state.r = np.zeros(vertex_count)
    else:
        state.walk = [source]
        state.walk_remaining = params.walk_length
    return state


@dataclass
class ComputeOutcome:
    """Result of one query's run inside one partition pass."""

    remote_verts: np.ndarray
    remote_vals: np.ndarray
    remote_parts: np.ndarray
    residual_verts: np.ndarray
    residual_vals: np.ndarray
    edges_processed: int
    ops_executed: int
    ops_stale: int
    yielded: bool


# ---------------------------------------------------------------------------
# sequential whole-graph oracles

def sssp_oracle(graph: Graph, source: int) -> tuple[np.ndarray, int]:
    """Exact Dijkstra distances plus the edge-relaxation count."""
    if not 0 <= source < graph.vertex_count:
        raise ValueError(f"source {source} out of range")
    if graph.weights is None:
        raise ValueError("sssp_oracle requires a weighted graph")
    dist, edges = _kernels.dijkstra(graph.edge_offsets, graph.adjacency,
                                    graph.weights, source, graph.vertex_count)
    return dist, int(edges)


def bfs_oracle(graph: Graph, source: int) -> tuple[np.ndarray, int]:
    """BFS levels (float, +inf unreachable) plus the edge-scan count."""
    if not 0 <= source < graph.vertex_count:
        raise ValueError(f"source {source} out of range")
    level, edges = _kernels.bfs_levels(graph.edge_offsets, graph.adjacency,
                                       source, graph.vertex_count)
    return level, int(edges)


def ppr_oracle(graph: Graph, source: int, alpha: float,
               epsilon: float) -> tuple[np.ndarray, np.ndarray, int]:
    """ACL push until every residual drops below epsilon * degree."""
    if not 0.0 < alpha < 1.0 or epsilon <= 0.0:
        raise ValueError("alpha must be in (0,1) and epsilon > 0")
    if not 0 <= source < graph.vertex_count:
        raise ValueError(f"source {source} out of range")
    p, r, edges = _kernels.ppr_push(graph.edge_offsets, graph.adjacency,
                                    graph.out_degrees().astype(np.int64),
                                    source, alpha, epsilon, graph.vertex_count)
    return p, r, int(edges)


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
    return x ^ (x >> 31)


def walk_choice(rng_seed: int, step_index: int, degree: int) -> int:
    """Counter-based draw keyed by (seed, step): scheduling-independent."""
    return _splitmix64(_splitmix64(rng_seed & 0xFFFFFFFFFFFFFFFF) ^ step_index) % degree


def rw_oracle(graph: Graph, source: int, walk_length: int,
              rng_seed: int) -> list[int]:
    """Deterministic random walk; stops early at a sink vertex."""
    if walk_length < 0:
        raise ValueError("walk_length must be >= 0")
    walk = [source]
    cur = source
    for step in range(walk_length):
        deg = graph.out_degree(cur)
        if deg == 0:
            break
        cur = int(graph.adjacency[graph.edge_offsets[cur]
                                  + walk_choice(rng_seed, step, deg)])
        walk.append(cur)
    return walk


# ---------------------------------------------------------------------------
# in-partition execution

def seed_operation(params: QueryParams, query_id: int, source: int) -> Operation:
    if params.kind in (QueryKind.SSSP, QueryKind.BFS):
        return Operation(query_id, source, 0.0)
    if params.kind is QueryKind.PPR:
        return Operation(query_id, source, 1.0)
    return Operation(query_id, source, float(params.walk_length))


def _rw_in_partition(state: QueryState, partition: Partition,
                     verts: np.ndarray, vals: np.ndarray) -> ComputeOutcome:
    # a walk has at most one live operation; yielding is ignored (O(1) per
    # step). Steps follow the full-graph adjacency order so the walk is
    # identical under every partition plan and equals the oracle's.
    g = partition.source_graph
    part_of = partition.part_of
    rem_v: list[int] = []
    rem_val: list[float] = []
    rem_p: list[int] = []
    edges = 0
    ops_exec = 0
    seed = state.params.rng_seed
    for v, remaining in zip(verts, vals):
        cur = int(v)
        remaining = int(remaining)
        ops_exec += 1
        while remaining > 0:
            deg = g.out_degree(cur)
            if deg == 0:
                remaining = 0
                break
            step = state.params.walk_length - remaining
            nxt = int(g.adjacency[int(g.edge_offsets[cur])
                                  + walk_choice(seed, step, deg)])
            edges += 1
            remaining -= 1
            state.walk.append(nxt)
            state.walk_remaining = remaining
            if remaining > 0 and part_of[nxt] != partition.id:
                rem_v.append(nxt)
                rem_val.append(float(remaining))
                rem_p.append(int(part_of[nxt]))
                break
            cur = nxt
        if remaining == 0:
            state.walk_remaining = 0
            state.done = True
    empty_i = np.empty(0, dtype=np.int64)
    empty_f = np.empty(0, dtype=np.float64)
    return ComputeOutcome(
        np.asarray(rem_v, dtype=np.int64) if rem_v else empty_i,
        np.asarray(rem_val, dtype=np.float64) if rem_val else empty_f,
        np.asarray(rem_p, dtype=np.int64) if rem_p else empty_i,
        empty_i, empty_f, edges, ops_exec, 0, False)


def compute_in_partition(state: QueryState, partition: Partition,
                         verts: np.ndarray, vals: np.ndarray,
                         yield_check) -> ComputeOutcome:
    """Run the query's sequential kernel seeded from a consolidated run.

    verts/vals must be in the query kind's priority order (SSSP/BFS
    ascending value, PPR descending residual) and local to the partition.
    yield_check carries (mode, edge_budget, value_limit); see
    scheduler.make_yield_check.
    """
    kind = state.kind
    if kind is QueryKind.RW:
        return _rw_in_partition(state, partition, verts, vals)

    seed_loc = partition.global_to_local(verts).astype(np.int64)
    mode = yield_check.mode
    budget = yield_check.edge_budget
    limit = yield_check.value_limit

    if kind in (QueryKind.SSSP, QueryKind.BFS):
        unit = kind is QueryKind.BFS or partition.local_weights is None
        loc_w = partition.local_weights
        cut_w = partition.cut_weights
        if loc_w is None:
            loc_w = np.empty(0, dtype=np.float64)
            cut_w = np.empty(0, dtype=np.float64)
        (edges, ops_exec, ops_stale, yielded,
         rem_v, rem_val, rem_p, n_rem,
         res_v, res_val, n_res) = _kernels.sssp_pass(
            partition.local_offsets, partition.local_adjacency, loc_w, unit,
            partition.cut_offsets, partition.cut_targets, cut_w,
            partition.cut_target_parts,
            partition.local_vertices, state.labels,
            seed_loc, np.ascontiguousarray(vals, dtype=np.float64),
            mode, budget, limit)
    else:
        (edges, ops_exec, yielded,
         rem_v, rem_val, rem_p, n_rem,
         res_v, res_val, n_res) = _kernels.ppr_pass(
            partition.local_offsets, partition.local_adjacency,
            partition.cut_offsets, partition.cut_targets,
            partition.cut_target_parts,
            partition.local_vertices, partition.global_degrees.astype(np.int64),
            state.p, state.r,
            seed_loc, np.ascontiguousarray(vals, dtype=np.float64),
            state.params.alpha, state.params.epsilon,
            mode, budget, limit)
        ops_stale = 0

    state.edges_processed += int(edges)
    return ComputeOutcome(
        rem_v[:n_rem].copy(), rem_val[:n_rem].copy(), rem_p[:n_rem].copy(),
        res_v[:n_res].copy(), res_val[:n_res].copy(),
        int(edges), int(ops_exec), int(ops_stale), bool(yielded))
