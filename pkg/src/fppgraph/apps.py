"""Applications on top of batched query runs: betweenness centrality,
network community profile, landmark labeling."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .engine import EngineConfig, RunMetrics, make_queries, run_fpp
from .graph import Graph, build_partitions, partition_random
from .kernels import QueryKind, QueryParams, QueryState


# ---------------------------------------------------------------------------
# shared plumbing

def _prepare(graph: Graph, config: EngineConfig, partition_count: int,
             seed: int):
    k = max(1, partition_count)
    plan = partition_random(graph, k, seed)
    return build_partitions(graph, plan)


def _run_batch(graph: Graph, params: list[QueryParams], sources: list[int],
               config: EngineConfig,
               partition_count: int, seed: int) -> tuple[list[QueryState], RunMetrics]:
    partitions = _prepare(graph, config, partition_count, seed)
    queries = make_queries(params, sources, graph.vertex_count)
    return run_fpp(graph, partitions, None, queries, config)


# ---------------------------------------------------------------------------
# betweenness centrality

@dataclass
class BcResult:
    centrality: np.ndarray
    sample_sources: list[int]
    metrics: RunMetrics | None = None

    def to_json_dict(self) -> dict:
        return {
            "sample_sources": [int(s) for s in self.sample_sources],
            "centrality": [float(c) for c in self.centrality],
        }

    def to_csv_rows(self):
        yield ("vertex", "centrality")
        for v, c in enumerate(self.centrality):
            yield (v, repr(float(c)))


def brandes_dependency(graph: Graph, source: int,
                       dist: np.ndarray) -> np.ndarray:
    """Dependency scores of one source given its final distance labels.

    Shortest-path counts sigma are recomputed by scanning vertices in
    non-decreasing label order; positive weights (or unit BFS levels) make
    distances strictly increase along shortest paths, so the order is a
    valid topological order of the shortest-path DAG.
    """
    n = graph.vertex_count
    finite = np.flatnonzero(np.isfinite(dist))
    order = finite[np.argsort(dist[finite], kind="stable")]
    sigma = np.zeros(n)
    sigma[source] = 1.0
    w = graph.weights
    for u in order:
        du = dist[u]
        su = sigma[u]
        for e in range(graph.edge_offsets[u], graph.edge_offsets[u + 1]):
            v = graph.adjacency[e]
            step = w[e] if w is not None else 1.0
            if du + step == dist[v]:
                sigma[v] += su
    delta = np.zeros(n)
    for u in order[::-1]:
        du = dist[u]
        acc = 0.0
        for e in range(graph.edge_offsets[u], graph.edge_offsets[u + 1]):
            v = graph.adjacency[e]
            step = w[e] if w is not None else 1.0
            if du + step == dist[v] and sigma[v] > 0:
                acc += sigma[u] / sigma[v] * (1.0 + delta[v])
        delta[u] = acc
    delta[source] = 0.0
    return delta


def run_bc(graph: Graph, sample_count: int, seed: int,
           config: EngineConfig | None = None,
           partition_count: int = 4) -> BcResult:
    """Approximate betweenness from a random sample of sources."""
    if not 1 <= sample_count <= graph.vertex_count:
        raise ValueError(f"sample_count must be in [1, {graph.vertex_count}]")
    config = config or EngineConfig()
    rng = np.random.default_rng(seed)
    sources = sorted(int(v) for v in
                     rng.choice(graph.vertex_count, sample_count, replace=False))
    kind = QueryKind.SSSP if graph.weighted else QueryKind.BFS
    states, metrics = _run_batch(graph, [QueryParams(kind)] * sample_count,
                                 sources, config, partition_count, seed)
    centrality = np.zeros(graph.vertex_count)
    for st in states:
        centrality += brandes_dependency(graph, st.source, st.labels)
    return BcResult(centrality, sources, metrics)


# ---------------------------------------------------------------------------
# network community profile

@dataclass
class NcpCluster:
    seed_vertex: int
    members: np.ndarray
    conductance: float

    @property
    def size(self) -> int:
        return len(self.members)


@dataclass
class NcpResult:
    clusters: list[NcpCluster]
    curve: dict[int, float]  # size -> min conductance over all sweeps
    metrics: RunMetrics | None = None

    def to_json_dict(self) -> dict:
        return {
            "clusters": [
                {"seed": int(c.seed_vertex), "size": c.size,
                 "conductance": float(c.conductance),
                 "members": [int(v) for v in c.members]}
                for c in self.clusters
            ],
            "curve": {str(k): float(v) for k, v in sorted(self.curve.items())},
        }

    def to_csv_rows(self):
        yield ("size", "min_conductance")
        for size in sorted(self.curve):
            yield (size, repr(float(self.curve[size])))


def conductance(graph: Graph, members) -> float:
    """cut(S) / min(vol(S), vol(V \\ S)) on an undirected graph."""
    in_set = np.zeros(graph.vertex_count, dtype=bool)
    in_set[np.asarray(members, dtype=np.int64)] = True
    degs = graph.out_degrees()
    total_vol = int(degs.sum())
    vol = int(degs[in_set].sum())
    cut = 0
    for u in np.flatnonzero(in_set):
        for v in graph.neighbors(u):
            if not in_set[v]:
                cut += 1
    denom = min(vol, total_vol - vol)
    if denom == 0:
        return 0.0 if cut == 0 else 1.0
    return cut / denom


def sweep_cut(graph: Graph, p: np.ndarray) -> tuple[np.ndarray, float, dict[int, float]]:
    """Best-conductance prefix of vertices ordered by p(v)/deg(v).

    Returns (member array, conductance, size -> conductance for every
    prefix evaluated). Ties in the ordering break toward the smaller
    vertex id.
    """
    degs = graph.out_degrees()
    support = np.flatnonzero(p > 0)
    if len(support) == 0:
        return np.empty(0, dtype=np.int64), 1.0, {}
    score = p[support] / np.maximum(degs[support], 1)
    order = support[np.lexsort((support, -score))]
    total_vol = int(degs.sum())
    in_set = np.zeros(graph.vertex_count, dtype=bool)
    vol = 0
    cut = 0
    profile: dict[int, float] = {}
    best_phi = math.inf
    best_size = 0
    for i, v in enumerate(order):
        in_set[v] = True
        vol += int(degs[v])
        nbrs = graph.neighbors(v)
        internal = int(np.count_nonzero(in_set[nbrs]))
        # a self-loop copy adds 1 to degree and is never cut, but shows up
        # in `internal` once; plain edges into the set cancel 2 per edge
        loops = int(np.count_nonzero(nbrs == v))
        cut += int(degs[v]) - 2 * internal + loops
        denom = min(vol, total_vol - vol)
        if denom == 0:
            phi = 0.0 if cut == 0 else 1.0
        else:
            phi = cut / denom
        profile[i + 1] = phi
        if phi < best_phi:
            best_phi = phi
            best_size = i + 1
    return order[:best_size].copy(), best_phi, profile


def run_ncp(graph: Graph, seed_fraction: float, alpha: float, epsilon: float,
            seed: int, config: EngineConfig | None = None,
            partition_count: int = 4) -> NcpResult:
    """Network community profile via PPR sweep cuts from random seeds."""
    if not 0 < seed_fraction <= 1:
        raise ValueError("seed_fraction must be in (0, 1]")
    if graph.directed:
        warnings.warn("NCP treats the graph as undirected; symmetrizing")
        from .graph import make_undirected
        graph = make_undirected(graph)
    config = config or EngineConfig()
    count = max(1, math.ceil(seed_fraction * graph.vertex_count))
    rng = np.random.default_rng(seed)
    seeds = sorted(int(v) for v in
                   rng.choice(graph.vertex_count, count, replace=False))
    params = [QueryParams(QueryKind.PPR, alpha=alpha, epsilon=epsilon)] * count
    states, metrics = _run_batch(graph, params, seeds, config,
                                 partition_count, seed)
    clusters = []
    curve: dict[int, float] = {}
    for st in states:
        members, phi, profile = sweep_cut(graph, st.p)
        clusters.append(NcpCluster(st.source, members, phi))
        for size, value in profile.items():
            if value < curve.get(size, math.inf):
                curve[size] = value
    return NcpResult(clusters, curve, metrics)


# ---------------------------------------------------------------------------
# landmark labeling

@dataclass
class LandmarkLabels:
    landmarks: list[int]
    dist: np.ndarray  # landmark x vertex
    metrics: RunMetrics | None = None

    def to_json_dict(self) -> dict:
        return {
            "landmarks": [int(v) for v in self.landmarks],
            "dist": [[(None if not np.isfinite(d) else float(d)) for d in row]
                     for row in self.dist],
        }

    def to_csv_rows(self):
        yield ("landmark", "vertex", "distance")
        for i, l in enumerate(self.landmarks):
            for v in range(self.dist.shape[1]):
                yield (l, v, repr(float(self.dist[i, v])))


def run_ll(graph: Graph, landmark_count: int, seed: int,
           config: EngineConfig | None = None,
           partition_count: int = 4,
           unit_weight_fallback: bool = False) -> LandmarkLabels:
    """Distance rows from uniformly sampled landmarks."""
    if not 1 <= landmark_count <= graph.vertex_count:
        raise ValueError(f"landmark_count must be in [1, {graph.vertex_count}]")
    if not graph.weighted and not unit_weight_fallback:
        raise ValueError("landmark labeling needs a weighted graph "
                         "(pass unit_weight_fallback=True to use hop counts)")
    config = config or EngineConfig()
    rng = np.random.default_rng(seed)
    landmarks = sorted(int(v) for v in
                       rng.choice(graph.vertex_count, landmark_count,
                                  replace=False))
    kind = QueryKind.SSSP if graph.weighted else QueryKind.BFS
    states, metrics = _run_batch(graph, [QueryParams(kind)] * landmark_count,
                                 landmarks, config, partition_count, seed)
    dist = np.vstack([st.labels for st in states])
    return LandmarkLabels(landmarks, dist, metrics)


def ll_query_distance(labels: LandmarkLabels, u: int, v: int) -> float:
    """Triangle-inequality upper bound min_l d(l,u) + d(l,v)."""
    n = labels.dist.shape[1]
    if not (0 <= u < n and 0 <= v < n):
        raise ValueError("vertex out of range")
    return float(np.min(labels.dist[:, u] + labels.dist[:, v]))
