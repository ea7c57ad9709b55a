"""Hot numeric loops: whole-graph oracles and in-partition passes.

Everything here is written in nopython-compatible numpy so the same source
runs jitted (default) or interpreted. Set FPP_DISABLE_NUMBA=1 to force the
pure-numpy path; the two paths are bit-identical by construction.
"""

from __future__ import annotations

import os

import numpy as np

NUMBA_ENABLED = os.environ.get("FPP_DISABLE_NUMBA", "0") not in ("1", "true", "yes")

if NUMBA_ENABLED:
    try:
        from numba import njit as _njit

        def njit(fn):
            return _njit(cache=True, nogil=True)(fn)
    except ImportError:  # pragma: no cover
        NUMBA_ENABLED = False

if not NUMBA_ENABLED:
    def njit(fn):
        return fn

INF = np.inf

# Yield modes shared with scheduler.YieldPolicy
YIELD_NONE = 0
YIELD_EDGE_BUDGET = 1
YIELD_VALUE_BAND = 2


# ---------------------------------------------------------------------------
# binary heap keyed by (value, vertex): canonical tie-breaking by vertex id

@njit
def _heap_push(keys, verts, n, key, vert):
    if n == len(keys):
        nk = np.empty(2 * len(keys), dtype=keys.dtype)
        nv = np.empty(2 * len(verts), dtype=verts.dtype)
        nk[:n] = keys
        nv[:n] = verts
        keys, verts = nk, nv
    i = n
    keys[i] = key
    verts[i] = vert
    while i > 0:
        parent = (i - 1) // 2
        if (keys[parent] > keys[i]) or (keys[parent] == keys[i]
                                        and verts[parent] > verts[i]):
            keys[parent], keys[i] = keys[i], keys[parent]
            verts[parent], verts[i] = verts[i], verts[parent]
            i = parent
        else:
            break
    return keys, verts, n + 1


@njit
def _heap_pop(keys, verts, n):
    key = keys[0]
    vert = verts[0]
    n -= 1
    keys[0] = keys[n]
    verts[0] = verts[n]
    i = 0
    while True:
        l = 2 * i + 1
        r = l + 1
        best = i
        if l < n and ((keys[l] < keys[best]) or (keys[l] == keys[best]
                                                 and verts[l] < verts[best])):
            best = l
        if r < n and ((keys[r] < keys[best]) or (keys[r] == keys[best]
                                                 and verts[r] < verts[best])):
            best = r
        if best == i:
            break
        keys[best], keys[i] = keys[i], keys[best]
        verts[best], verts[i] = verts[i], verts[best]
        i = best
    return key, vert, n


@njit
def _grow_ops(verts, vals, parts, n):
    nv = np.empty(2 * len(verts), dtype=verts.dtype)
    nl = np.empty(2 * len(vals), dtype=vals.dtype)
    np_ = np.empty(2 * len(parts), dtype=parts.dtype)
    nv[:n] = verts
    nl[:n] = vals
    np_[:n] = parts
    return nv, nl, np_


# ---------------------------------------------------------------------------
# whole-graph oracles

@njit
def dijkstra(indptr, adj, weights, source, n):
    """Label-setting Dijkstra; returns (dist, edges_relaxed).

    Edge count = out-edges scanned when a vertex is settled, which is the
    sequential work baseline for the engine's work ratio.
    """
    dist = np.full(n, INF)
    dist[source] = 0.0
    keys = np.empty(16, dtype=np.float64)
    verts = np.empty(16, dtype=np.int64)
    hn = 0
    keys, verts, hn = _heap_push(keys, verts, hn, 0.0, source)
    edges = 0
    while hn > 0:
        d, u, hn = _heap_pop(keys, verts, hn)
        if d > dist[u]:
            continue
        for e in range(indptr[u], indptr[u + 1]):
            edges += 1
            v = adj[e]
            cand = d + weights[e]
            if cand < dist[v]:
                dist[v] = cand
                keys, verts, hn = _heap_push(keys, verts, hn, cand, v)
    return dist, edges


@njit
def bfs_levels(indptr, adj, source, n):
    """BFS levels as float64 (+inf unreachable); counts edges scanned."""
    level = np.full(n, INF)
    level[source] = 0.0
    queue = np.empty(n, dtype=np.int64)
    queue[0] = source
    head = 0
    tail = 1
    edges = 0
    while head < tail:
        u = queue[head]
        head += 1
        lv = level[u] + 1.0
        for e in range(indptr[u], indptr[u + 1]):
            edges += 1
            v = adj[e]
            if lv < level[v]:
                level[v] = lv
                queue[tail] = v
                tail += 1
    return level, edges


@njit
def ppr_push(indptr, adj, degrees, source, alpha, epsilon, n):
    """Andersen-Chung-Lang push from a single source.

    Pushes the vertex with the largest residual first (ties to the smaller
    vertex id). Returns (p, r, edges_pushed).
    """
    p = np.zeros(n)
    r = np.zeros(n)
    r[source] = 1.0
    keys = np.empty(16, dtype=np.float64)
    verts = np.empty(16, dtype=np.int64)
    hn = 0
    # max-heap via negated residuals
    keys, verts, hn = _heap_push(keys, verts, hn, -1.0, source)
    edges = 0
    while hn > 0:
        nr, v, hn = _heap_pop(keys, verts, hn)
        rv = -nr
        if rv != r[v]:
            continue  # stale entry; a fresher one exists if still active
        deg = degrees[v]
        if deg > 0 and rv < epsilon * deg:
            continue
        if rv <= 0.0:
            continue
        r[v] = 0.0
        if deg == 0:
            p[v] += rv  # isolated: settle the whole residual
            continue
        p[v] += alpha * rv
        share = (1.0 - alpha) * rv / deg
        for e in range(indptr[v], indptr[v + 1]):
            edges += 1
            u = adj[e]
            r[u] += share
            if degrees[u] == 0 or r[u] >= epsilon * degrees[u]:
                keys, verts, hn = _heap_push(keys, verts, hn, -r[u], u)
    return p, r, edges


# ---------------------------------------------------------------------------
# in-partition passes

@njit
def sssp_pass(loc_off, loc_adj, loc_w, unit_weights,
              cut_off, cut_tgt, cut_w, cut_part,
              local_vertices, labels,
              seed_loc, seed_val,
              yield_mode, edge_budget, value_limit):
    """Run label-correcting Dijkstra over one partition, seeded from a
    consolidated operation run (ascending value order).

    Labels are written at settlement time, never at push time: a yielded
    frontier operation carries a value strictly below the vertex's label
    and so survives the staleness filter when it is re-seeded later.

    Cut edges emit remote operations (filtered against the query's own
    labels) instead of being traversed. Yield checks happen at vertex
    settlement boundaries, so a pass can overshoot an edge budget by at
    most one vertex's remaining out-edges.

    Returns (edges, ops_executed, ops_stale, yielded,
             remote_verts, remote_vals, remote_parts, n_remote,
             resid_verts, resid_vals, n_resid).
    """
    keys = np.empty(16, dtype=np.float64)
    verts = np.empty(16, dtype=np.int64)
    hn = 0
    ops_stale = 0
    for i in range(len(seed_loc)):
        v = seed_loc[i]
        gv = local_vertices[v]
        val = seed_val[i]
        if val < labels[gv]:
            keys, verts, hn = _heap_push(keys, verts, hn, val, v)
        else:
            ops_stale += 1

    rem_v = np.empty(16, dtype=np.int64)
    rem_val = np.empty(16, dtype=np.float64)
    rem_p = np.empty(16, dtype=np.int64)
    n_rem = 0
    edges = 0
    ops_exec = 0
    yielded = 0
    while hn > 0:
        if yield_mode == YIELD_EDGE_BUDGET and edges >= edge_budget:
            yielded = 1
            break
        d, u, hn = _heap_pop(keys, verts, hn)
        gu = local_vertices[u]
        if d >= labels[gu]:
            continue
        if yield_mode == YIELD_VALUE_BAND and ops_exec > 0 and d >= value_limit:
            keys, verts, hn = _heap_push(keys, verts, hn, d, u)
            yielded = 1
            break
        labels[gu] = d
        ops_exec += 1
        for e in range(loc_off[u], loc_off[u + 1]):
            edges += 1
            v = loc_adj[e]
            w = 1.0 if unit_weights else loc_w[e]
            cand = d + w
            gv = local_vertices[v]
            if cand < labels[gv]:
                keys, verts, hn = _heap_push(keys, verts, hn, cand, v)
        for e in range(cut_off[u], cut_off[u + 1]):
            edges += 1
            w = 1.0 if unit_weights else cut_w[e]
            cand = d + w
            tgt = cut_tgt[e]
            if cand < labels[tgt]:
                if n_rem == len(rem_v):
                    rem_v, rem_val, rem_p = _grow_ops(rem_v, rem_val, rem_p, n_rem)
                rem_v[n_rem] = tgt
                rem_val[n_rem] = cand
                rem_p[n_rem] = cut_part[e]
                n_rem += 1

    # package the unprocessed local frontier as residual operations;
    # heap pops in (value, vertex) order so the first entry per vertex
    # is its best pending value
    res_v = np.empty(max(hn, 1), dtype=np.int64)
    res_val = np.empty(max(hn, 1), dtype=np.float64)
    n_res = 0
    seen = np.zeros(len(local_vertices), dtype=np.uint8)
    while hn > 0:
        d, u, hn = _heap_pop(keys, verts, hn)
        gu = local_vertices[u]
        if d >= labels[gu] or seen[u] == 1:
            continue
        seen[u] = 1
        res_v[n_res] = gu
        res_val[n_res] = d
        n_res += 1
    return (edges, ops_exec, ops_stale, yielded,
            rem_v, rem_val, rem_p, n_rem,
            res_v, res_val, n_res)


@njit
def ppr_pass(loc_off, loc_adj,
             cut_off, cut_tgt, cut_part,
             local_vertices, degrees, p, r,
             seed_loc, seed_val,
             alpha, epsilon,
             yield_mode, edge_budget, value_limit):
    """Aggregate residual operations and push within one partition.

    Degrees are whole-graph out-degrees so the push rule is identical under
    any partitioning. A yield packages every still-active local vertex as a
    residual operation carrying its entire remaining mass.

    Returns (edges, ops_executed, yielded,
             remote_verts, remote_vals, remote_parts, n_remote,
             resid_verts, resid_vals, n_resid).
    """
    keys = np.empty(16, dtype=np.float64)
    verts = np.empty(16, dtype=np.int64)
    hn = 0
    for i in range(len(seed_loc)):
        v = seed_loc[i]
        gv = local_vertices[v]
        r[gv] += seed_val[i]
    for i in range(len(seed_loc)):
        v = seed_loc[i]
        gv = local_vertices[v]
        if r[gv] > 0.0 and (degrees[gv] == 0 or r[gv] >= epsilon * degrees[gv]):
            keys, verts, hn = _heap_push(keys, verts, hn, -r[gv], v)

    rem_v = np.empty(16, dtype=np.int64)
    rem_val = np.empty(16, dtype=np.float64)
    rem_p = np.empty(16, dtype=np.int64)
    n_rem = 0
    edges = 0
    ops_exec = 0
    yielded = 0
    while hn > 0:
        if yield_mode == YIELD_EDGE_BUDGET and edges >= edge_budget:
            yielded = 1
            break
        nr, v, hn = _heap_pop(keys, verts, hn)
        rv = -nr
        gv = local_vertices[v]
        if rv != r[gv]:
            continue
        deg = degrees[gv]
        if rv <= 0.0 or (deg > 0 and rv < epsilon * deg):
            continue
        if yield_mode == YIELD_VALUE_BAND and ops_exec > 0 and rv < value_limit:
            keys, verts, hn = _heap_push(keys, verts, hn, nr, v)
            yielded = 1
            break
        ops_exec += 1
        r[gv] = 0.0
        if deg == 0:
            p[gv] += rv
            continue
        p[gv] += alpha * rv
        share = (1.0 - alpha) * rv / deg
        for e in range(loc_off[v], loc_off[v + 1]):
            edges += 1
            u = loc_adj[e]
            gu = local_vertices[u]
            r[gu] += share
            if degrees[gu] == 0 or r[gu] >= epsilon * degrees[gu]:
                keys, verts, hn = _heap_push(keys, verts, hn, -r[gu], u)
        for e in range(cut_off[v], cut_off[v + 1]):
            edges += 1
            if n_rem == len(rem_v):
                rem_v, rem_val, rem_p = _grow_ops(rem_v, rem_val, rem_p, n_rem)
            rem_v[n_rem] = cut_tgt[e]
            rem_val[n_rem] = share
            rem_p[n_rem] = cut_part[e]
            n_rem += 1

    nloc = len(local_vertices)
    res_v = np.empty(nloc, dtype=np.int64)
    res_val = np.empty(nloc, dtype=np.float64)
    n_res = 0
    if yielded == 1:
        for v in range(nloc):
            gv = local_vertices[v]
            if r[gv] > 0.0 and (degrees[gv] == 0 or r[gv] >= epsilon * degrees[gv]):
                res_v[n_res] = gv
                res_val[n_res] = r[gv]
                r[gv] = 0.0
                n_res += 1
    return (edges, ops_exec, yielded,
            rem_v, rem_val, rem_p, n_rem,
            res_v, res_val, n_res)
