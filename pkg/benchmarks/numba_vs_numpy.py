"""Compare the compiled kernels against the pure-numpy fallback.

Both paths run the same workload in subprocesses (the backend is chosen
at import time from FPP_DISABLE_NUMBA), verify bit-identical results,
and report wall time per cell.

Usage: python benchmarks/numba_vs_numpy.py [--grid 64x64] [--queries 64]
"""

import argparse
import json
import os
import subprocess
import sys
import textwrap

WORKLOAD = textwrap.dedent("""
    import hashlib, json, sys, time
    import numpy as np
    from fppgraph.engine import EngineConfig, make_queries, run_fpp
    from fppgraph.graph import build_partitions, partition_contiguous
    from fppgraph.kernels import QueryKind, QueryParams
    from fppgraph.metrics_bench import grid_graph
    from fppgraph.scheduler import Functor, YieldPolicy

    width, height, n_queries = (int(x) for x in sys.argv[1:4])
    graph = grid_graph(width, height, seed=0)
    partitions = build_partitions(graph, partition_contiguous(graph, 8))
    rng = np.random.default_rng(1)
    sources = [int(v) for v in rng.choice(graph.vertex_count, n_queries,
                                          replace=False)]
    cells = {
        "sssp/none": (QueryKind.SSSP, YieldPolicy.none(), {}),
        "sssp/edges2": (QueryKind.SSSP, YieldPolicy.edge_budget(2.0), {}),
        "ppr/none": (QueryKind.PPR, YieldPolicy.none(),
                     dict(alpha=0.15, epsilon=1e-6)),
    }
    out = {}
    for name, (kind, yp, extra) in cells.items():
        queries = make_queries([QueryParams(kind, **extra)] * n_queries,
                               sources, graph.vertex_count)
        cfg = EngineConfig(functor=Functor.BEST, yield_policy=yp)
        t0 = time.perf_counter()
        states, metrics = run_fpp(graph, partitions, None, queries, cfg)
        wall = time.perf_counter() - t0
        h = hashlib.sha256()
        for st in states:
            arr = st.labels if st.labels is not None else st.p
            h.update(arr.tobytes())
        for d in metrics.pass_digests:
            h.update(d.encode())
        out[name] = {"wall_s": round(wall, 4),
                     "edges": metrics.edges_processed,
                     "digest": h.hexdigest()}
    json.dump(out, sys.stdout)
""")


def run_backend(disable_numba: bool, width: int, height: int,
                queries: int) -> dict:
    env = dict(os.environ)
    if disable_numba:
        env["FPP_DISABLE_NUMBA"] = "1"
    else:
        env.pop("FPP_DISABLE_NUMBA", None)
    proc = subprocess.run(
        [sys.executable, "-c", WORKLOAD, str(width), str(height),
         str(queries)],
        env=env, capture_output=True, text=True, check=True)
    return json.loads(proc.stdout)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--grid", default="64x64")
    ap.add_argument("--queries", type=int, default=64)
    args = ap.parse_args()
    width, height = (int(x) for x in args.grid.split("x"))

    print(f"workload: grid {width}x{height}, {args.queries} queries")
    compiled = run_backend(False, width, height, args.queries)
    fallback = run_backend(True, width, height, args.queries)

    mismatch = False
    print(f"{'cell':<14} {'numba':>9} {'numpy':>9} {'speedup':>8}  identical")
    for name in compiled:
        a, b = compiled[name], fallback[name]
        same = a["digest"] == b["digest"] and a["edges"] == b["edges"]
        mismatch |= not same
        speedup = b["wall_s"] / max(a["wall_s"], 1e-9)
        print(f"{name:<14} {a['wall_s']:>8.3f}s {b['wall_s']:>8.3f}s "
              f"{speedup:>7.1f}x  {'yes' if same else 'NO'}")
    if mismatch:
        print("FAIL: backends disagree", file=sys.stderr)
        return 1
    print("backends produce bit-identical labels and pass streams")
    return 0


if __name__ == "__main__":
    sys.exit(main())
