"""Cache-friendly batch execution of independent graph queries.

Graphs are partitioned to a cache budget; queries append operations to
per-partition buffers that are consolidated and executed in batches, with
priority-based partition scheduling and yielding heuristics.
"""

from .buffers import Operation, PartitionBuffer, consolidate_buffer, init_buffers
from .engine import (EngineConfig, EngineError, RunMetrics, compute_work_ratio,
                     make_queries, run_fpp)
from .graph import (Graph, GraphFormatError, Partition, PartitionPlan,
                    build_partitions, from_edges, load_edge_list,
                    load_snapshot, make_undirected, partition_contiguous,
                    partition_count_for_budget, partition_import,
                    partition_random, save_snapshot)
from .kernels import (QueryKind, QueryParams, QueryState, bfs_oracle,
                      ppr_oracle, rw_oracle, sssp_oracle)
from .scheduler import Functor, SchedulerQueue, YieldPolicy

__version__ = "0.1.0"

__all__ = [
    "EngineConfig", "EngineError", "Functor", "Graph", "GraphFormatError",
    "Operation", "Partition", "PartitionBuffer", "PartitionPlan",
    "QueryKind", "QueryParams", "QueryState", "RunMetrics", "SchedulerQueue",
    "YieldPolicy", "bfs_oracle", "build_partitions", "compute_work_ratio",
    "consolidate_buffer", "from_edges", "init_buffers", "load_edge_list",
    "load_snapshot", "make_queries", "make_undirected",
    "partition_contiguous", "partition_count_for_budget", "partition_import",
    "partition_random",
    "ppr_oracle", "run_fpp", "rw_oracle", "save_snapshot", "sssp_oracle",
]
