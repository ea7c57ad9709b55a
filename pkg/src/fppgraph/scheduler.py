"""Partition scheduling policies and yield predicates."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _kernels
from .kernels import QueryKind


class Functor(Enum):
    """Partition priority policies."""

    RANDOM = "random"
    FIFO = "fifo"
    MAX_OPERATIONS = "max-ops"
    BEST = "priority"


@dataclass(frozen=True)
class YieldPolicy:
    """none | edges:<multiplier> | band:<delta>."""

    mode: int = _kernels.YIELD_NONE
    multiplier: float = 0.0  # EdgeBudget: budget = ceil(mult * |E_P| / |Q|)
    delta: float = 0.0  # ValueBand width (SSSP/BFS) or residual ratio (PPR)

    @staticmethod
    def none() -> "YieldPolicy":
        return YieldPolicy(_kernels.YIELD_NONE)

    @staticmethod
    def edge_budget(multiplier: float) -> "YieldPolicy":
        if multiplier <= 0:
            raise ValueError("multiplier must be > 0")
        return YieldPolicy(_kernels.YIELD_EDGE_BUDGET, multiplier=multiplier)

    @staticmethod
    def value_band(delta: float) -> "YieldPolicy":
        if delta <= 0:
            raise ValueError("delta must be > 0")
        return YieldPolicy(_kernels.YIELD_VALUE_BAND, delta=delta)

    @staticmethod
    def parse(spec: str) -> "YieldPolicy":
        if spec == "none":
            return YieldPolicy.none()
        if spec.startswith("edges:"):
            return YieldPolicy.edge_budget(float(spec.split(":", 1)[1]))
        if spec.startswith("band:"):
            return YieldPolicy.value_band(float(spec.split(":", 1)[1]))
        raise ValueError(f"unknown yield policy: {spec!r}")

    def describe(self) -> str:
        if self.mode == _kernels.YIELD_NONE:
            return "none"
        if self.mode == _kernels.YIELD_EDGE_BUDGET:
            return f"edges:{self.multiplier:g}"
        return f"band:{self.delta:g}"


@dataclass
class YieldCheck:
    """Concrete yield predicate for one (query, partition pass)."""

    mode: int
    edge_budget: int
    value_limit: float

    def __call__(self, edges_done: int, next_value: float) -> bool:
        if self.mode == _kernels.YIELD_EDGE_BUDGET:
            return edges_done >= self.edge_budget
        if self.mode == _kernels.YIELD_VALUE_BAND:
            return next_value >= self.value_limit
        return False


def make_yield_check(policy: YieldPolicy, partition, query_count: int,
                     first_value: float, kind: QueryKind) -> YieldCheck:
    """Instantiate the pass predicate.

    EdgeBudget fires at ceil(multiplier * |E_P| / query_count) edges
    (minimum 1). ValueBand fires for SSSP/BFS when the next value leaves
    [first_value, first_value + delta); for PPR when the next residual
    drops below first_value / delta (delta > 1 meaningful).
    """
    if query_count < 1:
        raise ValueError("query_count must be >= 1")
    if policy.mode == _kernels.YIELD_EDGE_BUDGET:
        budget = max(1, math.ceil(policy.multiplier * partition.edge_count
                                  / query_count))
        return YieldCheck(policy.mode, budget, 0.0)
    if policy.mode == _kernels.YIELD_VALUE_BAND:
        if kind is QueryKind.PPR:
            return YieldCheck(policy.mode, 0, first_value / policy.delta)
        return YieldCheck(policy.mode, 0, first_value + policy.delta)
    return YieldCheck(_kernels.YIELD_NONE, 0, 0.0)


def partition_priority(verts_or_count, vals, functor: Functor,
                       kind: QueryKind, arrival: int = 0,
                       rng_draw: float = 0.0) -> float:
    """Priority value of a partition from its buffered operations.

    Smaller is better everywhere (inversions applied internally).
    """
    if functor is Functor.FIFO:
        return float(arrival)
    if functor is Functor.RANDOM:
        return rng_draw
    if functor is Functor.MAX_OPERATIONS:
        n = verts_or_count if isinstance(verts_or_count, int) else len(verts_or_count)
        if n == 0:
            raise ValueError("empty buffer has no max-ops priority")
        return -float(n)
    if vals is None or len(vals) == 0:
        raise ValueError("empty buffer has no value priority")
    if kind is QueryKind.PPR:
        return -float(np.max(vals))
    return float(np.min(vals))


class SchedulerQueue:
    """Lazy-deletion priority queue over partitions.

    Entries are (priority, partition id); superseded entries are skipped on
    pop. The engine notifies the queue on every append and drain.
    """

    def __init__(self, partition_count: int, functor: Functor,
                 kind: QueryKind, seed: int = 0):
        self.functor = functor
        self.kind = kind
        self._heap: list[tuple[float, int]] = []
        self._current = np.full(partition_count, np.inf)
        self._counts = np.zeros(partition_count, dtype=np.int64)
        self._arrival = 0
        self._rng = np.random.default_rng(seed)

    def _entry_priority(self, pid: int, vals) -> float:
        f = self.functor
        if f is Functor.FIFO:
            self._arrival += 1
            return float(self._arrival)
        if f is Functor.RANDOM:
            return float(self._rng.random())
        if f is Functor.MAX_OPERATIONS:
            return -float(self._counts[pid])
        if self.kind is QueryKind.PPR:
            return -float(np.max(vals))
        return float(np.min(vals))

    def notify_append(self, pid: int, vals, count: int) -> None:
        """Record freshly appended operations for one partition."""
        if count == 0:
            return
        was_empty = self._counts[pid] == 0
        self._counts[pid] += count
        prio = self._entry_priority(pid, vals)
        if self.functor in (Functor.FIFO, Functor.RANDOM):
            if was_empty:
                self._current[pid] = prio
                heapq.heappush(self._heap, (prio, pid))
            return
        if prio < self._current[pid] or was_empty:
            self._current[pid] = prio if was_empty else min(prio, self._current[pid])
            heapq.heappush(self._heap, (self._current[pid], pid))

    def notify_drained(self, pid: int) -> None:
        self._counts[pid] = 0
        self._current[pid] = np.inf

    def schedule_next(self) -> int | None:
        """Best live partition, ties by partition id; None when exhausted."""
        while self._heap:
            prio, pid = heapq.heappop(self._heap)
            if self._counts[pid] == 0:
                continue
            if prio != self._current[pid]:
                continue  # stale entry
            return pid
        return None

    def pending_ops(self) -> int:
        return int(self._counts.sum())
