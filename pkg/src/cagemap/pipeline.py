"""End-to-end construction of the slice graph for one scene."""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .connectivity import (ConnectivityGraph, build_graph, locate, query_caged, query_path,
                           worker_count)
from .geom import Configuration, DiskUnion, RigidObject
from .slicing import EpsilonCore, So2Partition, build_slice, epsilon_core, partition_so2


@dataclass(frozen=True, eq=False)
class FreeSpaceMap:
    obstacles: DiskUnion | None
    obj: RigidObject
    epsilon: float
    delta: float
    core: EpsilonCore
    partition: So2Partition
    graph: ConnectivityGraph
    timings: dict = field(default_factory=dict, compare=False)

    @property
    def slices(self):
        return self.graph.slices

    def locate(self, c: Configuration):
        return locate(c, self.slices, self.partition)

    def query_path(self, c1: Configuration, c2: Configuration):
        return query_path(c1, c2, self.graph)

    def query_caged(self, c: Configuration):
        return query_caged(c, self.graph)

    def rebuild(self, slices, threads: int = 1, delta: float | None = None) -> "FreeSpaceMap":
        t0 = time.perf_counter()
        graph = build_graph(slices, self.partition, threads)
        timings = {"slices": 0.0, "edges": time.perf_counter() - t0}
        return FreeSpaceMap(self.obstacles, self.obj, self.epsilon,
                            self.delta if delta is None else delta,
                            self.core, self.partition, graph, timings)


def build_slices(obstacles, core, partition, delta=0.0, threads=1):
    def one(i):
        return build_slice(obstacles, core, i, partition, delta)

    idx = range(partition.slices)
    workers = worker_count(threads)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, idx))
    return [one(i) for i in idx]


def build_map(obstacles: DiskUnion | None, obj: RigidObject, epsilon: float, delta: float = 0.0,
              threads: int = 1, safety: float = 0.999,
              partition: So2Partition | None = None) -> FreeSpaceMap:
    """Slice, decompose and connect the free space of ``obj`` among ``obstacles``.

    ``delta`` inflates every object ball, turning path queries into
    delta-clearance queries.  The partition depends on ``epsilon`` only.
    ``obstacles=None`` is an empty workspace.
    """
    t0 = time.perf_counter()
    core = epsilon_core(obj, epsilon)
    if partition is None:
        partition = partition_so2(obj, epsilon, safety)
    slices = build_slices(obstacles, core, partition, delta, threads)
    t1 = time.perf_counter()
    graph = build_graph(slices, partition, threads)
    t2 = time.perf_counter()
    timings = {"slices": t1 - t0, "edges": t2 - t1}
    return FreeSpaceMap(obstacles, obj, float(epsilon), float(delta), core, partition, graph, timings)
