"""Component volumes and narrow-passage widths.

Volumes use the product measure dx dy dtheta.  Passage widths are read off
the alpha filtration of every slice: raising alpha from ``(R + r - eps)**2``
to ``v`` is the same as inflating each object ball by
``delta = sqrt(v) - (R + r - eps)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .connectivity import ConnectivityGraph, QueryResult, Verdict, query_path
from .errors import NoFiniteWidth, PreconditionError
from .geom import Configuration, DiskUnion, RigidObject
from .pipeline import FreeSpaceMap, build_map

INFINITE = math.inf


def component_volume(graph: ConnectivityGraph, component: int) -> float:
    """Volume of a graph component, or ``INFINITE`` if it is unbounded."""
    members = graph.members(component)
    if not members:
        raise ValueError(f"no graph component {component}")
    if any(v.infinite for v in members):
        return INFINITE
    width = graph.partition.width
    return sum(graph.slices[v.slice].component_area(v.component) for v in members) * width


@dataclass(frozen=True)
class VolumeEntry:
    component: int
    volume: float
    vertices: int

    @property
    def infinite(self) -> bool:
        return math.isinf(self.volume)

    def to_json(self):
        return {"component": self.component,
                "volume": "infinite" if self.infinite else self.volume,
                "vertices": self.vertices}


def volume_report(graph: ConnectivityGraph) -> list[VolumeEntry]:
    labels = np.asarray(graph.labels)
    areas = np.zeros(len(labels))
    for i, sl in enumerate(graph.slices):
        base = graph.offsets[i]
        areas[base] = INFINITE
        for k in range(1, sl.n_components):
            areas[base + k] = sl.component_area(k)
    out = []
    for comp in range(graph.n_components):
        sel = labels == comp
        total = float(areas[sel].sum())
        vol = INFINITE if math.isinf(total) else total * graph.partition.width
        out.append(VolumeEntry(comp, vol, int(sel.sum())))
    return out


def delta_connected(c1: Configuration, c2: Configuration, delta: float,
                    obstacles: DiskUnion, obj: RigidObject, epsilon: float,
                    threads: int = 1, partition=None) -> QueryResult:
    """Path query for the object with every ball grown by ``delta``.

    A disconnected verdict proves there is no path keeping clearance
    ``delta`` from the obstacles.
    """
    if delta < 0:
        raise ValueError("delta must be non-negative")
    fsm = build_map(obstacles, obj, epsilon, delta=delta, threads=threads, partition=partition)
    return fsm.query_path(c1, c2)


@dataclass(frozen=True)
class PassageReport:
    components: tuple
    delta: float
    alpha: float
    previous_delta: float
    reason: str
    rebuilds: int

    def to_json(self):
        return {"components": list(self.components), "delta": self.delta,
                "alpha": self.alpha, "previous_delta": self.previous_delta,
                "reason": self.reason, "rebuilds": self.rebuilds}


def _candidate_alphas(fsm: FreeSpaceMap):
    base = fsm.slices[0].alpha
    vals = [sl.filtration.critical_values() for sl in fsm.slices if sl.filtration is not None]
    if not vals:
        return np.empty(0)
    allv = np.unique(np.concatenate(vals))
    return allv[allv > base]


def passage_width(c1: Configuration, c2: Configuration, fsm: FreeSpaceMap,
                  threads: int = 1) -> PassageReport:
    """Smallest inflation beyond which ``c1`` and ``c2`` are disconnected in
    the approximation.

    The decomposition only changes at filtration values, so one probe per
    open interval between consecutive values suffices; the interval's
    lower end is reported.  Probing the values themselves would miss
    thresholds where disks are exactly tangent, which still lets the
    object through.  Connectivity is monotone in alpha, so the first
    disconnected interval is found by bisection.
    """
    start = fsm.query_path(c1, c2)
    if start.verdict is not Verdict.POSSIBLY_CONNECTED:
        raise PreconditionError(
            f"configurations must be possibly connected at delta=0, got {start.verdict.value}")
    base = fsm.slices[0].alpha
    if base <= 0:
        raise NoFiniteWidth("empty workspace: nothing can separate the configurations")
    rho0 = math.sqrt(base)
    ends = np.concatenate([[base], _candidate_alphas(fsm)])
    # probe k lies strictly inside (ends[k], ends[k + 1]); the last is past the end
    probes = np.append(0.5 * (ends[:-1] + ends[1:]), 2.0 * ends[-1] + 1.0)
    rebuilds = 0
    cache = {}

    def verdict_at(k):
        nonlocal rebuilds
        if k not in cache:
            rebuilds += 1
            slices = [sl.with_alpha(float(probes[k])) for sl in fsm.slices]
            graph = fsm.rebuild(slices, threads).graph
            cache[k] = query_path(c1, c2, graph)
        return cache[k]

    last = len(probes) - 1
    if verdict_at(last).verdict is Verdict.POSSIBLY_CONNECTED:
        raise NoFiniteWidth("configurations stay connected at every filtration value")
    lo, hi = -1, last
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if verdict_at(mid).verdict is Verdict.POSSIBLY_CONNECTED:
            lo = mid
        else:
            hi = mid
    alpha = float(ends[hi])
    prev = 0.0 if hi == 0 else math.sqrt(float(ends[hi - 1])) - rho0
    reason = "endpoint_clearance" if verdict_at(hi).verdict is Verdict.IN_COLLISION else "passage"
    return PassageReport(start.components, math.sqrt(alpha) - rho0, alpha, prev, reason, rebuilds)
