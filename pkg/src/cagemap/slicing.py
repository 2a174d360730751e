"""Orientation slicing: epsilon-cores, the SO(2) partition, and per-slice
free-space decomposition.

A slice fixes the object's orientation to an interval ``[phi_i, phi_i+1]``.
Its collision region is approximated by the collision region of the
object's epsilon-core held at ``phi_i``: a union of disks of radius
``R + r - eps`` that is contained in the true collision region for every
orientation of the interval.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInput, EpsilonTooLarge, InputError
from .geom import TOL, TWO_PI, DiskUnion, RigidObject, rotation
from .triangulation import (
    AlphaComplex,
    DelaunayTriangulation,
    ExteriorDecomposition,
    Filtration,
    alpha_complex,
    build_delaunay,
    compute_filtration,
    exterior_components,
    merge_sites,
)


@dataclass(frozen=True, eq=False)
class EpsilonCore:
    """Object balls shrunk by ``epsilon`` about unchanged offsets."""

    epsilon: float
    offsets: np.ndarray
    radius: float

    def disks(self) -> DiskUnion:
        return DiskUnion(self.offsets, self.radius)


def epsilon_core(obj: RigidObject, epsilon: float) -> EpsilonCore:
    r = obj.radius
    if not (epsilon > 0):
        raise InputError(f"epsilon must be positive, got {epsilon}")
    if epsilon >= r:
        raise EpsilonTooLarge(f"epsilon={epsilon} must be smaller than the object ball radius {r}")
    return EpsilonCore(float(epsilon), obj.offsets, r - epsilon)


def displacement_bound(delta_phi: float, diam: float) -> float:
    """Upper bound on how far any object point moves under a rotation by
    ``delta_phi`` about the reference point."""
    return 2.0 * abs(math.sin(delta_phi / 2.0)) * diam


@dataclass(frozen=True)
class So2Partition:
    """``s`` equal intervals ``[k w, (k+1) w]`` with ``w = 2 pi / s``."""

    slices: int

    @property
    def width(self) -> float:
        return TWO_PI / self.slices

    @property
    def samples(self) -> list[float]:
        return [k * self.width for k in range(self.slices)]

    def interval(self, i: int) -> tuple[float, float]:
        w = self.width
        return (i * w, (i + 1) * w)

    def index_of(self, theta: float) -> int:
        return min(int(math.floor(theta * self.slices / TWO_PI)), self.slices - 1)

    def max_displacement(self, diam: float) -> float:
        """Worst displacement from a sample to any angle of its interval."""
        return displacement_bound(min(self.width, math.pi), diam)


def uniform_partition(diam: float, epsilon: float, safety: float = 0.999) -> So2Partition:
    """Fewest equal intervals keeping the rotation displacement below ``epsilon``."""
    if not (0 < safety < 1):
        raise InputError("safety must lie in (0, 1)")
    if not (epsilon > 0 and diam > 0):
        raise InputError("epsilon and diam must be positive")
    arg = safety * epsilon / (2.0 * diam)
    if arg >= 1.0:
        part = So2Partition(1)
    else:
        step = 2.0 * math.asin(arg)
        part = So2Partition(math.ceil(TWO_PI / step))
    if not part.max_displacement(diam) < epsilon:
        raise AssertionError(
            f"partition with {part.slices} slices violates the displacement bound")
    return part


def partition_so2(obj: RigidObject, epsilon: float, safety: float = 0.999) -> So2Partition:
    if epsilon >= obj.radius:
        raise EpsilonTooLarge(f"epsilon={epsilon} must be smaller than the object ball radius {obj.radius}")
    return uniform_partition(obj.diam, epsilon, safety)


def slice_collision_union(obs: DiskUnion | None, core: EpsilonCore, phi: float,
                          delta: float = 0.0) -> DiskUnion | None:
    """Disks ``B(X_j - Rot(phi) GY_i, R + r - eps + delta)``, obstacle-major order.

    ``None`` (no obstacles) gives ``None``.
    """
    if obs is None:
        return None
    radius = obs.common_radius + core.radius + delta
    if radius <= 0:
        raise InputError("collision radius must be positive")
    rotated = core.offsets @ rotation(phi).T
    centers = (obs.centers[:, None, :] - rotated[None, :, :]).reshape(-1, 2)
    return DiskUnion(centers, radius)


@dataclass(frozen=True, eq=False)
class SliceApprox:
    """Free-space decomposition of one orientation interval.

    ``dt`` is ``None`` for degenerate slices (fewer than three distinct or
    only collinear centers), in which case the only component is the
    unbounded one.  ``union`` is ``None`` when there are no obstacles.
    """

    index: int
    interval: tuple
    phi: float
    union: DiskUnion | None
    dt: DelaunayTriangulation | None
    filtration: Filtration | None
    complex: AlphaComplex | None
    decomposition: ExteriorDecomposition | None

    @property
    def degenerate(self) -> bool:
        return self.dt is None

    @property
    def alpha(self) -> float:
        return 0.0 if self.union is None else self.union.common_radius ** 2

    @property
    def n_bounded(self) -> int:
        return 0 if self.decomposition is None else self.decomposition.n_bounded

    @property
    def n_components(self) -> int:
        return self.n_bounded + 1

    def component_triangles(self, k: int) -> np.ndarray:
        if self.decomposition is None:
            return np.empty(0, dtype=np.int64)
        return self.decomposition.triangles_of(k)

    def component_area(self, k: int) -> float:
        if self.dt is None:
            return math.inf if k == 0 else 0.0
        if k == 0:
            return math.inf
        return float(self.dt.triangle_areas(self.component_triangles(k)).sum())

    def with_alpha(self, alpha: float) -> "SliceApprox":
        """Same triangulation, different collision radius ``sqrt(alpha)``."""
        if self.union is None:
            return self
        union = DiskUnion(self.union.centers, math.sqrt(alpha))
        if self.dt is None:
            return SliceApprox(self.index, self.interval, self.phi, union, None, None, None, None)
        cx = alpha_complex(self.dt, self.filtration, alpha)
        return SliceApprox(self.index, self.interval, self.phi, union, self.dt,
                           self.filtration, cx, exterior_components(self.dt, cx))


def decompose_union(union: DiskUnion | None, index: int = 0, interval=(0.0, TWO_PI),
                    phi: float = 0.0) -> SliceApprox:
    """Run the slice connectivity computation on an explicit disk union."""
    if union is None:
        return SliceApprox(index, tuple(interval), phi, None, None, None, None, None)
    centers, _ = merge_sites(union.centers, TOL)
    merged = DiskUnion(centers, union.common_radius)
    try:
        dt = build_delaunay(centers)
    except DegenerateInput:
        return SliceApprox(index, tuple(interval), phi, merged, None, None, None, None)
    filt = compute_filtration(dt)
    cx = alpha_complex(dt, filt, union.common_radius ** 2)
    return SliceApprox(index, tuple(interval), phi, merged, dt, filt, cx,
                       exterior_components(dt, cx))


def build_slice(obs: DiskUnion | None, core: EpsilonCore, i: int, partition: So2Partition,
                delta: float = 0.0) -> SliceApprox:
    phi = partition.samples[i]
    union = slice_collision_union(obs, core, phi, delta)
    return decompose_union(union, i, partition.interval(i), phi)
