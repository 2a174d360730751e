"""Planar primitives: points, equal-radius disk unions, polygons, rigid objects.

Every geometric comparison uses the absolute tolerance ``TOL`` (workspace
units).  Configurations place the object's reference point G at ``(x, y)``
and rotate the body by ``theta`` relative to the pose it was given in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import shapely
from shapely.geometry import LinearRing
from shapely.geometry import Polygon as ShapelyPolygon

from .errors import EmptyApproximation, InputError

TOL = 1e-9
TWO_PI = 2.0 * math.pi


def _finite(*values):
    return all(math.isfinite(v) for v in values)


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __post_init__(self):
        if not _finite(self.x, self.y):
            raise InputError(f"non-finite point ({self.x}, {self.y})")

    def as_array(self):
        return np.array([self.x, self.y], dtype=float)


@dataclass(frozen=True)
class Disk:
    center: Point
    radius: float

    def __post_init__(self):
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise InputError(f"disk radius must be positive, got {self.radius}")


class DiskUnion:
    """A nonempty union of disks sharing one radius.

    Centers are kept as a read-only ``(n, 2)`` float array so the slice
    kernels can work on them without copying.
    """

    __slots__ = ("_centers", "_radius")

    def __init__(self, centers, radius: float):
        c = np.array(centers, dtype=float).reshape(-1, 2)
        if c.shape[0] == 0:
            raise InputError("disk union must contain at least one disk")
        if not np.all(np.isfinite(c)):
            raise InputError("disk centers must be finite")
        radius = float(radius)
        if not (math.isfinite(radius) and radius > 0):
            raise InputError(f"disk radius must be positive, got {radius}")
        c.setflags(write=False)
        self._centers = c
        self._radius = radius

    @classmethod
    def from_disks(cls, disks: Sequence[Disk]) -> "DiskUnion":
        disks = list(disks)
        if not disks:
            raise InputError("disk union must contain at least one disk")
        r = disks[0].radius
        for d in disks:
            if abs(d.radius - r) > TOL:
                raise InputError(
                    f"all disks must share one radius ({r} vs {d.radius})")
        return cls([[d.center.x, d.center.y] for d in disks], r)

    @property
    def centers(self) -> np.ndarray:
        return self._centers

    @property
    def common_radius(self) -> float:
        return self._radius

    @property
    def disks(self) -> list[Disk]:
        return [Disk(Point(float(x), float(y)), self._radius) for x, y in self._centers]

    def __len__(self):
        return self._centers.shape[0]

    def __eq__(self, other):
        if not isinstance(other, DiskUnion):
            return NotImplemented
        return (self._radius == other._radius
                and np.array_equal(self._centers, other._centers))

    def __hash__(self):
        return hash((self._radius, self._centers.tobytes()))

    def __repr__(self):
        return f"DiskUnion(n={len(self)}, radius={self._radius!r})"

    def bounds(self):
        lo = self._centers.min(axis=0) - self._radius
        hi = self._centers.max(axis=0) + self._radius
        return float(lo[0]), float(lo[1]), float(hi[0]), float(hi[1])


@dataclass(frozen=True)
class Polygon:
    """Simple polygon with counterclockwise vertices.

    Clockwise input is reoriented; self-intersecting or zero-area input
    is rejected.
    """

    vertices: tuple

    def __post_init__(self):
        pts = [p if isinstance(p, Point) else Point(float(p[0]), float(p[1]))
               for p in self.vertices]
        if len(pts) >= 2 and pts[0] == pts[-1]:
            pts = pts[:-1]
        if len(pts) < 3:
            raise InputError("polygon needs at least 3 vertices")
        xy = [(p.x, p.y) for p in pts]
        if not LinearRing(xy).is_simple:
            raise InputError("polygon is self-intersecting")
        area = _signed_area(np.asarray(xy))
        if abs(area) <= TOL:
            raise InputError("polygon has zero area")
        if area < 0:
            pts = pts[::-1]
        object.__setattr__(self, "vertices", tuple(pts))

    def as_array(self):
        return np.array([[p.x, p.y] for p in self.vertices], dtype=float)

    def signed_area(self):
        return _signed_area(self.as_array())

    def to_shapely(self):
        return ShapelyPolygon(self.as_array())


def _signed_area(xy):
    x, y = xy[:, 0], xy[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


@dataclass(frozen=True)
class Configuration:
    x: float
    y: float
    theta: float = 0.0

    def __post_init__(self):
        if not _finite(self.x, self.y, self.theta):
            raise InputError("configuration must be finite")
        t = math.fmod(self.theta, TWO_PI)
        if t < 0:
            t += TWO_PI
        if t >= TWO_PI:
            t = 0.0
        object.__setattr__(self, "theta", t)

    @classmethod
    def parse(cls, text: str) -> "Configuration":
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 3:
            raise InputError(f"expected 'x,y,theta', got {text!r}")
        try:
            x, y, t = (float(p) for p in parts)
        except ValueError:
            raise InputError(f"non-numeric configuration {text!r}") from None
        return cls(x, y, t)


def rotation(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


@dataclass(frozen=True, eq=False)
class RigidObject:
    """A ball-union body expressed relative to its reference point G.

    ``body`` centers are offsets GY_i; ``reference`` is where G sits in the
    scene, so ``Configuration(G.x, G.y, 0)`` reproduces the input pose.
    """

    body: DiskUnion
    reference: Point
    diam: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "diam", _diameter(self.body))

    @classmethod
    def from_world(cls, union: DiskUnion) -> "RigidObject":
        g = union.centers.mean(axis=0)
        return cls(DiskUnion(union.centers - g, union.common_radius),
                   Point(float(g[0]), float(g[1])))

    @property
    def radius(self) -> float:
        return self.body.common_radius

    @property
    def offsets(self) -> np.ndarray:
        return self.body.centers

    def home(self) -> Configuration:
        return Configuration(self.reference.x, self.reference.y, 0.0)


def _diameter(body: DiskUnion) -> float:
    return float(np.max(np.hypot(body.centers[:, 0], body.centers[:, 1]))
                 + body.common_radius)


def object_diameter(obj: RigidObject) -> float:
    """Largest distance from G to a point of the object."""
    return _diameter(obj.body)


def signed_distance(p: Point, u: DiskUnion) -> float:
    q = np.array([p.x, p.y])
    d = np.hypot(*(u.centers - q).T)
    return float(np.min(d) - u.common_radius)


def signed_distances(points, u: DiskUnion) -> np.ndarray:
    """Vectorized ``signed_distance`` for an ``(k, 2)`` array of points."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    out = np.empty(len(pts))
    # chunk to bound the (k, n) temporary
    step = max(1, 2_000_000 // max(1, len(u)))
    for s in range(0, len(pts), step):
        diff = pts[s:s + step, None, :] - u.centers[None, :, :]
        out[s:s + step] = np.sqrt(np.einsum("kni,kni->kn", diff, diff)).min(axis=1)
    return out - u.common_radius


def transform(u: DiskUnion, c: Configuration) -> DiskUnion:
    moved = u.centers @ rotation(c.theta).T + np.array([c.x, c.y])
    return DiskUnion(moved, u.common_radius)


def in_collision(c: Configuration, obj: RigidObject, obs: DiskUnion) -> bool:
    """Open-interior overlap test; tangency is free."""
    placed = transform(obj.body, c).centers
    reach = obj.radius + obs.common_radius - TOL
    diff = placed[:, None, :] - obs.centers[None, :, :]
    d2 = np.einsum("mni,mni->mn", diff, diff)
    return bool(np.any(d2 < reach * reach))


def _hex_lattice(bounds, pitch, anchor):
    xmin, ymin, xmax, ymax = bounds
    row = pitch * math.sqrt(3.0) / 2.0
    ax, ay = anchor
    k0 = math.floor((ymin - ay) / row) - 1
    k1 = math.ceil((ymax - ay) / row) + 1
    pts = []
    for k in range(k0, k1 + 1):
        y = ay + k * row
        shift = 0.5 * pitch if k % 2 else 0.0
        j0 = math.floor((xmin - ax - shift) / pitch) - 1
        j1 = math.ceil((xmax - ax - shift) / pitch) + 1
        xs = ax + shift + pitch * np.arange(j0, j1 + 1)
        pts.append(np.column_stack([xs, np.full(xs.shape, y)]))
    return np.vstack(pts) if pts else np.empty((0, 2))


def _ring_samples(coords, spacing):
    coords = np.asarray(coords, dtype=float)
    out = []
    for a, b in zip(coords[:-1], coords[1:]):
        length = float(np.hypot(*(b - a)))
        n = max(1, math.ceil(length / spacing))
        t = np.arange(n)[:, None] / n
        out.append(a + t * (b - a))
    return np.vstack(out) if out else np.empty((0, 2))


def approximate_polygon(poly: Polygon, radius: float) -> DiskUnion:
    """Fill ``poly`` with disks of ``radius`` that stay inside it.

    Centers come from a hexagonal lattice (pitch ``radius * sqrt(3)``,
    anchored at the polygon centroid) plus samples along the inner offset
    boundary at spacing ``radius``; every center is checked to lie at
    distance >= ``radius`` from the polygon boundary.
    """
    if not (math.isfinite(radius) and radius > 0):
        raise InputError(f"ball radius must be positive, got {radius}")
    shp = poly.to_shapely()
    boundary = shp.exterior
    inner = shp.buffer(-(radius - TOL))
    centroid = shp.centroid

    lattice = _hex_lattice(shp.bounds, radius * math.sqrt(3.0), (centroid.x, centroid.y))
    samples = []
    if not inner.is_empty:
        parts = getattr(inner, "geoms", [inner])
        for part in parts:
            samples.append(_ring_samples(part.exterior.coords, radius))
            for hole in part.interiors:
                samples.append(_ring_samples(hole.coords, radius))
    samples = np.vstack(samples) if samples else np.empty((0, 2))

    def admissible(pts):
        if len(pts) == 0:
            return pts
        inside = shapely.contains_xy(shp, pts[:, 0], pts[:, 1])
        pts = pts[inside]
        if len(pts) == 0:
            return pts
        dist = shapely.distance(boundary, shapely.points(pts))
        return pts[dist >= radius - TOL]

    lattice = admissible(lattice)
    samples = admissible(samples)
    gap = 0.25 * radius
    keep = [p for p in lattice]
    cells: dict = {}
    for p in keep:
        cells.setdefault((math.floor(p[0] / gap), math.floor(p[1] / gap)), []).append(p)
    for p in samples:
        cx, cy = math.floor(p[0] / gap), math.floor(p[1] / gap)
        crowded = any(
            (q[0] - p[0]) ** 2 + (q[1] - p[1]) ** 2 < gap * gap
            for dx in (-1, 0, 1) for dy in (-1, 0, 1)
            for q in cells.get((cx + dx, cy + dy), ()))
        if crowded:
            continue
        keep.append(p)
        cells.setdefault((cx, cy), []).append(p)
    if not keep:
        raise EmptyApproximation(
            f"no disk of radius {radius} fits inside the polygon", polygon=poly)
    return DiskUnion(np.asarray(keep), radius)


def merge_unions(unions: Iterable[DiskUnion]) -> DiskUnion:
    unions = list(unions)
    if not unions:
        raise InputError("nothing to merge")
    r = unions[0].common_radius
    for u in unions[1:]:
        if abs(u.common_radius - r) > TOL:
            raise InputError(
                f"obstacle disks must share one radius ({r} vs {u.common_radius})")
    return DiskUnion(np.vstack([u.centers for u in unions]), r)
