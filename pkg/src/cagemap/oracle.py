"""Brute-force grid ground truth.

The configuration box is sampled at cell centers with the exact collision
predicate; free cells are joined by 6-neighbour moves with theta wrapping
around.  Cell-center sampling is only trustworthy when every feature of
the instance is much larger than a cell.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage, sparse
from scipy.sparse import csgraph

from .errors import CellNotFree, InputError
from .geom import TOL, TWO_PI, Configuration, DiskUnion, RigidObject, rotation


@dataclass(frozen=True)
class GridSpec:
    xmin: float
    ymin: float
    xmax: float
    ymax: float
    nx: int
    ny: int
    ntheta: int = 64

    def __post_init__(self):
        if self.ntheta < 8:
            raise InputError("ntheta must be at least 8")
        if self.nx < 1 or self.ny < 1 or not (self.xmax > self.xmin and self.ymax > self.ymin):
            raise InputError("empty grid box")

    @classmethod
    def around(cls, obj: RigidObject, obs: DiskUnion | None, resolution: float,
               ntheta: int = 64, margin: float | None = None) -> "GridSpec":
        """Box holding every obstacle grown by the object diameter, plus a
        free margin so the unbounded region wraps around the scene."""
        pad = obj.diam + (obj.diam + 4 * resolution if margin is None else margin)
        if obs is None:
            gx, gy = obj.reference.x, obj.reference.y
            x0, y0, x1, y1 = gx, gy, gx, gy
        else:
            x0, y0, x1, y1 = obs.bounds()
        x0, y0, x1, y1 = x0 - pad, y0 - pad, x1 + pad, y1 + pad
        nx = max(1, math.ceil((x1 - x0) / resolution))
        ny = max(1, math.ceil((y1 - y0) / resolution))
        return cls(x0, y0, x0 + nx * resolution, y0 + ny * resolution, nx, ny, ntheta)

    @property
    def dx(self):
        return (self.xmax - self.xmin) / self.nx

    @property
    def dy(self):
        return (self.ymax - self.ymin) / self.ny

    @property
    def dtheta(self):
        return TWO_PI / self.ntheta

    @property
    def cell_volume(self):
        return self.dx * self.dy * self.dtheta

    def xs(self):
        return self.xmin + (np.arange(self.nx) + 0.5) * self.dx

    def ys(self):
        return self.ymin + (np.arange(self.ny) + 0.5) * self.dy

    def cell(self, c: Configuration):
        ix = math.floor((c.x - self.xmin) / self.dx)
        iy = math.floor((c.y - self.ymin) / self.dy)
        if not (0 <= ix < self.nx and 0 <= iy < self.ny):
            raise InputError(f"configuration {c} lies outside the grid box")
        it = int(round(c.theta / self.dtheta)) % self.ntheta
        return it, ix, iy


def _paint(occupied, xs, ys, centers, reach):
    dx = xs[1] - xs[0] if len(xs) > 1 else 1.0
    dy = ys[1] - ys[0] if len(ys) > 1 else 1.0
    x0, y0 = xs[0], ys[0]
    r2 = reach * reach
    for cx, cy in centers:
        i0 = max(0, math.floor((cx - reach - x0) / dx))
        i1 = min(len(xs), math.ceil((cx + reach - x0) / dx) + 1)
        j0 = max(0, math.floor((cy - reach - y0) / dy))
        j1 = min(len(ys), math.ceil((cy + reach - y0) / dy) + 1)
        if i0 >= i1 or j0 >= j1:
            continue
        ddx = (xs[i0:i1] - cx) ** 2
        ddy = (ys[j0:j1] - cy) ** 2
        occupied[i0:i1, j0:j1] |= (ddx[:, None] + ddy[None, :]) < r2


@dataclass(frozen=True, eq=False)
class FreeGrid:
    """``free[t, i, j]``: the object is collision-free at the center of cell
    ``(t, i, j)``.  ``labels`` are component ids (-1 on occupied cells)."""

    spec: GridSpec
    free: np.ndarray
    labels: np.ndarray = field(init=False, repr=False)
    escaping: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        labels, escaping = _label_components(self.free)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "escaping", escaping)

    @property
    def n_components(self):
        return len(self.escaping)

    def label_of(self, c: Configuration) -> int:
        lab = int(self.labels[self.spec.cell(c)])
        if lab < 0:
            raise CellNotFree(f"grid cell of {c} is occupied")
        return lab


def _label_components(free):
    structure = ndimage.generate_binary_structure(3, 1)
    raw, n = ndimage.label(free, structure=structure)
    # theta wraps: glue the first and last layers
    a, b = raw[0], raw[-1]
    both = (a > 0) & (b > 0)
    rows, cols = a[both], b[both]
    g = sparse.coo_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(n + 1, n + 1))
    _, comp = csgraph.connected_components(g, directed=False)
    # renumber so component ids follow first appearance of their raw labels
    _, canon = np.unique(comp[1:], return_inverse=True)
    lut = np.concatenate([[-1], canon])
    labels = lut[raw]
    escaping = np.zeros(int(canon.max(initial=-1)) + 1, dtype=bool)
    for face in (labels[:, 0, :], labels[:, -1, :], labels[:, :, 0], labels[:, :, -1]):
        hit = np.unique(face[face >= 0])
        escaping[hit] = True
    return labels, escaping


def rasterize(obj: RigidObject, obs: DiskUnion | None, spec: GridSpec) -> FreeGrid:
    """Exact collision test (open-interior overlap) at every cell center."""
    if obs is None:
        return FreeGrid(spec, np.ones((spec.ntheta, spec.nx, spec.ny), dtype=bool))
    xs, ys = spec.xs(), spec.ys()
    reach = obj.radius + obs.common_radius - TOL
    free = np.ones((spec.ntheta, spec.nx, spec.ny), dtype=bool)
    occupied = np.zeros((spec.nx, spec.ny), dtype=bool)
    for t in range(spec.ntheta):
        occupied[:] = False
        rotated = obj.offsets @ rotation(t * spec.dtheta).T
        centers = (obs.centers[:, None, :] - rotated[None, :, :]).reshape(-1, 2)
        _paint(occupied, xs, ys, centers, reach)
        free[t] = ~occupied
    return FreeGrid(spec, free)


def oracle_connected(g: FreeGrid, c1: Configuration, c2: Configuration) -> bool:
    return g.label_of(c1) == g.label_of(c2)


def oracle_escapes(g: FreeGrid, c: Configuration) -> bool:
    """True when the grid component of ``c`` reaches the edge of the box."""
    return bool(g.escaping[g.label_of(c)])


def oracle_volume(g: FreeGrid, seed: Configuration) -> float:
    lab = g.label_of(seed)
    return float(np.count_nonzero(g.labels == lab)) * g.spec.cell_volume


def complement_components(union: DiskUnion, bounds, resolution: float):
    """4-connected labelling of the plane minus an open disk union on a
    2D grid of cell centers.

    Returns ``(labels, xs, ys, bounded, deep)``: ``labels`` is ``-1`` inside
    the union, ``bounded[k]`` is True for components that avoid the box
    edge and ``deep[k]`` for components holding a cell farther than one
    cell diagonal from the union.  Components that are not deep can be
    artifacts of sampling near a cusp of the union boundary.
    """
    x0, y0, x1, y1 = bounds
    nx = max(1, math.ceil((x1 - x0) / resolution))
    ny = max(1, math.ceil((y1 - y0) / resolution))
    xs = x0 + (np.arange(nx) + 0.5) * resolution
    ys = y0 + (np.arange(ny) + 0.5) * resolution
    occupied = np.zeros((nx, ny), dtype=bool)
    _paint(occupied, xs, ys, union.centers, union.common_radius)
    raw, n = ndimage.label(~occupied)
    labels = raw - 1
    bounded = np.ones(n, dtype=bool)
    for face in (labels[0, :], labels[-1, :], labels[:, 0], labels[:, -1]):
        bounded[np.unique(face[face >= 0])] = False
    shallow = np.zeros((nx, ny), dtype=bool)
    _paint(shallow, xs, ys, union.centers, union.common_radius + resolution * math.sqrt(2.0))
    deep_cells = labels[~shallow & (labels >= 0)]
    deep = np.zeros(n, dtype=bool)
    deep[np.unique(deep_cells)] = True
    return labels, xs, ys, bounded, deep
