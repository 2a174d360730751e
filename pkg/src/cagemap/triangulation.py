"""Delaunay triangulation of disk centers and the alpha-complex filtration.

Alpha values follow the squared-radius convention throughout: a union of
disks of radius ``rho`` corresponds to ``alpha = rho**2``.

The triangulation itself is delegated to Qhull (``scipy.spatial.Delaunay``);
everything built on top of it (edge tables, filtration, membership,
exterior flood fill) is computed here.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph
from scipy.spatial import Delaunay, QhullError, cKDTree

from .errors import DegenerateInput
from .geom import TOL

_EPS = np.finfo(float).eps
_ORIENT_BOUND = (3.0 + 16.0 * _EPS) * _EPS
_INCIRCLE_BOUND = (10.0 + 96.0 * _EPS) * _EPS


def orient2d(a, b, c) -> float:
    """Twice the signed area of ``abc``; exact sign via rational fallback."""
    detleft = (a[0] - c[0]) * (b[1] - c[1])
    detright = (a[1] - c[1]) * (b[0] - c[0])
    det = detleft - detright
    if abs(det) > _ORIENT_BOUND * (abs(detleft) + abs(detright)):
        return float(det)
    ax, ay, bx, by, cx, cy = (Fraction(float(v)) for v in (a[0], a[1], b[0], b[1], c[0], c[1]))
    return float((ax - cx) * (by - cy) - (ay - cy) * (bx - cx))


def incircle(a, b, c, d) -> float:
    """Positive iff ``d`` is inside the circle through CCW ``a, b, c``."""
    adx, ady = a[0] - d[0], a[1] - d[1]
    bdx, bdy = b[0] - d[0], b[1] - d[1]
    cdx, cdy = c[0] - d[0], c[1] - d[1]
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy
    det = (alift * (bdx * cdy - cdx * bdy)
           + blift * (cdx * ady - adx * cdy)
           + clift * (adx * bdy - bdx * ady))
    permanent = (alift * (abs(bdx * cdy) + abs(cdx * bdy))
                 + blift * (abs(cdx * ady) + abs(adx * cdy))
                 + clift * (abs(adx * bdy) + abs(bdx * ady)))
    if abs(det) > _INCIRCLE_BOUND * permanent:
        return float(det)
    F = [Fraction(float(v)) for v in (*a, *b, *c, *d)]
    ax, ay, bx, by, cx, cy, dx, dy = F
    adx, ady, bdx, bdy, cdx, cdy = ax - dx, ay - dy, bx - dx, by - dy, cx - dx, cy - dy
    exact = ((adx * adx + ady * ady) * (bdx * cdy - cdx * bdy)
             + (bdx * bdx + bdy * bdy) * (cdx * ady - adx * cdy)
             + (cdx * cdx + cdy * cdy) * (adx * bdy - bdx * ady))
    return float(exact)


def merge_sites(points, tol: float = TOL):
    """Collapse points closer than ``tol``; first occurrence wins.

    Returns ``(unique, index)`` with ``unique[index[k]]`` the survivor for
    input point ``k``.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    n = len(pts)
    index = np.arange(n)
    if n > 1:
        pairs = cKDTree(pts).query_pairs(tol, output_type="ndarray")
        if len(pairs):
            g = sparse.coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(n, n))
            _, lab = csgraph.connected_components(g, directed=False)
            first = np.full(lab.max() + 1, n)
            np.minimum.at(first, lab, np.arange(n))
            index = first[lab]
    keep = np.unique(index)
    remap = np.full(n, -1)
    remap[keep] = np.arange(len(keep))
    return pts[keep], remap[index]


@dataclass(frozen=True, eq=False)
class DelaunayTriangulation:
    """Triangles are CCW; ``edge_tris[e]`` holds the one or two incident
    triangles (``-1`` when absent); ``tri_edges[t, k]`` is the edge opposite
    vertex ``k``; ``hull`` lists boundary edges oriented with the
    triangulation on their left."""

    sites: np.ndarray
    triangles: np.ndarray
    edges: np.ndarray
    tri_edges: np.ndarray
    edge_tris: np.ndarray
    hull: np.ndarray
    hull_directed: np.ndarray

    @property
    def n_triangles(self):
        return len(self.triangles)

    @property
    def n_edges(self):
        return len(self.edges)

    def triangle_points(self, tris=None):
        t = self.triangles if tris is None else self.triangles[tris]
        return self.sites[t]

    def triangle_areas(self, tris=None):
        p = self.triangle_points(tris)
        d1 = p[:, 1] - p[:, 0]
        d2 = p[:, 2] - p[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    def locate(self, point):
        """Indices of triangles whose closure contains ``point``."""
        p = np.asarray(point, dtype=float)
        tri = self.triangle_points()
        scale = TOL * max(1.0, float(np.abs(self.sites).max()))
        inside = np.ones(len(tri), dtype=bool)
        for k in range(3):
            a = tri[:, (k + 1) % 3]
            b = tri[:, (k + 2) % 3]
            o = (b[:, 0] - a[:, 0]) * (p[1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (p[0] - a[:, 0])
            inside &= o >= -scale * np.hypot(*(b - a).T)
        return np.flatnonzero(inside)

    def in_hull(self, points):
        """Closed convex-hull membership for an ``(k, 2)`` array."""
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        a = self.sites[self.hull_directed[:, 0]]
        b = self.sites[self.hull_directed[:, 1]]
        d = b - a
        o = (d[None, :, 0] * (pts[:, None, 1] - a[None, :, 1])
             - d[None, :, 1] * (pts[:, None, 0] - a[None, :, 0]))
        tol = TOL * max(1.0, float(np.abs(self.sites).max())) * np.hypot(d[:, 0], d[:, 1])
        return np.all(o >= -tol[None, :], axis=1)


def _check_general(pts):
    if len(pts) < 3:
        raise DegenerateInput(f"need at least 3 distinct sites, got {len(pts)}")
    p0 = pts[0]
    far = pts[np.argmax(np.sum((pts - p0) ** 2, axis=1))]
    d = far - p0
    span = float(np.hypot(*d))
    o = d[0] * (pts[:, 1] - p0[1]) - d[1] * (pts[:, 0] - p0[0])
    if np.max(np.abs(o)) <= TOL * span * max(1.0, span):
        raise DegenerateInput("all sites are collinear")


def build_delaunay(sites) -> DelaunayTriangulation:
    """Delaunay triangulation of ``sites`` after merging duplicates.

    Raises DegenerateInput for fewer than three distinct sites or a
    collinear set.  Output is deterministic for a fixed input order.
    """
    pts, _ = merge_sites(sites)
    _check_general(pts)
    try:
        qh = Delaunay(pts)
    except QhullError as exc:
        raise DegenerateInput(str(exc)) from None
    tris = np.array(qh.simplices, dtype=np.int64)
    p = pts[tris]
    area2 = ((p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1])
             - (p[:, 1, 1] - p[:, 0, 1]) * (p[:, 2, 0] - p[:, 0, 0]))
    flip = area2 < 0
    tris[flip] = tris[flip][:, [0, 2, 1]]
    # near-flat triangles from almost coincident sites are kept: dropping
    # them would open false boundary edges inside the triangulation
    scale = float(np.ptp(pts, axis=0).max()) ** 2
    if not np.any(np.abs(area2) > 1e-14 * scale):
        raise DegenerateInput("triangulation has no proper triangles")
    return _assemble(pts, tris)


def _assemble(pts, tris):
    T = len(tris)
    # edge k of a triangle is opposite vertex k, directed as in the CCW triangle
    directed = np.stack([tris[:, [1, 2]], tris[:, [2, 0]], tris[:, [0, 1]]], axis=1)
    flat = directed.reshape(-1, 2)
    lo = np.minimum(flat[:, 0], flat[:, 1])
    hi = np.maximum(flat[:, 0], flat[:, 1])
    keys, inverse = np.unique(lo * len(pts) + hi, return_inverse=True)
    edges = np.column_stack([keys // len(pts), keys % len(pts)])
    inverse = inverse.reshape(-1)
    tri_edges = inverse.reshape(T, 3)
    E = len(edges)
    edge_tris = np.full((E, 2), -1, dtype=np.int64)
    owner = np.repeat(np.arange(T), 3)
    order = np.argsort(inverse, kind="stable")
    sorted_edges = inverse[order]
    first = np.ones(len(order), dtype=bool)
    first[1:] = sorted_edges[1:] != sorted_edges[:-1]
    edge_tris[sorted_edges[first], 0] = owner[order[first]]
    second = ~first
    edge_tris[sorted_edges[second], 1] = owner[order[second]]
    hull = np.flatnonzero(edge_tris[:, 1] < 0)
    slot = np.full(E, -1)
    slot[inverse] = np.arange(len(inverse))
    hull_directed = flat[slot[hull]]
    for arr in (pts, tris, edges, tri_edges, edge_tris, hull, hull_directed):
        arr.setflags(write=False)
    return DelaunayTriangulation(pts, tris, edges, tri_edges, edge_tris, hull, hull_directed)


@dataclass(frozen=True, eq=False)
class Filtration:
    """Per-simplex alpha values (squared radii) of the alpha filtration."""

    tri_values: np.ndarray
    edge_values: np.ndarray

    def critical_values(self):
        """Sorted distinct finite values at which the complex changes."""
        vals = np.concatenate([self.tri_values, self.edge_values])
        return np.unique(vals[np.isfinite(vals)])


def circumradius2(p):
    """Squared circumradii for an ``(T, 3, 2)`` array of triangles."""
    d1 = p[:, 1] - p[:, 0]
    d2 = p[:, 2] - p[:, 0]
    d3 = p[:, 2] - p[:, 1]
    cross = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]
    num = (np.sum(d1 * d1, axis=1) * np.sum(d2 * d2, axis=1) * np.sum(d3 * d3, axis=1))
    with np.errstate(divide="ignore", invalid="ignore"):
        r2 = num / (4.0 * cross * cross)
    r2[~np.isfinite(r2)] = np.inf
    return r2


def compute_filtration(dt: DelaunayTriangulation) -> Filtration:
    tri_vals = circumradius2(dt.triangle_points())
    a = dt.sites[dt.edges[:, 0]]
    b = dt.sites[dt.edges[:, 1]]
    half2 = 0.25 * np.sum((b - a) ** 2, axis=1)
    edge_vals = half2.copy()
    min_coface = np.full(dt.n_edges, np.inf)
    attached = np.zeros(dt.n_edges, dtype=bool)
    for side in (0, 1):
        t = dt.edge_tris[:, side]
        has = t >= 0
        tt = t[has]
        e_idx = np.flatnonzero(has)
        # the vertex of tt not on the edge
        slot = np.argmax(dt.tri_edges[tt] == e_idx[:, None], axis=1)
        v = dt.sites[dt.triangles[tt, slot]]
        dot = np.sum((a[has] - v) * (b[has] - v), axis=1)
        attached[e_idx] |= dot < 0
        min_coface[e_idx] = np.minimum(min_coface[e_idx], tri_vals[tt])
    edge_vals[attached] = min_coface[attached]
    tri_vals.setflags(write=False)
    edge_vals.setflags(write=False)
    return Filtration(tri_vals, edge_vals)


@dataclass(frozen=True, eq=False)
class AlphaComplex:
    alpha: float
    edge_member: np.ndarray
    tri_member: np.ndarray


def alpha_complex(dt: DelaunayTriangulation, filtration: Filtration, alpha: float) -> AlphaComplex:
    """Subcomplex of simplices whose filtration value is at most ``alpha``."""
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    em = filtration.edge_values <= alpha
    tm = filtration.tri_values <= alpha
    em.setflags(write=False)
    tm.setflags(write=False)
    return AlphaComplex(float(alpha), em, tm)


@dataclass(frozen=True, eq=False)
class ExteriorDecomposition:
    """``labels[t]`` is the component of exterior triangle ``t`` (0 is the
    unbounded component) or ``-1`` for triangles of the complex."""

    labels: np.ndarray
    n_bounded: int

    @property
    def n_components(self):
        return self.n_bounded + 1

    def triangles_of(self, component: int) -> np.ndarray:
        return np.flatnonzero(self.labels == component)


def exterior_components(dt: DelaunayTriangulation, cx: AlphaComplex) -> ExteriorDecomposition:
    """Flood fill of exterior triangles across non-member edges.

    The unbounded component is seeded from every hull edge not in the
    complex; the rest are numbered by their lowest triangle index.
    """
    T = dt.n_triangles
    open_edges = ~cx.edge_member
    inner = open_edges & (dt.edge_tris[:, 1] >= 0)
    outer = open_edges & (dt.edge_tris[:, 1] < 0)
    rows = np.concatenate([dt.edge_tris[inner, 0], dt.edge_tris[outer, 0]])
    cols = np.concatenate([dt.edge_tris[inner, 1], np.full(int(outer.sum()), T)])
    g = sparse.coo_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(T + 1, T + 1))
    _, raw = csgraph.connected_components(g, directed=False)
    exterior = ~cx.tri_member
    labels = np.full(T, -1, dtype=np.int64)
    ext_idx = np.flatnonzero(exterior)
    if len(ext_idx):
        ext_raw = raw[ext_idx]
        outside = raw[T]
        uniq, first = np.unique(ext_raw, return_index=True)
        bounded = uniq != outside
        order = np.argsort(first[bounded], kind="stable")
        lut = np.full(int(raw.max()) + 1, -1, dtype=np.int64)
        lut[outside] = 0
        lut[uniq[bounded][order]] = np.arange(1, int(bounded.sum()) + 1)
        labels[ext_idx] = lut[ext_raw]
        n_bounded = int(bounded.sum())
    else:
        n_bounded = 0
    labels.setflags(write=False)
    return ExteriorDecomposition(labels, n_bounded)
