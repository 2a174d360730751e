"""Connectivity graph over slice components, and the one-sided queries.

Vertices are ``(slice, component)`` pairs; component 0 of every slice is
the unbounded one.  An edge joins components of adjacent slices whose
closed triangle sets touch anywhere.  Disconnection in this graph implies
disconnection of the true free space; connection implies nothing.
"""

from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .geom import TOL, Configuration, signed_distance, Point
from .slicing import SliceApprox, So2Partition


class Verdict(str, enum.Enum):
    PROVEN_DISCONNECTED = "proven_disconnected"
    POSSIBLY_CONNECTED = "possibly_connected"
    PROVEN_CAGED = "proven_caged"
    NOT_PROVEN_CAGED = "not_proven_caged"
    IN_COLLISION = "in_collision"

    @property
    def guaranteed(self) -> bool:
        return self in (Verdict.PROVEN_DISCONNECTED, Verdict.PROVEN_CAGED,
                        Verdict.IN_COLLISION)


class UnionFind:
    """Disjoint sets over ``0..n-1`` with path halving and union by size."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, a: int) -> int:
        parent = self.parent
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return True


@dataclass(frozen=True)
class Vertex:
    slice: int
    component: int

    @property
    def infinite(self) -> bool:
        return self.component == 0


@dataclass(frozen=True, eq=False)
class ConnectivityGraph:
    slices: tuple
    partition: So2Partition
    offsets: tuple
    edges: tuple
    labels: tuple = field(repr=False)
    n_components: int = 0

    @property
    def n_vertices(self) -> int:
        return self.offsets[-1]

    def vertex_id(self, v: Vertex) -> int:
        return self.offsets[v.slice] + v.component

    def vertex(self, vid: int) -> Vertex:
        i = int(np.searchsorted(self.offsets, vid, side="right")) - 1
        return Vertex(i, vid - self.offsets[i])

    def component_of(self, v: Vertex) -> int:
        """Graph component id; 0 is the one holding the unbounded region."""
        return self.labels[self.vertex_id(v)]

    def members(self, component: int) -> list[Vertex]:
        return [self.vertex(k) for k, lab in enumerate(self.labels) if lab == component]

    def is_infinite(self, component: int) -> bool:
        return component == 0


def worker_count(threads: int) -> int:
    """Threads actually used: never more than the CPUs this process may
    run on, since the kernels are CPU bound."""
    try:
        cpus = len(os.sched_getaffinity(0))
    except AttributeError:
        cpus = os.cpu_count() or 1
    return max(1, min(int(threads), cpus))


def adjacent_pairs(s: int):
    if s < 2:
        return []
    if s == 2:
        return [(0, 1)]
    return [(i, (i + 1) % s) for i in range(s)]


def _exterior(sl: SliceApprox):
    """Exterior triangles of a slice: component ids, corner points and
    corner disk radii."""
    if sl.dt is None:
        return np.empty(0, dtype=np.int64), np.empty((0, 3, 2)), np.empty((0, 3))
    labels = sl.decomposition.labels
    idx = np.flatnonzero(labels >= 0)
    pts = sl.dt.sites[sl.dt.triangles[idx]]
    return labels[idx], pts, np.full((len(idx), 3), sl.union.common_radius)


def _outer_triangles(sl: SliceApprox, reach: float):
    """Triangles covering the band of width ``reach`` outside the convex
    hull: a strip per hull edge plus a wedge per hull vertex.  Only the
    hull corners carry a disk."""
    dt = sl.dt
    a = dt.sites[dt.hull_directed[:, 0]]
    b = dt.sites[dt.hull_directed[:, 1]]
    d = b - a
    n = np.stack([d[:, 1], -d[:, 0]], axis=1)
    n /= np.hypot(n[:, 0], n[:, 1])[:, None]
    far_a, far_b = a + reach * n, b + reach * n
    strips = np.concatenate([np.stack([a, b, far_b], axis=1), np.stack([a, far_b, far_a], axis=1)])
    # wedge at the head of every hull edge, between its normal and the next one
    nxt = {int(h): k for k, h in enumerate(dt.hull_directed[:, 0])}
    follow = np.array([nxt.get(int(t), k) for k, t in enumerate(dt.hull_directed[:, 1])])
    turn = _cross(n, n[follow])
    wedges = np.stack([b, b + reach * n[follow], far_b], axis=1)[np.abs(turn) > 1e-12]
    tris = np.concatenate([strips, wedges])
    rho = sl.union.common_radius
    radii = np.zeros((len(tris), 3))
    radii[:len(a), :2] = rho
    radii[len(a):2 * len(a), 0] = rho
    radii[2 * len(a):, 0] = rho
    return tris, radii


def _with_outside(comps, pts, radii, sl: SliceApprox, reach: float):
    otris, orad = _outer_triangles(sl, reach)
    return (np.concatenate([comps, np.zeros(len(otris), dtype=comps.dtype)]),
            np.concatenate([pts, otris]), np.concatenate([radii, orad]))


def _clip_halfplane(poly, nx, ny, c):
    """Part of convex ``poly`` with ``nx * x + ny * y <= c``."""
    out = []
    m = len(poly)
    vals = [nx * p[0] + ny * p[1] - c for p in poly]
    for i in range(m):
        p, q = poly[i], poly[(i + 1) % m]
        vp, vq = vals[i], vals[(i + 1) % m]
        if vp <= 0:
            out.append(p)
        if (vp < 0 < vq) or (vq < 0 < vp):
            t = vp / (vp - vq)
            out.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
    return out


def _clip(poly, tri, tol):
    """Part of convex ``poly`` inside the closed triangle ``tri``."""
    area2 = ((tri[1, 0] - tri[0, 0]) * (tri[2, 1] - tri[0, 1])
             - (tri[1, 1] - tri[0, 1]) * (tri[2, 0] - tri[0, 0]))
    if area2 < 0:
        tri = tri[::-1]
    for k in range(3):
        a, b = tri[k], tri[(k + 1) % 3]
        dx, dy = float(b[0] - a[0]), float(b[1] - a[1])
        # inside is the left side: dx * (y - ay) - dy * (x - ax) >= -slack
        slack = tol * math.hypot(dx, dy)
        poly = _clip_halfplane(poly, dy, -dx, dy * float(a[0]) - dx * float(a[1]) + slack)
        if not poly:
            break
    return poly


def _covered(poly, centers, radii):
    """Whether convex ``poly`` lies inside the union of the open disks.

    Each point of the plane belongs to the power cell of some disk, and a
    point covered by any disk is covered by the disk of its cell; so it is
    enough to check every cell's share of ``poly`` against its own disk.
    """
    n = len(centers)
    for k in range(n):
        (xk, yk), rk = centers[k], radii[k]
        piece = poly
        for j in range(n):
            if j == k or not piece:
                continue
            (xj, yj), rj = centers[j], radii[j]
            # power(x, k) <= power(x, j), which is linear in x
            piece = _clip_halfplane(piece, 2.0 * (xj - xk), 2.0 * (yj - yk),
                                    (xj * xj + yj * yj - rj * rj) - (xk * xk + yk * yk - rk * rk))
        r2 = rk * rk
        if piece and not all((p[0] - xk) ** 2 + (p[1] - yk) ** 2 < r2 for p in piece):
            return False
    return True


def contact_is_free(ta, tb, ra, rb, tol=TOL) -> bool:
    """Whether the closed triangles ``ta`` and ``tb`` may share a point
    outside both slices' open collision disks (their corner disks of radii
    ``ra``, ``rb``).  Only a provably covered contact is rejected."""
    scale = tol * max(1.0, float(np.abs(ta).max()), float(np.abs(tb).max()))
    poly = _clip([tuple(p) for p in ta.tolist()], tb, scale)
    if not poly:
        return True
    centers = np.concatenate([ta, tb]).tolist()
    radii = [r - scale for r in np.concatenate([ra, rb]).tolist()]
    keep = [k for k, r in enumerate(radii) if r > 0]
    if not keep:
        return True
    return not _covered(poly, [centers[k] for k in keep], [radii[k] for k in keep])


def _cell_entries(lo, hi, cell):
    ix0 = np.floor(lo[:, 0] / cell).astype(np.int64)
    iy0 = np.floor(lo[:, 1] / cell).astype(np.int64)
    ix1 = np.floor(hi[:, 0] / cell).astype(np.int64)
    iy1 = np.floor(hi[:, 1] / cell).astype(np.int64)
    nx = ix1 - ix0 + 1
    ny = iy1 - iy0 + 1
    counts = nx * ny
    owner = np.repeat(np.arange(len(lo)), counts)
    start = np.repeat(np.cumsum(counts) - counts, counts)
    local = np.arange(counts.sum()) - start
    gx = ix0[owner] + local // ny[owner]
    gy = iy0[owner] + local % ny[owner]
    return owner, (gx << 32) ^ (gy & 0xFFFFFFFF)


def candidate_pairs(pa, pb):
    """Triangle pairs sharing a cell of a uniform grid over their bounding
    boxes; cell size is the median triangle extent."""
    if len(pa) == 0 or len(pb) == 0:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    lo_a, hi_a = pa.min(axis=1), pa.max(axis=1)
    lo_b, hi_b = pb.min(axis=1), pb.max(axis=1)
    ext = np.concatenate([(hi_a - lo_a).max(axis=1), (hi_b - lo_b).max(axis=1)])
    span = max(float(np.max(hi_a.max(axis=0) - lo_a.min(axis=0))),
               float(np.max(hi_b.max(axis=0) - lo_b.min(axis=0))), TOL)
    cell = max(float(np.median(ext)), span / 4096.0, TOL)
    pad = TOL * max(1.0, float(np.abs(pa).max()), float(np.abs(pb).max()))
    own_a, key_a = _cell_entries(lo_a - pad, hi_a + pad, cell)
    own_b, key_b = _cell_entries(lo_b - pad, hi_b + pad, cell)
    order = np.argsort(key_a, kind="stable")
    key_a, own_a = key_a[order], own_a[order]
    left = np.searchsorted(key_a, key_b, side="left")
    right = np.searchsorted(key_a, key_b, side="right")
    n = right - left
    ib = np.repeat(own_b, n)
    start = np.repeat(left, n)
    local = np.arange(n.sum()) - np.repeat(np.cumsum(n) - n, n)
    ia = own_a[start + local]
    combo = np.unique(ia.astype(np.int64) * len(pb) + ib)
    ia, ib = combo // len(pb), combo % len(pb)
    # bounding boxes must overlap (closed)
    ok = np.all((lo_a[ia] <= hi_b[ib] + pad) & (lo_b[ib] <= hi_a[ia] + pad), axis=1)
    return ia[ok], ib[ok]


def triangles_intersect(ta, tb):
    """Closed triangle-triangle overlap by separating axes, vectorized over
    pairs ``ta[k], tb[k]`` (each ``(P, 3, 2)``).  Touching counts."""
    hit = np.ones(len(ta), dtype=bool)
    scale = TOL * max(1.0, float(np.abs(ta).max(initial=0)), float(np.abs(tb).max(initial=0)))
    for tri in (ta, tb):
        for k in range(3):
            d = tri[:, (k + 1) % 3] - tri[:, k]
            n = np.stack([-d[:, 1], d[:, 0]], axis=1)
            pa = np.einsum("pvi,pi->pv", ta, n)
            pb = np.einsum("pvi,pi->pv", tb, n)
            slack = scale * np.hypot(n[:, 0], n[:, 1])
            apart = (pa.max(axis=1) < pb.min(axis=1) - slack) | (pb.max(axis=1) < pa.min(axis=1) - slack)
            hit &= ~apart
    return hit


def _cross(u, v):
    return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]


def _inside(pts, tri, slack):
    """Closed containment of ``pts`` ``(P, k, 2)`` in ``tri`` ``(P, 3, 2)``
    of either orientation."""
    sign = np.sign(_cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0]))[:, None]
    ok = np.ones(pts.shape[:2], dtype=bool)
    for k in range(3):
        a, b = tri[:, k], tri[:, (k + 1) % 3]
        d = b - a
        side = sign * _cross(d[:, None, :], pts - a[:, None, :])
        ok &= side >= -slack * np.hypot(d[:, 0], d[:, 1])[:, None]
    return ok


def screen_contacts(ta, tb, ra, rb):
    """Vectorized first pass over touching triangle pairs.

    Returns 1 where the contact certainly has a point outside all corner
    disks, 0 where it certainly lies inside one corner disk, -1 otherwise.
    The contact polygon's corners are among the triangle corners lying in
    the other triangle and the edge-edge crossings.
    """
    P = len(ta)
    slack = TOL * max(1.0, float(np.abs(ta).max(initial=0)), float(np.abs(tb).max(initial=0)))
    cand = [ta, tb]
    valid = [_inside(ta, tb, slack), _inside(tb, ta, slack)]
    for i in range(3):
        p, r = ta[:, i], ta[:, (i + 1) % 3] - ta[:, i]
        for j in range(3):
            q, sv = tb[:, j], tb[:, (j + 1) % 3] - tb[:, j]
            den = _cross(r, sv)
            qp = q - p
            with np.errstate(divide="ignore", invalid="ignore"):
                t = _cross(qp, sv) / den
                u = _cross(qp, r) / den
            eps = 1e-12
            ok = (np.abs(den) > 0) & (t >= -eps) & (t <= 1 + eps) & (u >= -eps) & (u <= 1 + eps)
            cand.append((p + np.where(ok, t, 0.0)[:, None] * r)[:, None, :])
            valid.append(ok[:, None])
    mask = np.concatenate(valid, axis=1)
    pts = np.where(mask[..., None], np.concatenate(cand, axis=1), 0.0)
    count = mask.sum(axis=1)
    centers = np.concatenate([ta, tb], axis=1)
    radii = np.concatenate([ra, rb], axis=1) - slack
    radii2 = np.where(radii > 0, radii * radii, -1.0)
    g = pts.sum(axis=1) / np.maximum(count, 1)[:, None]
    # witnesses: the centroid, the corners and the midpoints between them
    probe = np.concatenate([g[:, None, :], pts, 0.5 * (pts + g[:, None, :])], axis=1)
    pmask = np.concatenate([count[:, None] > 0, mask, mask], axis=1)
    dq = np.sum((probe[:, None, :, :] - centers[:, :, None, :]) ** 2, axis=3)
    outside = ~np.any(dq < radii2[:, :, None], axis=1) & pmask
    free = np.any(outside, axis=1)
    dp = dq[:, :, 1:1 + pts.shape[1]]
    inside_all = np.all((dp < radii2[:, :, None]) | ~mask[:, None, :], axis=2)
    covered = (count > 0) & np.any(inside_all, axis=1)
    out = np.full(P, -1, dtype=np.int8)
    out[covered] = 0
    out[free] = 1
    # orientation tests say nothing about flat triangles
    flat = np.zeros(P, dtype=bool)
    for tri in (ta, tb):
        d1, d2 = tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0]
        size = np.maximum(np.sum(d1 * d1, axis=1), np.sum(d2 * d2, axis=1))
        flat |= np.abs(_cross(d1, d2)) <= 1e-12 * np.maximum(size, TOL)
    out[flat] = -1
    return out


def _overhang(sl: SliceApprox, pts):
    """How far the points stick out of the convex hull of ``sl``, plus a
    small margin so contact on the hull boundary is still seen."""
    dt = sl.dt
    a = dt.sites[dt.hull_directed[:, 0]]
    b = dt.sites[dt.hull_directed[:, 1]]
    d = b - a
    n = np.stack([d[:, 1], -d[:, 0]], axis=1)
    n /= np.hypot(n[:, 0], n[:, 1])[:, None]
    q = np.unique(pts.reshape(-1, 2), axis=0)
    out = float(np.max(q @ n.T - np.sum(a * n, axis=1)[None, :], initial=0.0))
    span = float(np.ptp(dt.sites, axis=0).max())
    return max(out, 0.0) + 1e-6 * max(1.0, span)


def slice_pair_edges(a: SliceApprox, b: SliceApprox):
    """Component pairs ``(ca, cb)`` joined between adjacent slices.

    The unbounded components always meet.  Otherwise two components are
    joined when some exterior triangle of one touches an exterior triangle
    of the other (the plane outside a convex hull counts as exterior
    triangles of component 0), unless the touching part provably lies
    inside the collision disks of either slice.
    """
    found = {(0, 0)}
    ca, pa, ra = _exterior(a)
    cb, pb, rb = _exterior(b)
    if not (ca > 0).any() and not (cb > 0).any():
        return found
    # a degenerate slice has no triangles: everything there is unbounded
    if b.dt is None:
        found |= {(int(c), 0) for c in np.unique(ca[ca > 0])}
    if a.dt is None:
        found |= {(0, int(c)) for c in np.unique(cb[cb > 0])}
    if a.dt is not None and (cb > 0).any():
        ca, pa, ra = _with_outside(ca, pa, ra, a, _overhang(a, pb[cb > 0]))
    if b.dt is not None and (ca > 0).any():
        cb, pb, rb = _with_outside(cb, pb, rb, b, _overhang(b, pa[ca > 0]))
    ia, ib = candidate_pairs(pa, pb)
    keep = (ca[ia] > 0) | (cb[ib] > 0)
    ia, ib = ia[keep], ib[keep]
    if not len(ia):
        return found
    m = max(int(ca.max(initial=0)), int(cb.max(initial=0))) + 1
    pair_key = ca[ia] * m + cb[ib]
    step = 200_000
    for s in range(0, len(ia), step):
        sa, sb, sk = ia[s:s + step], ib[s:s + step], pair_key[s:s + step]
        hit = triangles_intersect(pa[sa], pb[sb])
        sa, sb, sk = sa[hit], sb[hit], sk[hit]
        state = screen_contacts(pa[sa], pb[sb], ra[sa], rb[sb])
        for key in np.unique(sk[state == 1]):
            found.add((int(key // m), int(key % m)))
        rest = state < 0
        sa, sb, sk = sa[rest], sb[rest], sk[rest]
        order = np.argsort(sk, kind="stable")
        for x, y, key in zip(sa[order], sb[order], sk[order]):
            pair = (int(key // m), int(key % m))
            if pair in found:
                continue
            if contact_is_free(pa[x], pb[y], ra[x], rb[y]):
                found.add(pair)
    return found


def build_graph(slices, partition: So2Partition, threads: int = 1) -> ConnectivityGraph:
    slices = tuple(slices)
    s = len(slices)
    if s != partition.slices:
        raise ValueError("slice list does not match the partition")
    offsets = [0]
    for sl in slices:
        offsets.append(offsets[-1] + sl.n_components)
    pairs = adjacent_pairs(s)

    def work(pair):
        i, j = pair
        return [(offsets[i] + x, offsets[j] + y) for x, y in slice_pair_edges(slices[i], slices[j])]

    workers = worker_count(threads)
    if workers > 1 and len(pairs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(work, pairs))
    else:
        chunks = [work(p) for p in pairs]
    edges = sorted({e for chunk in chunks for e in chunk})

    uf = UnionFind(offsets[-1])
    for u, v in edges:
        uf.union(u, v)
    roots = [uf.find(v) for v in range(offsets[-1])]
    canon = {roots[0]: 0}
    for r in roots:
        if r not in canon:
            canon[r] = len(canon)
    labels = tuple(canon[r] for r in roots)
    return ConnectivityGraph(slices, partition, tuple(offsets), tuple(edges), labels, len(canon))


def locate(c: Configuration, slices, partition: So2Partition):
    """Graph vertex holding ``c``, or ``Verdict.IN_COLLISION``."""
    i = partition.index_of(c.theta)
    sl = slices[i]
    if sl.union is not None and signed_distance(Point(c.x, c.y), sl.union) <= 0.0:
        return Verdict.IN_COLLISION
    if sl.dt is None:
        return Vertex(i, 0)
    tris = sl.dt.locate((c.x, c.y))
    if len(tris) == 0:
        return Vertex(i, 0)
    labs = sl.decomposition.labels[tris]
    labs = labs[labs >= 0]
    if len(labs) == 0:
        return Verdict.IN_COLLISION
    return Vertex(i, int(labs.min()))


@dataclass(frozen=True)
class QueryResult:
    verdict: Verdict
    vertices: tuple = ()
    components: tuple = ()

    def to_json(self):
        return {
            "verdict": self.verdict.value,
            "guaranteed": self.verdict.guaranteed,
            "witnesses": [
                None if v is None else {"slice": v.slice, "component": v.component,
                                        "graph_component": g}
                for v, g in zip(self.vertices, self.components)
            ],
        }


def _locate_all(cs, graph):
    out = []
    for c in cs:
        v = locate(c, graph.slices, graph.partition)
        out.append(None if v is Verdict.IN_COLLISION else v)
    return out


def query_path(c1: Configuration, c2: Configuration, graph: ConnectivityGraph) -> QueryResult:
    v1, v2 = _locate_all((c1, c2), graph)
    comps = tuple(None if v is None else graph.component_of(v) for v in (v1, v2))
    if v1 is None or v2 is None:
        return QueryResult(Verdict.IN_COLLISION, (v1, v2), comps)
    if comps[0] != comps[1]:
        return QueryResult(Verdict.PROVEN_DISCONNECTED, (v1, v2), comps)
    return QueryResult(Verdict.POSSIBLY_CONNECTED, (v1, v2), comps)


def query_caged(c: Configuration, graph: ConnectivityGraph) -> QueryResult:
    (v,) = _locate_all((c,), graph)
    if v is None:
        return QueryResult(Verdict.IN_COLLISION, (None,), (None,))
    comp = graph.component_of(v)
    verdict = Verdict.NOT_PROVEN_CAGED if graph.is_infinite(comp) else Verdict.PROVEN_CAGED
    return QueryResult(verdict, (v,), (comp,))
