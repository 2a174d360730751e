"""Built-in scenes: caging rings, a gated chamber, multi-room workspaces,
random desk clutter and a timing workload.

Each builder returns an :class:`Instance` carrying the scene, the obstacle
ball radius to approximate its polygons with (``None`` for disk-only
scenes) and named probe configurations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geom import Configuration, DiskUnion, Polygon
from .scenefile import SceneFile


@dataclass(frozen=True)
class Instance:
    name: str
    scene: SceneFile
    ball_radius: float | None = None
    probes: dict = field(default_factory=dict)
    notes: str = ""

    def obstacles(self):
        return self.scene.obstacles(self.ball_radius)

    def object(self):
        return self.scene.object()


def _rect(x0, y0, x1, y1):
    return Polygon(((x0, y0), (x1, y0), (x1, y1), (x0, y1)))


def _circle(n, radius, center=(0.0, 0.0), start=0.0):
    a = start + 2.0 * math.pi * np.arange(n) / n
    return np.column_stack([center[0] + radius * np.cos(a), center[1] + radius * np.sin(a)])


def ring(n=8, ring_radius=2.5, R=0.7, r=0.5, missing=()) -> Instance:
    """``n`` obstacle disks on a circle around a single-disk object.

    With the defaults neighbouring disks overlap, so the object is caged;
    dropping one disk leaves a gate much wider than the object.
    """
    centers = np.delete(_circle(n, ring_radius), list(missing), axis=0)
    scene = SceneFile(obstacle_disks=DiskUnion(centers, R),
                      object_disks=DiskUnion([(0.0, 0.0)], r))
    probes = {"inside": Configuration(0.0, 0.0, 1.0),
              "outside": Configuration(ring_radius + R + 2.0 * r + 0.7, 0.0, 2.0),
              "collision": Configuration(ring_radius, 0.0, 0.0)}
    name = "ring" if not missing else f"ring-minus-{len(missing)}"
    return Instance(name, scene, None, probes)


# chamber ring through the two gate disks, centred on the far side
CORRIDOR_GATE = ((0.0, 0.0), (0.0, 6.0))


def gated_chamber(R=1.0, r=0.5, spacing=1.8) -> Instance:
    """A round chamber whose only exit is the gap between disks at
    ``(0, 0)`` and ``(0, 6)``.

    The rest of the wall is a chain of disks with chords of at most
    ``spacing``, so the object can only leave through the gate, which stays
    open while ``R + r + delta - eps < 3``.
    """
    (gx, g0), (_, g1) = CORRIDOR_GATE
    cy = 0.5 * (g0 + g1)
    cx = gx - 8.0
    rad = math.hypot(gx - cx, g0 - cy)
    a_top = math.atan2(g1 - cy, gx - cx)
    a_bot = math.atan2(g0 - cy, gx - cx) + 2.0 * math.pi
    arc = a_bot - a_top
    n = math.ceil(arc * rad / spacing)
    ang = a_top + arc * np.arange(n + 1) / n
    centers = np.column_stack([cx + rad * np.cos(ang), cy + rad * np.sin(ang)])
    centers[0] = (gx, g1)
    centers[-1] = (gx, g0)
    scene = SceneFile(obstacle_disks=DiskUnion(centers, R),
                      object_disks=DiskUnion([(cx, cy)], r))
    probes = {"inside": Configuration(cx, cy, 0.0),
              "outside": Configuration(gx + 5.0, cy, 0.0)}
    return Instance("gated-chamber", scene, None, probes,
                    notes="critical delta = (gap / 2) - (R + r - eps)")


def corridor_critical_delta(R, r, eps, gap=6.0):
    return gap / 2.0 - (R + r - eps)


# three rooms in a row inside a thick frame; the two inner walls narrow to
# necks that only fine enough balls can fill
CHAMBER_RADII = (15.0, 10.0, 4.0)


def multi_chamber(thickness=32.0, room=60.0, necks=(24.0, 12.0), neck_span=(15.0, 45.0),
                  r=6.0) -> Instance:
    """Frame plus two walls whose necks are ``necks`` thick.

    A wall is captured by balls of radius ``R`` only where it is at least
    ``2 R`` thick, so the necks open as gates for coarse balls: the
    component count grows as the ball radius shrinks past each neck.
    """
    T, W, H = thickness, room, room
    X = 3 * W + 2 * T
    polys = [_rect(-T, -T, X + T, 0.0), _rect(-T, H, X + T, H + T),
             _rect(-T, -T / 2, 0.0, H + T / 2), _rect(X, -T / 2, X + T, H + T / 2)]
    lo, hi = neck_span
    for k, neck in enumerate(necks):
        x0 = (k + 1) * W + k * T
        x1 = x0 + T
        a = (T - neck) / 2.0
        polys.append(Polygon((
            (x0, -T / 2), (x1, -T / 2), (x1, lo), (x1 - a, lo), (x1 - a, hi), (x1, hi),
            (x1, H + T / 2), (x0, H + T / 2), (x0, hi), (x0 + a, hi), (x0 + a, lo), (x0, lo))))
    y = H / 2.0
    body = DiskUnion([(W / 2 - r, y), (W / 2, y), (W / 2 + r, y)], r)
    scene = SceneFile(obstacle_polygons=tuple(polys), object_disks=body, units="mm")
    probes = {f"room{k}": Configuration(W / 2 + k * (W + T), y, 0.0) for k in range(3)}
    probes["outside"] = Configuration(X + 2 * T, y, 0.0)
    return Instance("multi-chamber", scene, CHAMBER_RADII[-1], probes)


def two_rooms(room=16.0, thickness=2.0, gate=0.5, R=0.5, r=1.0) -> Instance:
    """Two square rooms joined by a gate narrower than the object, filled
    with fine balls; the object is a three-ball bar."""
    W, t = room, thickness
    X = 2 * W + t
    polys = (_rect(-t, -t, X + t, 0.0), _rect(-t, W, X + t, W + t),
             _rect(-t, 0.0, 0.0, W), _rect(X, 0.0, X + t, W),
             _rect(W, 0.0, W + t, (W - gate) / 2), _rect(W, (W + gate) / 2, W + t, W))
    c = W / 2
    body = DiskUnion([(c - r, c), (c, c), (c + r, c)], r)
    scene = SceneFile(obstacle_polygons=polys, object_disks=body)
    probes = {"left": Configuration(c, c, 0.0), "right": Configuration(c + W + t, c, 0.0)}
    return Instance("two-rooms", scene, R, probes)


def _object_shape(rng, k, r):
    if k == 1:
        return np.zeros((1, 2))
    if k == 2:
        return np.array([[0.0, 0.0], [rng.uniform(0.8, 1.6) * r, 0.0]])
    a, b = rng.uniform(0.8, 1.6, size=2) * r
    turn = rng.uniform(math.pi / 3, math.pi)
    return np.array([[0.0, 0.0], [a, 0.0], [a + b * math.cos(turn), b * math.sin(turn)]])


def random_desk(rng: np.random.Generator, index: int = 0) -> Instance:
    """Up to 15 obstacle disks around up to 3 object disks.

    Obstacles form a jittered ring around the object, sometimes with a
    gap, and a few stray disks outside it.
    """
    r = float(rng.uniform(0.4, 0.6))
    R = float(rng.uniform(0.5, 0.9))
    k = int(rng.integers(1, 4))
    shape = _object_shape(rng, k, r)
    shape -= shape.mean(axis=0)
    extent = float(np.hypot(shape[:, 0], shape[:, 1]).max()) + r
    n_ring = int(rng.integers(8, 13))
    ring_radius = extent + R + float(rng.uniform(0.6, 2.5))
    # chords up to a little over 2 (R + r) leave some gates passable
    chord = 2.0 * ring_radius * math.sin(math.pi / n_ring)
    if chord > 2.0 * (R + r) * 1.3:
        ring_radius = 2.0 * (R + r) * 1.3 / (2.0 * math.sin(math.pi / n_ring))
        ring_radius = max(ring_radius, extent + R + 0.3)
    pts = _circle(n_ring, ring_radius, start=float(rng.uniform(0, 2 * math.pi)))
    pts += rng.normal(scale=0.08 * R, size=pts.shape)
    if rng.random() < 0.35:
        pts = np.delete(pts, int(rng.integers(n_ring)), axis=0)
    n_extra = int(rng.integers(0, 16 - len(pts)))
    extra = []
    while len(extra) < n_extra:
        a = rng.uniform(0, 2 * math.pi)
        d = ring_radius + rng.uniform(2.0 * R + 2.0 * r, 3.0 * ring_radius)
        extra.append((d * math.cos(a), d * math.sin(a)))
    if extra:
        pts = np.vstack([pts, extra])
    theta0 = float(rng.uniform(0, 2 * math.pi))
    c, s = math.cos(theta0), math.sin(theta0)
    body = shape @ np.array([[c, -s], [s, c]]).T
    scene = SceneFile(obstacle_disks=DiskUnion(pts, R), object_disks=DiskUnion(body, r))
    far = ring_radius * 4.0 + 4.0 * (R + r)
    probes = {"inside": Configuration(0.0, 0.0, 0.0),
              "outside": Configuration(far, 0.0, 0.0)}
    return Instance(f"desk-{index}", scene, None, probes)


def tight_cages(r=0.5) -> list[Instance]:
    """Five caged objects whose cage gaps are narrower than one object ball
    but wider than its epsilon-core at ``eps = 0.3 r``.

    The core slips through, so plain path queries stay inconclusive; an
    inflation by ``delta = 2 eps`` closes every gap.
    """
    out = []
    shapes = [
        ("disk", np.zeros((1, 2)), 8, 0.6),
        ("pair", np.array([[-0.4, 0.0], [0.4, 0.0]]), 12, 0.7),
        ("bar", np.array([[-0.6, 0.0], [0.0, 0.0], [0.6, 0.0]]), 14, 0.6),
        ("triangle", np.array([[0.0, 0.45], [-0.4, -0.25], [0.4, -0.25]]), 12, 0.8),
        ("elbow", np.array([[-0.5, 0.0], [0.0, 0.0], [0.0, 0.5]]), 14, 0.7),
    ]
    for name, shape, n, R in shapes:
        shape = shape - shape.mean(axis=0)
        # gap between neighbouring disks: 2 r - 0.3 r, i.e. truly closed
        gap = 1.7 * r
        ring_radius = (2.0 * R + gap) / (2.0 * math.sin(math.pi / n))
        scene = SceneFile(obstacle_disks=DiskUnion(_circle(n, ring_radius), R),
                          object_disks=DiskUnion(shape, r))
        probes = {"inside": Configuration(0.0, 0.0, 0.0),
                  "outside": Configuration(ring_radius + 2.0 * R + 4.0 * r, 0.0, 0.0)}
        out.append(Instance(f"tight-{name}", scene, None, probes))
    return out


PERF_OBSTACLES = 681


def timing_workload(seed=7) -> Instance:
    """Exactly 681 obstacle balls (a walled desk with clutter) and a
    five-ball object."""
    R = 0.5
    rng = np.random.default_rng(seed)
    step = 0.8
    w, h = 40.0, 28.0
    xs = np.arange(0.0, w + 1e-9, step)
    ys = np.arange(step, h - 1e-9 + step / 2, step)
    walls = np.vstack([np.column_stack([xs, np.zeros_like(xs)]),
                       np.column_stack([xs, np.full_like(xs, h)]),
                       np.column_stack([np.zeros_like(ys[:-1]), ys[:-1]]),
                       np.column_stack([np.full_like(ys[:-1], w), ys[:-1]])])
    inner = np.column_stack([np.full(20, 20.0), 2.0 + step * np.arange(20)])
    pts = np.vstack([walls, inner])
    clutter = []
    while len(pts) + len(clutter) < PERF_OBSTACLES:
        p = rng.uniform((2.0, 2.0), (w - 2.0, h - 2.0))
        clutter.append(p)
    pts = np.vstack([pts, clutter])[:PERF_OBSTACLES]
    body = DiskUnion([(5.0, 5.0), (5.6, 5.0), (6.2, 5.0), (5.6, 5.6), (5.6, 4.4)], R)
    scene = SceneFile(obstacle_disks=DiskUnion(pts, R), object_disks=body)
    return Instance("timing", scene, None, {"start": Configuration(5.6, 5.0, 0.0)})


BUILTIN = {
    "ring": ring,
    "ring-gap": lambda: ring(missing=(0,)),
    "gated-chamber": gated_chamber,
    "multi-chamber": multi_chamber,
    "two-rooms": two_rooms,
    "timing": timing_workload,
}
