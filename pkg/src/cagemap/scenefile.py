"""Scene and run-configuration files.

A scene is JSON::

    {
      "units": "cm",
      "obstacles": {
        "polygons": [[[x, y], ...], ...],
        "disks": {"radius": R, "centers": [[x, y], ...]}
      },
      "object": {"polygon": [[x, y], ...]}      # or {"disks": {...}}
    }

Obstacle polygons are filled with balls of the run's obstacle ball radius;
an object polygon with balls of the object ball radius.  Explicit disks
must already carry the matching radius.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path


from .errors import EmptyApproximation, InputError
from .geom import TOL, DiskUnion, Polygon, RigidObject, approximate_polygon, merge_unions


def _fail(where, message):
    raise InputError(f"{where}: {message}")


def _number(value, where):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(where, f"expected a number, got {json.dumps(value)}")
    if not math.isfinite(value):
        _fail(where, "must be finite")
    return float(value)


def _points(value, where, minimum):
    if not isinstance(value, list):
        _fail(where, "expected a list of [x, y] pairs")
    pts = []
    for k, p in enumerate(value):
        if not (isinstance(p, list) and len(p) == 2):
            _fail(f"{where}[{k}]", "expected an [x, y] pair")
        pts.append((_number(p[0], f"{where}[{k}][0]"), _number(p[1], f"{where}[{k}][1]")))
    if len(pts) < minimum:
        _fail(where, f"needs at least {minimum} points, got {len(pts)}")
    return pts


def _polygon(value, where):
    try:
        return Polygon(tuple(_points(value, where, 3)))
    except InputError as exc:
        if str(exc).startswith(where):
            raise
        _fail(where, str(exc))


def _disks(value, where):
    if not isinstance(value, dict):
        _fail(where, "expected an object with 'radius' and 'centers'")
    unknown = set(value) - {"radius", "centers"}
    if unknown:
        _fail(where, f"unknown field(s) {sorted(unknown)}")
    if "radius" not in value or "centers" not in value:
        _fail(where, "needs both 'radius' and 'centers'")
    radius = _number(value["radius"], f"{where}.radius")
    if radius <= 0:
        _fail(f"{where}.radius", "must be positive")
    centers = _points(value["centers"], f"{where}.centers", 1)
    return DiskUnion(centers, radius)


@dataclass(frozen=True, eq=False)
class SceneFile:
    obstacle_polygons: tuple = ()
    obstacle_disks: DiskUnion | None = None
    object_polygon: Polygon | None = None
    object_disks: DiskUnion | None = None
    units: str = ""

    def __post_init__(self):
        if (self.object_polygon is None) == (self.object_disks is None):
            raise InputError("scene needs exactly one object (polygon or disks)")

    @property
    def has_obstacles(self) -> bool:
        return bool(self.obstacle_polygons) or self.obstacle_disks is not None

    def obstacles(self, ball_radius: float | None = None) -> DiskUnion | None:
        """Obstacle balls, or ``None`` for an empty workspace."""
        parts = []
        if self.obstacle_disks is not None:
            R = self.obstacle_disks.common_radius
            if ball_radius is not None and abs(ball_radius - R) > TOL:
                raise InputError(
                    f"obstacle disks have radius {R} but the ball radius is {ball_radius}")
            parts.append(self.obstacle_disks)
        if self.obstacle_polygons:
            if ball_radius is None:
                if self.obstacle_disks is None:
                    raise InputError("obstacle polygons need a ball radius")
                ball_radius = self.obstacle_disks.common_radius
            for k, poly in enumerate(self.obstacle_polygons):
                try:
                    parts.append(approximate_polygon(poly, ball_radius))
                except EmptyApproximation as exc:
                    raise EmptyApproximation(
                        f"obstacles.polygons[{k}]: {exc} "
                        f"(vertices {[[p.x, p.y] for p in poly.vertices]})",
                        polygon=poly) from None
        return merge_unions(parts) if parts else None

    def object(self, ball_radius: float | None = None) -> RigidObject:
        if self.object_disks is not None:
            r = self.object_disks.common_radius
            if ball_radius is not None and abs(ball_radius - r) > TOL:
                raise InputError(
                    f"object disks have radius {r} but the object ball radius is {ball_radius}")
            return RigidObject.from_world(self.object_disks)
        if ball_radius is None:
            raise InputError("an object polygon needs an object ball radius")
        try:
            body = approximate_polygon(self.object_polygon, ball_radius)
        except EmptyApproximation as exc:
            raise EmptyApproximation(f"object.polygon: {exc}", polygon=self.object_polygon) from None
        return RigidObject.from_world(body)

    def to_json(self):
        obstacles = {}
        if self.obstacle_polygons:
            obstacles["polygons"] = [p.as_array().tolist() for p in self.obstacle_polygons]
        if self.obstacle_disks is not None:
            obstacles["disks"] = _disks_json(self.obstacle_disks)
        if self.object_polygon is not None:
            obj = {"polygon": self.object_polygon.as_array().tolist()}
        else:
            obj = {"disks": _disks_json(self.object_disks)}
        out = {"obstacles": obstacles, "object": obj}
        if self.units:
            out = {"units": self.units, **out}
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2) + "\n"

    def save(self, path):
        Path(path).write_text(self.dumps())


def _disks_json(u: DiskUnion):
    return {"radius": u.common_radius, "centers": u.centers.tolist()}


def scene_from_json(data) -> SceneFile:
    if not isinstance(data, dict):
        _fail("scene", "top level must be an object")
    unknown = set(data) - {"units", "obstacles", "object"}
    if unknown:
        _fail("scene", f"unknown field(s) {sorted(unknown)}")
    units = data.get("units", "")
    if not isinstance(units, str):
        _fail("units", "expected a string")

    obs = data.get("obstacles", {})
    if not isinstance(obs, dict):
        _fail("obstacles", "expected an object")
    unknown = set(obs) - {"polygons", "disks"}
    if unknown:
        _fail("obstacles", f"unknown field(s) {sorted(unknown)}")
    polys = obs.get("polygons", [])
    if not isinstance(polys, list):
        _fail("obstacles.polygons", "expected a list of polygons")
    polygons = tuple(_polygon(p, f"obstacles.polygons[{k}]") for k, p in enumerate(polys))
    disks = _disks(obs["disks"], "obstacles.disks") if "disks" in obs else None

    if "object" not in data:
        _fail("object", "missing")
    obj = data["object"]
    if not isinstance(obj, dict) or len(obj) != 1 or not ({"polygon", "disks"} & set(obj)):
        _fail("object", "expected exactly one of 'polygon' or 'disks'")
    if "polygon" in obj:
        return SceneFile(polygons, disks, _polygon(obj["polygon"], "object.polygon"), None, units)
    return SceneFile(polygons, disks, None, _disks(obj["disks"], "object.disks"), units)


def loads_scene(text: str, source: str = "scene") -> SceneFile:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{source}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return scene_from_json(data)


def load_scene(path) -> SceneFile:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise InputError(f"cannot read scene {p}: {exc.strerror}") from None
    return loads_scene(text, str(p))


_FRACTION = re.compile(r"^\s*([0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)\s*r\s*$")


def parse_epsilon(text, r: float) -> float:
    """``"0.3r"`` means ``0.3 * r``; a bare number is absolute."""
    if isinstance(text, (int, float)) and not isinstance(text, bool):
        eps = float(text)
    else:
        m = _FRACTION.match(str(text))
        if m:
            eps = float(m.group(1)) * r
        else:
            try:
                eps = float(text)
            except ValueError:
                raise InputError(f"epsilon must be a number or a fraction like '0.3r', got {text!r}") from None
    if not (math.isfinite(eps) and 0 < eps < r):
        raise InputError(f"epsilon must satisfy 0 < epsilon < r={r}, got {eps}")
    return eps


@dataclass(frozen=True)
class RunConfig:
    ball_radius: float | None = None
    obj_ball_radius: float | None = None
    epsilon: str = "0.3r"
    delta: float = 0.0
    safety: float = 0.999
    threads: int = 1
    queries: tuple = field(default=())

    def __post_init__(self):
        for name in ("ball_radius", "obj_ball_radius"):
            v = getattr(self, name)
            if v is not None and not (math.isfinite(v) and v > 0):
                raise InputError(f"{name} must be positive, got {v}")
        if not (math.isfinite(self.delta) and self.delta >= 0):
            raise InputError(f"delta must be non-negative, got {self.delta}")
        if self.threads < 1:
            raise InputError("threads must be at least 1")
