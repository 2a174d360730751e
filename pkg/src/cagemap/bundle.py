"""Analysis bundles: a JSON record of one build.

A bundle stores the build inputs (obstacle balls, object balls, epsilon,
delta, partition) next to summaries of what was built.  Loading a bundle
rebuilds the map from the stored inputs; the build is deterministic, so
queries against a reloaded bundle give the same answers as the original.

Timings vary from run to run, so they live in a sidecar file
``<bundle>.timing.json`` and the bundle itself stays byte-identical.
"""

from __future__ import annotations

import json
import re
from pathlib import Path

import numpy as np

from .errors import InputError
from .geom import DiskUnion, Point, RigidObject
from .metrics import volume_report
from .pipeline import FreeSpaceMap, build_map
from .slicing import So2Partition

FORMAT = "cagemap-bundle"
VERSION = 1


def _slice_summary(sl):
    out = {
        "index": sl.index,
        "interval": list(sl.interval),
        "collision_radius": None if sl.union is None else sl.union.common_radius,
        "disks": 0 if sl.union is None else len(sl.union),
        "degenerate": sl.dt is None,
        "triangles": 0 if sl.dt is None else sl.dt.n_triangles,
        "complex_edges": 0 if sl.dt is None else int(sl.complex.edge_member.sum()),
        "complex_triangles": 0 if sl.dt is None else int(sl.complex.tri_member.sum()),
        "bounded_components": sl.n_bounded,
        "component_areas": [sl.component_area(k) for k in range(1, sl.n_components)],
    }
    return out


def bundle_data(fsm: FreeSpaceMap, safety: float = 0.999, units: str = "") -> dict:
    g = fsm.graph
    obs = fsm.obstacles
    return {
        "format": FORMAT,
        "version": VERSION,
        "units": units,
        "obstacles": None if obs is None else {"radius": obs.common_radius,
                                               "centers": obs.centers.tolist()},
        "object": {"radius": fsm.obj.radius,
                   "offsets": fsm.obj.offsets.tolist(),
                   "reference": [fsm.obj.reference.x, fsm.obj.reference.y]},
        "epsilon": fsm.epsilon,
        "delta": fsm.delta,
        "safety": safety,
        "partition": {"slices": fsm.partition.slices, "width": fsm.partition.width},
        "slices": [_slice_summary(sl) for sl in fsm.slices],
        "graph": {
            "vertices": g.n_vertices,
            "offsets": list(g.offsets),
            "edges": [list(e) for e in g.edges],
            "labels": list(g.labels),
            "components": g.n_components,
        },
        "volumes": [v.to_json() for v in volume_report(g)],
    }


# innermost arrays of plain numbers go on one line
_FLAT = re.compile(r"\[\n\s*([^\[\]{}\"]*?)\n\s*\]")


def _flatten(match):
    return "[" + ", ".join(part.strip() for part in match.group(1).split(",")) + "]"


def dumps_bundle(fsm: FreeSpaceMap, safety: float = 0.999, units: str = "") -> str:
    text = json.dumps(bundle_data(fsm, safety, units), indent=1, allow_nan=False)
    return _FLAT.sub(_flatten, text) + "\n"


def timing_path(path) -> Path:
    p = Path(path)
    return p.with_name(p.name + ".timing.json")


def save_bundle(fsm: FreeSpaceMap, path, safety: float = 0.999, units: str = "",
                wall: float | None = None) -> None:
    Path(path).write_text(dumps_bundle(fsm, safety, units))
    timing = {k: float(v) for k, v in sorted(fsm.timings.items())}
    if wall is not None:
        timing["wall"] = float(wall)
    timing_path(path).write_text(json.dumps(timing, indent=1) + "\n")


def _require(data, key, where="bundle"):
    if key not in data:
        raise InputError(f"{where}: missing field {key!r}")
    return data[key]


def map_from_bundle(data: dict, threads: int = 1) -> FreeSpaceMap:
    """Rebuild the map a bundle was written from and check it matches."""
    if not isinstance(data, dict) or data.get("format") != FORMAT:
        raise InputError("not a cagemap bundle")
    if data.get("version") != VERSION:
        raise InputError(f"unsupported bundle version {data.get('version')!r}")
    try:
        o = _require(data, "obstacles")
        obstacles = None if o is None else DiskUnion(o["centers"], o["radius"])
        ob = _require(data, "object")
        ref = ob["reference"]
        obj = RigidObject(DiskUnion(ob["offsets"], ob["radius"]), Point(ref[0], ref[1]))
        part = So2Partition(int(_require(data, "partition")["slices"]))
        fsm = build_map(obstacles, obj, float(_require(data, "epsilon")),
                        delta=float(_require(data, "delta")), threads=threads,
                        safety=float(data.get("safety", 0.999)), partition=part)
    except (KeyError, TypeError, IndexError) as exc:
        raise InputError(f"bundle: malformed field ({exc})") from None
    graph = _require(data, "graph")
    if (graph.get("components") != fsm.graph.n_components
            or graph.get("labels") != list(fsm.graph.labels)):
        raise InputError("bundle: rebuilt graph does not match the stored one")
    return fsm


def load_bundle(path, threads: int = 1):
    """Return ``(map, data)`` for a bundle file."""
    p = Path(path)
    try:
        data = json.loads(p.read_text())
    except OSError as exc:
        raise InputError(f"cannot read bundle {p}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{p}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return map_from_bundle(data, threads), data


def slice_table(fsm: FreeSpaceMap):
    """Per-slice rows: index, start angle, triangles, bounded components, free area."""
    rows = []
    for sl in fsm.slices:
        areas = [sl.component_area(k) for k in range(1, sl.n_components)]
        rows.append((sl.index, sl.interval[0], 0 if sl.dt is None else sl.dt.n_triangles,
                     sl.n_bounded, float(np.sum(areas)) if areas else 0.0))
    return rows
