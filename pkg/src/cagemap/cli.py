"""``cagemap`` command-line front end.

Results go to stdout as JSON (or to the file named with ``-o``).  Exit
codes: 0 success, 2 bad input, 3 a query outside its precondition.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from .bundle import load_bundle, save_bundle
from .errors import InputError, NoFiniteWidth, PreconditionError
from .figures import write_curve, write_report
from .geom import Configuration
from .metrics import delta_connected, passage_width, volume_report
from .oracle import GridSpec, oracle_connected, oracle_escapes, rasterize
from .pipeline import build_map
from .render import render_slice
from .scenefile import RunConfig, load_scene, parse_epsilon
from .scenes import BUILTIN

EXIT_INPUT = 2
EXIT_PRECONDITION = 3


def _emit(payload, out=None):
    text = json.dumps(payload, indent=2) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _config(path):
    if not path:
        return RunConfig()
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise InputError(f"{path}: top level must be an object")
    fields = set(RunConfig.__dataclass_fields__)
    unknown = set(data) - fields
    if unknown:
        raise InputError(f"{path}: unknown field(s) {sorted(unknown)}")
    if "queries" in data:
        data["queries"] = tuple(data["queries"])
    return RunConfig(**data)


def _pick(cli_value, config_value):
    return config_value if cli_value is None else cli_value


def cmd_build(args):
    cfg = _config(args.config)
    scene = load_scene(args.scene)
    R = _pick(args.ball_radius, cfg.ball_radius)
    r = _pick(args.obj_ball_radius, cfg.obj_ball_radius)
    threads = _pick(args.threads, cfg.threads)
    delta = _pick(args.delta, cfg.delta)
    safety = _pick(args.safety, cfg.safety)
    RunConfig(R, r, cfg.epsilon, delta, safety, threads)
    obstacles = scene.obstacles(R)
    obj = scene.object(r)
    eps = parse_epsilon(_pick(args.epsilon, cfg.epsilon), obj.radius)
    t0 = time.perf_counter()
    fsm = build_map(obstacles, obj, eps, delta=delta, threads=threads, safety=safety)
    wall = time.perf_counter() - t0
    save_bundle(fsm, args.output, safety, scene.units, wall)
    summary = {
        "bundle": str(args.output),
        "slices": fsm.partition.slices,
        "components": fsm.graph.n_components,
        "bounded_components": fsm.graph.n_components - 1,
        "epsilon": eps,
        "timing": {**fsm.timings, "wall": wall},
    }
    if cfg.queries:
        summary["queries"] = [_run_query(fsm, q) for q in cfg.queries]
    _emit(summary)
    return 0


def _run_query(fsm, q):
    if not isinstance(q, dict) or "kind" not in q:
        raise InputError(f"query must be an object with a 'kind', got {q!r}")
    if q["kind"] == "path":
        return fsm.query_path(Configuration.parse(q["from"]), Configuration.parse(q["to"])).to_json()
    if q["kind"] == "cage":
        return fsm.query_caged(Configuration.parse(q["at"])).to_json()
    raise InputError(f"unknown query kind {q['kind']!r}")


def _need(value, flag, kind):
    if value is None:
        raise InputError(f"--kind {kind} needs {flag}")
    return Configuration.parse(value)


def cmd_query(args):
    fsm, _ = load_bundle(args.bundle, args.threads)
    if args.kind == "cage":
        res = fsm.query_caged(_need(args.at, "--at", "cage"))
    elif args.kind == "path":
        res = fsm.query_path(_need(args.from_, "--from", "path"), _need(args.to, "--to", "path"))
    else:
        if args.delta is None or args.delta < 0:
            raise InputError("--kind delta needs a non-negative --delta")
        c1, c2 = _need(args.from_, "--from", "delta"), _need(args.to, "--to", "delta")
        res = delta_connected(c1, c2, args.delta, fsm.obstacles, fsm.obj,
                              fsm.epsilon, args.threads, fsm.partition)
    out = res.to_json()
    if args.kind == "delta":
        out["delta"] = args.delta
    _emit(out)
    return 0


def cmd_volumes(args):
    fsm, _ = load_bundle(args.bundle, args.threads)
    _emit({"volumes": [v.to_json() for v in volume_report(fsm.graph)]})
    return 0


def cmd_passages(args):
    fsm, _ = load_bundle(args.bundle, args.threads)
    c1 = _need(args.from_, "--from", "passages")
    c2 = _need(args.to, "--to", "passages")
    try:
        rep = passage_width(c1, c2, fsm, args.threads)
    except NoFiniteWidth as exc:
        _emit({"delta": None, "reason": "no_finite_width", "detail": str(exc)})
        return 0
    _emit(rep.to_json())
    return 0


def cmd_render(args):
    fsm, _ = load_bundle(args.bundle, args.threads)
    s = fsm.partition.slices
    if not 0 <= args.slice < s:
        raise InputError(f"slice index {args.slice} out of range [0, {s})")
    svg = render_slice(fsm.slices[args.slice], width=args.width)
    if args.output:
        Path(args.output).write_text(svg)
    else:
        sys.stdout.write(svg)
    return 0


def cmd_oracle(args):
    scene = load_scene(args.scene)
    obstacles = scene.obstacles(args.ball_radius)
    obj = scene.object(args.obj_ball_radius)
    h = args.resolution
    if not h > 0:
        raise InputError("--resolution must be positive")
    spec = GridSpec.around(obj, obstacles, h, args.ntheta, args.margin)
    grid = rasterize(obj, obstacles, spec)
    out = {"grid": [spec.nx, spec.ny, spec.ntheta], "components": grid.n_components}
    if args.at is not None:
        c = Configuration.parse(args.at)
        out["escapes"] = oracle_escapes(grid, c)
    if args.from_ is not None or args.to is not None:
        c1 = _need(args.from_, "--from", "oracle")
        c2 = _need(args.to, "--to", "oracle")
        out["connected"] = oracle_connected(grid, c1, c2)
    _emit(out)
    return 0


def cmd_report(args):
    fsm, _ = load_bundle(args.bundle, args.threads)
    paths = write_report(fsm, args.output)
    _emit({"files": [str(p) for p in paths]})
    return 0


def cmd_curve(args):
    eps = [float(e) for e in args.epsilons.split(",")] if args.epsilons else None
    paths = write_curve(args.output, args.diam, eps)
    _emit({"files": [str(p) for p in paths]})
    return 0


def cmd_scene(args):
    if args.name not in BUILTIN:
        raise InputError(f"unknown scene {args.name!r}; choose from {sorted(BUILTIN)}")
    inst = BUILTIN[args.name]()
    inst.scene.save(args.output)
    _emit({"scene": str(args.output), "ball_radius": inst.ball_radius,
           "probes": {k: [c.x, c.y, c.theta] for k, c in inst.probes.items()},
           "notes": inst.notes})
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="cagemap", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def bundle_cmd(name, help):
        sp = sub.add_parser(name, help=help)
        sp.add_argument("--bundle", required=True)
        sp.add_argument("--threads", type=int, default=1)
        return sp

    b = sub.add_parser("build", help="build a free-space map and write a bundle")
    b.add_argument("--scene", required=True)
    b.add_argument("--config", help="run configuration JSON; flags override it")
    b.add_argument("--ball-radius", type=float)
    b.add_argument("--obj-ball-radius", type=float)
    b.add_argument("--epsilon", help="absolute, or a fraction of r such as 0.3r")
    b.add_argument("--delta", type=float)
    b.add_argument("--safety", type=float)
    b.add_argument("--threads", type=int)
    b.add_argument("-o", "--output", required=True)
    b.set_defaults(func=cmd_build)

    q = bundle_cmd("query", "path, cage or delta query against a bundle")
    q.add_argument("--kind", choices=("path", "cage", "delta"), required=True)
    q.add_argument("--from", dest="from_")
    q.add_argument("--to")
    q.add_argument("--at")
    q.add_argument("--delta", type=float)
    q.set_defaults(func=cmd_query)

    bundle_cmd("volumes", "component volumes").set_defaults(func=cmd_volumes)

    pw = bundle_cmd("passages", "narrow-passage width between two configurations")
    pw.add_argument("--from", dest="from_", required=True)
    pw.add_argument("--to", required=True)
    pw.set_defaults(func=cmd_passages)

    r = bundle_cmd("render", "SVG drawing of one slice")
    r.add_argument("--slice", type=int, required=True)
    r.add_argument("--width", type=int, default=800)
    r.add_argument("-o", "--output")
    r.set_defaults(func=cmd_render)

    o = sub.add_parser("oracle", help="grid ground truth for a scene")
    o.add_argument("--scene", required=True)
    o.add_argument("--ball-radius", type=float)
    o.add_argument("--obj-ball-radius", type=float)
    o.add_argument("--resolution", type=float, required=True)
    o.add_argument("--ntheta", type=int, default=64)
    o.add_argument("--margin", type=float, help="free border around the scene")
    o.add_argument("--from", dest="from_")
    o.add_argument("--to")
    o.add_argument("--at")
    o.set_defaults(func=cmd_oracle)

    rep = bundle_cmd("report", "per-slice and volume CSV tables plus a PNG figure")
    rep.add_argument("-o", "--output", required=True, help="output directory")
    rep.set_defaults(func=cmd_report)

    c = sub.add_parser("curve", help="slice count against epsilon, CSV and PNG")
    c.add_argument("--diam", type=float, default=5.0)
    c.add_argument("--epsilons", help="comma separated; default 0.1,...,1.0")
    c.add_argument("-o", "--output", required=True, help="output directory")
    c.set_defaults(func=cmd_curve)

    s = sub.add_parser("scene", help="write a built-in scene as JSON")
    s.add_argument("name", help=", ".join(sorted(BUILTIN)))
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_scene)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PreconditionError as exc:
        print(f"cagemap: precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except InputError as exc:
        print(f"cagemap: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
