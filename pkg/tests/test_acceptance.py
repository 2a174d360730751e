"""Acceptance criteria, one test each.

Every test records a PASS/FAIL line (shown in the terminal summary and
printed with ``-s``) before asserting, so a failing criterion still
reports what it measured.
"""

import math
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE
from cagemap.bundle import dumps_bundle
from cagemap.connectivity import Verdict
from cagemap.geom import Configuration, DiskUnion
from cagemap.metrics import component_volume, delta_connected, passage_width
from cagemap.oracle import (GridSpec, complement_components, oracle_connected, oracle_escapes,
                            oracle_volume, rasterize)
from cagemap.pipeline import build_map
from cagemap.render import render_slice
from cagemap.scenes import (CHAMBER_RADII, corridor_critical_delta, gated_chamber,
                            multi_chamber, random_desk, ring, tight_cages, timing_workload,
                            two_rooms)
from cagemap.slicing import decompose_union, partition_so2, uniform_partition

pytestmark = pytest.mark.slow


def record(number, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] {number}. {title}: {detail}"
    ACCEPTANCE[number] = line
    print(line)
    assert ok, line


# 1. soundness against the grid oracle

def _free_samples(rng, grid, count):
    spec = grid.spec
    xs, ys = spec.xs(), spec.ys()
    out = []
    while len(out) < count:
        it = int(rng.integers(spec.ntheta))
        if rng.random() < 0.5:
            ix = int(spec.nx / 2 + rng.normal(scale=spec.nx / 8))
            iy = int(spec.ny / 2 + rng.normal(scale=spec.ny / 8))
            if not (0 <= ix < spec.nx and 0 <= iy < spec.ny):
                continue
        else:
            ix, iy = int(rng.integers(spec.nx)), int(rng.integers(spec.ny))
        if grid.free[it, ix, iy]:
            out.append(Configuration(float(xs[ix]), float(ys[iy]), it * spec.dtheta))
    return out


def test_1_soundness_suite():
    rng = np.random.default_rng(1)
    instances = [random_desk(rng, k) for k in range(24)] + [ring(), gated_chamber()]
    proofs = wrong = 0
    t0 = time.perf_counter()
    for inst in instances:
        obs, obj = inst.obstacles(), inst.object()
        fsm = build_map(obs, obj, 0.3 * obj.radius)
        desk = inst.name.startswith("desk")
        # hand-made scenes get room for their outside probes
        margin = None if desk else 6.0
        grid = rasterize(obj, obs, GridSpec.around(obj, obs, 0.05 * obj.radius, 64, margin))
        named = [] if desk else [c for c in inst.probes.values() if grid.free[grid.spec.cell(c)]]
        cfgs = named + _free_samples(rng, grid, 12)
        for i, c in enumerate(cfgs):
            if fsm.query_caged(c).verdict is Verdict.PROVEN_CAGED:
                proofs += 1
                wrong += oracle_escapes(grid, c)
            for c2 in cfgs[i + 1:]:
                if fsm.query_path(c, c2).verdict is Verdict.PROVEN_DISCONNECTED:
                    proofs += 1
                    wrong += oracle_connected(grid, c, c2)
    elapsed = time.perf_counter() - t0
    ok = wrong == 0 and proofs > 0 and elapsed < 300
    record(1, "soundness", ok,
           f"{len(instances)} scenes, {proofs} proofs, {wrong} contradicted by the oracle, "
           f"{elapsed:.0f} s")


# 2. delta-completeness

def test_2_delta_completeness():
    verdicts = []
    for inst in tight_cages():
        obs, obj = inst.obstacles(), inst.object()
        eps = 0.3 * obj.radius
        delta = 2 * eps
        part = partition_so2(obj, eps)
        assert part.max_displacement(obj.diam) < delta - eps
        res = delta_connected(inst.probes["inside"], inst.probes["outside"], delta, obs, obj, eps,
                              partition=part)
        verdicts.append((inst.name, res.verdict))
    ok = all(v is Verdict.PROVEN_DISCONNECTED for _, v in verdicts)
    record(2, "delta-completeness", ok,
           ", ".join(f"{n}={v.value}" for n, v in verdicts))


# 3. alpha decomposition against a 2D flood fill

GRID_H = 0.02
# the grid only resolves topology that survives a radius change of a few cells
STABILITY = 2.5 * GRID_H


def _stable_unions(rng, count):
    out = []
    while len(out) < count:
        pts = rng.uniform(0, 10, size=(int(rng.integers(8, 30)), 2))
        rad = float(rng.uniform(0.9, 1.6))
        sl = decompose_union(DiskUnion(pts, rad))
        crit = sl.filtration.critical_values()
        if np.min(np.abs(np.sqrt(crit) - rad)) >= STABILITY:
            out.append(sl)
    return out


def _alpha_membership(sl, p):
    dt = sl.dt
    if not dt.in_hull(p[None, :])[0]:
        return 0
    labels = sl.decomposition.labels[dt.locate(p)]
    labels = labels[labels >= 0]
    return int(labels[0]) if len(labels) else -1


def test_3_alpha_decomposition_vs_grid():
    rng = np.random.default_rng(2024)
    count_ok = 0
    agree = total = 0
    for sl in _stable_unions(rng, 50):
        u = sl.union
        labels, xs, ys, bounded, deep = complement_components(u, (-3, -3, 13, 13), GRID_H)
        count_ok += sl.n_bounded == int((bounded & deep).sum())
        pts = rng.uniform(-3, 13, size=(400, 2))
        d = np.sqrt(((pts[:, None, :] - u.centers[None]) ** 2).sum(-1)).min(1)
        pts = pts[np.abs(d - u.common_radius) > GRID_H * math.sqrt(2)]
        votes = {}
        pairs = []
        for p, dist in zip(pts, d[np.abs(d - u.common_radius) > GRID_H * math.sqrt(2)]):
            ix = min(len(xs) - 1, int((p[0] + 3) / GRID_H))
            iy = min(len(ys) - 1, int((p[1] + 3) / GRID_H))
            g = int(labels[ix, iy])
            grid_side = -1 if g < 0 else (0 if not bounded[g] else ("g", g))
            alpha_side = -1 if dist < u.common_radius else _alpha_membership(sl, p)
            pairs.append((grid_side, alpha_side))
            if isinstance(grid_side, tuple):
                votes.setdefault(grid_side, []).append(alpha_side)
        mapping = {g: max(set(v), key=v.count) for g, v in votes.items()}
        for grid_side, alpha_side in pairs:
            total += 1
            agree += mapping.get(grid_side, grid_side) == alpha_side
    rate = agree / total
    ok = count_ok == 50 and rate >= 0.99
    record(3, "alpha decomposition vs grid", ok,
           f"counts agree on {count_ok}/50 unions, membership {rate:.4%} of {total} points")


# 4. slice-count curve

def test_4_slice_count_curve():
    eps = [k / 10 for k in range(1, 11)]
    counts = [uniform_partition(5.0, e).slices for e in eps]
    formula = [math.ceil(2 * math.pi / (2 * math.asin(0.999 * e / 10))) for e in eps]
    monotone = all(a >= b for a, b in zip(counts, counts[1:]))
    ok = monotone and counts == formula
    record(4, "slice-count curve", ok, f"s = {counts}")


# 5. resolution trend

def test_5_resolution_trend():
    inst = multi_chamber()
    obj = inst.object()
    counts = []
    for R in CHAMBER_RADII:
        fsm = build_map(inst.scene.obstacles(R), obj, 0.3 * obj.radius)
        counts.append(fsm.graph.n_components)
    ok = all(b >= a + 1 for a, b in zip(counts, counts[1:]))
    record(5, "resolution trend", ok,
           " / ".join(f"R={R:g}: {c} c." for R, c in zip(CHAMBER_RADII, counts)))


# 6. volume properties

def test_6_volume_properties():
    inst = two_rooms()
    obs, obj = inst.obstacles(), inst.object()
    r = obj.radius
    left, right = inst.probes["left"], inst.probes["right"]

    fsm = build_map(obs, obj, 0.3 * r)
    comp = fsm.query_caged(left).components[0]
    computed = component_volume(fsm.graph, comp)
    grid = rasterize(obj, obs, GridSpec.around(obj, obs, 0.05 * r, 64))
    truth = oracle_volume(grid, left)
    bounds_ok = truth <= computed <= 2 * truth

    sweep = []
    for f in (0.1, 0.2, 0.3, 0.4, 0.5):
        m = build_map(obs, obj, f * r)
        a, b = m.query_caged(left).components[0], m.query_caged(right).components[0]
        if a == b:
            break
        sweep.append((f, component_volume(m.graph, a)))
    vols = [v for _, v in sweep]
    monotone = len(sweep) >= 2 and all(x <= y for x, y in zip(vols, vols[1:]))
    record(6, "volume properties", bounds_ok and monotone,
           f"computed {computed:.1f} vs oracle {truth:.1f} (ratio {computed / truth:.2f}); "
           "sweep " + ", ".join(f"{f:g}r: {v:.1f}" for f, v in sweep))


# 7. passage width

def test_7_passage_width():
    inst = gated_chamber()
    obs, obj = inst.obstacles(), inst.object()
    eps = 0.3 * obj.radius
    fsm = build_map(obs, obj, eps)
    rep = passage_width(inst.probes["inside"], inst.probes["outside"], fsm)
    expected = corridor_critical_delta(obs.common_radius, obj.radius, eps)
    step = rep.delta - rep.previous_delta
    ok = abs(rep.delta - expected) <= step
    record(7, "passage width", ok,
           f"reported {rep.delta:.6f}, analytic {expected:.6f}, "
           f"error {abs(rep.delta - expected):.2e} within step {step:.4f}")


# 8. performance

def test_8_performance():
    inst = timing_workload()
    obs, obj = inst.obstacles(), inst.object()
    assert len(obs) == 681 and len(obj.offsets) == 5
    eps = 0.3 * obj.radius
    walls = {}
    for threads in (1, 4):
        t0 = time.perf_counter()
        fsm = build_map(obs, obj, eps, threads=threads)
        walls[threads] = time.perf_counter() - t0
    t = fsm.timings
    ratio = t["edges"] / t["slices"]
    ok = walls[1] < 10 and walls[4] < 4 and ratio <= 5
    record(8, "performance", ok,
           f"{walls[1]:.2f} s with 1 thread, {walls[4]:.2f} s with 4, "
           f"edges/slices {ratio:.2f}, {fsm.partition.slices} slices")


# 9. determinism

def test_9_determinism():
    rng = np.random.default_rng(5)
    scenes = [ring(), gated_chamber(), random_desk(rng, 0)]
    same = True
    for inst in scenes:
        obs, obj = inst.obstacles(), inst.object()
        a = build_map(obs, obj, 0.3 * obj.radius)
        b = build_map(inst.obstacles(), inst.object(), 0.3 * obj.radius, threads=4)
        same &= dumps_bundle(a).encode() == dumps_bundle(b).encode()
        same &= all(render_slice(x).encode() == render_slice(y).encode()
                    for x, y in zip(a.slices, b.slices))
    record(9, "determinism", same, f"bundles and SVGs of {len(scenes)} scenes byte-identical"
           if same else "outputs differ between runs")
