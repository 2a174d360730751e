import math

import numpy as np
import pytest

from cagemap.errors import CellNotFree, InputError
from cagemap.geom import Configuration, DiskUnion, RigidObject
from cagemap.oracle import (GridSpec, complement_components, oracle_connected,
                            oracle_escapes, oracle_volume, rasterize)
from cagemap.scenes import ring

DOT = RigidObject.from_world(DiskUnion([(0.0, 0.0)], 1e-3))


def test_grid_spec_validation():
    with pytest.raises(InputError):
        GridSpec(0, 0, 1, 1, 4, 4, ntheta=4)
    with pytest.raises(InputError):
        GridSpec(0, 0, 0, 1, 4, 4)


def test_empty_workspace_is_all_free():
    g = rasterize(DOT, None, GridSpec(0, 0, 1, 1, 10, 10, 8))
    assert g.free.all()
    assert oracle_volume(g, Configuration(0.5, 0.5, 0)) == pytest.approx(2 * math.pi)


def test_covering_obstacle_blocks_everything():
    obs = DiskUnion([(0.5, 0.5)], 10.0)
    g = rasterize(DOT, obs, GridSpec(0, 0, 1, 1, 10, 10, 8))
    assert not g.free.any()


def test_half_wall_halves_the_volume():
    big = 1e6
    obs = DiskUnion([(big + 0.5, 0.5)], big)
    g = rasterize(DOT, obs, GridSpec(0, 0, 1, 1, 10, 10, 16))
    assert oracle_volume(g, Configuration(0.2, 0.5, 0)) == pytest.approx(math.pi)
    with pytest.raises(CellNotFree):
        oracle_connected(g, Configuration(0.2, 0.5, 0), Configuration(0.8, 0.5, 0))


def test_centred_disk_ignores_orientation():
    obj = RigidObject.from_world(DiskUnion([(0.0, 0.0)], 0.5))
    obs = DiskUnion([(1.0, 1.0), (2.5, 0.0)], 0.7)
    g = rasterize(obj, obs, GridSpec(-1, -1, 4, 3, 50, 40, 8))
    assert all(np.array_equal(g.free[0], g.free[t]) for t in range(8))


def test_neighbouring_free_cells_connect():
    g = rasterize(DOT, None, GridSpec(0, 0, 1, 1, 10, 10, 8))
    assert oracle_connected(g, Configuration(0.05, 0.05, 0), Configuration(0.15, 0.05, 0))


def test_full_wall_separates():
    wall = DiskUnion([(0.5, y) for y in np.linspace(-0.2, 1.2, 30)], 0.06)
    g = rasterize(DOT, wall, GridSpec(0, 0, 1, 1, 40, 40, 8))
    assert not oracle_connected(g, Configuration(0.1, 0.5, 0), Configuration(0.9, 0.5, 3))


def test_theta_wraps_around():
    g = rasterize(DOT, None, GridSpec(0, 0, 1, 1, 4, 4, 8))
    assert g.n_components == 1
    assert g.spec.cell(Configuration(0.5, 0.5, 2 * math.pi - 1e-9))[0] == 0


@pytest.mark.parametrize("h", [0.05, 0.025])
def test_ring_interior_is_closed(h):
    inst = ring()
    obs, obj = inst.obstacles(), inst.object()
    spec = GridSpec.around(obj, obs, h * obj.radius / 0.05 * 0.05, 64, margin=2.0)
    g = rasterize(obj, obs, spec)
    assert not oracle_connected(g, inst.probes["inside"], inst.probes["outside"])
    assert not oracle_escapes(g, inst.probes["inside"])
    assert oracle_escapes(g, inst.probes["outside"])


def test_ring_volume_converges():
    inst = ring()
    obs, obj = inst.obstacles(), inst.object()
    vols = []
    for h in (0.05, 0.025):
        g = rasterize(obj, obs, GridSpec.around(obj, obs, h, 32))
        vols.append(oracle_volume(g, inst.probes["inside"]))
    assert abs(vols[1] - vols[0]) / vols[1] < 0.05


def test_complement_components_of_an_annulus():
    a = 2 * math.pi * np.arange(12) / 12
    u = DiskUnion(np.column_stack([3 * np.cos(a), 3 * np.sin(a)]), 1.0)
    labels, xs, ys, bounded, deep = complement_components(u, (-6, -6, 6, 6), 0.05)
    assert int((bounded & deep).sum()) == 1
    assert labels[np.searchsorted(xs, 0.0), np.searchsorted(ys, 0.0)] >= 0
