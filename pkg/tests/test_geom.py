import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from shapely.geometry import Point as ShapelyPoint

from cagemap.errors import EmptyApproximation, InputError
from cagemap.geom import (Configuration, Disk, DiskUnion, Point, Polygon, RigidObject,
                          approximate_polygon, in_collision, merge_unions, object_diameter,
                          signed_distance, signed_distances, transform)

coord = st.floats(-20, 20, allow_nan=False)
angle = st.floats(0, 2 * math.pi, allow_nan=False, exclude_max=True)
unit = DiskUnion([(0.0, 0.0)], 1.0)


def single(r=1.0, at=(0.0, 0.0)):
    return RigidObject.from_world(DiskUnion([at], r))


@pytest.mark.parametrize("p, expected", [((2, 0), 1.0), ((0, 0), -1.0), ((1, 0), 0.0)])
def test_signed_distance_unit_disk(p, expected):
    assert signed_distance(Point(*p), unit) == pytest.approx(expected, abs=1e-12)


def test_signed_distance_takes_the_nearest_disk():
    u = DiskUnion([(0, 0), (10, 0)], 1.0)
    assert signed_distance(Point(8, 0), u) == pytest.approx(1.0)


@pytest.mark.parametrize("c, expected", [
    (Configuration(0, 0, 0), False),
    (Configuration(0.5, 0, 0), True),
    (Configuration(0, 0, math.pi), False),
])
def test_in_collision_contact_is_free(c, expected):
    obs = DiskUnion([(2.0, 0.0)], 1.0)
    assert in_collision(c, single(), obs) is expected


def test_square_of_side_two_holds_one_ball():
    u = approximate_polygon(Polygon(((0, 0), (2, 0), (2, 2), (0, 2))), 1.0)
    assert u.centers.tolist() == [[1.0, 1.0]]


def test_thin_rectangle_has_no_ball():
    with pytest.raises(EmptyApproximation):
        approximate_polygon(Polygon(((0, 0), (10, 0), (10, 1), (0, 1))), 1.0)


def _assert_inside(poly, u, samples=64):
    shp = poly.to_shapely().buffer(1e-7)
    a = np.linspace(0, 2 * math.pi, samples, endpoint=False)
    ring = np.column_stack([np.cos(a), np.sin(a)]) * u.common_radius
    for c in u.centers:
        assert all(shp.covers(ShapelyPoint(*(c + q))) for q in ring)
        assert poly.to_shapely().exterior.distance(ShapelyPoint(*c)) >= u.common_radius - 1e-7


def test_large_square_centres_stay_in_the_inner_square():
    poly = Polygon(((0, 0), (10, 0), (10, 10), (0, 10)))
    u = approximate_polygon(poly, 4.0)
    assert np.all((u.centers >= 4 - 1e-9) & (u.centers <= 6 + 1e-9))
    _assert_inside(poly, u)


polygons = st.lists(st.tuples(st.floats(0.3, 1.0), st.floats(0.0, 1.0)),
                    min_size=3, max_size=9)


@given(polygons, st.floats(0.05, 0.4))
def test_approximation_lies_inside_star_polygons(spec, radius):
    # star-shaped about the origin, so always simple
    spec = sorted(spec, key=lambda t: t[1])
    angles = np.array([t[1] for t in spec]) * 2 * math.pi
    if np.any(np.diff(angles) < 1e-3) or angles[-1] - angles[0] > 2 * math.pi - 1e-3:
        return
    pts = tuple((5 * r * math.cos(a), 5 * r * math.sin(a)) for (r, _), a in zip(spec, angles))
    try:
        poly = Polygon(pts)
    except InputError:
        return
    try:
        u = approximate_polygon(poly, radius)
    except EmptyApproximation:
        assert poly.to_shapely().buffer(-radius * 1.01).is_empty
        return
    assert u.common_radius == radius
    _assert_inside(poly, u, samples=24)


def test_approximation_covers_the_eroded_polygon():
    poly = Polygon(((0, 0), (12, 0), (12, 3), (6, 3), (6, 9), (0, 9)))
    R = 1.0
    u = approximate_polygon(poly, R)
    core = poly.to_shapely().buffer(-2 * R)
    rng = np.random.default_rng(0)
    x0, y0, x1, y1 = core.bounds
    pts = rng.uniform((x0, y0), (x1, y1), size=(3000, 2))
    pts = pts[[core.contains(ShapelyPoint(*p)) for p in pts]]
    assert np.all(signed_distances(pts, u) <= 1e-9)


@pytest.mark.parametrize("centers, c, expected", [
    ([(1, 0)], (0, 0, 0), [(1, 0)]),
    ([(1, 0)], (0, 0, math.pi / 2), [(0, 1)]),
    ([(1, 0), (-1, 0)], (2, 3, math.pi), [(1, 3), (3, 3)]),
])
def test_transform_examples(centers, c, expected):
    out = transform(DiskUnion(centers, 0.5), Configuration(*c))
    assert np.allclose(out.centers, expected, atol=1e-12)
    assert out.common_radius == 0.5


@pytest.mark.parametrize("offsets, r, expected", [
    ([(0, 0)], 2.0, 2.0),
    ([(2, 0), (-2, 0)], 0.5, 2.5),
    ([(k, 0) for k in (-2, -1, 0, 1, 2)], 0.5, 2.5),
])
def test_object_diameter(offsets, r, expected):
    assert object_diameter(RigidObject.from_world(DiskUnion(offsets, r))) == pytest.approx(expected)


def test_reference_is_the_mean_of_centres():
    obj = RigidObject.from_world(DiskUnion([(1, 1), (3, 1), (2, 4)], 0.5))
    assert (obj.reference.x, obj.reference.y) == pytest.approx((2.0, 2.0))
    assert np.allclose(obj.offsets.mean(axis=0), 0)
    assert obj.diam >= obj.radius


@given(coord, coord, coord, coord)
def test_signed_distance_is_1_lipschitz(px, py, qx, qy):
    u = DiskUnion([(0, 0), (3, 1), (-2, 4)], 1.3)
    d = abs(signed_distance(Point(px, py), u) - signed_distance(Point(qx, qy), u))
    assert d <= math.hypot(px - qx, py - qy) + 1e-9


@given(st.lists(st.tuples(coord, coord), min_size=2, max_size=6), coord, coord, angle)
def test_transform_is_rigid(centers, x, y, theta):
    u = DiskUnion(centers, 1.0)
    v = transform(u, Configuration(x, y, theta))
    da = np.linalg.norm(u.centers[:, None] - u.centers[None], axis=-1)
    db = np.linalg.norm(v.centers[:, None] - v.centers[None], axis=-1)
    assert np.allclose(da, db, atol=1e-9)


@given(coord, coord, angle)
def test_collision_is_symmetric_under_role_swap(x, y, theta):
    body = DiskUnion([(-0.5, 0.0), (0.5, 0.2)], 0.6)
    obs = DiskUnion([(1.0, 1.0), (-2.0, 0.5), (0.0, -3.0)], 0.9)
    obj = RigidObject(body, Point(0.0, 0.0))
    swapped = RigidObject(obs, Point(0.0, 0.0))
    # inverse pose: rotate by -theta, then translate by -Rot(-theta)(x, y)
    c, s = math.cos(theta), math.sin(theta)
    ix, iy = -(c * x + s * y), -(-s * x + c * y)
    inverse = Configuration(ix, iy, -theta)
    if abs(abs(min(np.linalg.norm(transform(body, Configuration(x, y, theta)).centers[:, None]
                                  - obs.centers[None], axis=-1).ravel())) - 1.5) < 1e-6:
        return
    assert in_collision(Configuration(x, y, theta), obj, obs) == in_collision(inverse, swapped, body)


@given(st.lists(st.tuples(coord, coord), min_size=1, max_size=6), coord, coord)
def test_diameter_ignores_where_the_body_sits(centers, dx, dy):
    a = RigidObject.from_world(DiskUnion(centers, 0.7))
    b = RigidObject.from_world(DiskUnion(np.array(centers) + (dx, dy), 0.7))
    assert a.diam == pytest.approx(b.diam, abs=1e-9)


@given(st.floats(-100, 100, allow_nan=False))
def test_configuration_angle_is_normalised(theta):
    t = Configuration(0, 0, theta).theta
    assert 0 <= t < 2 * math.pi
    assert math.isclose(math.cos(t), math.cos(theta), abs_tol=1e-9)


@pytest.mark.parametrize("bad", [(math.nan, 0), (0, math.inf)])
def test_points_must_be_finite(bad):
    with pytest.raises(InputError):
        Point(*bad)


def test_disk_radius_must_be_positive():
    with pytest.raises(InputError):
        Disk(Point(0, 0), 0.0)


def test_unions_require_equal_radii():
    with pytest.raises(InputError):
        DiskUnion.from_disks([Disk(Point(0, 0), 1.0), Disk(Point(1, 0), 2.0)])
    with pytest.raises(InputError):
        merge_unions([DiskUnion([(0, 0)], 1.0), DiskUnion([(1, 0)], 2.0)])


def test_polygon_checks():
    with pytest.raises(InputError):
        Polygon(((0, 0), (1, 1), (1, 0), (0, 1)))
    with pytest.raises(InputError):
        Polygon(((0, 0), (1, 0)))
    cw = Polygon(((0, 0), (0, 1), (1, 1), (1, 0)))
    assert cw.signed_area() > 0


def test_configuration_parse():
    c = Configuration.parse(" 1.5, -2 ,3")
    assert (c.x, c.y, c.theta) == (1.5, -2.0, 3.0)
    with pytest.raises(InputError):
        Configuration.parse("1,2")
    with pytest.raises(InputError):
        Configuration.parse("a,b,c")
