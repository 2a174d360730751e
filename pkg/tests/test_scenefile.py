import json

import pytest
from hypothesis import given, strategies as st

from cagemap.errors import EmptyApproximation, InputError
from cagemap.scenefile import RunConfig, SceneFile, load_scene, loads_scene, parse_epsilon
from cagemap.scenes import BUILTIN

SQUARE = [[0, 0], [4, 0], [4, 4], [0, 4]]


def scene(**kw):
    base = {"obstacles": {"polygons": [SQUARE]}, "object": {"polygon": [[0, 0], [2, 0], [2, 1], [0, 1]]}}
    base.update(kw)
    return json.dumps(base)


@pytest.mark.parametrize("text, fragment", [
    ("[1, 2]", "top level"),
    ('{"object": {"polygon": [[0,0],[1,0],[0,1]]}, "extra": 1}', "unknown field"),
    ('{"obstacles": {}}', "object: missing"),
    (scene(object={"polygon": [[0, 0], [1, 0]]}), "at least 3"),
    (scene(obstacles={"polygons": [[[0, 0], [1, 0], [1, "a"]]]}), "obstacles.polygons[0][2][1]"),
    (scene(obstacles={"disks": {"radius": -1, "centers": [[0, 0]]}}), "radius"),
    (scene(object={"polygon": SQUARE, "disks": {"radius": 1, "centers": [[0, 0]]}}), "exactly one"),
    ("{", "line 1"),
])
def test_malformed_scenes_name_the_field(text, fragment):
    with pytest.raises(InputError) as info:
        loads_scene(text)
    assert fragment in str(info.value)


def test_polygon_obstacles_need_a_radius():
    s = loads_scene(scene())
    with pytest.raises(InputError):
        s.obstacles()
    assert len(s.obstacles(0.5)) > 0


def test_too_coarse_ball_radius_names_the_polygon():
    s = loads_scene(scene())
    with pytest.raises(EmptyApproximation) as info:
        s.obstacles(3.0)
    assert "obstacles.polygons[0]" in str(info.value)


def test_disk_radius_must_match():
    s = loads_scene(scene(obstacles={"disks": {"radius": 1.0, "centers": [[0, 0]]}}))
    assert s.obstacles(1.0).common_radius == 1.0
    with pytest.raises(InputError):
        s.obstacles(0.5)


def test_empty_obstacle_set_is_allowed():
    s = loads_scene(scene(obstacles={}))
    assert not s.has_obstacles and s.obstacles(1.0) is None


def test_missing_file(tmp_path):
    with pytest.raises(InputError, match="cannot read"):
        load_scene(tmp_path / "nope.json")


def test_scene_needs_one_object():
    with pytest.raises(InputError):
        SceneFile()


@pytest.mark.parametrize("name", sorted(BUILTIN))
def test_builtin_scenes_round_trip(name, tmp_path):
    inst = BUILTIN[name]()
    path = tmp_path / "s.json"
    inst.scene.save(path)
    again = load_scene(path)
    assert again.dumps() == inst.scene.dumps()
    a, b = inst.scene.obstacles(inst.ball_radius), again.obstacles(inst.ball_radius)
    assert (a.centers == b.centers).all()


@pytest.mark.parametrize("text, r, expected", [
    ("0.3r", 0.5, 0.15), ("0.30r", 2.0, 0.6), (" 0.25 r ", 1.0, 0.25), ("0.1", 1.0, 0.1), (0.2, 1.0, 0.2),
])
def test_parse_epsilon(text, r, expected):
    assert parse_epsilon(text, r) == pytest.approx(expected)


@pytest.mark.parametrize("text", ["1r", "0", "-0.1", "abc", "1.5", "nan", True])
def test_parse_epsilon_rejects(text):
    with pytest.raises(InputError):
        parse_epsilon(text, 1.0)


@given(st.floats(min_value=1e-3, max_value=0.999), st.floats(min_value=0.01, max_value=100))
def test_fraction_epsilon_scales_with_r(f, r):
    assert parse_epsilon(f"{f!r}r", r) == pytest.approx(f * r)


@pytest.mark.parametrize("kw", [{"ball_radius": 0}, {"delta": -1}, {"threads": 0}])
def test_run_config_validation(kw):
    with pytest.raises(InputError):
        RunConfig(**kw)
