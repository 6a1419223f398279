from pathlib import Path

import pytest

from dataset.scene_file import parse_scene_config, parse_scene_text, scene_to_text
from src.errors import InputError, SceneSyntaxError
from src.scenes import ghost_scene, point_target_scene

SCENES = Path(__file__).resolve().parent.parent / "data" / "scenes"

MINIMAL = """
[array]
monostatic = true
transmitter = 0.0, 10.0

[frequencies]
start = 9e9
count = 1

[region]
x_min = -0.5
x_max = 0.5
y_min = -0.5
y_max = 0.5
nx = 4
ny = 4

[scatterer]
x = 0.0
y = 0.0
"""


def test_simo_point_preset():
    scene = parse_scene_config(str(SCENES / "simo_point.scn"))
    assert len(scene.geometry.transmitters) == 1
    assert len(scene.geometry.receivers) == 81
    assert scene.frequencies.count == 64
    assert scene.frequencies.f0 == 8e9
    assert scene.frequencies.delta_f == pytest.approx(15.873015873e6)
    center = scene.region.pixel_center(128, 128)
    assert center.x == pytest.approx(0.0, abs=1e-12)
    assert center.y == pytest.approx(0.0, abs=1e-12)
    assert scene.source.endswith("simo_point.scn")


def test_shipped_scenes_parse():
    ghost = parse_scene_config(str(SCENES / "ghost.scn"))
    assert len(ghost.scatterers) == 3
    assert ghost.multipath[0].coupling == 0.3
    assert parse_scene_config(str(SCENES / "point_target.scn")).geometry.monostatic
    assert parse_scene_config(str(SCENES / "minimal.scn")).geometry.num_channels == 1


def test_minimal_scene():
    scene = parse_scene_text(MINIMAL)
    assert scene.geometry.monostatic
    assert scene.geometry.num_channels == 1
    assert scene.frequencies.count == 1
    assert scene.scatterers[0].reflectivity == 1 + 0j


def test_comments_and_complex_reflectivity():
    text = MINIMAL.replace("y = 0.0\n", "y = 0.0  # center\nreflectivity = 0.5-0.25j\n")
    scene = parse_scene_text("# header comment\n" + text)
    assert scene.scatterers[0].reflectivity == 0.5 - 0.25j


def test_multipath_pair_out_of_range_names_the_line():
    text = MINIMAL + "\n[multipath]\nfirst = 0\nsecond = 3\n"
    with pytest.raises(SceneSyntaxError) as excinfo:
        parse_scene_text(text, "bad.scn")
    line = text.splitlines().index("second = 3") + 1
    assert excinfo.value.line == line
    assert str(excinfo.value).startswith(f"bad.scn:{line}:")


@pytest.mark.parametrize(
    "edit, message",
    [
        (("nx = 4", "nx = 4\ncolour = red"), "Unknown key"),
        (("[scatterer]", "[target]"), "Unknown section"),
        (("start = 9e9", "start = nine"), "Invalid value"),
        (("count = 1", "count = 2\nstop = 9e9\nstep = 1e6"), "not both"),
        (("nx = 4", "nx = 4\nnx = 5"), "repeated"),
    ],
)
def test_syntax_errors(edit, message):
    with pytest.raises(SceneSyntaxError, match=message):
        parse_scene_text(MINIMAL.replace(*edit))


def test_missing_mandatory_section():
    text = MINIMAL.split("[region]")[0]
    with pytest.raises(SceneSyntaxError, match=r"\[region\]"):
        parse_scene_text(text)


def test_invalid_geometry_is_reported_with_the_section():
    text = "[array]\nlayout = simo\nradius = -1\naperture_deg = 8\ncount = 3\n"
    text += "[frequencies]" + MINIMAL.split("[frequencies]", 1)[1]
    with pytest.raises(SceneSyntaxError) as excinfo:
        parse_scene_text(text)
    assert excinfo.value.line == 1


def test_non_utf8_file_names_the_line(tmp_path):
    path = tmp_path / "latin1.scn"
    path.write_bytes(b"# scene\n# caf\xe9\n[array]\n")
    with pytest.raises(SceneSyntaxError, match="UTF-8") as excinfo:
        parse_scene_config(str(path))
    assert excinfo.value.line == 2


@pytest.mark.parametrize(
    "edit",
    [
        ("x = 0.0\ny = 0.0", "x = nan\ny = 0.0"),
        ("x = 0.0\ny = 0.0", "x = 0.0\ny = inf"),
        ("x = 0.0\ny = 0.0", "x = 0.0\ny = 0.0\nreflectivity = inf+0j"),
    ],
)
def test_non_finite_scatterer_names_the_section(edit):
    text = MINIMAL.replace(*edit)
    with pytest.raises(SceneSyntaxError, match="finite") as excinfo:
        parse_scene_text(text, "bad.scn")
    assert excinfo.value.line == text.splitlines().index("[scatterer]") + 1


def test_missing_file():
    with pytest.raises(InputError):
        parse_scene_config("/nonexistent/scene.scn")


@pytest.mark.parametrize("make_scene", [ghost_scene, point_target_scene])
def test_serialized_presets_parse_back_identically(make_scene):
    scene = make_scene(nx=32, ny=32)
    assert parse_scene_text(scene_to_text(scene, comment="preset")) == scene
