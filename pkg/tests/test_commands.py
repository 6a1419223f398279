import filecmp
import os

import pytest
import torch

from dataset.formats import read_echo, read_image
from dataset.manifest import MANIFEST_NAME, read_manifest
from src import commands
from src.backprojection import ImageGrid
from src.coherence import CoherenceMap, MapKind
from src.commands import (
    EXIT_CONSISTENCY,
    EXIT_INPUT,
    EXIT_OK,
    ImagingOptions,
    run_enhance,
    run_image,
    run_metrics,
    run_pipeline,
    run_simulate,
)
from src.errors import ConsistencyError
from tests.conftest import make_run

MAP_FILES = [f"{kind}.img" for kind in MapKind]


def test_simulate_writes_echo_and_manifest(tmp_path, tiny_ghost_scene):
    run = make_run(tmp_path)
    assert run_simulate(run, tiny_ghost_scene) == EXIT_OK
    echo = read_echo(str(tmp_path / "echo.echo"))
    assert echo.num_channels == 9
    manifest = read_manifest(str(tmp_path / MANIFEST_NAME))
    assert manifest["subcommand"] == "simulate"
    assert manifest["outputs"] == ["echo.echo"]


def test_image_then_enhance_then_metrics(tmp_path, tiny_ghost_scene):
    sim, img, enh, met = (tmp_path / d for d in ("sim", "img", "enh", "met"))
    assert run_simulate(make_run(sim), tiny_ghost_scene) == EXIT_OK
    echo_path = str(sim / "echo.echo")
    assert run_image(make_run(img, echo=echo_path), tiny_ghost_scene, ImagingOptions()) == EXIT_OK
    for name in ["bp.img"] + MAP_FILES:
        assert (img / name).is_file()

    run = make_run(enh, image=str(img / "bp.img"), maps=str(img), map="pcf")
    assert run_enhance(run) == EXIT_OK
    enhanced = read_image(str(enh / "enhanced_pcf.img"))
    bp = read_image(str(img / "bp.img"))
    pcf = read_image(str(img / "pcf.img"))
    assert isinstance(enhanced, ImageGrid) and isinstance(pcf, CoherenceMap)
    assert torch.equal(enhanced.pixels, bp.pixels * pcf.values)

    run = make_run(met, image=str(enh / "enhanced_pcf.img"))
    assert run_metrics(run, tiny_ghost_scene) == EXIT_OK
    report = (met / "report.txt").read_text()
    assert report.startswith("[enhanced_pcf]")
    assert "enhanced_pcf.pslr_range_db" in (met / "report.kv").read_text()


def test_region_override(tmp_path, tiny_ghost_scene):
    run = make_run(tmp_path, region="-1,1,-1,1,8,6")
    assert run_image(run, tiny_ghost_scene, ImagingOptions()) == EXIT_OK
    bp = read_image(str(tmp_path / "bp.img"))
    assert bp.region.shape == (6, 8)


def test_fast_path_image(tmp_path, tiny_ghost_scene):
    imaging = ImagingOptions(fast_bp=True, upsample=8)
    assert run_image(make_run(tmp_path), tiny_ghost_scene, imaging) == EXIT_OK
    assert (tmp_path / "pcf2d.img").is_file()


def test_pipeline_outputs(tmp_path, tiny_ghost_scene):
    assert run_pipeline(make_run(tmp_path), tiny_ghost_scene, ImagingOptions()) == EXIT_OK
    expected = ["echo.echo", "bp.img", "bp.pgm", "report.txt", "report.kv", MANIFEST_NAME]
    expected += MAP_FILES + [f"enhanced_{kind}.img" for kind in MapKind]
    expected += ["cf_denominator.pgm", "cff_denominator.pgm"]
    for name in expected:
        assert (tmp_path / name).is_file(), name
    manifest = read_manifest(str(tmp_path / MANIFEST_NAME))
    assert set(manifest["outputs"]) == set(os.listdir(tmp_path)) - {MANIFEST_NAME}


def test_pipeline_is_byte_identical_on_rerun(tmp_path, tiny_ghost_scene):
    first, second = tmp_path / "a", tmp_path / "b"
    for out in (first, second):
        run = make_run(out, snr_db=20.0, seed=11)
        assert run_pipeline(run, tiny_ghost_scene, ImagingOptions()) == EXIT_OK
    names = sorted(os.listdir(first))
    assert names == sorted(os.listdir(second))
    match, mismatch, errors = filecmp.cmpfiles(first, second, names, shallow=False)
    assert mismatch == [] and errors == []


@pytest.mark.parametrize(
    "overrides",
    [
        {"region": "0,1,0"},
        {"echo": "/nonexistent/file.echo"},
        {"floor_db": 0.0},
    ],
)
def test_input_errors_exit_with_one(tmp_path, tiny_ghost_scene, overrides):
    run = make_run(tmp_path, **overrides)
    assert run_pipeline(run, tiny_ghost_scene, ImagingOptions()) == EXIT_INPUT


def test_enhance_input_errors(tmp_path):
    assert run_enhance(make_run(tmp_path)) == EXIT_INPUT
    run = make_run(tmp_path, image=str(tmp_path / "bp.img"), maps=str(tmp_path), map="cf9")
    assert run_enhance(run) == EXIT_INPUT


def test_enhance_rejects_corrupt_image_headers(tmp_path):
    maps = tmp_path / "maps"
    maps.mkdir()
    for path in (tmp_path / "bp.img", maps / "cf2d.img"):
        path.write_bytes(b"RCI1\nkind = \xff\n\n")
    run = make_run(tmp_path / "enh", image=str(tmp_path / "bp.img"), maps=str(maps))
    assert run_enhance(run) == EXIT_INPUT


def test_consistency_failure_exits_with_two(tmp_path, tiny_ghost_scene, monkeypatch):
    def broken(*_):
        raise ConsistencyError("CF map left [0, 1]")

    monkeypatch.setattr(commands, "compute_maps", broken)
    run = make_run(tmp_path)
    assert run_image(run, tiny_ghost_scene, ImagingOptions()) == EXIT_CONSISTENCY
