import cmath
import math
from types import SimpleNamespace
from typing import Iterable, List

import pytest

from conf import project as project_conf
from src.geometry import (
    ArrayGeometry,
    FrequencyGrid,
    ImageRegion,
    MultipathPair,
    Position2D,
    SceneConfig,
    Scatterer,
)

C = project_conf.WAVE_SPEED


def oracle_echo(scene: SceneConfig) -> List[List[complex]]:
    """Direct echoes evaluated term by term with cmath."""
    rows = []
    for tx, rx in scene.geometry.channels():
        row = []
        for i in range(scene.frequencies.count):
            f = scene.frequencies.f0 + i * scene.frequencies.delta_f
            total = 0j
            for s in scene.scatterers:
                r = math.dist((s.position.x, s.position.y), (tx.x, tx.y)) + math.dist(
                    (s.position.x, s.position.y), (rx.x, rx.y)
                )
                total += s.reflectivity * cmath.exp(-2j * math.pi * f * r / C)
            row.append(total)
        rows.append(row)
    return rows


def oracle_channel_pixel(
    samples: Iterable[complex], freqs: Iterable[float], tx, rx, x: float, y: float
) -> complex:
    r = math.dist((x, y), (tx.x, tx.y)) + math.dist((x, y), (rx.x, rx.y))
    return sum(
        e * cmath.exp(2j * math.pi * f * r / C) for e, f in zip(samples, freqs)
    )


def make_run(tmp_path, **overrides) -> SimpleNamespace:
    """Stand-in for the composed `run` config group."""
    values = dict(
        command="pipeline",
        seed=42,
        out=str(tmp_path),
        echo=None,
        image=None,
        maps=None,
        region=None,
        map="cf2d",
        floor_db=project_conf.FLOOR_DB,
        ghost_floor_db=project_conf.GHOST_FLOOR_DB,
        exclusion_radius=None,
        snr_db=None,
        spreading=False,
        multipath=True,
    )
    values.update(overrides)
    return SimpleNamespace(**values)


@pytest.fixture
def small_region() -> ImageRegion:
    return ImageRegion(-0.5, 0.5, -0.4, 0.4, 9, 7)


@pytest.fixture
def mimo_scene(small_region) -> SceneConfig:
    geometry = ArrayGeometry(
        transmitters=(Position2D(-0.3, 10.0), Position2D(0.3, 10.0)),
        receivers=(Position2D(-0.1, 9.9), Position2D(0.0, 10.1), Position2D(0.2, 9.8)),
    )
    return SceneConfig(
        scatterers=(
            Scatterer(Position2D(0.05, -0.1), 1.0),
            Scatterer(Position2D(-0.2, 0.15), 0.5 - 0.25j),
        ),
        multipath=(MultipathPair(0, 1, 0.3),),
        geometry=geometry,
        frequencies=FrequencyGrid(8.0e9, 50e6, 5),
        region=small_region,
    )


@pytest.fixture
def tiny_ghost_scene() -> SceneConfig:
    """A coarse version of the ghost preset that images in well under a second."""
    from src.geometry import simo_geometry

    region = ImageRegion(-1.5, 1.5, -1.5, 1.5, 24, 24)
    return SceneConfig(
        scatterers=(
            Scatterer(Position2D(-0.75, 0.0)),
            Scatterer(Position2D(0.75, 0.0)),
            Scatterer(Position2D(0.0, 0.9)),
        ),
        multipath=(MultipathPair(0, 1, 0.3),),
        geometry=simo_geometry(10.0, 8.0, 9),
        frequencies=FrequencyGrid.from_band(8e9, 9e9, 8),
        region=region,
    )
