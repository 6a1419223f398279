#! /usr/bin/env python3
# vim:fenc=utf-8
#
# Distributed under terms of the MIT license.

"""
Scene presets. The SIMO simulation parameters are: R0 = 10 m, 8-9 GHz in 64 steps,
8° aperture with 81 receivers and the transmitter in the middle of the arc.
"""

from conf import project as project_conf
from src.geometry import (
    FrequencyGrid,
    ImageRegion,
    MultipathPair,
    Position2D,
    SceneConfig,
    Scatterer,
    simo_geometry,
    turntable_geometry,
)

XBAND_RADIUS = 10.0
XBAND_START_HZ = 8e9
XBAND_STOP_HZ = 9e9
XBAND_FREQUENCY_STEPS = 64
XBAND_APERTURE_DEG = 8.0
XBAND_RECEIVERS = 81


def xband_frequencies() -> FrequencyGrid:
    return FrequencyGrid.from_band(
        XBAND_START_HZ, XBAND_STOP_HZ, XBAND_FREQUENCY_STEPS
    )


def point_target_scene(
    nx: int = 256,
    ny: int = 256,
    half_width: float = 1.0,
    radius: float = XBAND_RADIUS,
    angle_span: float = XBAND_APERTURE_DEG,
    count: int = XBAND_RECEIVERS,
    wave_speed: float = project_conf.WAVE_SPEED,
) -> SceneConfig:
    """Turntable ISAR of a single unit scatterer sitting on the central pixel center."""
    region = ImageRegion.around(Position2D(0.0, 0.0), half_width, half_width, nx, ny)
    target = region.pixel_center(nx // 2, ny // 2)
    return SceneConfig(
        scatterers=(Scatterer(target, 1.0),),
        multipath=(),
        geometry=turntable_geometry(radius, angle_span, count),
        frequencies=xband_frequencies(),
        region=region,
        wave_speed=wave_speed,
    )


def simo_point_scene(
    nx: int = 256,
    ny: int = 256,
    half_width: float = 1.0,
    wave_speed: float = project_conf.WAVE_SPEED,
) -> SceneConfig:
    """SIMO geometry with a single unit scatterer on the central pixel center."""
    region = ImageRegion.around(Position2D(0.0, 0.0), half_width, half_width, nx, ny)
    target = region.pixel_center(nx // 2, ny // 2)
    return SceneConfig(
        scatterers=(Scatterer(target, 1.0),),
        multipath=(),
        geometry=simo_geometry(XBAND_RADIUS, XBAND_APERTURE_DEG, XBAND_RECEIVERS),
        frequencies=xband_frequencies(),
        region=region,
        wave_speed=wave_speed,
    )


def ghost_scene(
    coupling: float = 0.3,
    separation: float = 1.5,
    front_offset: float = 0.9,
    nx: int = 256,
    ny: int = 256,
    half_width: float = 2.0,
    wave_speed: float = project_conf.WAVE_SPEED,
) -> SceneConfig:
    """Three unit scatterers: two side by side across range (coupled by a double
    bounce) and one in front of them. Each bounce order images a ghost roughly
    `separation / 2` behind the scatterer it ends on."""
    region = ImageRegion.around(Position2D(0.0, 0.0), half_width, half_width, nx, ny)
    scatterers = (
        Scatterer(Position2D(-separation / 2.0, 0.0), 1.0),
        Scatterer(Position2D(separation / 2.0, 0.0), 1.0),
        Scatterer(Position2D(0.0, front_offset), 1.0),
    )
    return SceneConfig(
        scatterers=scatterers,
        multipath=(MultipathPair(0, 1, coupling),),
        geometry=simo_geometry(XBAND_RADIUS, XBAND_APERTURE_DEG, XBAND_RECEIVERS),
        frequencies=xband_frequencies(),
        region=region,
        wave_speed=wave_speed,
    )
