#! /usr/bin/env python3
# vim:fenc=utf-8
#
# Distributed under terms of the MIT license.

"""
Array layouts, the step-frequency ladder, the imaging region and scene descriptions.
All coordinate and distance computations live here.

Coordinates are in meters, with the scene (turntable) center at the origin. Arrays
placed at `center_angle=90` look at the scene from +y, so y is the down-range axis.
"""

import math
from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Tuple

import torch
from torch import Tensor

from conf import project as project_conf
from src.errors import InputError
from utils import get_device


def _check_finite(**values: float) -> None:
    for name, value in values.items():
        if not math.isfinite(value):
            raise InputError(f"{name} must be finite, got {value}.")


@dataclass(frozen=True)
class Position2D:
    x: float
    y: float

    def __post_init__(self) -> None:
        _check_finite(x=self.x, y=self.y)

    def distance_to(self, other: "Position2D") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


def two_way_distance(target: Position2D, tx: Position2D, rx: Position2D) -> float:
    """Transmitter → target → receiver path length."""
    return target.distance_to(tx) + target.distance_to(rx)


def two_way_distance_grid(x: Tensor, y: Tensor, tx: Position2D, rx: Position2D) -> Tensor:
    """Elementwise two_way_distance for target coordinate tensors `x`, `y`."""
    return torch.hypot(x - tx.x, y - tx.y) + torch.hypot(x - rx.x, y - rx.y)


@dataclass(frozen=True)
class ArrayGeometry:
    """Transmitter and receiver positions. Channels are enumerated m-major over
    (transmitter m, receiver n); a monostatic array pairs element k with itself only."""

    transmitters: Tuple[Position2D, ...]
    receivers: Tuple[Position2D, ...]
    monostatic: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "transmitters", tuple(self.transmitters))
        object.__setattr__(self, "receivers", tuple(self.receivers))
        if len(self.transmitters) < 1 or len(self.receivers) < 1:
            raise InputError("An array needs at least one transmitter and one receiver.")
        if self.monostatic and len(self.transmitters) != len(self.receivers):
            raise InputError(
                "A monostatic array needs as many transmitters as receivers, got "
                + f"{len(self.transmitters)} and {len(self.receivers)}."
            )

    @property
    def num_channels(self) -> int:
        if self.monostatic:
            return len(self.transmitters)
        return len(self.transmitters) * len(self.receivers)

    def channel_indices(self) -> Iterator[Tuple[int, int]]:
        if self.monostatic:
            for k in range(len(self.transmitters)):
                yield k, k
        else:
            for m in range(len(self.transmitters)):
                for n in range(len(self.receivers)):
                    yield m, n

    def channels(self) -> List[Tuple[Position2D, Position2D]]:
        return [
            (self.transmitters[m], self.receivers[n]) for m, n in self.channel_indices()
        ]


def _arc_positions(
    radius: float, aperture_angle: float, count: int, center_angle: float
) -> Tuple[Position2D, ...]:
    if radius <= 0:
        raise InputError(f"Arc radius must be positive, got {radius}.")
    if count < 1:
        raise InputError(f"Arc element count must be at least 1, got {count}.")
    if aperture_angle < 0:
        raise InputError(f"Aperture angle must be non-negative, got {aperture_angle}.")
    if count == 1:
        angles = [center_angle]
    else:
        step = aperture_angle / (count - 1)
        start = center_angle - aperture_angle / 2.0
        angles = [start + k * step for k in range(count)]
    return tuple(
        Position2D(
            radius * math.cos(math.radians(a)), radius * math.sin(math.radians(a))
        )
        for a in angles
    )


def arc_receiver_array(
    radius: float, aperture_angle: float, count: int, center_angle: float = 90.0
) -> Tuple[Position2D, ...]:
    """`count` elements uniformly spaced in angle (degrees) over
    [center - aperture/2, center + aperture/2] at `radius` from the origin."""
    return _arc_positions(radius, aperture_angle, count, center_angle)


def simo_geometry(
    radius: float, aperture_angle: float, count: int, center_angle: float = 90.0
) -> ArrayGeometry:
    """A single transmitter in the middle of an arc of receivers."""
    receivers = arc_receiver_array(radius, aperture_angle, count, center_angle)
    (transmitter,) = _arc_positions(radius, 0.0, 1, center_angle)
    return ArrayGeometry(transmitters=(transmitter,), receivers=receivers)


def turntable_geometry(
    radius: float, angle_span: float, count: int, center_angle: float = 90.0
) -> ArrayGeometry:
    """Turntable ISAR as equivalent monostatic positions on an arc."""
    positions = _arc_positions(radius, angle_span, count, center_angle)
    return ArrayGeometry(transmitters=positions, receivers=positions, monostatic=True)


@dataclass(frozen=True)
class FrequencyGrid:
    f0: float
    delta_f: float
    count: int

    def __post_init__(self) -> None:
        _check_finite(f0=self.f0, delta_f=self.delta_f)
        if self.f0 <= 0:
            raise InputError(f"Start frequency must be positive, got {self.f0}.")
        if self.delta_f <= 0:
            raise InputError(f"Frequency step must be positive, got {self.delta_f}.")
        if self.count < 1:
            raise InputError(f"Frequency count must be at least 1, got {self.count}.")

    @classmethod
    def from_band(cls, start: float, stop: float, count: int) -> "FrequencyGrid":
        """Inclusive endpoints: `count` points from `start` to `stop`."""
        if count < 2:
            raise InputError("A band needs at least two frequency points.")
        return cls(start, (stop - start) / (count - 1), count)

    def frequency(self, i: int) -> float:
        if not 0 <= i < self.count:
            raise IndexError(f"Frequency index {i} out of range [0, {self.count}).")
        return self.f0 + i * self.delta_f

    def frequencies(self, device: Optional[torch.device] = None) -> Tensor:
        i = torch.arange(self.count, dtype=torch.float64, device=device)
        return self.f0 + i * self.delta_f

    @property
    def stop(self) -> float:
        return self.frequency(self.count - 1)

    def range_resolution(self, wave_speed: float = project_conf.WAVE_SPEED) -> float:
        return wave_speed / (2.0 * self.count * self.delta_f)


@dataclass(frozen=True)
class ImageRegion:
    """Rectangular imaging region sampled at pixel centers. Images are stored as
    (ny, nx) arrays: pixel (k, l) is column k (x) and row l (y), row-major index
    l * nx + k."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    nx: int
    ny: int

    def __post_init__(self) -> None:
        _check_finite(
            x_min=self.x_min, x_max=self.x_max, y_min=self.y_min, y_max=self.y_max
        )
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise InputError(f"Empty imaging region: {self}.")
        if self.nx < 1 or self.ny < 1:
            raise InputError(f"Pixel counts must be at least 1, got {self.nx}x{self.ny}.")

    @classmethod
    def parse(cls, spec: str) -> "ImageRegion":
        """Parse "x0,x1,y0,y1,nx,ny"."""
        parts = [p.strip() for p in spec.split(",")]
        if len(parts) != 6:
            raise InputError(f"Region must be 'x0,x1,y0,y1,nx,ny', got '{spec}'.")
        try:
            x0, x1, y0, y1 = (float(p) for p in parts[:4])
            nx, ny = int(parts[4]), int(parts[5])
        except ValueError as e:
            raise InputError(f"Invalid region '{spec}': {e}") from e
        return cls(x0, x1, y0, y1, nx, ny)

    @classmethod
    def around(
        cls,
        center: Position2D,
        half_width: float,
        half_height: float,
        nx: int,
        ny: int,
    ) -> "ImageRegion":
        """A region whose pixel (nx // 2, ny // 2) is centered on `center`."""
        dx, dy = 2.0 * half_width / nx, 2.0 * half_height / ny
        x_min = center.x - (nx // 2 + 0.5) * dx
        y_min = center.y - (ny // 2 + 0.5) * dy
        return cls(x_min, x_min + nx * dx, y_min, y_min + ny * dy, nx, ny)

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.nx

    @property
    def dy(self) -> float:
        return (self.y_max - self.y_min) / self.ny

    @property
    def shape(self) -> Tuple[int, int]:
        return self.ny, self.nx

    def x_centers(self, device: Optional[torch.device] = None) -> Tensor:
        k = torch.arange(self.nx, dtype=torch.float64, device=device)
        return self.x_min + (k + 0.5) * self.dx

    def y_centers(self, device: Optional[torch.device] = None) -> Tensor:
        l = torch.arange(self.ny, dtype=torch.float64, device=device)  # noqa: E741
        return self.y_min + (l + 0.5) * self.dy

    def meshgrid(self, device: Optional[torch.device] = None) -> Tuple[Tensor, Tensor]:
        """(X, Y) pixel-center coordinates, each of shape (ny, nx)."""
        device = device or get_device()
        ys, xs = torch.meshgrid(
            self.y_centers(device), self.x_centers(device), indexing="ij"
        )
        return xs, ys

    def pixel_center(self, k: int, l: int) -> Position2D:  # noqa: E741
        if not (0 <= k < self.nx and 0 <= l < self.ny):
            raise InputError(f"Pixel ({k}, {l}) outside a {self.nx}x{self.ny} region.")
        return Position2D(
            self.x_min + (k + 0.5) * self.dx, self.y_min + (l + 0.5) * self.dy
        )

    def pixel_index(self, k: int, l: int) -> int:  # noqa: E741
        if not (0 <= k < self.nx and 0 <= l < self.ny):
            raise InputError(f"Pixel ({k}, {l}) outside a {self.nx}x{self.ny} region.")
        return l * self.nx + k

    def pixel_from_index(self, index: int) -> Tuple[int, int]:
        if not 0 <= index < self.nx * self.ny:
            raise InputError(f"Pixel index {index} out of range.")
        l, k = divmod(index, self.nx)  # noqa: E741
        return k, l

    def contains(self, position: Position2D) -> bool:
        return (
            self.x_min <= position.x <= self.x_max
            and self.y_min <= position.y <= self.y_max
        )

    def nearest_pixel(self, position: Position2D) -> Tuple[int, int]:
        if not self.contains(position):
            raise InputError(f"{position} lies outside the imaging region {self}.")
        k = min(int(math.floor((position.x - self.x_min) / self.dx)), self.nx - 1)
        l = min(int(math.floor((position.y - self.y_min) / self.dy)), self.ny - 1)  # noqa: E741
        return k, l


@dataclass(frozen=True)
class Scatterer:
    position: Position2D
    reflectivity: complex = 1.0 + 0.0j

    def __post_init__(self) -> None:
        object.__setattr__(self, "reflectivity", complex(self.reflectivity))
        if not math.isfinite(abs(self.reflectivity)):
            raise InputError(f"Reflectivity must be finite, got {self.reflectivity}.")


@dataclass(frozen=True)
class MultipathPair:
    """Double bounce between scatterers `first` and `second` (indices)."""

    first: int
    second: int
    coupling: complex = 0.3 + 0.0j

    def __post_init__(self) -> None:
        object.__setattr__(self, "coupling", complex(self.coupling))
        if self.first == self.second:
            raise InputError(
                f"A multipath pair needs two distinct scatterers, got {self.first} twice."
            )


@dataclass(frozen=True)
class SceneConfig:
    scatterers: Tuple[Scatterer, ...]
    multipath: Tuple[MultipathPair, ...]
    geometry: ArrayGeometry
    frequencies: FrequencyGrid
    region: ImageRegion
    wave_speed: float = project_conf.WAVE_SPEED
    # File the scene was read from, if any (recorded in run manifests).
    source: Optional[str] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "scatterers", tuple(self.scatterers))
        object.__setattr__(self, "multipath", tuple(self.multipath))
        if not (math.isfinite(self.wave_speed) and self.wave_speed > 0):
            raise InputError(f"Wave speed must be positive, got {self.wave_speed}.")
        if len(self.scatterers) < 1:
            raise InputError("A scene needs at least one scatterer.")
        for pair in self.multipath:
            for index in (pair.first, pair.second):
                if not 0 <= index < len(self.scatterers):
                    raise InputError(
                        f"Multipath pair {pair} references scatterer {index}, "
                        + f"but the scene has {len(self.scatterers)}."
                    )

    @property
    def target_positions(self) -> List[Position2D]:
        return [s.position for s in self.scatterers]

    def with_region(self, region: ImageRegion) -> "SceneConfig":
        return SceneConfig(
            self.scatterers,
            self.multipath,
            self.geometry,
            self.frequencies,
            region,
            self.wave_speed,
            self.source,
        )

