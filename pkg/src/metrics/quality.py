#! /usr/bin/env python3
# vim:fenc=utf-8
#
# Distributed under terms of the MIT license.

"""
Image quality measurements: dB cuts through a peak, peak sidelobe ratio, ghost peaks
away from the true targets and suppression deltas between two images.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Sequence, Tuple, Union

import torch
import torch.nn.functional as F
from torch import Tensor

from conf import project as project_conf
from src.backprojection import ImageGrid
from src.coherence import CoherenceMap
from src.errors import InputError
from src.geometry import Position2D
from utils.helpers import amplitude_db, magnitude_db

Image = Union[ImageGrid, CoherenceMap]


class CutAxis(Enum):
    # Arrays face the scene from +y: range runs along y (a pixel column), azimuth
    # along x (a pixel row).
    RANGE = "range"
    AZIMUTH = "azimuth"

    def __str__(self):
        return f"{self.value}"


@dataclass(frozen=True)
class ImageCut:
    axis: CutAxis
    coordinates: Tensor
    values_db: Tensor

    def __post_init__(self) -> None:
        if self.coordinates.shape != self.values_db.shape:
            raise InputError("Cut coordinates and values differ in length.")

    def __len__(self) -> int:
        return int(self.values_db.numel())


@dataclass
class QualityReport:
    mainlobe_peak: float
    pslr_range: float
    pslr_azimuth: float
    ghost_levels: List[Tuple[Position2D, float]] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    def to_records(self, prefix: str = "") -> Dict[str, str]:
        records = {
            f"{prefix}mainlobe_peak": f"{self.mainlobe_peak:.6e}",
            f"{prefix}pslr_range_db": f"{self.pslr_range:.3f}",
            f"{prefix}pslr_azimuth_db": f"{self.pslr_azimuth:.3f}",
            f"{prefix}ghost_count": str(len(self.ghost_levels)),
        }
        for i, (position, level) in enumerate(self.ghost_levels):
            records[f"{prefix}ghost_{i}"] = (
                f"{position.x:.4f},{position.y:.4f},{level:.3f}"
            )
        return records

    def to_text(self, title: str = "image") -> List[str]:
        lines = [
            f"[{title}]",
            f"  mainlobe peak     : {self.mainlobe_peak:.6e}",
            f"  PSLR range        : {self.pslr_range:.2f} dB",
            f"  PSLR azimuth      : {self.pslr_azimuth:.2f} dB",
            f"  ghosts            : {len(self.ghost_levels)}",
        ]
        for position, level in self.ghost_levels:
            lines.append(
                f"    ({position.x:+.3f}, {position.y:+.3f}) m  {level:.2f} dB"
            )
        lines.extend(f"  note: {note}" for note in self.notes)
        return lines


def extract_cut(image: Image, through: Position2D, axis: CutAxis) -> ImageCut:
    """Magnitudes along the pixel row/column nearest `through`, in dB normalized to
    the cut's maximum."""
    region = image.region
    k, l = region.nearest_pixel(through)  # noqa: E741
    magnitudes = image.magnitude()
    if axis is CutAxis.RANGE:
        values, coordinates = magnitudes[:, k], region.y_centers()
    else:
        values, coordinates = magnitudes[l, :], region.x_centers()
    values = values.detach().to("cpu", torch.float64)
    peak = float(values.max())
    if peak <= 0.0:
        raise InputError(f"The {axis} cut through {through} is identically zero.")
    return ImageCut(axis, coordinates.cpu(), magnitude_db(values, peak))


def _mainlobe_bounds(values: Sequence[float], peak: int) -> Tuple[int, int]:
    left = peak
    while left > 0 and values[left - 1] <= values[left]:
        left -= 1
    right = peak
    while right < len(values) - 1 and values[right + 1] <= values[right]:
        right += 1
    return left, right


def peak_sidelobe_ratio(cut: ImageCut) -> float:
    """Highest sample outside the mainlobe relative to the peak, in dB. The mainlobe
    extends from the global peak down to the first local minimum on each side.
    Returns -inf when nothing lies outside the mainlobe."""
    if len(cut) < 3:
        raise InputError(f"PSLR needs a cut of at least 3 samples, got {len(cut)}.")
    values = cut.values_db.tolist()
    peak = max(range(len(values)), key=lambda i: (values[i], -i))
    left, right = _mainlobe_bounds(values, peak)
    outside = values[:left] + values[right + 1 :]
    if not outside:
        return float("-inf")
    return max(outside) - values[peak]


def _local_maxima(residual: Tensor) -> Tensor:
    """Strict local maxima over the 8-neighbourhood. Among equal neighbours the lowest
    row-major index wins, so plateaus report a single pixel."""
    padded = F.pad(residual[None, None], (1, 1, 1, 1), value=float("-inf"))[0, 0]
    ny, nx = residual.shape
    is_max = residual > 0
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            if dy == 0 and dx == 0:
                continue
            neighbour = padded[1 + dy : 1 + dy + ny, 1 + dx : 1 + dx + nx]
            earlier = dy < 0 or (dy == 0 and dx < 0)
            is_max &= residual > neighbour if earlier else residual >= neighbour
    return is_max


def ghost_level(
    image: Image,
    true_targets: Sequence[Position2D],
    exclusion_radius: float,
    floor_db: float = project_conf.GHOST_FLOOR_DB,
) -> List[Tuple[Position2D, float]]:
    """Local maxima outside discs of `exclusion_radius` around the true targets and
    above `floor_db` (relative to the global peak), strongest first."""
    if exclusion_radius <= 0:
        raise InputError(f"Exclusion radius must be positive, got {exclusion_radius}.")
    region = image.region
    magnitudes = image.magnitude().detach().to("cpu", torch.float64)
    peak = float(magnitudes.max())
    if peak <= 0.0:
        return []
    xs, ys = region.meshgrid(torch.device("cpu"))
    keep = torch.ones_like(magnitudes, dtype=torch.bool)
    for target in true_targets:
        keep &= torch.hypot(xs - target.x, ys - target.y) > exclusion_radius
    residual = torch.where(keep, magnitudes, torch.zeros_like(magnitudes))
    floor = peak * 10.0 ** (floor_db / 20.0)
    candidates = _local_maxima(residual) & (residual > floor)
    ghosts: List[Tuple[Position2D, float]] = []
    for index in torch.nonzero(candidates.flatten()).flatten().tolist():
        k, l = region.pixel_from_index(index)  # noqa: E741
        level = amplitude_db(float(residual[l, k]) / peak)
        ghosts.append((region.pixel_center(k, l), level))
    # Stable sort keeps row-major order among equal levels.
    ghosts.sort(key=lambda g: -g[1])
    return ghosts


def suppression_delta(before: Image, after: Image, at: Position2D) -> float:
    """Change of the peak-normalized level at `at`, in dB. Negative means `after`
    suppresses that location better."""
    if before.region != after.region:
        raise InputError("Suppression delta needs two images over the same region.")
    levels = []
    for image in (before, after):
        magnitudes = image.magnitude()
        peak = float(magnitudes.max())
        if peak <= 0.0:
            raise InputError("Suppression delta is undefined for a zero image.")
        k, l = image.region.nearest_pixel(at)  # noqa: E741
        levels.append(amplitude_db(float(magnitudes[l, k]) / peak))
    return levels[1] - levels[0]


def quality_report(
    image: Image,
    true_targets: Sequence[Position2D],
    exclusion_radius: float,
    floor_db: float = project_conf.GHOST_FLOOR_DB,
) -> QualityReport:
    """PSLR of the cuts through the strongest true target, plus the ghost list."""
    magnitudes = image.magnitude()
    notes: List[str] = []
    inside = [t for t in true_targets if image.region.contains(t)]
    if inside:

        def level(target: Position2D) -> float:
            k, l = image.region.nearest_pixel(target)  # noqa: E741
            return float(magnitudes[l, k])

        through = max(inside, key=level)
    else:
        index = int(torch.argmax(magnitudes.flatten()))
        through = image.region.pixel_center(*image.region.pixel_from_index(index))
        notes.append("no true target inside the region, cuts taken through the peak")
    k, l = image.region.nearest_pixel(through)  # noqa: E741
    return QualityReport(
        mainlobe_peak=float(magnitudes[l, k]),
        pslr_range=peak_sidelobe_ratio(extract_cut(image, through, CutAxis.RANGE)),
        pslr_azimuth=peak_sidelobe_ratio(extract_cut(image, through, CutAxis.AZIMUTH)),
        ghost_levels=ghost_level(image, true_targets, exclusion_radius, floor_db),
        notes=notes,
    )
