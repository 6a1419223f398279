#! /usr/bin/env python3
# vim:fenc=utf-8
#
# Distributed under terms of the MIT license.

"""
Coherence factor (CF) and phase coherence factor (PCF) maps, along the aperture
(channel stack) and along frequency (frequency stack), their 2-D products, and the
multiplicative enhancement of a back-projected image.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Union

import torch
from torch import Tensor

from conf import project as project_conf
from src.backprojection import ChannelImageStack, FrequencyImageStack, ImageGrid
from src.errors import ConsistencyError, InputError
from src.geometry import ImageRegion
from utils.helpers import magnitude_db

Stack = Union[ChannelImageStack, FrequencyImageStack]


class MapKind(Enum):
    CF = "cf"
    CFF = "cff"
    CF2D = "cf2d"
    PCF = "pcf"
    PCFF = "pcff"
    PCF2D = "pcf2d"

    def __str__(self):
        return f"{self.value}"

    @classmethod
    def parse(cls, name: str) -> "MapKind":
        try:
            return cls(name.lower())
        except ValueError as e:
            raise InputError(
                f"Unknown map kind '{name}', expected one of "
                + f"{', '.join(k.value for k in cls)}."
            ) from e


@dataclass(frozen=True)
class CoherenceMap:
    region: ImageRegion
    values: Tensor
    kind: MapKind

    def __post_init__(self) -> None:
        if tuple(self.values.shape) != self.region.shape:
            raise InputError(
                f"Map of shape {tuple(self.values.shape)} does not match "
                + f"its region {self.region.shape}."
            )
        if self.values.is_complex():
            raise InputError("Coherence maps are real-valued.")

    def magnitude(self) -> Tensor:
        return torch.abs(self.values)

    def to_db(self) -> Tensor:
        peak = float(self.magnitude().max())
        if peak <= 0.0:
            raise InputError("An all-zero map has no dB representation.")
        return magnitude_db(self.magnitude(), peak)


def _bounded(values: Tensor, what: str) -> Tensor:
    """Check `values` against [0, 1] up to the slack, then clamp."""
    slack = project_conf.MAP_SLACK
    low, high = float(values.min()), float(values.max())
    if low < -slack or high > 1.0 + slack or values.isnan().any():
        raise ConsistencyError(
            f"{what} map left [0, 1] beyond the {slack:g} slack: "
            + f"min={low!r}, max={high!r}."
        )
    return values.clamp(0.0, 1.0)


def _layers_of(stack: Stack) -> Tensor:
    if stack.depth < 1:
        raise InputError("Coherence factors need a stack of depth at least 1.")
    return stack.layers


def incoherent_power(stack: Stack) -> Tensor:
    """K · Σ_k |y_k|², the CF denominator."""
    layers = _layers_of(stack)
    power = torch.zeros(stack.region.shape, dtype=torch.float64, device=layers.device)
    for k in range(stack.depth):
        power += layers[k].real ** 2 + layers[k].imag ** 2
    return stack.depth * power


def _coherence_factor(stack: Stack) -> Tensor:
    layers = _layers_of(stack)
    coherent = torch.zeros(stack.region.shape, dtype=torch.complex128, device=layers.device)
    for k in range(stack.depth):
        coherent += layers[k]
    numerator = coherent.real**2 + coherent.imag**2
    denominator = incoherent_power(stack)
    nonzero = denominator > 0
    safe = torch.where(nonzero, denominator, torch.ones_like(denominator))
    return torch.where(nonzero, numerator / safe, torch.zeros_like(numerator))


def _phase_coherence_factor(stack: Stack) -> Tensor:
    layers = _layers_of(stack)
    depth = stack.depth
    # The phase of an exact zero is taken as 0.
    phases = torch.where(layers == 0, torch.zeros_like(layers.real), torch.angle(layers))
    cos, sin = torch.cos(phases), torch.sin(phases)
    mean_cos = torch.zeros(stack.region.shape, dtype=torch.float64, device=layers.device)
    mean_sin = torch.zeros_like(mean_cos)
    for k in range(depth):
        mean_cos += cos[k]
        mean_sin += sin[k]
    mean_cos /= depth
    mean_sin /= depth
    dispersion = torch.zeros_like(mean_cos)
    for k in range(depth):
        dispersion += (cos[k] - mean_cos) ** 2 + (sin[k] - mean_sin) ** 2
    # Population standard deviation of the unit phasors.
    return 1.0 - torch.sqrt(dispersion / depth)


def cf_spatial(stack: ChannelImageStack) -> CoherenceMap:
    """CF = |Σ_k y_k|² / (K Σ_k |y_k|²) over channels; zero-energy pixels map to 0."""
    values = _bounded(_coherence_factor(stack), "CF")
    return CoherenceMap(stack.region, values, MapKind.CF)


def cf_frequency(stack: FrequencyImageStack) -> CoherenceMap:
    """CF^f, the same ratio taken over the frequency subimages."""
    values = _bounded(_coherence_factor(stack), "CF^f")
    return CoherenceMap(stack.region, values, MapKind.CFF)


def pcf_spatial(stack: ChannelImageStack) -> CoherenceMap:
    """PCF = 1 - sqrt(std²(cos φ) + std²(sin φ)) over the channel phases."""
    values = _bounded(_phase_coherence_factor(stack), "PCF")
    return CoherenceMap(stack.region, values, MapKind.PCF)


def pcf_frequency(stack: FrequencyImageStack) -> CoherenceMap:
    values = _bounded(_phase_coherence_factor(stack), "PCF^f")
    return CoherenceMap(stack.region, values, MapKind.PCFF)


def _product(
    spatial: CoherenceMap,
    frequency: CoherenceMap,
    kinds: tuple[MapKind, MapKind],
    result: MapKind,
) -> CoherenceMap:
    if (spatial.kind, frequency.kind) != kinds:
        raise InputError(
            f"{result} needs {kinds[0]} and {kinds[1]} maps, "
            + f"got {spatial.kind} and {frequency.kind}."
        )
    if spatial.region != frequency.region:
        raise InputError(f"Cannot combine maps over different regions for {result}.")
    values = _bounded(spatial.values * frequency.values, str(result))
    return CoherenceMap(spatial.region, values, result)


def cf_2d(spatial: CoherenceMap, frequency: CoherenceMap) -> CoherenceMap:
    return _product(spatial, frequency, (MapKind.CF, MapKind.CFF), MapKind.CF2D)


def pcf_2d(spatial: CoherenceMap, frequency: CoherenceMap) -> CoherenceMap:
    return _product(spatial, frequency, (MapKind.PCF, MapKind.PCFF), MapKind.PCF2D)


def apply_map(image: ImageGrid, coherence_map: CoherenceMap) -> ImageGrid:
    """Pixelwise enhancement g'(r) = map(r) · g(r)."""
    if image.region != coherence_map.region:
        raise InputError("Image and coherence map cover different regions.")
    values = coherence_map.values.to(image.pixels.device)
    return ImageGrid(image.region, image.pixels * values)


def compute_maps(
    channel_stack: ChannelImageStack, frequency_stack: FrequencyImageStack
) -> dict[MapKind, CoherenceMap]:
    """All six maps, keyed by kind."""
    if channel_stack.region != frequency_stack.region:
        raise InputError("Channel and frequency stacks cover different regions.")
    maps = {
        MapKind.CF: cf_spatial(channel_stack),
        MapKind.CFF: cf_frequency(frequency_stack),
        MapKind.PCF: pcf_spatial(channel_stack),
        MapKind.PCFF: pcf_frequency(frequency_stack),
    }
    maps[MapKind.CF2D] = cf_2d(maps[MapKind.CF], maps[MapKind.CFF])
    maps[MapKind.PCF2D] = pcf_2d(maps[MapKind.PCF], maps[MapKind.PCFF])
    return {kind: maps[kind] for kind in MapKind}


def compute_map(
    kind: MapKind,
    channel_stack: ChannelImageStack,
    frequency_stack: FrequencyImageStack,
) -> CoherenceMap:
    """A single map by kind; the 2-D kinds compute both of their factors."""
    if kind is MapKind.CF:
        return cf_spatial(channel_stack)
    if kind is MapKind.CFF:
        return cf_frequency(frequency_stack)
    if kind is MapKind.PCF:
        return pcf_spatial(channel_stack)
    if kind is MapKind.PCFF:
        return pcf_frequency(frequency_stack)
    if kind is MapKind.CF2D:
        return cf_2d(cf_spatial(channel_stack), cf_frequency(frequency_stack))
    return pcf_2d(pcf_spatial(channel_stack), pcf_frequency(frequency_stack))
