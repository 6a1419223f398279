#! /usr/bin/env python3
# vim:fenc=utf-8
#
# Distributed under terms of the MIT license.

"""
Synthetic step-frequency echoes: direct Born returns from point scatterers, plus an
explicit double-bounce term between scatterer pairs which produces multipath ghosts.

Every sample accumulates its terms in a fixed order (scatterers ascending, direct
terms before multipath terms, bounce a→b before b→a), so echoes are bit-reproducible.
"""

import math
from dataclasses import dataclass
from typing import Optional

import torch
from torch import Tensor
from tqdm import tqdm

from conf import project as project_conf
from src.errors import InputError
from src.geometry import (
    ArrayGeometry,
    FrequencyGrid,
    Position2D,
    SceneConfig,
    two_way_distance,
)
from utils import phasor


@dataclass(frozen=True)
class EchoData:
    """Complex samples indexed [channel, frequency], channels in the geometry's
    canonical order."""

    geometry: ArrayGeometry
    frequencies: FrequencyGrid
    samples: Tensor
    wave_speed: float = project_conf.WAVE_SPEED

    def __post_init__(self) -> None:
        expected = (self.geometry.num_channels, self.frequencies.count)
        if tuple(self.samples.shape) != expected:
            raise InputError(
                f"Echo samples have shape {tuple(self.samples.shape)}, "
                + f"expected {expected} (channels x frequencies)."
            )
        if not self.samples.is_complex():
            raise InputError("Echo samples must be complex.")
        if not bool(torch.isfinite(torch.view_as_real(self.samples)).all()):
            raise InputError("Echo samples must be finite.")

    @property
    def num_channels(self) -> int:
        return self.geometry.num_channels


def _spreading_gain(target: Position2D, tx: Position2D, rx: Position2D) -> float:
    r_tx, r_rx = target.distance_to(tx), target.distance_to(rx)
    if r_tx == 0.0 or r_rx == 0.0:
        raise InputError(
            f"Spreading loss is undefined for a scatterer at {target} "
            + "coinciding with an array element."
        )
    return 1.0 / (r_tx * r_rx)


def _add_path(
    samples: Tensor, row: int, amplitude: complex, freqs: Tensor, path: float, c: float
) -> None:
    samples[row] += amplitude * phasor(freqs * (path / c), sign=-1.0)


def _simulate(scene: SceneConfig, multipath: bool, spreading: bool) -> EchoData:
    freqs = scene.frequencies.frequencies()
    c = scene.wave_speed
    channels = scene.geometry.channels()
    samples = torch.zeros(
        (len(channels), scene.frequencies.count), dtype=torch.complex128
    )
    for row, (tx, rx) in enumerate(
        tqdm(
            channels,
            desc="Simulating echoes",
            disable=not project_conf.SHOW_PROGRESS,
            leave=False,
        )
    ):
        for scatterer in scene.scatterers:
            p = scatterer.position
            amplitude = scatterer.reflectivity
            if spreading:
                amplitude *= _spreading_gain(p, tx, rx)
            _add_path(samples, row, amplitude, freqs, two_way_distance(p, tx, rx), c)
        if not multipath:
            continue
        for pair in scene.multipath:
            a = scene.scatterers[pair.first]
            b = scene.scatterers[pair.second]
            amplitude = pair.coupling * a.reflectivity * b.reflectivity
            gap = a.position.distance_to(b.position)
            forward_path = tx.distance_to(a.position) + gap + b.position.distance_to(rx)
            reverse_path = tx.distance_to(b.position) + gap + a.position.distance_to(rx)
            forward_amp, reverse_amp = amplitude, amplitude
            if spreading:
                forward_amp *= 1.0 / (
                    tx.distance_to(a.position) * b.position.distance_to(rx)
                )
                reverse_amp *= 1.0 / (
                    tx.distance_to(b.position) * a.position.distance_to(rx)
                )
            _add_path(samples, row, forward_amp, freqs, forward_path, c)
            _add_path(samples, row, reverse_amp, freqs, reverse_path, c)
    return EchoData(scene.geometry, scene.frequencies, samples, scene.wave_speed)


def simulate_direct(scene: SceneConfig, spreading: bool = False) -> EchoData:
    """Born-approximation echoes: sum over scatterers of g_k exp(-j2πf R_k / c)."""
    return _simulate(scene, multipath=False, spreading=spreading)


def simulate_with_multipath(scene: SceneConfig, spreading: bool = False) -> EchoData:
    """Direct echoes plus, for every multipath pair (a, b, κ), the double bounces
    tx→a→b→rx and tx→b→a→rx, each weighted by κ g_a g_b."""
    for pair in scene.multipath:
        for index in (pair.first, pair.second):
            if not 0 <= index < len(scene.scatterers):
                raise InputError(
                    f"Multipath pair {pair} references missing scatterer {index}."
                )
    return _simulate(scene, multipath=True, spreading=spreading)


def add_noise(echo: EchoData, snr_db: Optional[float], seed: int) -> EchoData:
    """Add circularly-symmetric complex Gaussian noise at the given SNR (mean sample
    power over noise power). `None` or +inf leaves the echo untouched."""
    if snr_db is None or snr_db == math.inf:
        return echo
    if not math.isfinite(snr_db):
        raise InputError(f"SNR must be finite or +inf, got {snr_db}.")
    signal_power = float(torch.mean(torch.abs(echo.samples) ** 2))
    noise_power = signal_power / (10.0 ** (snr_db / 10.0))
    generator = torch.Generator(device="cpu").manual_seed(seed)
    shape = tuple(echo.samples.shape)
    real = torch.randn(shape, generator=generator, dtype=torch.float64)
    imag = torch.randn(shape, generator=generator, dtype=torch.float64)
    noise = math.sqrt(noise_power / 2.0) * torch.complex(real, imag)
    return EchoData(
        echo.geometry,
        echo.frequencies,
        echo.samples + noise.to(echo.samples.device),
        echo.wave_speed,
    )
