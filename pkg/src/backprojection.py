#! /usr/bin/env python3
# vim:fenc=utf-8
#
# Distributed under terms of the MIT license.

"""
Back-projection (delay-and-sum) image formation with both summation orderings:

    - channel ordering: per-channel range profiles y_mn(r) (frequency sum first),
      then the sum over channels;
    - frequency ordering: per-frequency subimages y_i(r) (channel sum first), then
      the sum over frequencies.

Pixels are the vectorized axis. Channel and frequency loops run sequentially in
ascending order, which keeps every image bit-reproducible for any thread count.
"""

from dataclasses import dataclass, field
from typing import Iterator, Optional, Tuple

import torch
from torch import Tensor
from tqdm import tqdm

from conf import project as project_conf
from src.errors import InputError
from src.forward import EchoData
from src.geometry import ImageRegion, Position2D, two_way_distance_grid
from utils import get_device, phasor, to_device_
from utils.helpers import magnitude_db


@dataclass(frozen=True)
class ImageGrid:
    region: ImageRegion
    pixels: Tensor

    def __post_init__(self) -> None:
        if tuple(self.pixels.shape) != self.region.shape:
            raise InputError(
                f"Image of shape {tuple(self.pixels.shape)} does not match "
                + f"its region {self.region.shape}."
            )
        if not self.pixels.is_complex():
            object.__setattr__(self, "pixels", self.pixels.to(torch.complex128))

    def magnitude(self) -> Tensor:
        return torch.abs(self.pixels)

    def peak(self) -> float:
        return float(self.magnitude().max())

    def peak_pixel(self) -> Tuple[int, int]:
        """(k, l) of the strongest pixel; the lowest row-major index wins ties."""
        index = int(torch.argmax(self.magnitude().flatten()))
        return self.region.pixel_from_index(index)

    def value_at(self, position: Position2D) -> complex:
        k, l = self.region.nearest_pixel(position)  # noqa: E741
        return complex(self.pixels[l, k])

    def to_db(self) -> Tensor:
        """Magnitude in dB relative to the image peak."""
        peak = self.peak()
        if peak <= 0.0:
            raise InputError("A zero image has no dB representation.")
        return magnitude_db(self.magnitude(), peak)


@dataclass(frozen=True)
class _ImageStack:
    region: ImageRegion
    layers: Tensor

    def __post_init__(self) -> None:
        if self.layers.dim() != 3 or tuple(self.layers.shape[1:]) != self.region.shape:
            raise InputError(
                f"Stack of shape {tuple(self.layers.shape)} does not match "
                + f"its region {self.region.shape}."
            )

    @property
    def depth(self) -> int:
        return int(self.layers.shape[0])

    def _sum_layers(self, weights: Optional[Tensor] = None) -> Tensor:
        if self.depth == 0:
            raise InputError("Cannot form an image from an empty stack.")
        image = torch.zeros(self.region.shape, dtype=self.layers.dtype, device=self.layers.device)
        for k in range(self.depth):
            image += self.layers[k] if weights is None else weights[k] * self.layers[k]
        return image


@dataclass(frozen=True)
class ChannelImageStack(_ImageStack):
    """Per-channel range-profile images y_mn(r), in canonical channel order."""


@dataclass(frozen=True)
class FrequencyImageStack(_ImageStack):
    """Per-frequency subimages y_i(r). `weights` are the spectral weights applied
    when the layers are summed into an image."""

    weights: Optional[Tensor] = field(default=None, compare=False)


def _spectral_weights(echo: EchoData, f_weighted: bool, device: torch.device) -> Tensor:
    freqs = echo.frequencies.frequencies(device)
    if f_weighted:
        return freqs / echo.frequencies.f0
    return torch.ones_like(freqs)


def _delay_cycles(echo: EchoData, region: ImageRegion, device: torch.device) -> Iterator[Tensor]:
    """Per channel, the two-way delay R(r)/c of every pixel (cycles per hertz)."""
    xs, ys = region.meshgrid(device)
    channels = echo.geometry.channels()
    for tx, rx in tqdm(
        channels,
        desc="Back-projecting",
        disable=not project_conf.SHOW_PROGRESS,
        leave=False,
    ):
        yield two_way_distance_grid(xs, ys, tx, rx) / echo.wave_speed


def _check_inputs(echo: EchoData, region: ImageRegion) -> None:
    if not isinstance(echo, EchoData) or not isinstance(region, ImageRegion):
        raise InputError("Back-projection needs an EchoData and an ImageRegion.")
    if tuple(echo.samples.shape) != (echo.geometry.num_channels, echo.frequencies.count):
        raise InputError("Echo samples do not match their geometry/frequency metadata.")


def backproject_stacks(
    echo: EchoData,
    region: ImageRegion,
    f_weighted: bool = False,
    with_channels: bool = True,
    with_frequencies: bool = True,
) -> Tuple[Optional[ChannelImageStack], Optional[FrequencyImageStack]]:
    """Channel and frequency stacks in a single pass over the data. Each stack has
    the same summation order as channel_images / frequency_images respectively."""
    _check_inputs(echo, region)
    device = get_device()
    samples = to_device_(echo.samples)
    freqs = echo.frequencies.frequencies(device)
    weights = _spectral_weights(echo, f_weighted, device)
    n_freqs = echo.frequencies.count
    chan_layers = (
        torch.zeros((echo.num_channels, *region.shape), dtype=torch.complex128, device=device)
        if with_channels
        else None
    )
    freq_layers = (
        torch.zeros((n_freqs, *region.shape), dtype=torch.complex128, device=device)
        if with_frequencies
        else None
    )
    for c, cycles_per_hz in enumerate(_delay_cycles(echo, region, device)):
        for i in range(n_freqs):
            term = samples[c, i] * phasor(freqs[i] * cycles_per_hz)
            if chan_layers is not None:
                chan_layers[c] += weights[i] * term
            if freq_layers is not None:
                freq_layers[i] += term
    channel_stack = (
        ChannelImageStack(region, chan_layers) if chan_layers is not None else None
    )
    frequency_stack = (
        FrequencyImageStack(region, freq_layers, weights)
        if freq_layers is not None
        else None
    )
    return channel_stack, frequency_stack


def channel_images(
    echo: EchoData, region: ImageRegion, f_weighted: bool = False
) -> ChannelImageStack:
    """y_mn(r) = Σ_i w_i E(tx_m, rx_n, f_i) exp(+j2π f_i R(r, tx_m, rx_n) / c)."""
    stack, _ = backproject_stacks(echo, region, f_weighted, with_frequencies=False)
    assert stack is not None
    return stack


def frequency_images(
    echo: EchoData, region: ImageRegion, f_weighted: bool = False
) -> FrequencyImageStack:
    """y_i(r) = Σ_mn E(tx_m, rx_n, f_i) exp(+j2π f_i R(r, tx_m, rx_n) / c)."""
    _, stack = backproject_stacks(echo, region, f_weighted, with_channels=False)
    assert stack is not None
    return stack


def image_from_channels(stack: ChannelImageStack) -> ImageGrid:
    return ImageGrid(stack.region, stack._sum_layers())


def image_from_frequencies(stack: FrequencyImageStack) -> ImageGrid:
    return ImageGrid(stack.region, stack._sum_layers(stack.weights))


def fast_range_profiles(
    echo: EchoData,
    region: ImageRegion,
    upsample: int = project_conf.FAST_BP_UPSAMPLE,
    f_weighted: bool = False,
) -> ChannelImageStack:
    """Approximate channel_images through an IFFT range profile per channel.

    The I samples are zero-padded to L = I * upsample and inverse transformed, which
    evaluates the frequency sum on the delay grid n / (L Δf). The profile is taken
    relative to the band center so a point response has no linear phase across bins,
    then linearly interpolated at each pixel's delay and rotated back by the
    band-center carrier exp(+j2π f_c R / c).
    """
    _check_inputs(echo, region)
    if upsample < 1:
        raise InputError(f"Upsampling factor must be at least 1, got {upsample}.")
    device = get_device()
    grid = echo.frequencies
    n_freqs = grid.count
    n_bins = n_freqs * upsample
    center_index = (n_freqs - 1) / 2.0
    f_center = grid.f0 + center_index * grid.delta_f
    weights = _spectral_weights(echo, f_weighted, device)
    samples = to_device_(echo.samples) * weights
    # n_bins * ifft gives Σ_i E_i exp(+j2π i n / L) exactly.
    profiles = torch.fft.ifft(samples, n=n_bins, dim=-1) * n_bins
    layers = torch.zeros((echo.num_channels, *region.shape), dtype=torch.complex128, device=device)
    for c, delay in enumerate(_delay_cycles(echo, region, device)):
        position = delay * (grid.delta_f * n_bins)
        lower = torch.floor(position)
        frac = (position - lower).to(torch.complex128)
        lower_bin = lower.to(torch.int64)
        upper_bin = lower_bin + 1
        # Centered profile value at integer bin n: exp(-j2π i_c n / L) P[n mod L]
        lower_val = profiles[c][torch.remainder(lower_bin, n_bins)] * phasor(
            lower_bin.to(torch.float64) * (center_index / n_bins), sign=-1.0
        )
        upper_val = profiles[c][torch.remainder(upper_bin, n_bins)] * phasor(
            upper_bin.to(torch.float64) * (center_index / n_bins), sign=-1.0
        )
        baseband = lower_val + frac * (upper_val - lower_val)
        layers[c] = baseband * phasor(f_center * delay)
    return ChannelImageStack(region, layers)
