#! /usr/bin/env python3
# vim:fenc=utf-8
#
# Distributed under terms of the MIT license.

"""
On-disk codecs for echoes (.echo) and images/maps (.img), and the 8-bit graymap
export of dB images.

Both binary formats are a magic line, a `key = value` text header closed by a blank
line, then little-endian float64 payload. Header floats are written with repr() so
every value reads back bit-exactly.
"""

import math
from typing import BinaryIO, Dict, List, Tuple, Union

import numpy as np
import torch

from src.backprojection import ImageGrid
from src.coherence import CoherenceMap, MapKind
from src.errors import InputError
from src.forward import EchoData
from src.geometry import ArrayGeometry, FrequencyGrid, ImageRegion, Position2D

ECHO_MAGIC = b"RCE1\n"
IMAGE_MAGIC = b"RCI1\n"
IMAGE_KIND = "image"

Image = Union[ImageGrid, CoherenceMap]


def _write_header(f: BinaryIO, magic: bytes, entries: List[Tuple[str, str]]) -> None:
    f.write(magic)
    for key, value in entries:
        f.write(f"{key} = {value}\n".encode("ascii"))
    f.write(b"\n")


def _read_header(f: BinaryIO, magic: bytes, path: str) -> Dict[str, List[str]]:
    if f.readline() != magic:
        raise InputError(f"'{path}' is not a {magic.decode().strip()} file.")
    header: Dict[str, List[str]] = {}
    while True:
        line = f.readline()
        if not line:
            raise InputError(f"'{path}': header is not terminated by a blank line.")
        try:
            text = line.decode("ascii").strip()
        except UnicodeDecodeError as e:
            raise InputError(f"'{path}': header is not ASCII.") from e
        if not text:
            return header
        if "=" not in text:
            raise InputError(f"'{path}': malformed header line '{text}'.")
        key, value = (part.strip() for part in text.split("=", 1))
        header.setdefault(key, []).append(value)


def _field(header: Dict[str, List[str]], key: str, path: str) -> str:
    if key not in header:
        raise InputError(f"'{path}': missing header field '{key}'.")
    return header[key][0]


def _position(text: str) -> Position2D:
    x, y = (float(p) for p in text.split(","))
    return Position2D(x, y)


def _read_payload(f: BinaryIO, dtype: str, count: int, path: str) -> np.ndarray:
    item = np.dtype(dtype).itemsize
    data = f.read()
    if len(data) != count * item:
        raise InputError(
            f"'{path}': payload has {len(data)} bytes, expected {count * item}."
        )
    return np.frombuffer(data, dtype=dtype).copy()


# ================================= Echo =========================================
def write_echo(echo: EchoData, path: str) -> None:
    geometry, grid = echo.geometry, echo.frequencies
    entries = [
        ("channel_mode", "monostatic" if geometry.monostatic else "full"),
        ("M", str(len(geometry.transmitters))),
        ("N", str(len(geometry.receivers))),
        ("I", str(grid.count)),
        ("f0", repr(grid.f0)),
        ("delta_f", repr(grid.delta_f)),
        ("wave_speed", repr(float(echo.wave_speed))),
    ]
    entries += [("tx", f"{p.x!r}, {p.y!r}") for p in geometry.transmitters]
    entries += [("rx", f"{p.x!r}, {p.y!r}") for p in geometry.receivers]
    samples = echo.samples.detach().cpu().numpy().astype("<c16", copy=False)
    with open(path, "wb") as f:
        _write_header(f, ECHO_MAGIC, entries)
        # complex128 is (re, im) float64 pairs; channel-major, frequency-minor.
        f.write(np.ascontiguousarray(samples).tobytes())


def read_echo(path: str) -> EchoData:
    with open(path, "rb") as f:
        header = _read_header(f, ECHO_MAGIC, path)
        try:
            mode = _field(header, "channel_mode", path)
            if mode not in ("monostatic", "full"):
                raise InputError(f"'{path}': unknown channel mode '{mode}'.")
            n_tx = int(_field(header, "M", path))
            n_rx = int(_field(header, "N", path))
            transmitters = tuple(_position(t) for t in header.get("tx", []))
            receivers = tuple(_position(r) for r in header.get("rx", []))
            if len(transmitters) != n_tx or len(receivers) != n_rx:
                raise InputError(f"'{path}': element positions do not match M/N.")
            geometry = ArrayGeometry(transmitters, receivers, mode == "monostatic")
            grid = FrequencyGrid(
                float(_field(header, "f0", path)),
                float(_field(header, "delta_f", path)),
                int(_field(header, "I", path)),
            )
            wave_speed = float(_field(header, "wave_speed", path))
        except ValueError as e:
            if isinstance(e, InputError):
                raise
            raise InputError(f"'{path}': invalid header value: {e}") from e
        count = geometry.num_channels * grid.count
        payload = _read_payload(f, "<c16", count, path)
    samples = torch.from_numpy(payload.astype(np.complex128)).reshape(
        geometry.num_channels, grid.count
    )
    return EchoData(geometry, grid, samples, wave_speed)


# ================================= Image ========================================
def _region_entries(region: ImageRegion) -> List[Tuple[str, str]]:
    return [
        ("x_min", repr(region.x_min)),
        ("x_max", repr(region.x_max)),
        ("y_min", repr(region.y_min)),
        ("y_max", repr(region.y_max)),
        ("nx", str(region.nx)),
        ("ny", str(region.ny)),
    ]


def write_image(image: Image, path: str) -> None:
    """Row-major (row l = y index) pixels; complex images as (re, im) pairs."""
    if isinstance(image, CoherenceMap):
        payload, kind = "real", image.kind.value
        data = image.values.detach().cpu().numpy().astype("<f8", copy=False)
    else:
        payload, kind = "complex", IMAGE_KIND
        data = image.pixels.detach().cpu().numpy().astype("<c16", copy=False)
    entries = _region_entries(image.region) + [("payload", payload), ("kind", kind)]
    with open(path, "wb") as f:
        _write_header(f, IMAGE_MAGIC, entries)
        f.write(np.ascontiguousarray(data).tobytes())


def read_image(path: str) -> Image:
    """An ImageGrid for complex payloads, a CoherenceMap for real ones."""
    with open(path, "rb") as f:
        header = _read_header(f, IMAGE_MAGIC, path)
        try:
            bounds = (
                float(_field(header, key, path))
                for key in ("x_min", "x_max", "y_min", "y_max")
            )
            region = ImageRegion(
                *bounds,
                int(_field(header, "nx", path)),
                int(_field(header, "ny", path)),
            )
        except ValueError as e:
            if isinstance(e, InputError):
                raise
            raise InputError(f"'{path}': invalid header value: {e}") from e
        payload = _field(header, "payload", path)
        kind = header.get("kind", [IMAGE_KIND])[0]
        count = region.nx * region.ny
        if payload == "complex":
            data = _read_payload(f, "<c16", count, path).astype(np.complex128)
        elif payload == "real":
            data = _read_payload(f, "<f8", count, path).astype(np.float64)
        else:
            raise InputError(f"'{path}': unknown payload type '{payload}'.")
    values = torch.from_numpy(data).reshape(region.shape)
    if payload == "complex":
        return ImageGrid(region, values)
    return CoherenceMap(region, values, MapKind.parse(kind))


# ================================= Graymap ======================================
def db_graylevels(image: Image, floor_db: float) -> np.ndarray:
    """8-bit levels, 255 at the image peak (0 dB) and 0 at `floor_db` or below,
    linear in dB and rounded half away from zero. Row 0 is the y_max edge."""
    if not (math.isfinite(floor_db) and floor_db < 0):
        raise InputError(f"The dB floor must be negative, got {floor_db}.")
    db = image.to_db().detach().cpu().to(torch.float64)
    db = torch.clamp(db, min=floor_db, max=0.0)
    levels = (db - floor_db) * (255.0 / -floor_db)
    # Levels are non-negative, so floor(x + 0.5) rounds half away from zero.
    levels = torch.clamp(torch.floor(levels + 0.5), 0.0, 255.0)
    return np.flipud(levels.numpy().astype(np.uint8))


def export_db_image(image: Image, floor_db: float, path: str) -> None:
    """Binary portable graymap (P5) of the image magnitude in dB."""
    levels = np.ascontiguousarray(db_graylevels(image, floor_db))
    rows, cols = levels.shape
    with open(path, "wb") as f:
        f.write(f"P5\n{cols} {rows}\n255\n".encode("ascii"))
        f.write(levels.tobytes())
