#! /usr/bin/env python3
# vim:fenc=utf-8
#
# Distributed under terms of the MIT license.

"""
Scene description files (.scn). The grammar is line-oriented:

    # comment
    [array]
    layout = simo
    radius = 10.0

Sections are [medium], [array], [frequencies], [region], [scatterer] and [multipath].
The last two may repeat and accumulate in file order; the others appear at most once.
[array], [frequencies], [region] and at least one [scatterer] are mandatory. All
quantities are SI units (meters, hertz, m/s) except angles, given in degrees.
"""

import os.path as osp
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple, TypeVar

from conf import project as project_conf
from src.errors import InputError, SceneSyntaxError
from src.geometry import (
    ArrayGeometry,
    FrequencyGrid,
    ImageRegion,
    MultipathPair,
    Position2D,
    SceneConfig,
    Scatterer,
    simo_geometry,
    turntable_geometry,
)

T = TypeVar("T")

SECTION_KEYS: Dict[str, Tuple[str, ...]] = {
    "medium": ("wave_speed",),
    "array": (
        "layout",
        "radius",
        "aperture_deg",
        "count",
        "center_deg",
        "transmitter",
        "receiver",
        "monostatic",
    ),
    "frequencies": ("start", "count", "stop", "step"),
    "region": ("x_min", "x_max", "y_min", "y_max", "nx", "ny"),
    "scatterer": ("x", "y", "reflectivity"),
    "multipath": ("first", "second", "coupling"),
}
REPEATABLE_SECTIONS = ("scatterer", "multipath")
REPEATABLE_KEYS = ("transmitter", "receiver")
MANDATORY_SECTIONS = ("array", "frequencies", "region", "scatterer")


@dataclass
class _Section:
    name: str
    line: int
    entries: Dict[str, List[Tuple[str, int]]] = field(default_factory=dict)


class _SceneReader:
    def __init__(self, path: str) -> None:
        self._path = path

    def error(self, line: Optional[int], message: str) -> SceneSyntaxError:
        return SceneSyntaxError(self._path, line, message)

    def tokenize(self, text: str) -> List[_Section]:
        sections: List[_Section] = []
        current: Optional[_Section] = None
        for number, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("["):
                if not line.endswith("]"):
                    raise self.error(number, f"Malformed section header '{line}'.")
                name = line[1:-1].strip().lower()
                if name not in SECTION_KEYS:
                    raise self.error(number, f"Unknown section [{name}].")
                if name not in REPEATABLE_SECTIONS and any(
                    s.name == name for s in sections
                ):
                    raise self.error(number, f"Section [{name}] appears twice.")
                current = _Section(name, number)
                sections.append(current)
                continue
            if "=" not in line:
                raise self.error(number, f"Expected 'key = value', got '{line}'.")
            if current is None:
                raise self.error(number, "Key outside of any section.")
            key, value = (part.strip() for part in line.split("=", 1))
            key = key.lower()
            if key not in SECTION_KEYS[current.name]:
                raise self.error(number, f"Unknown key '{key}' in [{current.name}].")
            if key in current.entries and key not in REPEATABLE_KEYS:
                raise self.error(number, f"Key '{key}' repeated in [{current.name}].")
            if not value:
                raise self.error(number, f"Key '{key}' has no value.")
            current.entries.setdefault(key, []).append((value, number))
        return sections

    def value(
        self,
        section: _Section,
        key: str,
        convert: Callable[[str], T],
        default: Optional[T] = None,
    ) -> T:
        if key not in section.entries:
            if default is None:
                raise self.error(
                    section.line, f"Missing key '{key}' in [{section.name}]."
                )
            return default
        text, number = section.entries[key][0]
        return self.convert(text, number, convert)

    def convert(self, text: str, line: int, convert: Callable[[str], T]) -> T:
        try:
            return convert(text)
        except (ValueError, InputError) as e:
            raise self.error(line, f"Invalid value '{text}': {e}") from e


def _to_bool(text: str) -> bool:
    if text.lower() in ("true", "yes", "1"):
        return True
    if text.lower() in ("false", "no", "0"):
        return False
    raise ValueError("expected true or false")


def _to_int(text: str) -> int:
    return int(text)


def _to_position(text: str) -> Position2D:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2:
        raise ValueError("expected 'x, y'")
    return Position2D(float(parts[0]), float(parts[1]))


def _to_complex(text: str) -> complex:
    return complex(text.replace(" ", ""))


def _build_geometry(reader: _SceneReader, section: _Section) -> ArrayGeometry:
    layout = reader.value(section, "layout", str.lower, "explicit")
    try:
        if layout in ("simo", "turntable"):
            radius = reader.value(section, "radius", float)
            aperture = reader.value(section, "aperture_deg", float)
            count = reader.value(section, "count", _to_int)
            center = reader.value(section, "center_deg", float, 90.0)
            build = simo_geometry if layout == "simo" else turntable_geometry
            return build(radius, aperture, count, center)
        if layout == "explicit":
            monostatic = reader.value(section, "monostatic", _to_bool, False)
            transmitters = [
                reader.convert(text, number, _to_position)
                for text, number in section.entries.get("transmitter", [])
            ]
            receivers = [
                reader.convert(text, number, _to_position)
                for text, number in section.entries.get("receiver", [])
            ]
            if monostatic and not receivers:
                receivers = list(transmitters)
            return ArrayGeometry(tuple(transmitters), tuple(receivers), monostatic)
    except InputError as e:
        if isinstance(e, SceneSyntaxError):
            raise
        raise reader.error(section.line, str(e)) from e
    raise reader.error(
        section.entries["layout"][0][1],
        f"Unknown layout '{layout}', expected simo, turntable or explicit.",
    )


def _build_frequencies(reader: _SceneReader, section: _Section) -> FrequencyGrid:
    start = reader.value(section, "start", float)
    count = reader.value(section, "count", _to_int)
    has_stop, has_step = "stop" in section.entries, "step" in section.entries
    if has_stop and has_step:
        raise reader.error(section.line, "Give either 'stop' or 'step', not both.")
    try:
        if has_stop:
            stop = reader.value(section, "stop", float)
            if count == 1:
                if stop != start:
                    raise InputError("a single frequency needs stop equal to start")
                return FrequencyGrid(start, 1.0, 1)
            return FrequencyGrid.from_band(start, stop, count)
        if has_step:
            return FrequencyGrid(start, reader.value(section, "step", float), count)
        if count == 1:
            # The step is irrelevant for a single tone.
            return FrequencyGrid(start, 1.0, 1)
    except InputError as e:
        if isinstance(e, SceneSyntaxError):
            raise
        raise reader.error(section.line, str(e)) from e
    raise reader.error(section.line, "Missing key 'stop' or 'step' in [frequencies].")


def _build_region(reader: _SceneReader, section: _Section) -> ImageRegion:
    bounds = [
        reader.value(section, key, float)
        for key in ("x_min", "x_max", "y_min", "y_max")
    ]
    nx = reader.value(section, "nx", _to_int)
    ny = reader.value(section, "ny", _to_int)
    try:
        return ImageRegion(*bounds, nx, ny)
    except InputError as e:
        raise reader.error(section.line, str(e)) from e


def parse_scene_text(text: str, path: str = "<scene>") -> SceneConfig:
    reader = _SceneReader(path)
    sections = reader.tokenize(text)
    by_name: Dict[str, List[_Section]] = {}
    for section in sections:
        by_name.setdefault(section.name, []).append(section)
    for name in MANDATORY_SECTIONS:
        if name not in by_name:
            raise reader.error(None, f"Missing mandatory section [{name}].")

    wave_speed = project_conf.WAVE_SPEED
    if "medium" in by_name:
        wave_speed = reader.value(by_name["medium"][0], "wave_speed", float)
        if not wave_speed > 0:
            raise reader.error(
                by_name["medium"][0].line, "Wave speed must be positive."
            )
    geometry = _build_geometry(reader, by_name["array"][0])
    frequencies = _build_frequencies(reader, by_name["frequencies"][0])
    region = _build_region(reader, by_name["region"][0])

    scatterers = []
    for section in by_name["scatterer"]:
        x = reader.value(section, "x", float)
        y = reader.value(section, "y", float)
        reflectivity = reader.value(section, "reflectivity", _to_complex, 1.0 + 0.0j)
        try:
            scatterers.append(Scatterer(Position2D(x, y), reflectivity))
        except InputError as e:
            raise reader.error(section.line, str(e)) from e

    pairs = []
    for section in by_name.get("multipath", []):
        first = reader.value(section, "first", _to_int)
        second = reader.value(section, "second", _to_int)
        coupling = reader.value(section, "coupling", _to_complex, 0.3 + 0.0j)
        for key, index in (("first", first), ("second", second)):
            if not 0 <= index < len(scatterers):
                raise reader.error(
                    section.entries[key][0][1],
                    f"Multipath pair references scatterer {index}, "
                    + f"but the scene has {len(scatterers)}.",
                )
        try:
            pairs.append(MultipathPair(first, second, coupling))
        except InputError as e:
            raise reader.error(section.line, str(e)) from e

    return SceneConfig(
        scatterers=tuple(scatterers),
        multipath=tuple(pairs),
        geometry=geometry,
        frequencies=frequencies,
        region=region,
        wave_speed=wave_speed,
        source=path,
    )


def parse_scene_config(path: str) -> SceneConfig:
    """Read and validate a scene file. Syntax errors carry the offending line."""
    if not osp.isfile(path):
        raise InputError(f"Scene file '{path}' does not exist.")
    with open(path, "rb") as f:
        data = f.read()
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as e:
        line = data.count(b"\n", 0, e.start) + 1
        raise SceneSyntaxError(path, line, "not valid UTF-8 text.") from e
    return parse_scene_text(text, path)


def _format_float(value: float) -> str:
    return repr(float(value))


def scene_to_text(scene: SceneConfig, comment: Optional[str] = None) -> str:
    """Serialize a scene with an explicit array layout, so any geometry round-trips."""
    lines: List[str] = []
    if comment:
        lines.extend(f"# {c}" for c in comment.splitlines())
        lines.append("")
    lines += ["[medium]", f"wave_speed = {_format_float(scene.wave_speed)}", ""]
    geometry = scene.geometry
    lines += ["[array]", "layout = explicit"]
    lines.append(f"monostatic = {'true' if geometry.monostatic else 'false'}")
    lines += [f"transmitter = {p.x!r}, {p.y!r}" for p in geometry.transmitters]
    if not geometry.monostatic:
        lines += [f"receiver = {p.x!r}, {p.y!r}" for p in geometry.receivers]
    grid = scene.frequencies
    lines += [
        "",
        "[frequencies]",
        f"start = {_format_float(grid.f0)}",
        f"step = {_format_float(grid.delta_f)}",
        f"count = {grid.count}",
        "",
        "[region]",
    ]
    region = scene.region
    for key in ("x_min", "x_max", "y_min", "y_max"):
        lines.append(f"{key} = {_format_float(getattr(region, key))}")
    lines += [f"nx = {region.nx}", f"ny = {region.ny}"]
    for scatterer in scene.scatterers:
        lines += [
            "",
            "[scatterer]",
            f"x = {scatterer.position.x!r}",
            f"y = {scatterer.position.y!r}",
            f"reflectivity = {scatterer.reflectivity!r}",
        ]
    for pair in scene.multipath:
        lines += [
            "",
            "[multipath]",
            f"first = {pair.first}",
            f"second = {pair.second}",
            f"coupling = {pair.coupling!r}",
        ]
    return "\n".join(lines) + "\n"
