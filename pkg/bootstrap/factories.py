#! /usr/bin/env python3
# vim:fenc=utf-8
#
# Distributed under terms of the MIT license.

"""
All factories.
"""

from typing import Optional

from hydra_zen.typing import Partial
from rich.console import Console

from dataset.scene_file import parse_scene_config
from src.errors import InputError
from src.geometry import SceneConfig
from utils import resolve_path

console = Console()


def load_scene(path: Optional[str] = None) -> SceneConfig:
    """Scene from a .scn file. Relative paths are taken from the launch directory,
    since Hydra has already moved into the run directory."""
    if path is None:
        raise InputError("scene=file needs scene.path=<file.scn>.")
    resolved = resolve_path(path)
    assert resolved is not None
    return parse_scene_config(resolved)


def make_scene(scene_partial: Partial[SceneConfig]) -> SceneConfig:
    with console.status("Loading scene...", spinner="runner"):
        scene = scene_partial()
    geometry = scene.geometry
    console.print(
        f"[*] Scene: {len(scene.scatterers)} scatterers, "
        + f"{len(scene.multipath)} multipath pairs, "
        + f"{len(geometry.transmitters)} Tx x {len(geometry.receivers)} Rx "
        + f"({geometry.num_channels} channels), {scene.frequencies.count} frequencies "
        + f"from {scene.frequencies.f0 / 1e9:.3f} GHz",
        style="bold cyan",
    )
    return scene
