#! /usr/bin/env python3
# -*- coding: utf-8 -*-
# vim:fenc=utf-8
#
# Distributed under terms of the MIT license.


"""
Writes the built-in scene presets as .scn files with an explicit array layout, so a
preset can be edited and fed back through `scene=file scene.path=...`.
Run from the repository root: python -m scripts.write_scene_presets
"""

import os

from dataset.scene_file import scene_to_text
from src.scenes import ghost_scene, point_target_scene, simo_point_scene

_root = "data/scenes/generated"
presets = {
    "simo_point": simo_point_scene,
    "point_target": point_target_scene,
    "ghost": ghost_scene,
}

os.makedirs(_root, exist_ok=True)
for name, make_scene in presets.items():
    path = os.path.join(_root, f"{name}.scn")
    with open(path, "w", encoding="utf-8") as f:
        f.write(scene_to_text(make_scene(), comment=f"Preset '{name}'."))
    print(f"[*] Wrote {path}")
