"""
Configurations for the experiments and config groups, using hydra-zen.
"""

from dataclasses import dataclass
from typing import Optional

from hydra.conf import HydraConf, JobConf, RunDir
from hydra_zen import (
    MISSING,
    ZenStore,
    builds,
    make_config,
    make_custom_builds_fn,
    store,
)
from hydra_zen.typing import SupportedPrimitive
from hydra_zen.typing._builds_overloads import PBuilds
from unique_names_generator import get_random_name
from unique_names_generator.data import ADJECTIVES, NAMES

from bootstrap.factories import load_scene
from bootstrap.launch_experiment import launch_experiment
from conf import project as project_conf
from src.commands import ImagingOptions
from src.scenes import ghost_scene, point_target_scene, simo_point_scene

# Set hydra.job.chdir=True and name the run directory with a unique random name:
hydra_store = ZenStore(overwrite_ok=True)
hydra_store(
    HydraConf(
        job=JobConf(chdir=True),
        run=RunDir(
            f"runs/{get_random_name(combo=[ADJECTIVES, NAMES], separator='-', style='lowercase')}"
        ),
    ),
    name="config",
    group="hydra",
)
hydra_store.add_to_hydra_store()
pbuilds: PBuilds[SupportedPrimitive] = make_custom_builds_fn(
    zen_partial=True, populate_full_signature=True
)

# ================== Scene ==================
# Scenes are partials: they are instantiated inside launch_experiment so that invalid
# scene files map to an input-error exit status.
scene_store = store(group="scene")
scene_store(pbuilds(simo_point_scene), name="simo_point")
scene_store(pbuilds(point_target_scene), name="point_target")
scene_store(pbuilds(ghost_scene), name="ghost")
scene_store(pbuilds(load_scene), name="file")

# ================== Imaging ==================
imaging_store = store(group="imaging")
imaging_store(builds(ImagingOptions, populate_full_signature=True), name="direct")
imaging_store(
    builds(ImagingOptions, populate_full_signature=True, fast_bp=True), name="fast"
)
imaging_store(
    builds(ImagingOptions, populate_full_signature=True, f_weighted=True),
    name="f_weighted",
)


# ================== Run ==================
@dataclass
class RunConfig:
    command: str = "pipeline"
    seed: int = 42
    out: Optional[str] = None
    echo: Optional[str] = None
    image: Optional[str] = None
    maps: Optional[str] = None
    region: Optional[str] = None
    map: str = "cf2d"
    floor_db: float = project_conf.FLOOR_DB
    ghost_floor_db: float = project_conf.GHOST_FLOOR_DB
    exclusion_radius: Optional[float] = None
    snr_db: Optional[float] = None
    spreading: bool = False
    multipath: bool = True


run_store = store(group="run")
run_store(RunConfig, name="default")


def make_experiment_configs():
    Experiment = builds(
        launch_experiment,
        populate_full_signature=True,
        hydra_defaults=[
            "_self_",
            {"scene": "simo_point"},
            {"imaging": "direct"},
            {"run": "default"},
        ],
        scene=MISSING,
        imaging=MISSING,
        run=MISSING,
    )
    store(Experiment, name="base_experiment")

    # the experiment configs:
    # - must be stored under the _global_ package
    # - must inherit from `Experiment`
    experiment_store = store(group="experiment", package="_global_")
    experiment_store(
        make_config(
            hydra_defaults=[
                "_self_",
                {"override /scene": "point_target"},
            ],
            bases=(Experiment,),
        ),
        name="sidelobes",
    )
    experiment_store(
        make_config(
            hydra_defaults=[
                "_self_",
                {"override /scene": "ghost"},
            ],
            bases=(Experiment,),
        ),
        name="ghosts",
    )
    experiment_store(
        make_config(
            hydra_defaults=[
                "_self_",
                {"override /scene": "ghost"},
                {"override /imaging": "fast"},
            ],
            bases=(Experiment,),
        ),
        name="ghosts_fast",
    )
