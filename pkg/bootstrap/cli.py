#! /usr/bin/env python3
# vim:fenc=utf-8
#
# Distributed under terms of the MIT license.

"""
Shared entry point of the subcommand scripts (simulate.py, image.py, ...).
"""

from rich.console import Console
from rich.live import Live


def main(command: str) -> None:
    console = Console()
    status = console.status(
        "[bold cyan]Building experiment configurations...", spinner="monkey"
    )
    with Live(status, console=console):
        from hydra_zen import store, zen

        from bootstrap.launch_experiment import launch_experiment, show_config
        from conf import project as project_conf
        from conf.experiment import make_experiment_configs
        from utils import seed_everything

        make_experiment_configs()

    def set_command(cfg):
        cfg.run.command = command

    def seed(cfg):
        if project_conf.REPRODUCIBLE:
            seed_everything(cfg.run.seed)

    "============ Hydra-Zen ============"
    store.add_to_hydra_store(
        overwrite_ok=True
    )  # Overwrite Hydra's default config to update it
    zen(
        launch_experiment,
        pre_call=[set_command, seed, show_config],
    ).hydra_main(
        config_name="base_experiment",
        version_base="1.3",  # Hydra base version
    )
