#! /usr/bin/env python3
# vim:fenc=utf-8
#
# Distributed under terms of the MIT license.


import os
import sys
from typing import Any

import hydra_zen
from hydra.core.hydra_config import HydraConfig
from hydra_zen.typing import Partial
from rich.console import Console
from rich.panel import Panel
from rich.syntax import Syntax

from bootstrap.factories import make_scene
from src.commands import (
    COMMANDS,
    EXIT_INPUT,
    EXIT_OK,
    ImagingOptions,
    run_enhance,
    run_image,
    run_metrics,
    run_pipeline,
    run_simulate,
)
from src.errors import InputError
from src.geometry import SceneConfig

console = Console()


# ================================= Printing =====================================
def print_config(run_name: str, exp_conf: str) -> None:
    # Generate a random ANSI code:
    run_color = f"color({hash(run_name) % 255})"
    background_color = f"color({(hash(run_name) + 128) % 255})"
    console.print(
        f"Running {run_name}",
        style=f"bold {run_color} on {background_color}",
        justify="center",
    )
    console.rule()
    console.print(
        Panel(
            Syntax(
                exp_conf, lexer="yaml", dedent=True, word_wrap=False, theme="dracula"
            ),
            title="Experiment configuration",
            expand=False,
        ),
        overflow="ellipsis",
    )


def show_config(cfg: Any) -> None:
    """zen pre_call hook: print the composed configuration before instantiation."""
    run_name = os.path.basename(HydraConfig.get().runtime.output_dir)
    print_config(run_name, hydra_zen.to_yaml(cfg))


# ==================================================================================


def launch_experiment(
    run,  # type: ignore
    scene: Partial[SceneConfig],
    imaging: ImagingOptions,
):
    command = run.command
    if command not in COMMANDS:
        console.print(
            f"[!] Unknown command '{command}', expected one of {', '.join(COMMANDS)}",
            style="bold red",
        )
        sys.exit(EXIT_INPUT)

    if command == "enhance":
        status = run_enhance(run)
    else:
        try:
            scene_inst = make_scene(scene)
        except InputError as e:
            console.print(f"[!] {e}", style="bold red", markup=False)
            sys.exit(EXIT_INPUT)
        if command == "simulate":
            status = run_simulate(run, scene_inst)
        elif command == "image":
            status = run_image(run, scene_inst, imaging)
        elif command == "metrics":
            status = run_metrics(run, scene_inst)
        else:
            status = run_pipeline(run, scene_inst, imaging)
    if status != EXIT_OK:
        sys.exit(status)
