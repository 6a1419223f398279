#! /usr/bin/env python3
# vim:fenc=utf-8
#
# Distributed under terms of the MIT license.

import math
import random
from typing import Any, Optional

import numpy as np
import torch
from hydra.utils import to_absolute_path
from torch import Tensor

from conf import project as project_conf

TWO_PI = 2.0 * math.pi


def resolve_path(path: Optional[str]) -> Optional[str]:
    """Resolve a user path against the launch directory (Hydra changes the cwd)."""
    if path is None:
        return None
    try:
        return to_absolute_path(path)
    except ValueError:
        # Hydra is not initialized (library use, tests).
        return path


def seed_everything(seed: int):
    torch.manual_seed(seed)  # type: ignore
    np.random.seed(seed)
    random.seed(seed)
    if torch.cuda.is_available():
        torch.cuda.manual_seed_all(seed)


def configure_torch() -> None:
    if project_conf.NUM_THREADS > 0:
        torch.set_num_threads(project_conf.NUM_THREADS)
    if project_conf.REPRODUCIBLE:
        torch.use_deterministic_algorithms(True, warn_only=True)


def get_device() -> torch.device:
    if project_conf.USE_CUDA_IF_AVAILABLE and torch.cuda.is_available():
        return torch.device("cuda")
    return torch.device("cpu")


def to_device_(x: Any) -> Any:
    device = get_device()
    if device.type == "cpu":
        return x
    if isinstance(x, Tensor):
        x = x.to(device)
    elif isinstance(x, tuple):
        x = tuple(to_device_(t) for t in x)  # type: ignore
    elif isinstance(x, list):
        x = [to_device_(t) for t in x]  # type: ignore
    elif isinstance(x, dict):
        x = {key: to_device_(value) for key, value in x.items()}  # type: ignore
    return x


def phasor(cycles: Tensor, sign: float = 1.0) -> Tensor:
    """exp(sign * j * 2π * cycles), with the cycle count reduced modulo 1 first.

    An exact integer number of cycles therefore gives exactly 1 + 0j.
    """
    frac = torch.remainder(cycles, 1.0)
    return torch.polar(torch.ones_like(frac), (sign * TWO_PI) * frac)
