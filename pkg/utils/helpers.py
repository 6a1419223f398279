#! /usr/bin/env python
# vim:fenc=utf-8
#
# Distributed under terms of the MIT license.

"""
Some utility functions for your convenience.
"""

import hashlib
import math

import torch
from torch import Tensor


def digest_file(path: str, chunk_size: int = 1 << 20) -> str:
    """
    Content digest (sha256) of a file, used to fingerprint run inputs.
    """
    hasher = hashlib.new("sha256")
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(chunk_size), b""):
            hasher.update(chunk)
    return hasher.hexdigest()


def amplitude_db(ratio: float) -> float:
    """20·log10 of a magnitude ratio, -inf for a zero ratio."""
    if ratio <= 0.0:
        return float("-inf")
    return 20.0 * math.log10(ratio)


def magnitude_db(magnitudes: Tensor, reference: float) -> Tensor:
    """20·log10(|x| / reference) elementwise; zero magnitudes map to -inf."""
    return 20.0 * torch.log10(magnitudes / reference)
