#! /usr/bin/env python3
# vim:fenc=utf-8
#
# Distributed under terms of the MIT license.

"""
Exceptions shared by the imaging pipeline. Subcommands map them to exit statuses.
"""

from typing import Optional


class InputError(ValueError):
    """Invalid user input: bad geometry, mismatched regions, unreadable files..."""


class SceneSyntaxError(InputError):
    def __init__(self, path: str, line: Optional[int], message: str) -> None:
        self.path = path
        self.line = line
        where = f"{path}:{line}" if line is not None else path
        super().__init__(f"{where}: {message}")


class ConsistencyError(RuntimeError):
    """An internal invariant was violated (e.g. a coherence map left [0, 1])."""
