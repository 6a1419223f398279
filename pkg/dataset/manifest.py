#! /usr/bin/env python3
# vim:fenc=utf-8
#
# Distributed under terms of the MIT license.

"""
Run manifests: what a subcommand read, wrote and was configured with. Input digests
are taken when the manifest is opened, before any processing.
"""

import os
import os.path as osp
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional

import yaml

from conf import project as project_conf
from src.errors import InputError
from utils.helpers import digest_file

MANIFEST_NAME = "manifest.yaml"
FREQUENCY_CONVENTION = (
    "frequency ladders given by start/stop/count include both endpoints: "
    + "step = (stop - start) / (count - 1)"
)


def _plain(value: Any) -> Any:
    """Reduce a parameter value to YAML-safe builtins."""
    if value is None or isinstance(value, (bool, int, float, str)):
        return value
    if isinstance(value, complex):
        return repr(value)
    if isinstance(value, Mapping):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return str(value)


@dataclass
class RunManifest:
    subcommand: str
    out_dir: str
    inputs: Dict[str, str] = field(default_factory=dict)
    outputs: List[str] = field(default_factory=list)
    parameters: Dict[str, Any] = field(default_factory=dict)
    input_digests: Dict[str, str] = field(default_factory=dict)
    notes: List[str] = field(default_factory=lambda: [FREQUENCY_CONVENTION])
    tool_version: str = project_conf.TOOL_VERSION

    @classmethod
    def begin(
        cls,
        subcommand: str,
        out_dir: str,
        inputs: Optional[Mapping[str, Optional[str]]] = None,
        parameters: Optional[Mapping[str, Any]] = None,
    ) -> "RunManifest":
        manifest = cls(subcommand, out_dir, parameters=_plain(dict(parameters or {})))
        for name, path in (inputs or {}).items():
            if path is None:
                continue
            if not osp.isfile(path):
                raise InputError(f"Input '{name}' ({path}) does not exist.")
            manifest.inputs[name] = path
            manifest.input_digests[name] = f"sha256:{digest_file(path)}"
        return manifest

    def output_path(self, name: str) -> str:
        """Absolute path for output `name`, registering it in the manifest."""
        if name not in self.outputs:
            self.outputs.append(name)
        return osp.join(self.out_dir, name)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "subcommand": self.subcommand,
            "tool": {"name": project_conf.PROJECT_NAME, "version": self.tool_version},
            "inputs": dict(self.inputs),
            "input_digests": dict(self.input_digests),
            "outputs": sorted(self.outputs),
            "parameters": self.parameters,
            "notes": list(self.notes),
        }

    def write(self) -> str:
        os.makedirs(self.out_dir, exist_ok=True)
        path = osp.join(self.out_dir, MANIFEST_NAME)
        with open(path, "w", encoding="utf-8") as f:
            yaml.safe_dump(self.to_dict(), f, sort_keys=True, default_flow_style=False)
        return path


def read_manifest(path: str) -> Dict[str, Any]:
    with open(path, "r", encoding="utf-8") as f:
        return yaml.safe_load(f)
