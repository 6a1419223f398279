#! /usr/bin/env python3
# vim:fenc=utf-8
#
# Distributed under terms of the MIT license.

"""
The subcommands: simulate, image, enhance, metrics and the end-to-end pipeline. Each
returns a process exit status (0 success, 1 input error, 2 internal inconsistency)
and writes a manifest next to its outputs.
"""

import functools
import os
import os.path as osp
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Tuple

from rich.console import Console
from rich.table import Table

from conf import project as project_conf
from dataset.formats import (
    export_db_image,
    read_echo,
    read_image,
    write_echo,
    write_image,
)
from dataset.manifest import RunManifest
from src.backprojection import (
    ChannelImageStack,
    FrequencyImageStack,
    ImageGrid,
    backproject_stacks,
    fast_range_profiles,
    frequency_images,
    image_from_channels,
)
from src.coherence import (
    CoherenceMap,
    MapKind,
    apply_map,
    compute_maps,
    incoherent_power,
)
from src.errors import ConsistencyError, InputError
from src.forward import EchoData, add_noise, simulate_direct, simulate_with_multipath
from src.geometry import ImageRegion, SceneConfig
from src.metrics import QualityReport, quality_report, suppression_delta
from utils import configure_torch, resolve_path

console = Console()

EXIT_OK, EXIT_INPUT, EXIT_CONSISTENCY = 0, 1, 2


@dataclass
class ImagingOptions:
    fast_bp: bool = False
    upsample: int = project_conf.FAST_BP_UPSAMPLE
    f_weighted: bool = False


def exit_status(func: Callable[..., Any]) -> Callable[..., int]:
    """Decorator mapping the pipeline's exceptions to exit statuses."""

    @functools.wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> int:
        try:
            func(*args, **kwargs)
        except (InputError, OSError) as e:
            console.print(f"[!] {e}", style="bold red", markup=False)
            return EXIT_INPUT
        except ConsistencyError as e:
            console.print(
                f"[!] Internal consistency failure: {e}", style="bold red", markup=False
            )
            return EXIT_CONSISTENCY
        return EXIT_OK

    return wrapper


# ================================ Helpers =======================================
def _out_dir(run: Any) -> str:
    out = resolve_path(run.out) if run.out else os.getcwd()
    assert out is not None
    os.makedirs(out, exist_ok=True)
    return out


def _region(run: Any, scene: SceneConfig) -> ImageRegion:
    return ImageRegion.parse(run.region) if run.region else scene.region


def _parameters(run: Any, imaging: Optional[ImagingOptions], **extra: Any) -> Dict:
    parameters = {
        "seed": run.seed,
        "snr_db": run.snr_db,
        "spreading": run.spreading,
        "multipath": run.multipath,
        "region": run.region,
        "map": run.map,
        "floor_db": run.floor_db,
        "ghost_floor_db": run.ghost_floor_db,
        "exclusion_radius": run.exclusion_radius,
    }
    if imaging is not None:
        parameters.update(
            fast_bp=imaging.fast_bp,
            upsample=imaging.upsample,
            f_weighted=imaging.f_weighted,
        )
    parameters.update(extra)
    return parameters


def _simulate(run: Any, scene: SceneConfig) -> EchoData:
    with console.status("Simulating echoes...", spinner="dots"):
        if run.multipath:
            echo = simulate_with_multipath(scene, spreading=run.spreading)
        else:
            echo = simulate_direct(scene, spreading=run.spreading)
        return add_noise(echo, run.snr_db, run.seed)


def _load_or_simulate(run: Any, scene: SceneConfig) -> Tuple[EchoData, Optional[str]]:
    echo_path = resolve_path(run.echo)
    if echo_path is None:
        return _simulate(run, scene), None
    if not osp.isfile(echo_path):
        raise InputError(f"Echo file '{echo_path}' does not exist.")
    return read_echo(echo_path), echo_path


def _stacks(
    echo: EchoData, region: ImageRegion, imaging: ImagingOptions
) -> Tuple[ChannelImageStack, FrequencyImageStack]:
    console.print(
        f"[*] Back-projecting {echo.num_channels} channels x "
        + f"{echo.frequencies.count} frequencies onto {region.nx}x{region.ny} pixels",
        style="bold cyan",
    )
    if imaging.fast_bp:
        channel_stack = fast_range_profiles(
            echo, region, imaging.upsample, imaging.f_weighted
        )
        frequency_stack = frequency_images(echo, region, imaging.f_weighted)
    else:
        channel_stack, frequency_stack = backproject_stacks(
            echo, region, imaging.f_weighted
        )
    assert channel_stack is not None and frequency_stack is not None
    return channel_stack, frequency_stack


def _exclusion_radius(run: Any, scene: SceneConfig) -> float:
    if run.exclusion_radius is not None:
        return float(run.exclusion_radius)
    resolution = scene.frequencies.range_resolution(scene.wave_speed)
    return project_conf.EXCLUSION_RANGE_CELLS * resolution


def _write_reports(
    manifest: RunManifest,
    reports: Dict[str, QualityReport],
    extra: Optional[Dict[str, str]] = None,
) -> None:
    lines: List[str] = []
    records: Dict[str, str] = {}
    for name, report in reports.items():
        lines.extend(report.to_text(name))
        lines.append("")
        records.update(report.to_records(prefix=f"{name}."))
    for key, value in (extra or {}).items():
        lines.append(f"{key}: {value}")
        records[key] = value
    with open(manifest.output_path("report.txt"), "w", encoding="utf-8") as f:
        f.write("\n".join(lines).rstrip() + "\n")
    with open(manifest.output_path("report.kv"), "w", encoding="utf-8") as f:
        f.writelines(f"{key} = {value}\n" for key, value in records.items())


def print_reports(reports: Dict[str, QualityReport]) -> None:
    table = Table(title="Image quality")
    table.add_column("image")
    for column in ("PSLR range (dB)", "PSLR azimuth (dB)", "ghosts", "worst ghost (dB)"):
        table.add_column(column, justify="right")
    for name, report in reports.items():
        worst = report.ghost_levels[0][1] if report.ghost_levels else float("-inf")
        table.add_row(
            name,
            f"{report.pslr_range:.2f}",
            f"{report.pslr_azimuth:.2f}",
            str(len(report.ghost_levels)),
            f"{worst:.2f}",
        )
    console.print(table)


# ================================ Subcommands ===================================
@exit_status
def run_simulate(run: Any, scene: SceneConfig) -> None:
    configure_torch()
    manifest = RunManifest.begin(
        "simulate", _out_dir(run), {"scene": scene.source}, _parameters(run, None)
    )
    echo = _simulate(run, scene)
    write_echo(echo, manifest.output_path("echo.echo"))
    manifest.write()
    console.print(f"[*] Echo written to {manifest.out_dir}", style="bold cyan")


@exit_status
def run_image(run: Any, scene: SceneConfig, imaging: ImagingOptions) -> None:
    configure_torch()
    out = _out_dir(run)
    manifest = RunManifest.begin(
        "image",
        out,
        {"scene": scene.source, "echo": resolve_path(run.echo)},
        _parameters(run, imaging),
    )
    echo, _ = _load_or_simulate(run, scene)
    channel_stack, frequency_stack = _stacks(echo, _region(run, scene), imaging)
    write_image(image_from_channels(channel_stack), manifest.output_path("bp.img"))
    with console.status("Computing coherence maps...", spinner="dots"):
        maps = compute_maps(channel_stack, frequency_stack)
    for kind, coherence_map in maps.items():
        write_image(coherence_map, manifest.output_path(f"{kind}.img"))
    manifest.write()
    console.print(f"[*] Image and maps written to {out}", style="bold cyan")


@exit_status
def run_enhance(run: Any) -> None:
    kind = MapKind.parse(run.map)
    image_path = resolve_path(run.image)
    maps_dir = resolve_path(run.maps)
    if image_path is None or maps_dir is None:
        raise InputError("enhance needs run.image and run.maps.")
    map_path = osp.join(maps_dir, f"{kind}.img")
    manifest = RunManifest.begin(
        "enhance",
        _out_dir(run),
        {"image": image_path, "map": map_path},
        {"map": str(kind)},
    )
    image, coherence_map = read_image(image_path), read_image(map_path)
    if not isinstance(image, ImageGrid):
        raise InputError(f"'{image_path}' holds a coherence map, not an image.")
    if not isinstance(coherence_map, CoherenceMap):
        raise InputError(f"'{map_path}' holds an image, not a coherence map.")
    enhanced = apply_map(image, coherence_map)
    write_image(enhanced, manifest.output_path(f"enhanced_{kind}.img"))
    manifest.write()
    console.print(f"[*] {kind}-enhanced image written", style="bold cyan")


@exit_status
def run_metrics(run: Any, scene: SceneConfig) -> None:
    image_path = resolve_path(run.image)
    if image_path is None:
        raise InputError("metrics needs run.image.")
    radius = _exclusion_radius(run, scene)
    manifest = RunManifest.begin(
        "metrics",
        _out_dir(run),
        {"scene": scene.source, "image": image_path},
        _parameters(run, None, exclusion_radius=radius),
    )
    image = read_image(image_path)
    name = osp.splitext(osp.basename(image_path))[0]
    reports = {
        name: quality_report(image, scene.target_positions, radius, run.ghost_floor_db)
    }
    _write_reports(manifest, reports)
    manifest.write()
    print_reports(reports)


@exit_status
def run_pipeline(run: Any, scene: SceneConfig, imaging: ImagingOptions) -> None:
    """Simulate, back-project, compute every map, enhance, export and measure."""
    configure_torch()
    out = _out_dir(run)
    radius = _exclusion_radius(run, scene)
    manifest = RunManifest.begin(
        "pipeline",
        out,
        {"scene": scene.source, "echo": resolve_path(run.echo)},
        _parameters(run, imaging, exclusion_radius=radius),
    )
    echo, echo_path = _load_or_simulate(run, scene)
    if echo_path is None:
        write_echo(echo, manifest.output_path("echo.echo"))

    region = _region(run, scene)
    channel_stack, frequency_stack = _stacks(echo, region, imaging)
    bp = image_from_channels(channel_stack)
    write_image(bp, manifest.output_path("bp.img"))
    export_db_image(bp, run.floor_db, manifest.output_path("bp.pgm"))

    with console.status("Computing coherence maps...", spinner="dots"):
        maps = compute_maps(channel_stack, frequency_stack)
    for name, stack in (("cf", channel_stack), ("cff", frequency_stack)):
        denominator = ImageGrid(region, incoherent_power(stack))
        if denominator.peak() > 0.0:
            path = manifest.output_path(f"{name}_denominator.pgm")
            export_db_image(denominator, run.floor_db, path)

    targets = scene.target_positions
    reports: Dict[str, QualityReport] = {
        "bp": quality_report(bp, targets, radius, run.ghost_floor_db)
    }
    enhanced: Dict[MapKind, ImageGrid] = {}
    for kind, coherence_map in maps.items():
        write_image(coherence_map, manifest.output_path(f"{kind}.img"))
        enhanced[kind] = apply_map(bp, coherence_map)
        write_image(enhanced[kind], manifest.output_path(f"enhanced_{kind}.img"))
        if enhanced[kind].peak() > 0.0:
            export_db_image(
                enhanced[kind],
                run.floor_db,
                manifest.output_path(f"enhanced_{kind}.pgm"),
            )
            reports[f"enhanced_{kind}"] = quality_report(
                enhanced[kind], targets, radius, run.ghost_floor_db
            )

    extra: Dict[str, str] = {}
    ghosts = reports["bp"].ghost_levels
    if ghosts:
        strongest = ghosts[0][0]
        extra["strongest_bp_ghost"] = f"{strongest.x:.4f},{strongest.y:.4f}"
        for before, after in ((MapKind.CF, MapKind.CF2D), (MapKind.PCF, MapKind.PCF2D)):
            if enhanced[before].peak() > 0.0 and enhanced[after].peak() > 0.0:
                delta = suppression_delta(enhanced[before], enhanced[after], strongest)
                extra[f"suppression_{before}_to_{after}_db"] = f"{delta:.3f}"
    _write_reports(manifest, reports, extra)
    manifest.write()
    print_reports(reports)
    for key, value in extra.items():
        console.print(f"[*] {key}: {value}", style="bold cyan")
    console.print(f"[*] Pipeline outputs written to {out}", style="bold cyan")


COMMANDS: Dict[str, Callable[..., int]] = {
    "simulate": run_simulate,
    "image": run_image,
    "enhance": run_enhance,
    "metrics": run_metrics,
    "pipeline": run_pipeline,
}
