"""Batch command-line front end.

Subcommands:

* ``convert``  raw event files (EVS1 binary or CSV) -> EVTH volume corpus
* ``augment``  EVTH corpus -> augmented EVTH corpus (training composition or
  a named robustness variant applied to every sample)
* ``preview``  one volume -> per-timestep PNG images
* ``bench``    throughput and per-stage timing report

Configuration comes from a flat ``key = value`` file (see
:mod:`evaug.config` for the schema); command-line flags override file
values, and every run writes a ``manifest.json`` embedding the effective
configuration and seed so it can be reproduced bit-exactly.

Exit codes: 0 success, 1 partial failure (some samples failed), 2
configuration error.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import numpy as np

from . import batch, io
from .config import AugmentConfig, load_config
from .config import preset as get_preset
from .errors import ConfigurationError, EvaugError


def _parse_hw(value: str, flag: str) -> tuple[int, int]:
    try:
        h, w = value.lower().split("x")
        return int(h), int(w)
    except ValueError:
        raise click.UsageError(f"{flag} expects HxW, e.g. 80x80; got {value!r}") from None


def _effective_config(
    config_path: str | None, preset_name: str | None, smax: float | None
) -> AugmentConfig:
    cfg = AugmentConfig()
    if preset_name:
        cfg = get_preset(preset_name).augment
    if config_path:
        cfg = load_config(config_path, base=cfg)
    if smax is not None:
        from dataclasses import replace

        cfg = replace(cfg, sim=replace(cfg.sim, s_max=float(smax)))
    return cfg


@click.group()
def main():
    """Deterministic augmentation toolkit for event-camera volumes."""


@main.command()
@click.argument("in_dir", type=click.Path(exists=True, file_okay=False))
@click.argument("out_dir", type=click.Path(file_okay=False))
@click.option("--timesteps", "-T", type=int, default=None, help="Timesteps per volume.")
@click.option("--window-us", type=int, default=None, help="Slice streams into fixed windows (microseconds).")
@click.option("--resize", default=None, help="Resample volumes to HxW after voxelization.")
@click.option("--sensor", default=None, help="Sensor dims HxW for CSV inputs without metadata.")
@click.option("--preset", default=None, help="Named defaults: classification (80x80, T=10) or gen1 (125 ms, T=5).")
@click.option("--threads", type=int, default=1, show_default=True)
def convert(in_dir, out_dir, timesteps, window_us, resize, sensor, preset, threads):
    """Voxelize raw event files into an EVTH volume corpus."""
    resize_hw = _parse_hw(resize, "--resize") if resize else None
    sensor_hw = _parse_hw(sensor, "--sensor") if sensor else None
    if preset:
        try:
            p = get_preset(preset)
        except ConfigurationError as exc:
            raise click.UsageError(str(exc)) from None
        timesteps = timesteps if timesteps is not None else p.timesteps
        window_us = window_us if window_us is not None else p.window_us
        resize_hw = resize_hw if resize_hw is not None else p.resize_hw
    if timesteps is None:
        raise click.UsageError("--timesteps is required (or use --preset)")
    if timesteps < 1:
        raise click.UsageError(f"--timesteps must be positive, got {timesteps}")
    manifest = batch.run_convert(
        in_dir,
        out_dir,
        timesteps=timesteps,
        window_us=window_us,
        resize_hw=resize_hw,
        sensor_hw=sensor_hw,
        threads=threads,
    )
    n_ok, n_fail = len(manifest["entries"]), len(manifest["failures"])
    click.echo(f"converted {n_ok} volumes, {n_fail} failures -> {out_dir}")
    if n_fail:
        sys.exit(1)


@main.command()
@click.argument("in_dir", type=click.Path(exists=True, file_okay=False))
@click.argument("out_dir", type=click.Path(file_okay=False))
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None, help="Flat key-value configuration file.")
@click.option("--seed", type=int, default=None, help="Master seed; per-sample streams derive from it.  [default: 0]")
@click.option("--variant", type=click.Choice(["plain", "geo", "drop", "shape"]), default=None, help="Apply one robustness variant to every sample instead of the training composition.")
@click.option("--preset", default=None, help="Named config defaults: classification or gen1.")
@click.option("--smax", type=float, default=None, help="Override the maximum occluder size in pixels.")
@click.option("--from-manifest", "from_manifest", type=click.Path(exists=True, dir_okay=False), default=None, help="Reproduce a previous run: take config, seed and variant from its manifest.")
@click.option("--threads", type=int, default=1, show_default=True)
def augment(in_dir, out_dir, config_path, seed, variant, preset, smax, from_manifest, threads):
    """Augment an EVTH corpus deterministically."""
    try:
        if from_manifest is not None:
            if config_path or preset:
                raise click.UsageError(
                    "--from-manifest already carries a config; "
                    "drop --config/--preset"
                )
            recorded = io.read_manifest(from_manifest)
            if "config" not in recorded or "seed" not in recorded:
                raise click.UsageError(
                    f"{from_manifest} is not an augment manifest"
                )
            from evaug.config import config_from_mapping

            cfg = config_from_mapping(recorded["config"])
            seed = recorded["seed"] if seed is None else seed
            variant = recorded.get("variant") if variant is None else variant
            if smax is not None:
                from dataclasses import replace

                cfg = replace(cfg, sim=replace(cfg.sim, s_max=float(smax)))
        else:
            cfg = _effective_config(config_path, preset, smax)
    except ConfigurationError as exc:
        raise click.UsageError(str(exc)) from None
    manifest = batch.run_augment(
        in_dir, out_dir, cfg, seed=0 if seed is None else seed,
        variant=variant, threads=threads,
    )
    n_ok, n_fail = len(manifest["entries"]), len(manifest["failures"])
    click.echo(f"augmented {n_ok} volumes, {n_fail} failures -> {out_dir}")
    if n_fail:
        sys.exit(1)


@main.command()
@click.argument("sample", type=click.Path(exists=True, dir_okay=False))
@click.argument("out_dir", type=click.Path(file_okay=False))
def preview(sample, out_dir):
    """Render one volume as per-timestep PNGs (positive red, negative blue)."""
    from PIL import Image

    vol = io.read_volume(sample)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    peak = float(vol.max())
    scale = 255.0 / peak if peak > 0 else 0.0
    stem = Path(sample).stem
    for t in range(vol.shape[0]):
        rgb = np.zeros((vol.shape[2], vol.shape[3], 3), dtype=np.uint8)
        rgb[:, :, 0] = np.clip(vol[t, 1] * scale, 0, 255).astype(np.uint8)
        rgb[:, :, 2] = np.clip(vol[t, 0] * scale, 0, 255).astype(np.uint8)
        Image.fromarray(rgb).save(out / f"{stem}_t{t:02d}.png")
    click.echo(f"wrote {vol.shape[0]} images -> {out_dir}")


@main.command()
@click.argument("corpus", type=click.Path(exists=True, file_okay=False))
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--preset", default=None)
@click.option("--smax", type=float, default=None)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--threads", type=int, default=1, show_default=True, help="Measure throughput for 1..N workers.")
@click.option("--scaling/--no-scaling", default=True, show_default=True, help="Probe cost growth when spatial dims double.")
def bench(corpus, config_path, preset, smax, seed, threads, scaling):
    """Benchmark the augmentation pipeline over a corpus."""
    try:
        cfg = _effective_config(config_path, preset, smax)
    except ConfigurationError as exc:
        raise click.UsageError(str(exc)) from None
    try:
        report = batch.run_bench(
            corpus, cfg, threads=threads, seed=seed, scaling_probe=scaling
        )
    except EvaugError as exc:
        raise click.UsageError(str(exc)) from None
    click.echo(json.dumps(report, indent=2, sort_keys=True))
    if scaling and not report["scaling"]["linear_in_pixels"]:
        click.echo("warning: per-sample cost is not scaling linearly in pixels", err=True)
        sys.exit(1)


if __name__ == "__main__":
    main()
