"""Corpus-level batch processing with deterministic parallelism.

Workers receive (sample path, sample index) pairs; every random decision
derives from (master seed, sample index), so output bytes are identical for
any worker count. Manifests record the effective configuration, the master
seed, and a content digest per output file; re-running from the same inputs
reproduces the corpus bit-exactly.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _kernels, io
from .config import AugmentConfig, config_to_mapping
from .errors import EvaugError
from .events import slice_windows
from .rng import RngSeed, derive_rng
from .transforms import ROBUSTNESS_VARIANTS, augment_variant, compose
from .voxel import resize_volume, voxelize

MANIFEST_NAME = "manifest.json"


def _sorted_files(directory: Path, suffixes: tuple[str, ...]) -> list[Path]:
    return sorted(
        p for p in directory.iterdir() if p.suffix.lower() in suffixes and p.is_file()
    )


def _pool(threads: int):
    # fork keeps warmed JIT kernels available in the workers
    import multiprocessing

    ctx = multiprocessing.get_context(
        "fork" if "fork" in multiprocessing.get_all_start_methods() else None
    )
    return ProcessPoolExecutor(max_workers=threads, mp_context=ctx)


def _run_tasks(tasks, worker, threads: int):
    if threads <= 1 or len(tasks) <= 1:
        return [worker(t) for t in tasks]
    _kernels.warmup()
    with _pool(threads) as pool:
        chunk = max(1, len(tasks) // (threads * 4))
        return list(pool.map(worker, tasks, chunksize=chunk))


# ---------------------------------------------------------------------------
# convert: raw event files -> EVTH volumes


@dataclass(frozen=True)
class ConvertSpec:
    out_dir: str
    timesteps: int
    window_us: int | None
    resize_hw: tuple[int, int] | None
    sensor_hw: tuple[int, int] | None


def _label_sidecar(path: Path) -> str | None:
    sidecar = path.with_name(path.stem + ".labels.csv")
    return sidecar.name if sidecar.exists() else None


def _convert_one(task) -> dict:
    path_str, spec = task
    path = Path(path_str)
    out_dir = Path(spec.out_dir)
    labels = _label_sidecar(path)
    try:
        kwargs = {}
        if spec.sensor_hw is not None:
            kwargs = {"height": spec.sensor_hw[0], "width": spec.sensor_hw[1]}
        stream = io.read_events(path, **kwargs)
        outputs = []
        if spec.window_us is not None:
            parts = slice_windows(stream, spec.window_us)
            for k, (window, sub) in enumerate(parts):
                vol = voxelize(
                    sub, window, spec.timesteps, stream.height, stream.width
                )
                if spec.resize_hw is not None:
                    vol = resize_volume(vol, *spec.resize_hw)
                out_path = out_dir / f"{path.stem}_w{k:04d}{io.VOLUME_FILE_SUFFIX}"
                io.write_volume(vol, out_path)
                outputs.append(
                    {
                        "path": out_path.name,
                        "source": path.name,
                        "labels": labels,
                        "window": [window.t_start, window.t_end],
                        "events": len(sub),
                        "sensor": [stream.height, stream.width],
                        "shape": list(vol.shape),
                        "digest": io.file_digest(out_path),
                        "status": "ok",
                    }
                )
        else:
            window = stream.time_span
            if window is None:
                vol = np.zeros(
                    (spec.timesteps, 2, stream.height, stream.width), dtype=np.float32
                )
            else:
                vol = voxelize(
                    stream, window, spec.timesteps, stream.height, stream.width
                )
            if spec.resize_hw is not None:
                vol = resize_volume(vol, *spec.resize_hw)
            out_path = out_dir / f"{path.stem}{io.VOLUME_FILE_SUFFIX}"
            io.write_volume(vol, out_path)
            outputs.append(
                {
                    "path": out_path.name,
                    "source": path.name,
                    "labels": labels,
                    "events": len(stream),
                    "sensor": [stream.height, stream.width],
                    "shape": list(vol.shape),
                    "digest": io.file_digest(out_path),
                    "status": "ok",
                }
            )
        return {"source": path.name, "entries": outputs}
    except (EvaugError, OSError) as exc:
        return {"source": path.name, "error": str(exc)}


def run_convert(
    in_dir: str | Path,
    out_dir: str | Path,
    timesteps: int,
    window_us: int | None = None,
    resize_hw: tuple[int, int] | None = None,
    sensor_hw: tuple[int, int] | None = None,
    threads: int = 1,
) -> dict:
    """Convert every event file in ``in_dir``; returns the manifest."""
    in_dir, out_dir = Path(in_dir), Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    inputs = [
        p
        for p in _sorted_files(in_dir, (io.EVENT_FILE_SUFFIX, ".csv"))
        if not p.name.endswith(".labels.csv")
    ]
    spec = ConvertSpec(
        out_dir=str(out_dir),
        timesteps=timesteps,
        window_us=window_us,
        resize_hw=resize_hw,
        sensor_hw=sensor_hw,
    )
    results = _run_tasks([(str(p), spec) for p in inputs], _convert_one, threads)
    entries, failures = [], []
    for res in results:
        if "error" in res:
            failures.append({"source": res["source"], "error": res["error"]})
        else:
            entries.extend(res["entries"])
    manifest = {
        "command": "convert",
        "version": 1,
        "timesteps": timesteps,
        "window_us": window_us,
        "resize_hw": list(resize_hw) if resize_hw else None,
        "entries": entries,
        "failures": failures,
    }
    io.write_manifest(manifest, out_dir / MANIFEST_NAME)
    return manifest


# ---------------------------------------------------------------------------
# augment: EVTH volumes -> augmented EVTH volumes


@dataclass(frozen=True)
class AugmentSpec:
    out_dir: str
    config: AugmentConfig
    seed: int
    variant: str | None  # None = training composition


def _augment_one(task) -> dict:
    path_str, index, spec = task
    path = Path(path_str)
    out_path = Path(spec.out_dir) / path.name
    try:
        vol = io.read_volume(path)
        if spec.variant is None:
            out = compose(vol, spec.config, RngSeed(spec.seed, index))
        else:
            out = augment_variant(
                vol, spec.variant, RngSeed(spec.seed, index), spec.config
            )
        io.write_volume(out, out_path)
        return {
            "path": out_path.name,
            "source": path.name,
            "index": index,
            "shape": list(out.shape),
            "digest": io.file_digest(out_path),
            "status": "ok",
        }
    except (EvaugError, OSError) as exc:
        return {"source": path.name, "index": index, "error": str(exc)}


def run_augment(
    in_dir: str | Path,
    out_dir: str | Path,
    config: AugmentConfig,
    seed: int,
    variant: str | None = None,
    threads: int = 1,
) -> dict:
    """Augment every EVTH volume in ``in_dir``; returns the manifest.

    ``variant=None`` applies the probabilistic training composition;
    otherwise the named robustness variant is applied to every sample
    unconditionally. Sample indices follow sorted path order.
    """
    if variant is not None and variant not in ROBUSTNESS_VARIANTS:
        raise EvaugError(f"unknown variant {variant!r}")
    in_dir, out_dir = Path(in_dir), Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    inputs = _sorted_files(in_dir, (io.VOLUME_FILE_SUFFIX,))
    spec = AugmentSpec(
        out_dir=str(out_dir), config=config, seed=int(seed), variant=variant
    )
    tasks = [(str(p), i, spec) for i, p in enumerate(inputs)]
    results = _run_tasks(tasks, _augment_one, threads)
    entries = [r for r in results if "error" not in r]
    failures = [r for r in results if "error" in r]
    manifest = {
        "command": "augment",
        "version": 1,
        "seed": int(seed),
        "variant": variant,
        "config": config_to_mapping(config),
        "entries": entries,
        "failures": failures,
    }
    io.write_manifest(manifest, out_dir / MANIFEST_NAME)
    return manifest


# ---------------------------------------------------------------------------
# benchmarking


def _bench_shard(task) -> int:
    paths, config, seed, indices = task
    for path, index in zip(paths, indices):
        vol = io.read_volume(path)
        compose(vol, config, RngSeed(seed, index))
    return len(paths)


def _noop(_):
    return None


def _time_stage(fn, reps: int) -> float:
    t0 = time.perf_counter()
    for _ in range(reps):
        fn()
    return (time.perf_counter() - t0) / reps


def run_bench(
    corpus: str | Path,
    config: AugmentConfig,
    threads: int = 1,
    seed: int = 0,
    scaling_probe: bool = True,
) -> dict:
    """Measure pipeline throughput and per-stage cost over a corpus.

    Reports single-thread per-stage timings, end-to-end samples/sec for
    worker counts 1..threads, and (optionally) how per-sample cost reacts to
    doubling the spatial dims, which should be roughly linear in T*H*W.
    """
    from .transforms import DropMode, apply_geometric, event_drop, shape_aug

    corpus = Path(corpus)
    paths = _sorted_files(corpus, (io.VOLUME_FILE_SUFFIX,))
    if not paths:
        raise EvaugError(f"no {io.VOLUME_FILE_SUFFIX} files in {corpus}")
    _kernels.warmup()
    sample = io.read_volume(paths[0])
    reps = 20

    rng = derive_rng(seed, 0, "bench")
    stage_ms = {
        "geo": _time_stage(lambda: apply_geometric(sample, config.geo, rng), reps),
        "drop": _time_stage(
            lambda: event_drop(sample, DropMode.RANDOM, config.drop, rng), reps
        ),
        "shape": _time_stage(lambda: shape_aug(sample, config.sim, rng), reps),
        "compose": _time_stage(lambda: compose(sample, config, RngSeed(seed, 0)), reps),
        "read": _time_stage(lambda: io.read_volume(paths[0]), reps),
    }
    stage_ms = {k: v * 1e3 for k, v in stage_ms.items()}

    throughput = {}
    all_indices = list(range(len(paths)))
    for k in range(1, max(1, threads) + 1):
        # interleaved shards; per-sample indices (and so outputs) stay fixed
        shards = [(paths[i::k], config, seed, all_indices[i::k]) for i in range(k)]
        best = 0.0
        if k == 1:
            for _ in range(2):
                t0 = time.perf_counter()
                done = _bench_shard(shards[0])
                best = max(best, done / (time.perf_counter() - t0))
        else:
            with _pool(k) as pool:
                list(pool.map(_noop, range(k)))  # steady state: workers spun up
                for _ in range(2):
                    t0 = time.perf_counter()
                    done = sum(pool.map(_bench_shard, shards))
                    best = max(best, done / (time.perf_counter() - t0))
        throughput[k] = best

    report = {
        "corpus": str(corpus),
        "n_samples": len(paths),
        "sample_shape": list(sample.shape),
        "stage_ms": stage_ms,
        "samples_per_sec": throughput,
    }

    if scaling_probe:
        from dataclasses import replace

        T, _, H, W = sample.shape
        big = np.repeat(np.repeat(sample, 2, axis=2), 2, axis=3)
        # drop the fixed-size crop so every stage sees the doubled dims
        probe_cfg = replace(config, geo=replace(config.geo, crop_hw=None, pad_px=0))
        small_t = _time_stage(lambda: compose(sample, probe_cfg, RngSeed(seed, 1)), reps)
        big_t = _time_stage(lambda: compose(big, probe_cfg, RngSeed(seed, 1)), reps)
        report["scaling"] = {
            "base_hw": [H, W],
            "doubled_hw": [2 * H, 2 * W],
            "base_ms": small_t * 1e3,
            "doubled_ms": big_t * 1e3,
            "ratio": big_t / small_t,
            # 4x the pixels should cost about 4x the time
            "linear_in_pixels": bool(2.0 <= big_t / small_t <= 6.0),
        }
    return report
