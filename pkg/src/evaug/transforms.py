"""Volume-level augmentation operators and the pipeline composer.

All operators are pure: they never mutate their input volume and, given the
same random state, always produce the same output. Geometric transforms draw
their parameters once per sample and apply them identically to every
timestep and both polarity channels, preserving temporal consistency.
"""

from __future__ import annotations

import math
from enum import Enum
from typing import Sequence

import numpy as np

from ._kernels import affine_bilinear
from .config import AugmentConfig, DropConfig, GeoConfig
from .errors import ConfigurationError
from .rng import RngSeed, as_seed
from .shapes import SimConfig, simulate_trajectories, synth_events
from .validation import check_volume
from .voxel import mean_nonzero


class DropMode(Enum):
    BY_TIME = "time"
    BY_AREA = "area"
    RANDOM = "random"


def shape_aug(
    vol: np.ndarray,
    cfg: SimConfig,
    rng: np.random.Generator,
    *,
    return_detail: bool = False,
):
    """Inject events from simulated moving occluders and erase what they cover.

    The synthetic magnitudes are capped at the mean of the input's nonzero
    cells, computed before any removal, so injected events resemble the
    sample. Original events under an occluder body are deleted; the
    occluder's own edge events take their place.

    With ``return_detail=True`` also returns the raw synthetic volume and the
    per-timestep occlusion masks.
    """
    vol = check_volume(vol)
    T, _, H, W = vol.shape
    clip = mean_nonzero(vol)
    field = simulate_trajectories(rng, cfg, T, H, W)
    synthetic, masks = synth_events(
        field, clip, rng, cfg.noise_p, gray=cfg.gray, mask_mode=cfg.mask_mode
    )
    keep = (~masks).astype(np.float32)[:, None, :, :]
    out = vol * keep + synthetic
    if return_detail:
        return out, synthetic, masks
    return out


def event_drop(
    vol: np.ndarray,
    mode: DropMode,
    params: DropConfig,
    rng: np.random.Generator,
) -> np.ndarray:
    """Delete events by time span, by spatial area, or uniformly at random.

    BY_TIME zeroes a contiguous run of timesteps; BY_AREA zeroes one
    rectangle across all timesteps and polarities (rectangle erasing);
    RANDOM thins every cell, binomially for integer-count volumes and by
    expectation-preserving scaling for fractional ones.
    """
    vol = check_volume(vol)
    T, _, H, W = vol.shape
    if mode is DropMode.BY_TIME:
        frac = float(rng.uniform(*params.time_frac))
        n = min(T, int(round(frac * T)))
        if n <= 0:
            return vol.copy()
        start = int(rng.integers(0, T - n + 1))
        out = vol.copy()
        out[start : start + n] = 0.0
        return out
    if mode is DropMode.BY_AREA:
        frac = float(rng.uniform(*params.area_frac))
        aspect = float(rng.uniform(*params.aspect))
        target = frac * H * W
        rh = int(np.clip(round(math.sqrt(target / aspect)), 1, H))
        rw = int(np.clip(round(math.sqrt(target * aspect)), 1, W))
        y0 = int(rng.integers(0, H - rh + 1))
        x0 = int(rng.integers(0, W - rw + 1))
        out = vol.copy()
        out[:, :, y0 : y0 + rh, x0 : x0 + rw] = 0.0
        return out
    if mode is DropMode.RANDOM:
        q = float(rng.uniform(*params.ratio))
        if q <= 0.0:
            return vol.copy()
        nz = vol > 0
        out = vol.copy()
        values = vol[nz]
        if values.size == 0:
            return out
        if np.all(values == np.floor(values)):
            out[nz] = rng.binomial(values.astype(np.int64), 1.0 - q).astype(np.float32)
        else:
            # fractional counts: binomial thinning undefined, preserve expectation
            out[nz] = values * np.float32(1.0 - q)
        return out
    raise ConfigurationError(f"unknown drop mode {mode!r}")


def hflip(vol: np.ndarray) -> np.ndarray:
    """Mirror the width axis; an exact involution."""
    vol = check_volume(vol)
    return np.ascontiguousarray(vol[:, :, :, ::-1])


def rotate(vol: np.ndarray, deg: float) -> np.ndarray:
    """Rotate every plane by ``deg`` about the spatial center.

    Positive angles turn from the +x axis toward the +y axis. Bilinear
    resampling with zero fill outside the frame; 0 degrees is an exact copy.
    """
    vol = check_volume(vol)
    if deg == 0.0:
        return vol.copy()
    T, P, H, W = vol.shape
    th = math.radians(float(deg))
    c, s = math.cos(th), math.sin(th)
    cx, cy = W / 2.0, H / 2.0
    # inverse map: src = c + R(-deg) @ (dst - c)
    m = (c, s, -s, c)
    offset = (cx - c * cx - s * cy, cy + s * cx - c * cy)
    planes = vol.reshape(T * P, H, W)
    out = affine_bilinear(planes, m, offset, (H, W), False)
    return out.reshape(T, P, H, W)


def pad_crop(
    vol: np.ndarray,
    pad: int,
    crop_hw: tuple[int, int],
    rng: np.random.Generator,
) -> np.ndarray:
    """Zero-pad spatially by ``pad`` on each side, then crop at a random offset."""
    vol = check_volume(vol)
    if pad < 0:
        raise ConfigurationError("pad must be >= 0")
    T, P, H, W = vol.shape
    ch, cw = int(crop_hw[0]), int(crop_hw[1])
    ph, pw = H + 2 * pad, W + 2 * pad
    if ch > ph or cw > pw:
        raise ConfigurationError(
            f"crop {ch}x{cw} larger than padded dims {ph}x{pw}"
        )
    y0 = int(rng.integers(0, ph - ch + 1))
    x0 = int(rng.integers(0, pw - cw + 1))
    padded = np.zeros((T, P, ph, pw), dtype=np.float32)
    padded[:, :, pad : pad + H, pad : pad + W] = vol
    return np.ascontiguousarray(padded[:, :, y0 : y0 + ch, x0 : x0 + cw])


def zoom(
    vol: np.ndarray, factor: float, rng: np.random.Generator | None = None
) -> np.ndarray:
    """Rescale content about the spatial center.

    ``factor > 1`` magnifies (crops and resamples), ``factor < 1`` shrinks
    (zero-pads the border); 1.0 is an exact copy.
    """
    vol = check_volume(vol)
    factor = float(factor)
    if factor <= 0.0:
        raise ConfigurationError(f"zoom factor must be positive, got {factor}")
    if factor == 1.0:
        return vol.copy()
    T, P, H, W = vol.shape
    cx, cy = W / 2.0, H / 2.0
    inv = 1.0 / factor
    m = (inv, 0.0, 0.0, inv)
    offset = (cx - inv * cx, cy - inv * cy)
    planes = vol.reshape(T * P, H, W)
    out = affine_bilinear(planes, m, offset, (H, W), False)
    return out.reshape(T, P, H, W)


def apply_geometric(
    vol: np.ndarray, geo: GeoConfig, rng: np.random.Generator
) -> np.ndarray:
    """One random geometric draw applied to the whole volume.

    Order: horizontal flip, rotation, pad+crop, zoom. Sub-transforms that
    the config disables are skipped without consuming draws.
    """
    out = vol
    coin = float(rng.random())
    if coin < geo.hflip_prob:
        out = hflip(out)
    if geo.max_rotation_deg > 0:
        deg = float(rng.uniform(-geo.max_rotation_deg, geo.max_rotation_deg))
        out = rotate(out, deg)
    if geo.crop_hw is not None:
        out = pad_crop(out, geo.pad_px, geo.crop_hw, rng)
    if geo.zoom_range is not None:
        factor = float(rng.uniform(*geo.zoom_range))
        out = zoom(out, factor, rng)
    if out is vol:
        out = vol.copy()
    return out


def _draw_drop_mode(params: DropConfig, rng: np.random.Generator) -> DropMode:
    weights = np.array([params.w_time, params.w_area, params.w_random], dtype=np.float64)
    probs = weights / weights.sum()
    idx = int(rng.choice(3, p=probs))
    return (DropMode.BY_TIME, DropMode.BY_AREA, DropMode.RANDOM)[idx]


def compose(vol: np.ndarray, cfg: AugmentConfig, seed: RngSeed | int) -> np.ndarray:
    """Full training-time pipeline for one sample.

    The geometric stage applies to every sample it is enabled for; drop and
    shape stages each gate on an independent Bernoulli(apply_prob) draw.
    Stage order is geometric, then drop, then shape, so occluders are drawn
    in the final coordinate frame rather than being warped as scene content.
    Every stage draws from its own derived stream, so toggling one stage
    never changes another's randomness.
    """
    vol = check_volume(vol)
    seed = as_seed(seed)
    out = vol
    if "geo" in cfg.enabled:
        out = apply_geometric(out, cfg.geo, seed.stream("geo"))
    if "drop" in cfg.enabled:
        rng = seed.stream("drop")
        if float(rng.random()) < cfg.apply_prob:
            mode = _draw_drop_mode(cfg.drop, rng)
            out = event_drop(out, mode, cfg.drop, rng)
    if "shape" in cfg.enabled:
        rng = seed.stream("shape")
        if float(rng.random()) < cfg.apply_prob:
            out = shape_aug(out, cfg.sim, rng)
    if out is vol:
        out = vol.copy()
    return out


ROBUSTNESS_VARIANTS = ("plain", "geo", "drop", "shape")


def augment_variant(
    vol: np.ndarray,
    variant: str,
    seed: RngSeed | int,
    cfg: AugmentConfig | None = None,
) -> np.ndarray:
    """Apply one robustness-set augmentation unconditionally to one sample."""
    vol = check_volume(vol)
    seed = as_seed(seed)
    if cfg is None:
        cfg = AugmentConfig()
    if variant == "plain":
        return vol.copy()
    if variant == "geo":
        return apply_geometric(vol, cfg.geo, seed.stream("geo"))
    if variant == "drop":
        rng = seed.stream("drop")
        mode = _draw_drop_mode(cfg.drop, rng)
        return event_drop(vol, mode, cfg.drop, rng)
    if variant == "shape":
        return shape_aug(vol, cfg.sim, seed.stream("shape"))
    raise ConfigurationError(
        f"unknown variant {variant!r}; choose from {ROBUSTNESS_VARIANTS}"
    )


def make_robustness_set(
    samples: Sequence[np.ndarray],
    variant: str,
    master_seed: int,
    cfg: AugmentConfig | None = None,
) -> list[np.ndarray]:
    """Build a challenge set: the variant augmentation hits every sample once.

    Unlike training composition there is no probability gate. Per-sample
    streams derive from (master_seed, position), so the corpus is fully
    reproducible.
    """
    if variant not in ROBUSTNESS_VARIANTS:
        raise ConfigurationError(
            f"unknown variant {variant!r}; choose from {ROBUSTNESS_VARIANTS}"
        )
    return [
        augment_variant(vol, variant, RngSeed(master_seed, i), cfg)
        for i, vol in enumerate(samples)
    ]
