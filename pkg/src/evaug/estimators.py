"""Scikit-learn style wrappers around the functional core.

Every estimator is stateless (``fit`` only validates), clonable, and
composable in ``sklearn.pipeline.Pipeline``. ``transform`` accepts a single
(T, 2, H, W) volume, a (B, T, 2, H, W) batch, or a list of volumes, and
returns the matching container. Randomized estimators derive one stream per
(seed, sample position), so batch results never depend on worker scheduling
and repeated calls are reproducible.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .config import AugmentConfig, DropConfig, GeoConfig
from .errors import ConfigurationError
from .events import EventStream
from .rng import RngSeed, derive_rng
from .shapes import SimConfig
from .transforms import DropMode, apply_geometric, compose, event_drop, shape_aug
from .validation import as_volume
from .voxel import resize_volume, voxelize


def _map_samples(X, fn):
    """Apply ``fn(volume, index)`` over single / batch / list inputs."""
    if isinstance(X, (list, tuple)):
        return [fn(as_volume(v), i) for i, v in enumerate(X)]
    arr = np.asarray(X)
    if arr.ndim == 4:
        return fn(as_volume(arr), 0)
    if arr.ndim == 5:
        return np.stack([fn(as_volume(v), i) for i, v in enumerate(arr)])
    raise ConfigurationError(
        f"expected (T,2,H,W), (B,T,2,H,W) or a list of volumes, got shape {arr.shape}"
    )


class EventVoxelizer(TransformerMixin, BaseEstimator):
    """Turn event streams into dense (T, 2, H, W) count volumes.

    Each stream is voxelized over its own time span at sensor resolution;
    ``resize_hw`` optionally resamples the result.
    """

    def __init__(self, n_timesteps=10, resize_hw=None):
        self.n_timesteps = n_timesteps
        self.resize_hw = resize_hw

    def fit(self, X, y=None):
        return self

    def _one(self, stream: EventStream) -> np.ndarray:
        window = stream.time_span
        if window is None:
            vol = np.zeros(
                (self.n_timesteps, 2, stream.height, stream.width), dtype=np.float32
            )
        else:
            vol = voxelize(
                stream, window, self.n_timesteps, stream.height, stream.width
            )
        if self.resize_hw is not None:
            vol = resize_volume(vol, *self.resize_hw)
        return vol

    def transform(self, X):
        if isinstance(X, EventStream):
            return self._one(X)
        return [self._one(s) for s in X]


class VolumeResizer(TransformerMixin, BaseEstimator):
    """Bilinear spatial resampling of volumes to a fixed (H, W)."""

    def __init__(self, height=80, width=80):
        self.height = height
        self.width = width

    def fit(self, X, y=None):
        return self

    def transform(self, X):
        return _map_samples(X, lambda v, i: resize_volume(v, self.height, self.width))


class ShapeOcclusion(TransformerMixin, BaseEstimator):
    """Moving-occluder augmentation as a transformer."""

    def __init__(
        self,
        n_min=1,
        n_max=5,
        s_max=30.0,
        speed_min=1.0,
        speed_max=None,
        noise_p=0.2,
        gray=0.5,
        mask_mode="union",
        seed=0,
    ):
        self.n_min = n_min
        self.n_max = n_max
        self.s_max = s_max
        self.speed_min = speed_min
        self.speed_max = speed_max
        self.noise_p = noise_p
        self.gray = gray
        self.mask_mode = mask_mode
        self.seed = seed

    def _config(self) -> SimConfig:
        return SimConfig(
            n_min=self.n_min,
            n_max=self.n_max,
            s_max=self.s_max,
            speed_min=self.speed_min,
            speed_max=self.speed_max,
            noise_p=self.noise_p,
            gray=self.gray,
            mask_mode=self.mask_mode,
        )

    def fit(self, X, y=None):
        self._config()
        return self

    def transform(self, X):
        cfg = self._config()
        return _map_samples(
            X, lambda v, i: shape_aug(v, cfg, derive_rng(self.seed, i, "shape"))
        )


class EventDropout(TransformerMixin, BaseEstimator):
    """Event deletion by time span, area rectangle, or random thinning."""

    def __init__(
        self,
        mode="random",
        time_frac=(0.1, 0.3),
        area_frac=(0.05, 0.3),
        ratio=(0.1, 0.5),
        aspect=(0.5, 2.0),
        seed=0,
    ):
        self.mode = mode
        self.time_frac = time_frac
        self.area_frac = area_frac
        self.ratio = ratio
        self.aspect = aspect
        self.seed = seed

    def fit(self, X, y=None):
        DropMode(self.mode)
        self._params()
        return self

    def _params(self) -> DropConfig:
        return DropConfig(
            time_frac=tuple(self.time_frac),
            area_frac=tuple(self.area_frac),
            ratio=tuple(self.ratio),
            aspect=tuple(self.aspect),
        )

    def transform(self, X):
        mode = DropMode(self.mode)
        params = self._params()
        return _map_samples(
            X, lambda v, i: event_drop(v, mode, params, derive_rng(self.seed, i, "drop"))
        )


class GeometricAugment(TransformerMixin, BaseEstimator):
    """Random flip / rotation / pad+crop / zoom, consistent across timesteps."""

    def __init__(
        self,
        pad_px=7,
        crop_hw=(80, 80),
        max_rotation_deg=15.0,
        hflip_prob=0.5,
        zoom_range=None,
        seed=0,
    ):
        self.pad_px = pad_px
        self.crop_hw = crop_hw
        self.max_rotation_deg = max_rotation_deg
        self.hflip_prob = hflip_prob
        self.zoom_range = zoom_range
        self.seed = seed

    def _config(self) -> GeoConfig:
        return GeoConfig(
            pad_px=self.pad_px,
            crop_hw=None if self.crop_hw is None else tuple(self.crop_hw),
            max_rotation_deg=self.max_rotation_deg,
            hflip_prob=self.hflip_prob,
            zoom_range=None if self.zoom_range is None else tuple(self.zoom_range),
        )

    def fit(self, X, y=None):
        self._config()
        return self

    def transform(self, X):
        geo = self._config()
        return _map_samples(
            X, lambda v, i: apply_geometric(v, geo, derive_rng(self.seed, i, "geo"))
        )


class AugmentPipeline(TransformerMixin, BaseEstimator):
    """Full training-time composition behind one estimator.

    ``config=None`` uses the package defaults (all stages enabled).
    """

    def __init__(self, config=None, seed=0):
        self.config = config
        self.seed = seed

    def _config(self) -> AugmentConfig:
        if self.config is None:
            return AugmentConfig()
        if not isinstance(self.config, AugmentConfig):
            raise ConfigurationError("config must be an AugmentConfig or None")
        return self.config

    def fit(self, X, y=None):
        self._config()
        return self

    def transform(self, X):
        cfg = self._config()
        return _map_samples(X, lambda v, i: compose(v, cfg, RngSeed(self.seed, i)))
