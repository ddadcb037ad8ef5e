"""Input validation helpers shared by the functional ops and the estimators."""

from __future__ import annotations

import numpy as np

from .errors import ConfigurationError


def check_volume(vol: np.ndarray, name: str = "volume") -> np.ndarray:
    """Validate a (T, 2, H, W) event-count volume and return it unchanged."""
    if not isinstance(vol, np.ndarray):
        raise ConfigurationError(
            f"{name} must be a numpy array, got {type(vol).__name__}"
        )
    if vol.ndim != 4 or vol.shape[1] != 2:
        raise ConfigurationError(
            f"{name} must have shape (T, 2, H, W), got {tuple(vol.shape)}"
        )
    if min(vol.shape[0], vol.shape[2], vol.shape[3]) < 1:
        raise ConfigurationError(f"{name} has an empty axis: {tuple(vol.shape)}")
    return vol


def as_volume(data) -> np.ndarray:
    """Coerce array-like input to a C-contiguous float32 (T, 2, H, W) volume."""
    arr = np.ascontiguousarray(data, dtype=np.float32)
    return check_volume(arr)


def check_positive_int(value, name: str) -> int:
    v = int(value)
    if v < 1:
        raise ConfigurationError(f"{name} must be a positive integer, got {value}")
    return v


def check_probability(value, name: str) -> float:
    v = float(value)
    if not 0.0 <= v <= 1.0:
        raise ConfigurationError(f"{name} must be in [0, 1], got {value}")
    return v


def check_range(lo, hi, name: str) -> tuple[float, float]:
    lo, hi = float(lo), float(hi)
    if lo > hi:
        raise ConfigurationError(f"{name} range is inverted: ({lo}, {hi})")
    return lo, hi
