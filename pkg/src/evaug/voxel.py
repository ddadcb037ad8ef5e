"""Dense event-count volumes: voxelization, resizing, and statistics.

A volume is a float32 array of shape (T, 2, H, W): per-timestep, per-polarity
event counts on the pixel grid. Polarity channel 0 holds darkening events,
channel 1 brightening events. Counts are exact integers right after
voxelization; downstream resampling and augmentation make them fractional.
"""

from __future__ import annotations

import numpy as np

from ._kernels import affine_bilinear
from .errors import ConfigurationError
from .events import EventStream, TimeWindow
from .validation import check_positive_int, check_volume


def voxelize(
    stream: EventStream, window: TimeWindow, T: int, H: int, W: int
) -> np.ndarray:
    """Accumulate a stream into a (T, 2, H, W) count volume.

    The window [t_start, t_end] is split into T equal timesteps; an event at
    time t lands in timestep ``floor((t - t_start) / (t_end - t_start) * T)``,
    computed in exact integer arithmetic. An event exactly at ``t_end`` is
    clamped into the last timestep so closed-interval recordings lose no
    events. Events outside the window are skipped. The output sum equals the
    number of in-window events.
    """
    T = check_positive_int(T, "T")
    H = check_positive_int(H, "H")
    W = check_positive_int(W, "W")
    if (H, W) != (stream.height, stream.width):
        raise ConfigurationError(
            f"volume dims {H}x{W} must match sensor dims "
            f"{stream.height}x{stream.width}; resize the volume afterwards"
        )
    t_a, t_b = window.t_start, window.t_end
    vol = np.zeros((T, 2, H, W), dtype=np.float32)
    if not len(stream):
        return vol
    inside = (stream.t >= t_a) & (stream.t <= t_b)
    t = stream.t[inside]
    if not len(t):
        return vol
    x = stream.x[inside].astype(np.int64)
    y = stream.y[inside].astype(np.int64)
    p = stream.p[inside].astype(np.int64)
    # exact integer floor of (t - t_a) / (t_b - t_a) * T
    tau = ((t - t_a) * T) // (t_b - t_a)
    np.minimum(tau, T - 1, out=tau)
    flat = ((tau * 2 + p) * H + y) * W + x
    counts = np.bincount(flat, minlength=T * 2 * H * W)
    return counts.reshape(T, 2, H, W).astype(np.float32)


def resize_volume(vol: np.ndarray, H_out: int, W_out: int) -> np.ndarray:
    """Bilinearly resample every (timestep, polarity) plane to (H_out, W_out).

    Sampling is half-pixel-centered with edge clamping. Identity dimensions
    return a bit-exact copy.
    """
    vol = check_volume(vol)
    H_out = check_positive_int(H_out, "H_out")
    W_out = check_positive_int(W_out, "W_out")
    T, P, H, W = vol.shape
    if (H_out, W_out) == (H, W):
        return vol.copy()
    sy = H / H_out
    sx = W / W_out
    planes = np.ascontiguousarray(vol, dtype=np.float32).reshape(T * P, H, W)
    out = affine_bilinear(planes, (sx, 0.0, 0.0, sy), (0.0, 0.0), (H_out, W_out), True)
    return out.reshape(T, P, H_out, W_out)


def mean_nonzero(vol: np.ndarray) -> float:
    """Arithmetic mean of all strictly positive cells; 0.0 for an all-zero volume."""
    vol = check_volume(vol)
    if vol.size == 0:
        return 0.0
    if float(vol.min()) < 0.0:
        # defensive: pipeline volumes are non-negative, arbitrary input may not be
        positive = vol[vol > 0]
        if positive.size == 0:
            return 0.0
        return float(positive.mean(dtype=np.float64))
    count = int(np.count_nonzero(vol))
    if count == 0:
        return 0.0
    return float(vol.sum(dtype=np.float64)) / count
