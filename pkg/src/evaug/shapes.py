"""Moving-occluder simulation: spawning, linear motion, rasterization, and
synthetic event generation by frame differencing.

The simulator drops N random gray shapes (circle, rectangle, ellipse) onto a
black canvas, moves each along a straight line between timesteps, and reads
off the events a real sensor would fire: the signed difference between
consecutive rasterized frames. Homogeneous shapes only fire at their moving
edges, which is exactly the occlusion behaviour the augmentation injects.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from ._kernels import fill_occupancy
from .errors import ConfigurationError
from .validation import check_probability

MIN_SHAPE_SIZE = 3.0


class ShapeKind(Enum):
    CIRCLE = "circle"
    RECTANGLE = "rectangle"
    ELLIPSE = "ellipse"


_KINDS = (ShapeKind.CIRCLE, ShapeKind.RECTANGLE, ShapeKind.ELLIPSE)


@dataclass(frozen=True)
class ShapeObject:
    """One occluder: center position, full extents, and linear velocity."""

    kind: ShapeKind
    x: float
    y: float
    w: float
    h: float
    speed: float
    angle: float

    def bbox(self) -> tuple[float, float, float, float]:
        """(x_min, y_min, x_max, y_max) of the axis-aligned bounding box."""
        return (
            self.x - self.w / 2.0,
            self.y - self.h / 2.0,
            self.x + self.w / 2.0,
            self.y + self.h / 2.0,
        )

    def intersects_frame(self, H: int, W: int) -> bool:
        x0, y0, x1, y1 = self.bbox()
        return x1 > 0.0 and x0 < W and y1 > 0.0 and y0 < H


@dataclass(frozen=True)
class SimConfig:
    """Occluder simulation parameters.

    ``speed_max=None`` resolves to ``max(H, W) / T`` pixels per timestep when
    a simulation starts, so a shape can cross the frame within one sample.
    ``mask_mode`` selects the occlusion footprint of a moving shape: the
    union of its start and end silhouettes ("union", default) or the end
    silhouette only ("end").
    """

    n_min: int = 1
    n_max: int = 5
    s_max: float = 30.0
    speed_min: float = 1.0
    speed_max: float | None = None
    noise_p: float = 0.2
    gray: float = 0.5
    mask_mode: str = "union"

    def __post_init__(self):
        if not 1 <= self.n_min <= self.n_max:
            raise ConfigurationError(
                f"need 1 <= n_min <= n_max, got [{self.n_min}, {self.n_max}]"
            )
        if self.s_max < MIN_SHAPE_SIZE:
            raise ConfigurationError(f"s_max must be >= {MIN_SHAPE_SIZE}px")
        check_probability(self.noise_p, "noise_p")
        if self.gray <= 0:
            raise ConfigurationError("gray intensity must be positive")
        if self.speed_min < 0:
            raise ConfigurationError("speed_min must be >= 0")
        if self.speed_max is not None and self.speed_max < self.speed_min:
            raise ConfigurationError("speed_max must be >= speed_min")
        if self.mask_mode not in ("union", "end"):
            raise ConfigurationError(f"unknown mask_mode {self.mask_mode!r}")

    def resolved(self, H: int, W: int, T: int) -> "SimConfig":
        """Concrete copy with the speed ceiling filled in for a frame size."""
        if self.speed_max is not None:
            return self
        return replace(self, speed_max=max(1.0, max(H, W) / max(T, 1)))


@dataclass(frozen=True)
class ShapeField:
    """Shape positions at simulation steps 0..T over an H x W frame."""

    frames: tuple[tuple[ShapeObject, ...], ...]
    height: int
    width: int

    @property
    def n_steps(self) -> int:
        return len(self.frames) - 1

    @property
    def n_shapes(self) -> int:
        return len(self.frames[0]) if self.frames else 0


def spawn_shape(rng: np.random.Generator, cfg: SimConfig, H: int, W: int) -> ShapeObject:
    """Draw one shape: uniform kind, center in frame, size, speed and angle.

    Centers may fall anywhere inside the frame, so shapes can spawn partially
    outside it. Circles get one diameter draw (w == h).
    """
    if cfg.speed_max is None:
        cfg = cfg.resolved(H, W, 1)
    kind = _KINDS[int(rng.integers(0, len(_KINDS)))]
    x = float(rng.uniform(0.0, W))
    y = float(rng.uniform(0.0, H))
    w = float(rng.uniform(MIN_SHAPE_SIZE, cfg.s_max))
    h = w if kind is ShapeKind.CIRCLE else float(rng.uniform(MIN_SHAPE_SIZE, cfg.s_max))
    speed = float(rng.uniform(cfg.speed_min, cfg.speed_max))
    angle = float(rng.uniform(0.0, 2.0 * math.pi))
    return ShapeObject(kind, x, y, w, h, speed, angle)


def advance(shape: ShapeObject) -> ShapeObject:
    """One linear motion step: move by speed along the heading angle."""
    return ShapeObject(
        shape.kind,
        shape.x + shape.speed * math.cos(shape.angle),
        shape.y + shape.speed * math.sin(shape.angle),
        shape.w,
        shape.h,
        shape.speed,
        shape.angle,
    )


def simulate_trajectories(
    rng: np.random.Generator, cfg: SimConfig, T: int, H: int, W: int
) -> ShapeField:
    """Simulate N shapes over T motion steps, keeping the population constant.

    Produces T+1 frames (steps 0..T). After each motion step, any shape whose
    bounding box no longer intersects the frame is replaced by a freshly
    spawned one, so every frame holds exactly N shapes.
    """
    if T < 1:
        raise ConfigurationError(f"need T >= 1, got {T}")
    cfg = cfg.resolved(H, W, T)
    n = int(rng.integers(cfg.n_min, cfg.n_max + 1))
    current = [spawn_shape(rng, cfg, H, W) for _ in range(n)]
    frames = [tuple(current)]
    for _ in range(T):
        stepped = []
        for s in current:
            s = advance(s)
            if not s.intersects_frame(H, W):
                s = spawn_shape(rng, cfg, H, W)
            stepped.append(s)
        current = stepped
        frames.append(tuple(current))
    return ShapeField(tuple(frames), H, W)


_KIND_CODE = {ShapeKind.CIRCLE: 0, ShapeKind.RECTANGLE: 1, ShapeKind.ELLIPSE: 2}


def _occupancy(shapes, H: int, W: int) -> np.ndarray:
    """Boolean H x W mask of pixels whose center falls inside any shape."""
    mask = np.zeros((H, W), dtype=bool)
    n = len(shapes)
    if n == 0:
        return mask
    kinds = np.fromiter((_KIND_CODE[s.kind] for s in shapes), dtype=np.int64, count=n)
    xs = np.fromiter((s.x for s in shapes), dtype=np.float64, count=n)
    ys = np.fromiter((s.y for s in shapes), dtype=np.float64, count=n)
    ws = np.fromiter((s.w for s in shapes), dtype=np.float64, count=n)
    hs = np.fromiter((s.h for s in shapes), dtype=np.float64, count=n)
    fill_occupancy(kinds, xs, ys, ws, hs, mask)
    return mask


def rasterize(shapes, H: int, W: int, gray: float) -> np.ndarray:
    """Render shapes at intensity ``gray`` on a black H x W canvas.

    Membership is a pixel-center test, no anti-aliasing; overlapping shapes
    share one intensity (union semantics).
    """
    return _occupancy(shapes, H, W).astype(np.float32) * np.float32(gray)


def synth_events(
    field: ShapeField,
    clip_value: float,
    rng: np.random.Generator,
    noise_p: float,
    gray: float = 0.5,
    mask_mode: str = "union",
) -> tuple[np.ndarray, np.ndarray]:
    """Events fired by the simulated shapes, plus their occlusion masks.

    For each motion step the signed difference of the consecutive rasterized
    frames becomes synthetic events: brightening pixels go to polarity
    channel 1, darkening pixels to channel 0, with magnitudes capped at
    ``clip_value``. Each nonzero synthetic cell is then independently zeroed
    with probability ``noise_p`` (sensor noise model). ``masks[t]`` marks the
    pixels covered by shape bodies during step t.
    """
    if len(field.frames) < 2:
        raise ConfigurationError("shape field needs at least 2 frames (T >= 1)")
    check_probability(noise_p, "noise_p")
    if mask_mode not in ("union", "end"):
        raise ConfigurationError(f"unknown mask_mode {mask_mode!r}")
    T = field.n_steps
    H, W = field.height, field.width
    # uniform gray on black means the frame difference is always +-gray, so
    # min(|diff|, clip) is one scalar for the whole simulation
    value = np.float32(min(float(gray), max(0.0, float(clip_value))))
    vol = np.zeros((T, 2, H, W), dtype=np.float32)
    masks = np.zeros((T, H, W), dtype=bool)
    prev = _occupancy(field.frames[0], H, W)
    for t in range(T):
        cur = _occupancy(field.frames[t + 1], H, W)
        vol[t, 1][cur & ~prev] = value  # brighter: shape moved onto pixel
        vol[t, 0][prev & ~cur] = value  # darker: shape moved off pixel
        masks[t] = (cur | prev) if mask_mode == "union" else cur
        prev = cur
    if noise_p > 0.0:
        nz = vol > 0
        n_candidates = int(nz.sum())
        if n_candidates:
            keep = rng.random(n_candidates) >= noise_p
            vol[nz] *= keep
    return vol, masks
