"""evaug: deterministic occlusion-aware augmentation for event-camera data.

The package voxelizes raw event streams into dense (T, 2, H, W) count
volumes and augments them with simulated moving occluders (which both emit
synthetic events and erase what they cover), event dropping, and
timestep-consistent geometric transforms. Every random decision derives
from (master seed, sample index, stage), so corpora reproduce bit-exactly
at any parallelism.
"""

from .config import AugmentConfig, DropConfig, GeoConfig, preset
from .errors import ConfigurationError, EvaugError, FormatError, ParseError
from .events import Event, EventStream, TimeWindow, concat_streams, slice_windows
from .io import (
    BBoxLabel,
    filter_boxes,
    read_events,
    read_labels,
    read_volume,
    write_events,
    write_labels,
    write_volume,
)
from .rng import RngSeed, derive_rng
from .shapes import (
    ShapeField,
    ShapeKind,
    ShapeObject,
    SimConfig,
    advance,
    rasterize,
    simulate_trajectories,
    spawn_shape,
    synth_events,
)
from .transforms import (
    DropMode,
    apply_geometric,
    compose,
    event_drop,
    hflip,
    make_robustness_set,
    pad_crop,
    rotate,
    shape_aug,
    zoom,
)
from .voxel import mean_nonzero, resize_volume, voxelize

__version__ = "0.1.0"

__all__ = [
    "AugmentConfig",
    "BBoxLabel",
    "ConfigurationError",
    "DropConfig",
    "DropMode",
    "EvaugError",
    "Event",
    "EventStream",
    "FormatError",
    "GeoConfig",
    "ParseError",
    "RngSeed",
    "ShapeField",
    "ShapeKind",
    "ShapeObject",
    "SimConfig",
    "TimeWindow",
    "advance",
    "apply_geometric",
    "compose",
    "concat_streams",
    "derive_rng",
    "event_drop",
    "filter_boxes",
    "hflip",
    "make_robustness_set",
    "mean_nonzero",
    "pad_crop",
    "preset",
    "rasterize",
    "read_events",
    "read_labels",
    "read_volume",
    "resize_volume",
    "rotate",
    "shape_aug",
    "simulate_trajectories",
    "slice_windows",
    "spawn_shape",
    "synth_events",
    "voxelize",
    "write_events",
    "write_labels",
    "write_volume",
    "zoom",
]
