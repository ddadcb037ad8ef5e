"""Pipeline configuration and its flat key-value serialization.

A full augmentation setup serializes to a plain-text file of
``key = value`` lines (``#`` comments and blank lines allowed), with keys
namespaced ``sim.*``, ``geo.*`` and ``drop.*``:

    enabled = geo,drop,shape
    apply_prob = 0.5
    sim.n_min = 1
    sim.n_max = 5
    sim.s_max = 30
    sim.speed_min = 1
    sim.speed_max = auto
    sim.noise_p = 0.2
    sim.gray = 0.5
    sim.mask_mode = union
    geo.pad_px = 7
    geo.crop_h = 80
    geo.crop_w = 80
    geo.max_rotation_deg = 15
    geo.hflip_prob = 0.5
    geo.zoom_min = none
    geo.zoom_max = none
    drop.w_time = 1
    drop.w_area = 1
    drop.w_random = 1
    drop.time_frac_min = 0.1
    drop.time_frac_max = 0.3
    drop.area_frac_min = 0.05
    drop.area_frac_max = 0.3
    drop.ratio_min = 0.1
    drop.ratio_max = 0.5
    drop.aspect_min = 0.5
    drop.aspect_max = 2.0

The same flat mapping is the configuration surface of the CLI (flags
override file values) and of the foreign-language bindings.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from .errors import ConfigurationError
from .shapes import SimConfig
from .validation import check_probability, check_range

STAGES = ("geo", "drop", "shape")


@dataclass(frozen=True)
class GeoConfig:
    """Geometric transform stage: flip, rotation, pad+crop, zoom.

    ``crop_hw=None`` disables pad+crop, ``zoom_range=None`` disables zoom,
    ``max_rotation_deg=0`` disables rotation.
    """

    pad_px: int = 7
    crop_hw: tuple[int, int] | None = (80, 80)
    max_rotation_deg: float = 15.0
    hflip_prob: float = 0.5
    zoom_range: tuple[float, float] | None = None

    def __post_init__(self):
        if self.pad_px < 0:
            raise ConfigurationError("pad_px must be >= 0")
        check_probability(self.hflip_prob, "hflip_prob")
        if self.max_rotation_deg < 0:
            raise ConfigurationError("max_rotation_deg must be >= 0")
        if self.crop_hw is not None:
            ch, cw = self.crop_hw
            if ch < 1 or cw < 1:
                raise ConfigurationError(f"bad crop dims {self.crop_hw}")
        if self.zoom_range is not None:
            lo, hi = check_range(*self.zoom_range, "zoom")
            if lo <= 0:
                raise ConfigurationError("zoom factors must be positive")


@dataclass(frozen=True)
class DropConfig:
    """Event-drop stage: mode weights plus per-mode parameter ranges."""

    w_time: float = 1.0
    w_area: float = 1.0
    w_random: float = 1.0
    time_frac: tuple[float, float] = (0.1, 0.3)
    area_frac: tuple[float, float] = (0.05, 0.3)
    ratio: tuple[float, float] = (0.1, 0.5)
    aspect: tuple[float, float] = (0.5, 2.0)

    def __post_init__(self):
        for w, name in ((self.w_time, "w_time"), (self.w_area, "w_area"), (self.w_random, "w_random")):
            if w < 0:
                raise ConfigurationError(f"{name} must be >= 0")
        if self.w_time + self.w_area + self.w_random <= 0:
            raise ConfigurationError("at least one drop mode weight must be positive")
        for rng_, name in (
            (self.time_frac, "time_frac"),
            (self.area_frac, "area_frac"),
            (self.ratio, "ratio"),
        ):
            lo, hi = check_range(*rng_, name)
            if lo < 0 or hi > 1:
                raise ConfigurationError(f"{name} range must lie in [0, 1]")
        lo, hi = check_range(*self.aspect, "aspect")
        if lo <= 0:
            raise ConfigurationError("aspect ratios must be positive")


@dataclass(frozen=True)
class AugmentConfig:
    """Complete augmentation pipeline configuration.

    ``enabled`` selects the stages; geometric transforms apply to every
    sample, drop and shape stages gate independently on ``apply_prob``.
    """

    sim: SimConfig = field(default_factory=SimConfig)
    geo: GeoConfig = field(default_factory=GeoConfig)
    drop: DropConfig = field(default_factory=DropConfig)
    apply_prob: float = 0.5
    enabled: frozenset[str] = frozenset(STAGES)

    def __post_init__(self):
        check_probability(self.apply_prob, "apply_prob")
        extra = set(self.enabled) - set(STAGES)
        if extra:
            raise ConfigurationError(f"unknown stages in enabled: {sorted(extra)}")
        object.__setattr__(self, "enabled", frozenset(self.enabled))


def _fmt(v) -> str:
    if v is None:
        return "none"
    if isinstance(v, float) and v == int(v):
        return str(int(v))
    return str(v)


def config_to_mapping(cfg: AugmentConfig) -> dict[str, str]:
    """Canonical flat key-value form (all values as strings)."""
    sim, geo, drop = cfg.sim, cfg.geo, cfg.drop
    return {
        "enabled": ",".join(s for s in STAGES if s in cfg.enabled),
        "apply_prob": _fmt(cfg.apply_prob),
        "sim.n_min": _fmt(sim.n_min),
        "sim.n_max": _fmt(sim.n_max),
        "sim.s_max": _fmt(sim.s_max),
        "sim.speed_min": _fmt(sim.speed_min),
        "sim.speed_max": "auto" if sim.speed_max is None else _fmt(sim.speed_max),
        "sim.noise_p": _fmt(sim.noise_p),
        "sim.gray": _fmt(sim.gray),
        "sim.mask_mode": sim.mask_mode,
        "geo.pad_px": _fmt(geo.pad_px),
        "geo.crop_h": "none" if geo.crop_hw is None else _fmt(geo.crop_hw[0]),
        "geo.crop_w": "none" if geo.crop_hw is None else _fmt(geo.crop_hw[1]),
        "geo.max_rotation_deg": _fmt(geo.max_rotation_deg),
        "geo.hflip_prob": _fmt(geo.hflip_prob),
        "geo.zoom_min": "none" if geo.zoom_range is None else _fmt(geo.zoom_range[0]),
        "geo.zoom_max": "none" if geo.zoom_range is None else _fmt(geo.zoom_range[1]),
        "drop.w_time": _fmt(drop.w_time),
        "drop.w_area": _fmt(drop.w_area),
        "drop.w_random": _fmt(drop.w_random),
        "drop.time_frac_min": _fmt(drop.time_frac[0]),
        "drop.time_frac_max": _fmt(drop.time_frac[1]),
        "drop.area_frac_min": _fmt(drop.area_frac[0]),
        "drop.area_frac_max": _fmt(drop.area_frac[1]),
        "drop.ratio_min": _fmt(drop.ratio[0]),
        "drop.ratio_max": _fmt(drop.ratio[1]),
        "drop.aspect_min": _fmt(drop.aspect[0]),
        "drop.aspect_max": _fmt(drop.aspect[1]),
    }


def _is_none(raw: str) -> bool:
    return raw.strip().lower() in ("none", "null", "")


def _as_float(raw: str, key: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ConfigurationError(f"bad numeric value for {key}: {raw!r}") from None


def _as_int(raw: str, key: str) -> int:
    try:
        return int(float(raw))
    except ValueError:
        raise ConfigurationError(f"bad integer value for {key}: {raw!r}") from None


def config_from_mapping(
    mapping: Mapping[str, object], base: AugmentConfig | None = None
) -> AugmentConfig:
    """Build a configuration from a flat mapping, over a base (or defaults).

    Unknown keys are rejected so typos fail loudly before any file is
    written.
    """
    cfg = base if base is not None else AugmentConfig()
    values = {str(k): str(v) for k, v in mapping.items()}
    known = set(config_to_mapping(cfg))
    unknown = set(values) - known
    if unknown:
        raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")

    merged = config_to_mapping(cfg)
    merged.update(values)
    g = merged.get

    enabled_raw = g("enabled").strip()
    enabled = frozenset(
        s.strip() for s in enabled_raw.split(",") if s.strip()
    )
    crop_h, crop_w = g("geo.crop_h"), g("geo.crop_w")
    if _is_none(crop_h) != _is_none(crop_w):
        raise ConfigurationError("geo.crop_h and geo.crop_w must be set together")
    zoom_lo, zoom_hi = g("geo.zoom_min"), g("geo.zoom_max")
    if _is_none(zoom_lo) != _is_none(zoom_hi):
        raise ConfigurationError("geo.zoom_min and geo.zoom_max must be set together")

    sim = SimConfig(
        n_min=_as_int(g("sim.n_min"), "sim.n_min"),
        n_max=_as_int(g("sim.n_max"), "sim.n_max"),
        s_max=_as_float(g("sim.s_max"), "sim.s_max"),
        speed_min=_as_float(g("sim.speed_min"), "sim.speed_min"),
        speed_max=None
        if g("sim.speed_max").strip().lower() in ("auto", "none", "")
        else _as_float(g("sim.speed_max"), "sim.speed_max"),
        noise_p=_as_float(g("sim.noise_p"), "sim.noise_p"),
        gray=_as_float(g("sim.gray"), "sim.gray"),
        mask_mode=g("sim.mask_mode").strip().lower(),
    )
    geo = GeoConfig(
        pad_px=_as_int(g("geo.pad_px"), "geo.pad_px"),
        crop_hw=None
        if _is_none(crop_h)
        else (_as_int(crop_h, "geo.crop_h"), _as_int(crop_w, "geo.crop_w")),
        max_rotation_deg=_as_float(g("geo.max_rotation_deg"), "geo.max_rotation_deg"),
        hflip_prob=_as_float(g("geo.hflip_prob"), "geo.hflip_prob"),
        zoom_range=None
        if _is_none(zoom_lo)
        else (_as_float(zoom_lo, "geo.zoom_min"), _as_float(zoom_hi, "geo.zoom_max")),
    )
    drop = DropConfig(
        w_time=_as_float(g("drop.w_time"), "drop.w_time"),
        w_area=_as_float(g("drop.w_area"), "drop.w_area"),
        w_random=_as_float(g("drop.w_random"), "drop.w_random"),
        time_frac=(
            _as_float(g("drop.time_frac_min"), "drop.time_frac_min"),
            _as_float(g("drop.time_frac_max"), "drop.time_frac_max"),
        ),
        area_frac=(
            _as_float(g("drop.area_frac_min"), "drop.area_frac_min"),
            _as_float(g("drop.area_frac_max"), "drop.area_frac_max"),
        ),
        ratio=(
            _as_float(g("drop.ratio_min"), "drop.ratio_min"),
            _as_float(g("drop.ratio_max"), "drop.ratio_max"),
        ),
        aspect=(
            _as_float(g("drop.aspect_min"), "drop.aspect_min"),
            _as_float(g("drop.aspect_max"), "drop.aspect_max"),
        ),
    )
    return AugmentConfig(
        sim=sim, geo=geo, drop=drop,
        apply_prob=_as_float(g("apply_prob"), "apply_prob"),
        enabled=enabled,
    )


def parse_config_text(text: str) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigurationError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = stripped.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def dump_config_text(cfg: AugmentConfig) -> str:
    return "".join(f"{k} = {v}\n" for k, v in config_to_mapping(cfg).items())


def load_config(path: str | Path, base: AugmentConfig | None = None) -> AugmentConfig:
    return config_from_mapping(parse_config_text(Path(path).read_text()), base)


def save_config(cfg: AugmentConfig, path: str | Path) -> None:
    Path(path).write_text(dump_config_text(cfg))


def preset(name: str) -> "Preset":
    try:
        return _PRESETS[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown preset {name!r}; choose from {sorted(_PRESETS)}"
        ) from None


@dataclass(frozen=True)
class Preset:
    """Bundled conversion and augmentation defaults for a task family."""

    name: str
    timesteps: int
    window_us: int | None
    resize_hw: tuple[int, int] | None
    augment: AugmentConfig


_PRESETS = {
    # small-resolution recognition streams: resample to 80x80, 10 timesteps,
    # pad 7px / crop back, flip, rotate up to 15 degrees
    "classification": Preset(
        name="classification",
        timesteps=10,
        window_us=None,
        resize_hw=(80, 80),
        augment=AugmentConfig(
            sim=SimConfig(s_max=30.0),
            geo=GeoConfig(
                pad_px=7, crop_hw=(80, 80), max_rotation_deg=15.0,
                hflip_prob=0.5, zoom_range=None,
            ),
        ),
    ),
    # automotive detection streams: 125 ms windows of 5 timesteps at native
    # resolution; zoom + flip only (rotation would distort boxes)
    "gen1": Preset(
        name="gen1",
        timesteps=5,
        window_us=125_000,
        resize_hw=None,
        augment=AugmentConfig(
            sim=SimConfig(s_max=50.0),
            geo=GeoConfig(
                pad_px=0, crop_hw=None, max_rotation_deg=0.0,
                hflip_prob=0.5, zoom_range=(0.75, 1.25),
            ),
        ),
    ),
}
