import pytest

from evaug.config import (
    AugmentConfig,
    DropConfig,
    GeoConfig,
    config_from_mapping,
    config_to_mapping,
    dump_config_text,
    load_config,
    parse_config_text,
    preset,
    save_config,
)
from evaug.errors import ConfigurationError
from evaug.shapes import SimConfig


def test_text_roundtrip_default():
    cfg = AugmentConfig()
    assert config_from_mapping(parse_config_text(dump_config_text(cfg))) == cfg


def test_text_roundtrip_custom():
    cfg = AugmentConfig(
        sim=SimConfig(n_min=2, n_max=3, s_max=50, speed_max=4.5, noise_p=0.1,
                      gray=0.8, mask_mode="end"),
        geo=GeoConfig(pad_px=0, crop_hw=None, max_rotation_deg=0,
                      hflip_prob=0.25, zoom_range=(0.8, 1.2)),
        drop=DropConfig(w_time=0, w_area=2, w_random=1, ratio=(0.2, 0.2)),
        apply_prob=0.75,
        enabled=frozenset({"geo", "shape"}),
    )
    assert config_from_mapping(parse_config_text(dump_config_text(cfg))) == cfg


def test_file_roundtrip(tmp_path):
    cfg = AugmentConfig(apply_prob=0.25)
    path = tmp_path / "aug.cfg"
    save_config(cfg, path)
    assert load_config(path) == cfg


def test_comments_and_blank_lines():
    text = "# full pipeline\n\napply_prob = 0.3  # half as often\n"
    cfg = config_from_mapping(parse_config_text(text))
    assert cfg.apply_prob == 0.3


def test_unknown_key_rejected():
    with pytest.raises(ConfigurationError):
        config_from_mapping({"sim.bogus": "1"})


def test_malformed_line_rejected():
    with pytest.raises(ConfigurationError):
        parse_config_text("apply_prob 0.5\n")


def test_bad_values_rejected():
    with pytest.raises(ConfigurationError):
        config_from_mapping({"apply_prob": "maybe"})
    with pytest.raises(ConfigurationError):
        config_from_mapping({"apply_prob": "1.5"})
    with pytest.raises(ConfigurationError):
        config_from_mapping({"enabled": "geo,warp"})
    with pytest.raises(ConfigurationError):
        config_from_mapping({"geo.crop_h": "none"})  # crop_w still set


def test_partial_override_keeps_base():
    base = preset("classification").augment
    cfg = config_from_mapping({"sim.s_max": "50"}, base=base)
    assert cfg.sim.s_max == 50.0
    assert cfg.geo == base.geo


def test_enabled_empty_token():
    cfg = config_from_mapping({"enabled": ""})
    assert cfg.enabled == frozenset()


def test_presets():
    clf = preset("classification")
    assert clf.timesteps == 10
    assert clf.resize_hw == (80, 80)
    assert clf.window_us is None
    assert clf.augment.geo.crop_hw == (80, 80)
    assert clf.augment.geo.pad_px == 7
    assert clf.augment.geo.max_rotation_deg == 15.0
    assert clf.augment.sim.s_max == 30.0

    gen1 = preset("gen1")
    assert gen1.timesteps == 5
    assert gen1.window_us == 125_000
    assert gen1.resize_hw is None
    assert gen1.augment.geo.max_rotation_deg == 0.0
    assert gen1.augment.geo.zoom_range is not None
    assert gen1.augment.sim.s_max == 50.0

    with pytest.raises(ConfigurationError):
        preset("imagenet")


def test_mapping_is_flat_strings():
    mapping = config_to_mapping(AugmentConfig())
    assert all(isinstance(k, str) and isinstance(v, str) for k, v in mapping.items())
    assert all("." in k or k in ("enabled", "apply_prob") for k in mapping)


def test_validation_errors():
    with pytest.raises(ConfigurationError):
        GeoConfig(pad_px=-1)
    with pytest.raises(ConfigurationError):
        GeoConfig(zoom_range=(0.0, 1.0))
    with pytest.raises(ConfigurationError):
        DropConfig(ratio=(0.6, 0.2))
    with pytest.raises(ConfigurationError):
        DropConfig(w_time=0, w_area=0, w_random=0)
    with pytest.raises(ConfigurationError):
        AugmentConfig(apply_prob=2.0)
    with pytest.raises(ConfigurationError):
        AugmentConfig(enabled=frozenset({"geo", "mix"}))
