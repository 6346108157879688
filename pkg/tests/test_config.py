"""Configuration resolution: defaults, overrides, validation, hashing."""

import math

import pytest

from ionent import units
from ionent.config import (
    DEFAULTS,
    build_config,
    default_config,
    load_config,
    parse_config_text,
    with_grids,
)
from ionent.errors import ConfigError
from ionent.units import EnergyGrid


def test_default_resolved_values(config):
    r = config.resolved
    assert r["omega0_ev"] == 40.8
    assert r["intensity_wcm2"] == 1.25e13
    assert r["tau_fs"] == 44.0
    assert r["pulse_shape"] == "gaussian"
    assert r["t_delta_fs"] == 2.5 * 44.0  # resolved from tau
    assert r["n_eps"] == 481 and r["n_epsl"] == 481
    # derived quantities in atomic units
    assert config.physical.omega0 == pytest.approx(units.ev_to_au(40.8), rel=1e-15)
    assert config.tf == pytest.approx(10.0 / config.physical.kappa, rel=1e-12)
    assert r["tf_s"] == pytest.approx(units.au_to_s(config.tf), rel=1e-12)
    assert config.n_time == 2555  # step rule on the default window and grids


def test_step_rule_resolves_both_scales(config):
    """n_time covers 200 steps per Rabi period and pi/20 phase per step."""
    shape = config.pulse()
    window = shape.t1 - shape.t0
    dt = window / (config.n_time - 1)
    assert dt <= config.physical.rabi_period / 200 * (1 + 1e-12)
    max_phase = 2 * max(abs(config.eps_grid.e_min), config.eps_grid.e_max)
    assert dt * max_phase <= 2 * math.pi / 40 * (1 + 1e-12)


def test_empty_text_is_default(config):
    assert load_config("\n").config_hash() == config.config_hash()
    assert load_config("default").config_hash() == config.config_hash()


def test_override_single_key(config):
    other = load_config("tau_fs = 200")
    changed = {
        k for k in other.resolved
        if other.resolved[k] != config.resolved[k]
    }
    # tau drives the derived pulse separation and the time-node count
    assert changed == {"tau_fs", "t_delta_fs", "n_time"}
    assert other.resolved["t_delta_fs"] == 500.0


def test_parse_comments_and_blanks():
    text = "# a comment\n\ntau_fs = 10  # trailing\n"
    assert parse_config_text(text) == {"tau_fs": 10.0}


def test_parse_rejects_unknown_key():
    with pytest.raises(ConfigError, match="unknown configuration key"):
        parse_config_text("tau = 10")


def test_parse_rejects_malformed_line():
    with pytest.raises(ConfigError, match="line 1"):
        parse_config_text("just words")


def test_parse_rejects_non_numeric():
    with pytest.raises(ConfigError, match="numeric"):
        parse_config_text("tau_fs = short")
    with pytest.raises(ConfigError):
        parse_config_text("n_eps = 12.5")


def test_missing_file_error_names_path(tmp_path):
    missing = tmp_path / "nope.cfg"
    with pytest.raises(ConfigError, match="nope.cfg"):
        load_config(str(missing))
    with pytest.raises(ConfigError, match="nope.cfg"):
        load_config(missing)


def test_load_from_file(tmp_path, config):
    path = tmp_path / "run.cfg"
    path.write_text("tau_fs = 44\n")
    assert load_config(str(path)).config_hash() == config.config_hash()


@pytest.mark.parametrize(
    "line",
    [
        "omega0_ev = -1",
        "tau_fs = 0",
        "ramp_fs = -2",
        "intensity_wcm2 = -5",
        "pulse_shape = square",
        "parity = sideways",
        "n_eps = 1",
        "n_time = 1",
        "eps_max_ev = -0.7",  # below the default minimum
        "tf_s = 1e-15",  # ends before the pulse
        "t_delta_fs = -3",
    ],
)
def test_invalid_values_rejected(line):
    with pytest.raises(ConfigError):
        load_config(line)


def test_hash_changes_iff_config_changes(config):
    assert build_config().config_hash() == config.config_hash()
    for key in DEFAULTS:
        if key in ("pulse_shape", "parity"):
            override = {key: {"pulse_shape": "flattop", "parity": "odd"}[key]}
        elif key in ("n_eps", "n_epsl", "n_time"):
            override = {key: 99}
        elif key == "tf_s":
            override = {key: 2e-11}
        else:
            base = DEFAULTS[key] if DEFAULTS[key] is not None else 33.0
            override = {key: float(base) * 1.5 + 1.0}
        assert build_config(override).config_hash() != config.config_hash(), key


def test_canonical_text_sorted(config):
    keys = [ln.split(" = ")[0] for ln in config.canonical_text().strip().splitlines()]
    assert keys == sorted(keys)
    assert set(keys) == set(DEFAULTS)


def test_pulse_overrides(config):
    shape = config.pulse()
    assert shape.kind == "gaussian" and shape.tau == pytest.approx(units.fs_to_au(44.0))
    flat = config.pulse(kind="flattop", tau=units.fs_to_au(200.0))
    assert flat.kind == "flattop"
    assert flat.ramp == config.ramp  # untouched fields carry over
    assert config.pulse(parity="odd").parity == "odd"


def test_requested_n_time_is_honored():
    cfg = load_config("n_time = 777")
    assert cfg.n_time == 777
    assert cfg.resolved["n_time"] == 777


def test_time_grid_checkpoints(config):
    grid = config.time_grid(n_checkpoints=60)
    assert grid.n_pulse == config.n_time
    assert len(grid.checkpoints) == 60
    assert grid.checkpoints[-1] == pytest.approx(config.tf, rel=1e-12)
    shape = config.pulse()
    assert all(t > shape.t1 for t in grid.checkpoints)
    # log-spaced: increasing gaps
    import numpy as np

    gaps = np.diff(np.array(grid.checkpoints))
    assert np.all(gaps > 0)
    assert gaps[-1] > gaps[0]


def test_with_grids_replaces_only_grids(config):
    narrow = with_grids(config, eps_grid=EnergyGrid(-0.01, 0.01, 21))
    assert narrow.eps_grid.n == 21
    assert narrow.epsl_grid.n == config.epsl_grid.n
    assert narrow.physical.kappa == config.physical.kappa
    assert narrow.config_hash() != config.config_hash()
    # n_time re-resolves against the narrower phase extent
    assert narrow.n_time <= config.n_time


def test_n_time_for_scales_with_window(config):
    short = config.pulse(tau=units.fs_to_au(10.0))
    longer = config.pulse(tau=units.fs_to_au(100.0))
    assert config.n_time_for(longer) > config.n_time_for(short)
