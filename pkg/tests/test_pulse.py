"""Envelopes, closed-form support integrals, and the Rabi-area tables.

The closed-form envelope/intensity integrals are checked against adaptive
quadrature; the prefix tables are checked against their defining identities.
"""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from ionent.config import default_config
from ionent.errors import ConfigError
from ionent.pulse import (
    GAUSSIAN_TRUNCATION,
    PulseShape,
    PulseTables,
    cumulative_area,
    rabi_pair,
)
from ionent.units import fs_to_au

TAU = fs_to_au(44.0)


def _shapes():
    return [
        PulseShape(kind="gaussian", tau=TAU),
        PulseShape(kind="flattop", tau=TAU, ramp=fs_to_au(5.0)),
        PulseShape(kind="double_gaussian", tau=TAU, t_delta=2.5 * TAU, parity="even"),
        PulseShape(kind="double_gaussian", tau=TAU, t_delta=2.5 * TAU, parity="odd"),
        PulseShape(kind="double_gaussian", tau=TAU, t_delta=1.2 * TAU, parity="odd"),
    ]


def test_gaussian_envelope_values():
    shape = PulseShape(kind="gaussian", tau=TAU)
    assert shape.envelope(0.0) == 1.0
    # half the intensity FWHM: Lambda^2 = 1/2 there
    assert shape.envelope(0.5 * TAU) == pytest.approx(math.exp(-0.5 * math.log(2)), rel=1e-14)
    assert shape.envelope(0.5 * TAU) ** 2 == pytest.approx(0.5, rel=1e-14)
    assert shape.t1 == pytest.approx(GAUSSIAN_TRUNCATION * TAU)
    assert shape.envelope(shape.t1 * (1 + 1e-9)) == 0.0
    assert shape.envelope(shape.t0 - 1.0) == 0.0


def test_flattop_envelope_convention():
    """tau separates the half-intensity points, plateau included."""
    shape = PulseShape(kind="flattop", tau=TAU, ramp=fs_to_au(5.0))
    assert shape.envelope(0.0) == 1.0
    assert shape.envelope(0.5 * TAU) ** 2 == pytest.approx(0.5, rel=1e-12)
    assert shape.envelope(-0.5 * TAU) ** 2 == pytest.approx(0.5, rel=1e-12)
    # plateau is exactly 1 inside the ramps
    t_plateau = np.linspace(shape.t0 + shape.ramp, shape.t1 - shape.ramp, 7)
    assert np.all(shape.envelope(t_plateau) == 1.0)
    # ramps are monotone
    t_rise = np.linspace(shape.t0, shape.t0 + shape.ramp, 50)
    assert np.all(np.diff(shape.envelope(t_rise)) >= 0)


def test_double_gaussian_parity():
    even = PulseShape(kind="double_gaussian", tau=TAU, t_delta=2.5 * TAU, parity="even")
    odd = PulseShape(kind="double_gaussian", tau=TAU, t_delta=2.5 * TAU, parity="odd")
    assert odd.envelope(0.0) == 0.0
    t = np.linspace(even.t0, even.t1, 401)
    assert np.max(np.abs(even.envelope(t) - even.envelope(-t))) < 1e-14
    assert np.max(np.abs(odd.envelope(t) + odd.envelope(-t))) < 1e-14


@pytest.mark.parametrize("shape", _shapes(), ids=lambda s: f"{s.kind}-{s.parity}")
def test_envelope_bounded(shape):
    t = np.linspace(shape.t0 - 10, shape.t1 + 10, 2001)
    lam = shape.envelope(t)
    assert np.all(np.abs(lam) <= 2.0)
    assert np.all(np.isfinite(lam))


@pytest.mark.parametrize("shape", _shapes(), ids=lambda s: f"{s.kind}-{s.parity}")
def test_support_integrals_against_quadrature(shape):
    ref1, _ = quad(lambda t: float(shape.envelope(t)), shape.t0, shape.t1, limit=400)
    ref2, _ = quad(lambda t: float(shape.envelope(t)) ** 2, shape.t0, shape.t1, limit=400)
    scale = quad(lambda t: abs(float(shape.envelope(t))), shape.t0, shape.t1, limit=400)[0]
    assert shape.envelope_integral() == pytest.approx(ref1, abs=1e-8 * scale)
    assert shape.intensity_integral() == pytest.approx(ref2, rel=1e-8)


def test_validation_errors():
    with pytest.raises(ConfigError):
        PulseShape(kind="triangle", tau=TAU)
    with pytest.raises(ConfigError):
        PulseShape(kind="gaussian", tau=0.0)
    with pytest.raises(ConfigError):
        PulseShape(kind="flattop", tau=TAU, ramp=0.0)
    with pytest.raises(ConfigError):
        # ramps eat the whole duration: no plateau
        PulseShape(kind="flattop", tau=fs_to_au(1.0), ramp=fs_to_au(50.0))
    with pytest.raises(ConfigError):
        PulseShape(kind="double_gaussian", tau=TAU, t_delta=0.0)
    with pytest.raises(ConfigError):
        PulseShape(kind="double_gaussian", tau=TAU, t_delta=TAU, parity="pi/3")


def test_rabi_pair():
    assert rabi_pair(0.0).a == 1.0 and rabi_pair(0.0).b == 0.0
    inv = rabi_pair(math.pi)
    assert inv.a == pytest.approx(0.0, abs=1e-15)
    assert inv.b == pytest.approx(-1j, rel=1e-15)
    assert rabi_pair(6.1 * math.pi).a == pytest.approx(math.cos(3.05 * math.pi), rel=1e-12)
    assert abs(rabi_pair(6.1 * math.pi).a) == pytest.approx(0.98769, abs=1e-4)


@pytest.fixture(scope="module")
def tables():
    config = default_config()
    shape = config.pulse()
    return PulseTables(shape, config.physical.omega_rabi, config.physical.omega_ag, config.n_time)


def test_theta_total(tables):
    """Total area matches the closed-form Gaussian integral (6.1 pi class)."""
    omega_rabi = tables.omega_rabi
    closed = omega_rabi * TAU * math.sqrt(math.pi / (2 * math.log(2)))
    # truncation at 2.5 tau clips ~3e-5 of the area
    assert tables.theta_total == pytest.approx(closed, rel=1e-4)
    assert 6.0 < tables.theta_total / math.pi < 6.25


def test_ground_amplitude_tables(tables):
    g = tables.g
    assert np.all(g <= 1.0 + 1e-15)
    assert np.all(np.diff(g) <= 1e-15)  # non-increasing
    assert g[0] == 1.0
    # survival at the end from the closed-form intensity integral
    shape = tables.shape
    closed = math.exp(-0.5 * math.pi * tables.omega_ag**2 * shape.intensity_integral())
    assert float(g[-1]) ** 2 == pytest.approx(closed, rel=1e-6)
    assert float(g[-1]) ** 2 == pytest.approx(0.80, abs=0.01)


def test_flattop_plateau_survival_rate():
    """On the plateau |g|^2 falls as exp(-pi Omega_ag^2 T / 2), Lambda = 1."""
    config = default_config()
    shape = config.pulse(kind="flattop", tau=fs_to_au(200.0))
    tables = PulseTables(shape, config.physical.omega_rabi, config.physical.omega_ag, 4001)
    t_a, t_b = -0.3 * shape.tau, 0.3 * shape.tau
    ratio = float(tables.g_at(t_b) / tables.g_at(t_a)) ** 2
    assert ratio == pytest.approx(math.exp(-0.5 * math.pi * tables.omega_ag**2 * (t_b - t_a)), rel=1e-9)


def test_area_additivity(tables, rng):
    triples = rng.uniform(tables.shape.t0, tables.shape.t1, size=(1000, 3))
    tol = 1e-10 * tables.theta_total
    for a, b, c in triples:
        direct = cumulative_area(tables, a, c)
        split = cumulative_area(tables, a, b) + cumulative_area(tables, b, c)
        assert abs(direct - split) < tol


def test_area_lookup_outside_support(tables):
    shape = tables.shape
    assert tables.theta_at(shape.t0 - 100.0) == 0.0
    assert tables.theta_at(shape.t1 + 100.0) == pytest.approx(tables.theta_total, rel=1e-14)
    assert cumulative_area(tables, shape.t1, shape.t1 + 500.0) == 0.0
    assert float(tables.g_at(shape.t1 + 1e6)) == pytest.approx(float(tables.g[-1]), rel=1e-14)


def test_odd_double_total_area():
    config = default_config()
    shape = config.pulse(kind="double_gaussian", parity="odd")
    tables = PulseTables(shape, config.physical.omega_rabi, config.physical.omega_ag, 4001)
    assert abs(tables.theta_total) < 1e-12 * config.physical.omega_rabi * shape.tau


def test_prefix_table_matches_quadrature(tables):
    """Spot-check theta(t) against adaptive quadrature at a few interior times."""
    shape = tables.shape
    for t in (-1.8 * TAU, -0.4 * TAU, 0.9 * TAU, 2.2 * TAU):
        ref, _ = quad(lambda s: float(shape.envelope(s)), shape.t0, t, limit=400)
        # trapezoid-plus-interpolation floor at the default node count
        assert float(tables.theta_at(t)) == pytest.approx(tables.omega_rabi * ref, abs=2e-5)


def test_tables_need_two_nodes():
    config = default_config()
    with pytest.raises(ConfigError):
        PulseTables(config.pulse(), config.physical.omega_rabi, config.physical.omega_ag, 1)
