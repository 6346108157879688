"""Experiment drivers: deterministic parallel mapping, the transfer trace,
the duration sweep, and the two-pulse suite (structure-level; the headline
figures run in the acceptance suite on production grids)."""

import dataclasses
import math

import numpy as np
import pytest

from ionent.config import default_config, with_grids
from ionent.errors import UndefinedConditionError
from ionent.experiments import (
    PARTITIONS,
    parallel_map,
    run_duration_sweep,
    run_population_trace,
    run_transfer_trace,
    run_two_pulse_suite,
    series_crossing,
)
from ionent.units import EnergyGrid, au_to_fs, fs_to_au


# ---------------------------------------------------------------------------
# parallel_map


def test_parallel_map_deterministic_across_workers():
    points = [float(i) for i in range(24)]
    worker = lambda p: math.sin(p) * math.sqrt(p + 1.0)
    seq = parallel_map(points, worker, workers=1)
    pooled = parallel_map(points, worker, workers=4)
    assert seq == pooled  # bitwise, not approx


def test_parallel_map_empty():
    assert parallel_map([], lambda p: p, workers=4) == []


def test_parallel_map_wraps_failures():
    def worker(p):
        if p == "c":
            raise ValueError("inner")
        return p

    with pytest.raises(RuntimeError, match=r"worker failed at point 2: 'c'") as err:
        parallel_map(["a", "b", "c"], worker, workers=2)
    assert isinstance(err.value.__cause__, ValueError)


# ---------------------------------------------------------------------------
# series crossing


def test_series_crossing_interpolates():
    t = np.array([0.0, 1.0])
    tc, vc = series_crossing(t, np.array([0.0, 2.0]), np.array([1.0, 1.0]))
    assert (tc, vc) == (0.5, 1.0)


def test_series_crossing_on_node():
    t = np.array([0.0, 1.0, 2.0])
    tc, vc = series_crossing(t, np.array([0.0, 1.0, 2.0]), np.ones(3))
    assert (tc, vc) == (1.0, 1.0)


def test_series_crossing_none():
    t = np.array([0.0, 1.0, 2.0])
    assert series_crossing(t, np.zeros(3), np.ones(3)) is None


# ---------------------------------------------------------------------------
# transfer trace


@pytest.fixture(scope="module")
def trace(small_config):
    return run_transfer_trace(small_config, workers=1, n_tau=4, n_checkpoints=5)


def test_trace_segments(trace, small_config):
    pulse = [p for p in trace.points if p.segment == "pulse"]
    decay = [p for p in trace.points if p.segment == "decay"]
    assert len(pulse) == 4 and len(decay) == 5
    assert pulse[0].tau == pytest.approx(fs_to_au(2.0))
    assert pulse[-1].tau == pytest.approx(small_config.tau)
    assert decay[-1].time == pytest.approx(small_config.tf)
    # duration scan evaluates each pulse at its own end
    for p in pulse:
        assert p.time == pytest.approx(small_config.pulse(tau=p.tau).t1)


def test_trace_values_bounded(trace):
    dims = {"AB": 2, "AC": 2, "qutrit": 3, "ququart": 4, "modes": 17}
    for p in trace.points:
        assert set(p.entropies) == set(PARTITIONS)
        for part, s in p.entropies.items():
            assert -1e-12 <= s <= np.log2(dims[part]) + 1e-9
        for c in p.concurrences.values():
            assert -1e-12 <= c <= math.sqrt(2.0)
        assert p.norm_sum == pytest.approx(1.0, abs=5e-3)


def test_trace_handover(trace):
    """AB entanglement decays away while AC builds up; they must cross."""
    t_ab, s_ab = trace.series("decay", "entropies", "AB")
    t_ac, s_ac = trace.series("decay", "entropies", "AC")
    assert np.array_equal(t_ab, t_ac)
    assert s_ab[0] > 0.9 > s_ab[-1]
    assert s_ac[-1] > 0.9 > s_ac[0]
    hit = series_crossing(t_ab, s_ab, s_ac)
    assert hit is not None
    tc, vc = hit
    assert t_ab[0] < tc < t_ab[-1]
    assert 0.7 < vc <= 1.0


def test_trace_series_column_order(trace):
    t, c = trace.series("pulse", "concurrences", "modes")
    assert t.shape == c.shape == (4,)
    assert np.all(np.diff(t) > 0)


# ---------------------------------------------------------------------------
# duration sweep


@pytest.fixture(scope="module")
def sweep_rows(config):
    return run_duration_sweep(config, tau_list_fs=[10.0, 20.0], workers=1)


def test_sweep_row_layout(sweep_rows):
    assert [(r.shape, round(au_to_fs(r.tau))) for r in sweep_rows] == [
        ("flattop", 10), ("flattop", 20), ("gaussian", 10), ("gaussian", 20),
    ]
    for r in sweep_rows:
        assert r.entropy_max > 0.0
        assert 0.0 < r.concurrence_max < math.sqrt(2.0)
        assert r.n_modes >= 33
        assert r.time_at_max > 0.0


def test_sweep_flattop_exceeds_gaussian(sweep_rows):
    by_key = {(r.shape, round(au_to_fs(r.tau))): r.entropy_max for r in sweep_rows}
    assert by_key[("flattop", 10)] > by_key[("gaussian", 10)]
    assert by_key[("flattop", 20)] > by_key[("gaussian", 20)]


def test_sweep_entropy_grows_with_duration(sweep_rows):
    by_key = {(r.shape, round(au_to_fs(r.tau))): r.entropy_max for r in sweep_rows}
    assert by_key[("flattop", 20)] > by_key[("flattop", 10)]


def test_sweep_requires_photon_channel(config):
    phys0 = dataclasses.replace(config.physical, v_sp=0.0)
    cfg0 = dataclasses.replace(config, physical=phys0)
    with pytest.raises(RuntimeError, match="worker failed") as err:
        run_duration_sweep(cfg0, tau_list_fs=[10.0])
    assert isinstance(err.value.__cause__, UndefinedConditionError)


# ---------------------------------------------------------------------------
# two-pulse suite (structure on reduced grids)


@pytest.fixture(scope="module")
def two_pulse(config):
    reduced = with_grids(
        config,
        eps_grid=EnergyGrid(config.eps_grid.e_min, config.eps_grid.e_max, 61),
        epsl_grid=EnergyGrid(config.epsl_grid.e_min, config.epsl_grid.e_max, 61),
    )
    return run_two_pulse_suite(reduced, workers=1)


def test_two_pulse_cases_and_curves(two_pulse):
    assert set(two_pulse.cases) == {"single", "even", "odd"}
    expected_keys = {
        ("t1", "electron_alpha"), ("t1", "fluor_gamma"),
        ("tf", "electron_alpha"), ("tf", "fluor_gamma"),
        ("tf", "electron_gamma_bar"),
    }
    for case in two_pulse.cases.values():
        assert set(case.curves) == expected_keys
        assert 0.0 <= case.overlap_alpha_gamma_bar <= 1.0
        for curve in case.curves.values():
            assert np.all(curve.values >= 0.0)


def test_two_pulse_reference_scales(two_pulse, config):
    assert two_pulse.t_delta == pytest.approx(fs_to_au(110.0))
    assert two_pulse.expected_fringe_spacing == pytest.approx(math.pi / two_pulse.t_delta)
    assert two_pulse.parity_delay_shift == pytest.approx(math.pi / config.physical.omega0)
    # a ~50 as shift: far below the pulse timescale, so parity is a phase knob
    assert au_to_fs(two_pulse.parity_delay_shift) < 0.1


def test_two_pulse_parity_separates_overlap(two_pulse):
    """Even pairs rebuild the alpha spectrum in the photon channel; odd ones
    push it into the orthogonal combination."""
    assert two_pulse.overlap_gap > 0.0
    assert two_pulse.cases["even"].overlap_alpha_gamma_bar > \
        two_pulse.cases["odd"].overlap_alpha_gamma_bar


# ---------------------------------------------------------------------------
# population trace


def test_population_trace(small_config):
    points = run_population_trace(small_config, workers=1, n_pulse=5, n_checkpoints=4)
    pulse = [p for p in points if p.segment == "pulse"]
    decay = [p for p in points if p.segment == "decay"]
    assert len(pulse) == 4 and len(decay) == 4
    ground = [p.populations.p_ground for p in pulse]
    assert all(a >= b for a, b in zip(ground, ground[1:]))
    for p in points:
        assert p.norm_sum == pytest.approx(1.0, abs=5e-3)
    assert decay[-1].populations.p_beta < 1e-4 * pulse[-1].populations.p_beta
