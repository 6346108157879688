"""Shared fixtures: one default configuration and a few evaluated amplitude sets.

The expensive pieces (full-resolution amplitude sets) are session-scoped; unit
tests that need different grids or pulses build their own reduced configs.
"""

from __future__ import annotations

import numpy as np
import pytest

from ionent import amplitudes
from ionent.config import RunConfig, default_config, with_grids
from ionent.units import EnergyGrid


@pytest.fixture(scope="session")
def config() -> RunConfig:
    return default_config()


@pytest.fixture(scope="session")
def small_config(config) -> RunConfig:
    """Default physics on reduced energy grids (keeps evaluations ~fast)."""
    return with_grids(
        config,
        eps_grid=EnergyGrid(config.eps_grid.e_min, config.eps_grid.e_max, 33),
        epsl_grid=EnergyGrid(config.epsl_grid.e_min, config.epsl_grid.e_max, 17),
    )


@pytest.fixture(scope="session")
def amps_t1(small_config):
    shape = small_config.pulse()
    return amplitudes.evaluate(shape, small_config, shape.t1)


@pytest.fixture(scope="session")
def amps_mid(small_config):
    """Mid-decay set near the 50% beta -> gamma transfer point."""
    shape = small_config.pulse()
    t = shape.t1 + np.log(2.0) / small_config.physical.kappa
    return amplitudes.evaluate(shape, small_config, t)


@pytest.fixture(scope="session")
def amps_late(small_config):
    shape = small_config.pulse()
    return amplitudes.evaluate(shape, small_config, small_config.tf)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260815)
