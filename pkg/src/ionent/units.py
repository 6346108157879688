"""Atomic units and the few conversions the package needs at its boundaries.

Everything inside the package is computed in Hartree atomic units
(hbar = m_e = e = 1, c = 1/alpha). Laboratory units appear only in
configuration input and in written output.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ConfigError

# 1 Hartree in eV.
HARTREE_EV = 27.211386

# 1 atomic unit of time in seconds (and femtoseconds).
AU_TIME_S = 2.4188843265857e-17
AU_TIME_FS = AU_TIME_S * 1e15

# Atomic unit of intensity in W/cm^2: I = AU_INTENSITY_WCM2 * E0^2.
AU_INTENSITY_WCM2 = 3.50945e16

# Speed of light in atomic units (inverse fine-structure constant).
C_AU = 137.035999084


def ev_to_au(energy_ev: float) -> float:
    return energy_ev / HARTREE_EV


def au_to_ev(energy_au: float) -> float:
    return energy_au * HARTREE_EV


def fs_to_au(time_fs: float) -> float:
    return time_fs / AU_TIME_FS


def au_to_fs(time_au: float) -> float:
    return time_au * AU_TIME_FS


def s_to_au(time_s: float) -> float:
    return time_s / AU_TIME_S


def au_to_s(time_au: float) -> float:
    return time_au * AU_TIME_S


def intensity_to_field(intensity_wcm2: float) -> float:
    """Peak electric field amplitude E0 (a.u.) for a given intensity in W/cm^2."""
    if intensity_wcm2 < 0:
        raise ConfigError(
            f"intensity_wcm2 must be non-negative, got {intensity_wcm2}",
            key="intensity_wcm2",
        )
    return float(np.sqrt(intensity_wcm2 / AU_INTENSITY_WCM2))


def field_to_intensity(e0_au: float) -> float:
    return AU_INTENSITY_WCM2 * e0_au**2


@dataclass(frozen=True)
class EnergyGrid:
    """Uniform energy grid (a.u.) used for photoelectron or photon energies."""

    e_min: float
    e_max: float
    n: int

    def __post_init__(self):
        if self.n < 2:
            raise ConfigError(f"energy grid needs at least 2 points, got {self.n}")
        if not self.e_max > self.e_min:
            raise ConfigError(
                f"energy grid bounds must increase, got [{self.e_min}, {self.e_max}]"
            )

    @cached_property
    def values(self) -> np.ndarray:
        return np.linspace(self.e_min, self.e_max, self.n)

    @property
    def step(self) -> float:
        return (self.e_max - self.e_min) / (self.n - 1)

    @cached_property
    def trapezoid_weights(self) -> np.ndarray:
        w = np.full(self.n, self.step)
        w[0] *= 0.5
        w[-1] *= 0.5
        return w

    def same_axis(self, other: "EnergyGrid") -> bool:
        return (
            self.n == other.n
            and abs(self.e_min - other.e_min) < 1e-12
            and abs(self.e_max - other.e_max) < 1e-12
        )


@dataclass(frozen=True)
class TimeGrid:
    """Time sampling: a uniform grid across the pulse plus post-pulse checkpoints.

    The pulse window [t0, t1] is sampled with n_pulse uniform nodes. After the
    pulse the Hamiltonian is time independent, so only discrete checkpoint
    times in (t1, tf] are kept.
    """

    t0: float
    t1: float
    tf: float
    n_pulse: int
    checkpoints: tuple[float, ...] = ()

    def __post_init__(self):
        if not self.t0 < self.t1:
            raise ConfigError(f"time grid needs t0 < t1, got [{self.t0}, {self.t1}]")
        if self.tf < self.t1:
            raise ConfigError(f"time grid needs tf >= t1, got tf = {self.tf}")
        if self.n_pulse < 2:
            raise ConfigError(f"time grid needs n_pulse >= 2, got {self.n_pulse}")
        for t in self.checkpoints:
            if not (self.t1 < t <= self.tf * (1 + 1e-12)):
                raise ConfigError(f"checkpoint {t} outside (t1, tf]")

    @cached_property
    def pulse_times(self) -> np.ndarray:
        return np.linspace(self.t0, self.t1, self.n_pulse)

    @property
    def step(self) -> float:
        return (self.t1 - self.t0) / (self.n_pulse - 1)
