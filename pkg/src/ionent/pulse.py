"""Pulse envelopes and Rabi-area bookkeeping.

The laser is described by a real envelope Lambda(t) normalized to peak 1
(the double-pulse envelope may reach 2 and may change sign). The ionic
a <-> b transition driven at resonance undergoes Rabi oscillation governed
only by the accumulated area

    theta(t, t') = Omega0 * integral_{t'}^{t} Lambda(t'') dt'',

with amplitude pair a = cos(theta/2), b = -i sin(theta/2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ConfigError

LN2 = math.log(2.0)

# Half-width of the truncated Gaussian support, in units of tau.
GAUSSIAN_TRUNCATION = 2.5

# Fraction of the sin^2 ramp at which a flat-top envelope crosses half intensity
# (Lambda^2 = 1/2): solves sin^2(pi u / 2) = 2^(-1/2).
_U_HALF = 2.0 / math.pi * math.asin(2.0 ** (-0.25))

PULSE_KINDS = ("gaussian", "flattop", "double_gaussian")
PARITIES = ("even", "odd")


def _gauss(t, tau):
    return np.exp(-2.0 * LN2 * (np.asarray(t) / tau) ** 2)


@dataclass(frozen=True)
class PulseShape:
    """One of the three supported envelopes with its finite support [t0, t1].

    kind            'gaussian', 'flattop' or 'double_gaussian'
    tau             duration (a.u.): FWHM of Lambda^2 for the Gaussian, the
                    separation of the half-intensity points (plateau included)
                    for the flat-top, sub-pulse FWHM for the double pulse
    ramp            sin^2 ramp length of the flat-top
    t_delta         half separation of the double pulse centers
    parity          'even' (plus) or 'odd' (minus) relative carrier phase,
                    realized as the sign between the two sub-envelopes
    """

    kind: str
    tau: float
    ramp: float = 0.0
    t_delta: float = 0.0
    parity: str = "even"

    def __post_init__(self):
        if self.kind not in PULSE_KINDS:
            raise ConfigError(f"unknown pulse shape {self.kind!r}", key="pulse_shape")
        if self.tau <= 0:
            raise ConfigError(f"pulse duration must be positive, got {self.tau}", key="tau_fs")
        if self.kind == "flattop":
            if self.ramp <= 0:
                raise ConfigError("flattop needs a positive ramp", key="ramp_fs")
            if self.tau <= 2.0 * (1.0 - _U_HALF) * self.ramp:
                raise ConfigError(
                    "flattop duration too short for the requested ramp, no plateau",
                    key="tau_fs",
                )
        if self.kind == "double_gaussian":
            if self.t_delta <= 0:
                raise ConfigError("double pulse needs t_delta > 0", key="t_delta_fs")
            if self.parity not in PARITIES:
                raise ConfigError(
                    f"relative carrier phase must be 'even' or 'odd', got {self.parity!r};"
                    " arbitrary phases are not supported",
                    key="parity",
                )

    @property
    def t0(self) -> float:
        return -self._half_support()

    @property
    def t1(self) -> float:
        return self._half_support()

    def _half_support(self) -> float:
        if self.kind == "gaussian":
            return GAUSSIAN_TRUNCATION * self.tau
        if self.kind == "flattop":
            return 0.5 * (self.tau + 2.0 * _U_HALF * self.ramp)
        return self.t_delta + GAUSSIAN_TRUNCATION * self.tau

    def envelope(self, t) -> np.ndarray:
        """Lambda(t), exactly zero outside [t0, t1]."""
        t = np.asarray(t, dtype=float)
        inside = (t >= self.t0) & (t <= self.t1)
        if self.kind == "gaussian":
            lam = _gauss(t, self.tau)
        elif self.kind == "double_gaussian":
            sign = 1.0 if self.parity == "even" else -1.0
            lam = _gauss(t + self.t_delta, self.tau) + sign * _gauss(t - self.t_delta, self.tau)
        else:
            lam = np.ones_like(t)
            r = self.ramp
            rise = t < self.t0 + r
            fall = t > self.t1 - r
            lam = np.where(rise, np.sin(0.5 * np.pi * (t - self.t0) / r) ** 2, lam)
            lam = np.where(fall, np.sin(0.5 * np.pi * (self.t1 - t) / r) ** 2, lam)
        return np.where(inside, lam, 0.0)

    # Closed-form support integrals, used for ground-state survival estimates
    # and checked against adaptive quadrature in the tests.

    def envelope_integral(self) -> float:
        """integral of Lambda over the support."""
        if self.kind == "gaussian":
            return self._gauss_window_integral(2.0 * LN2, 0.0)
        if self.kind == "flattop":
            return (self.t1 - self.t0) - self.ramp
        sign = 1.0 if self.parity == "even" else -1.0
        return self._gauss_window_integral(2.0 * LN2, -self.t_delta) + sign * (
            self._gauss_window_integral(2.0 * LN2, self.t_delta)
        )

    def intensity_integral(self) -> float:
        """integral of Lambda^2 over the support."""
        if self.kind == "gaussian":
            return self._gauss_window_integral(4.0 * LN2, 0.0)
        if self.kind == "flattop":
            return (self.t1 - self.t0) - 1.25 * self.ramp
        sign = 1.0 if self.parity == "even" else -1.0
        direct = self._gauss_window_integral(4.0 * LN2, -self.t_delta) + (
            self._gauss_window_integral(4.0 * LN2, self.t_delta)
        )
        cross = math.exp(-4.0 * LN2 * (self.t_delta / self.tau) ** 2) * (
            self._gauss_window_integral(4.0 * LN2, 0.0)
        )
        return direct + 2.0 * sign * cross

    def _gauss_window_integral(self, coeff: float, center: float) -> float:
        # integral over [t0, t1] of exp(-coeff (t - center)^2 / tau^2)
        k = math.sqrt(coeff) / self.tau
        return (
            0.5
            * math.sqrt(math.pi)
            / k
            * (math.erf(k * (self.t1 - center)) - math.erf(k * (self.t0 - center)))
        )


@dataclass(frozen=True)
class RabiPair:
    """Propagator entries of the resonantly driven ionic two-level system."""

    a: float
    b: complex
    theta: float


def rabi_pair(theta: float) -> RabiPair:
    return RabiPair(a=math.cos(0.5 * theta), b=-1j * math.sin(0.5 * theta), theta=theta)


class PulseTables:
    """Prefix-integral tables of a pulse on a uniform time grid.

    Holds the envelope, the accumulated Rabi area theta(t) = Omega0 * int Lambda,
    its half-angle cosine and sine, and the ground amplitude
    g(t) = exp(-(pi Omega_ag^2 / 4) * int Lambda^2). Everything downstream
    (amplitude quadrature, area lookups) interpolates these prefix tables.
    """

    def __init__(self, shape: PulseShape, omega_rabi: float, omega_ag: float, n_time: int):
        if n_time < 2:
            raise ConfigError(f"need at least 2 time nodes, got {n_time}")
        self.shape = shape
        self.omega_rabi = omega_rabi
        self.omega_ag = omega_ag
        self.t = np.linspace(shape.t0, shape.t1, n_time)
        self.lam = shape.envelope(self.t)
        h = self.t[1] - self.t[0]
        self.area = _prefix_trapezoid(self.lam, h)
        lam2 = self.lam**2
        self.int_lam2 = _prefix_trapezoid(lam2, h)
        self.theta = omega_rabi * self.area
        self.log_g = -(math.pi * omega_ag**2 / 4.0) * self.int_lam2
        self.g = np.exp(self.log_g)

    @property
    def theta_total(self) -> float:
        return float(self.theta[-1])

    def area_at(self, t) -> np.ndarray:
        """Prefix envelope area at arbitrary times, constant outside the support."""
        tc = np.clip(np.asarray(t, dtype=float), self.shape.t0, self.shape.t1)
        return np.interp(tc, self.t, self.area)

    def theta_at(self, t) -> np.ndarray:
        return self.omega_rabi * self.area_at(t)

    def g_at(self, t) -> np.ndarray:
        tc = np.clip(np.asarray(t, dtype=float), self.shape.t0, self.shape.t1)
        return np.exp(np.interp(tc, self.t, self.log_g))


def _prefix_trapezoid(values: np.ndarray, h: float) -> np.ndarray:
    out = np.empty_like(values)
    out[0] = 0.0
    np.cumsum(0.5 * h * (values[1:] + values[:-1]), out=out[1:])
    return out


def cumulative_area(tables: PulseTables, t_from: float, t_to: float) -> float:
    """Rabi area theta(t_to, t_from) from the prefix table (linear interpolation).

    Additive by construction: theta(c, a) = theta(c, b) + theta(b, a) holds to
    floating-point roundoff for any ordering of the arguments.
    """
    return float(tables.theta_at(t_to) - tables.theta_at(t_from))
