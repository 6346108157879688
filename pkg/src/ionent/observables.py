"""Measured spectra and their comparison metrics.

Photoelectron curves are densities over the electron energy grid;
fluorescence curves are densities over the photon energy grid.  The
one-photon electron marginals integrate out the photon energy, which by
default happens in the time domain (exact, resolution-free); the gridded
route is kept for order-of-summation consistency checks against the
fluorescence marginals.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .amplitudes import AmplitudeSet, sector_from_grid
from .errors import ConfigError, GridMismatchError, UndefinedConditionError
from .units import EnergyGrid

PHOTOELECTRON_BRANCHES = ("alpha", "beta", "gamma_bar", "delta_bar")
FLUORESCENCE_BRANCHES = ("gamma", "delta")

# peak extraction: 3-bin moving average, then local maxima above 5% of max
_SMOOTH_BINS = 3
_PEAK_FLOOR = 0.05


@dataclass(frozen=True)
class SpectrumCurve:
    """A nonnegative density over one energy axis."""

    axis: EnergyGrid
    values: np.ndarray
    branch: str
    eval_time: float
    kind: str  # photoelectron | fluorescence

    def integral(self) -> float:
        return float(self.axis.trapezoid_weights @ self.values)

    def normalized(self) -> np.ndarray:
        total = self.integral()
        if total <= 0.0:
            raise UndefinedConditionError(f"{self.branch}: zero-norm spectrum")
        return self.values / total


def photoelectron_spectrum(
    amps: AmplitudeSet, branch: str, exact: bool = True
) -> SpectrumCurve:
    """Electron energy density for one channel.

    For the one-photon channels, exact=True (default) integrates the photon
    energy in the time domain; exact=False uses the photon-grid trapezoid and
    is then the same double sum as the fluorescence marginal, just reordered.
    """
    if branch not in PHOTOELECTRON_BRANCHES:
        raise ConfigError(
            f"unknown photoelectron branch {branch!r}; expected one of {PHOTOELECTRON_BRANCHES}",
            key="branch",
        )
    if branch == "alpha":
        values = np.abs(amps.alpha) ** 2
    elif branch == "beta":
        values = np.abs(amps.beta) ** 2
    else:
        if exact:
            sector = amps.sector if amps.sector is not None else sector_from_grid(amps)
            values = sector.gamma_marginal if branch == "gamma_bar" else sector.delta_marginal
        else:
            w_l = amps.epsl.trapezoid_weights
            field = amps.gamma if branch == "gamma_bar" else amps.delta
            values = np.abs(field) ** 2 @ w_l
    return SpectrumCurve(
        axis=amps.eps,
        values=np.asarray(values, dtype=float),
        branch=branch,
        eval_time=amps.eval_time,
        kind="photoelectron",
    )


def fluorescence_spectrum(amps: AmplitudeSet, branch: str) -> SpectrumCurve:
    """Photon energy density for one one-photon channel."""
    if branch not in FLUORESCENCE_BRANCHES:
        raise ConfigError(
            f"unknown fluorescence branch {branch!r}; expected one of {FLUORESCENCE_BRANCHES}",
            key="branch",
        )
    w_e = amps.eps.trapezoid_weights
    field = amps.gamma if branch == "gamma" else amps.delta
    values = w_e @ np.abs(field) ** 2
    return SpectrumCurve(
        axis=amps.epsl,
        values=np.asarray(values, dtype=float),
        branch=branch,
        eval_time=amps.eval_time,
        kind="fluorescence",
    )


def overlap_coefficient(s1: SpectrumCurve, s2: SpectrumCurve) -> float:
    """Bhattacharyya coefficient of two normalized spectra on one axis."""
    if not s1.axis.same_axis(s2.axis):
        raise GridMismatchError(
            f"spectra axes differ: [{s1.axis.e_min}, {s1.axis.e_max}] x {s1.axis.n}"
            f" vs [{s2.axis.e_min}, {s2.axis.e_max}] x {s2.axis.n}"
        )
    p1 = s1.normalized()
    p2 = s2.normalized()
    bc = float(s1.axis.trapezoid_weights @ np.sqrt(p1 * p2))
    return min(max(bc, 0.0), 1.0)


def find_peaks(curve: SpectrumCurve) -> list[tuple[float, float, float]]:
    """Local maxima as (energy, height, half-bin error bar).

    The curve is smoothed with a 3-bin moving average first and maxima below
    5 percent of the global maximum are dropped, so shot-scale wiggles on
    fringe patterns do not register as peaks.
    """
    v = curve.values
    if v.size < 3:
        return []
    kernel = np.ones(_SMOOTH_BINS) / _SMOOTH_BINS
    sm = np.convolve(v, kernel, mode="same")
    floor = _PEAK_FLOOR * float(sm.max())
    e = curve.axis.values
    out: list[tuple[float, float, float]] = []
    half_bin = 0.5 * curve.axis.step
    for i in range(1, v.size - 1):
        if sm[i] > sm[i - 1] and sm[i] >= sm[i + 1] and sm[i] > floor:
            out.append((float(e[i]), float(sm[i]), half_bin))
    return out
