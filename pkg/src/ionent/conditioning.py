"""Conditioned, renormalized reduced density matrices.

Detecting a subset of the final channels (electron only, electron plus ion
state, electron plus photon, ...) projects the pure four-channel state onto a
small effective Hilbert space.  Each function here builds one such reduced
matrix as a Gram matrix of trapezoid-weighted amplitude vectors, then
renormalizes to unit trace, so every output is a consistent discretization of
the corresponding continuum integrals.

Photon-number cross terms (no-photon vs one-photon blocks) vanish in the
default convention: integrating out the photon modes leaves orthogonal
sectors.  The opt-in "bin" convention instead projects the one-photon
amplitudes onto the single photon-energy bin at the line center and keeps the
resulting cross terms; it is grid-dependent by construction and exists for
sensitivity studies.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .amplitudes import AmplitudeSet, SectorOverlaps, sector_from_grid
from .errors import NonHermitianError, UndefinedConditionError

NORM_FLOOR = 1e-12

_F_DELTA_MODES = ("orthogonal", "bin")


@dataclass(frozen=True)
class ReducedDensity:
    """A renormalized reduced density matrix with its pre-normalization trace."""

    dim: int
    matrix: np.ndarray
    norm: float
    label: str

    def __post_init__(self):
        m = self.matrix
        if m.shape != (self.dim, self.dim):
            raise UndefinedConditionError(
                f"{self.label}: matrix shape {m.shape} does not match dim {self.dim}"
            )
        scale = float(np.max(np.abs(m))) or 1.0
        dev = float(np.max(np.abs(m - m.conj().T)))
        if dev > 1e-12 * scale:
            raise NonHermitianError(
                f"{self.label}: Hermiticity deviation {dev:.3e} exceeds 1e-12 relative"
            )
        tr = complex(np.trace(m))
        if abs(tr - 1.0) > 1e-12:
            raise UndefinedConditionError(
                f"{self.label}: trace {tr} deviates from 1 beyond 1e-12"
            )


def _finalize(matrix: np.ndarray, label: str) -> ReducedDensity:
    norm = float(np.trace(matrix).real)
    if norm < NORM_FLOOR:
        raise UndefinedConditionError(
            f"{label}: conditioned norm {norm:.3e} below floor {NORM_FLOOR:.0e}"
        )
    m = matrix / norm
    m = 0.5 * (m + m.conj().T)  # strip quadrature round-off before the checks
    return ReducedDensity(dim=m.shape[0], matrix=m, norm=norm, label=label)


def _sector(amps: AmplitudeSet) -> SectorOverlaps:
    return amps.sector if amps.sector is not None else sector_from_grid(amps)


def _check_f_delta(f_delta: str) -> None:
    if f_delta not in _F_DELTA_MODES:
        raise UndefinedConditionError(
            f"unknown photon-number cross-term convention {f_delta!r};"
            f" expected one of {_F_DELTA_MODES}"
        )


def rho_electron_ion(amps: AmplitudeSet) -> ReducedDensity:
    """2x2 ionic density in the {a, b} basis, conditioned on no fluorescence."""
    w = amps.eps.trapezoid_weights
    va = np.sqrt(w) * amps.alpha
    vb = np.sqrt(w) * amps.beta
    m = np.array(
        [
            [np.vdot(va, va), np.vdot(va, vb)],
            [np.vdot(vb, va), np.vdot(vb, vb)],
        ]
    )
    return _finalize(m, "AB")


def rho_electron_photon_number(amps: AmplitudeSet, f_delta: str = "orthogonal") -> ReducedDensity:
    """2x2 density over photon number {0, 1} with the ion detected in a."""
    _check_f_delta(f_delta)
    w = amps.eps.trapezoid_weights
    p_alpha = float(w @ np.abs(amps.alpha) ** 2)
    p_gamma = _sector(amps).p_gamma
    off = 0.0 + 0.0j
    if f_delta == "bin":
        i0 = int(np.argmin(np.abs(amps.epsl.values)))
        sql = np.sqrt(amps.epsl.trapezoid_weights[i0])
        off = complex(np.vdot(np.sqrt(w) * amps.alpha, np.sqrt(w) * amps.gamma[:, i0] * sql))
    m = np.array([[p_alpha, off], [np.conj(off), p_gamma]])
    return _finalize(m, "AC")


def rho_qutrit(amps: AmplitudeSet, f_delta: str = "orthogonal") -> ReducedDensity:
    """3x3 density over the channels {alpha, beta, gamma}."""
    _check_f_delta(f_delta)
    m = _channel_gram(amps, f_delta, with_delta=False)
    return _finalize(m, "qutrit")


def rho_ququart(amps: AmplitudeSet, f_delta: str = "orthogonal") -> ReducedDensity:
    """4x4 density over all four channels {alpha, beta, gamma, delta}."""
    _check_f_delta(f_delta)
    m = _channel_gram(amps, f_delta, with_delta=True)
    return _finalize(m, "ququart")


def _channel_gram(amps: AmplitudeSet, f_delta: str, with_delta: bool) -> np.ndarray:
    w = amps.eps.trapezoid_weights
    va = np.sqrt(w) * amps.alpha
    vb = np.sqrt(w) * amps.beta
    sector = _sector(amps)
    d = 4 if with_delta else 3
    m = np.zeros((d, d), dtype=complex)
    m[0, 0] = np.vdot(va, va)
    m[0, 1] = np.vdot(va, vb)
    m[1, 0] = np.conj(m[0, 1])
    m[1, 1] = np.vdot(vb, vb)
    m[2, 2] = sector.p_gamma
    if with_delta:
        m[3, 3] = sector.p_delta
        m[2, 3] = sector.cross
        m[3, 2] = np.conj(sector.cross)
    if f_delta == "bin":
        # photon-number cross terms through the center-bin projection; only
        # like-ion pairs survive (alpha-gamma share a, beta-delta share b)
        i0 = int(np.argmin(np.abs(amps.epsl.values)))
        sql = np.sqrt(amps.epsl.trapezoid_weights[i0])
        vg = np.sqrt(w) * amps.gamma[:, i0] * sql
        m[0, 2] = np.vdot(va, vg)
        m[2, 0] = np.conj(m[0, 2])
        if with_delta:
            vd = np.sqrt(w) * amps.delta[:, i0] * sql
            m[1, 3] = np.vdot(vb, vd)
            m[3, 1] = np.conj(m[1, 3])
    return m


def rho_modes(amps: AmplitudeSet) -> ReducedDensity:
    """Photon-mode density over the photon energy grid, traced over electron."""
    sqe = np.sqrt(amps.eps.trapezoid_weights)[:, None]
    sql = np.sqrt(amps.epsl.trapezoid_weights)[None, :]
    g = sqe * amps.gamma * sql
    d = sqe * amps.delta * sql
    m = g.conj().T @ g + d.conj().T @ d
    return _finalize(m, "modes")


def rho_modes_from_gram(gram: np.ndarray, label: str = "modes") -> ReducedDensity:
    """Wrap an externally assembled mode overlap matrix (measure absorbed)."""
    return _finalize(np.asarray(gram, dtype=complex), label)
