"""Analytic ionization and emission amplitudes.

After ionization by the resonant pulse the system is described by four
continuum amplitude densities, labelled by the ionic state and photon number:

    alpha(eps)            ion in a, no photon
    beta(t_f, eps)        ion in b, no photon
    gamma(t_f, eps, eps_l) ion in a, one photon of energy eps_l
    delta(t_f, eps, eps_l) ion in b, one photon

with the surviving ground amplitude

    g(t) = exp[-(pi Omega_ag^2 / 4) * int_{t0}^{t} Lambda^2 dt'].

First order (birth at t, Rabi rotation to the evaluation time):

    alpha = (Omega_ag / 2i) int dt a(T, t) Lambda g exp[-kappa T / 4 + (i eps + kappa/4) t]
    beta  = (Omega_ag / 2i) int dt b(T, t) Lambda g exp[-K t_f + (i eps + K) t]

where T = min(t_f, t1) and the decay constant K is kappa/4 while the pulse is
on and kappa/2 afterwards (the dressed ion shares its excited character, so it
radiates at half rate during driving).

Second order (photon emitted at t' between birth and evaluation):

    gamma = P int dt int_t^{t_f} dt' a(t_f, t') b(t', t) Lambda g
              * exp[(i eps_l - K(t')) t' + (i eps + kappa/4) t]
    delta = P int dt int_t^{min(t_f, t1)} dt' b(t_f, t') b(t', t) Lambda g
              * exp[-K(t_f) t_f + i eps_l t' + (i eps + kappa/4) t]

with P = -(Omega_ag v_sp / 2). The sign of P is fixed by matching the
five-level generator used by the numerical oracle (one-way v_sp feeding the
gamma channel), which a global phase cannot hide from the cross-check.

The inner t' integrals are evaluated in O(n_time) per photon energy by
expanding a(t_f, t') b(t', t) and b(t_f, t') b(t', t) over products of
cos(theta/2) and sin(theta/2) at the two times, which turns the double
integral into three suffix-accumulated kernels reused for every eps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .config import RunConfig
from .errors import ConfigError
from .pulse import PulseShape, PulseTables
from .units import EnergyGrid, TimeGrid


class SectorOverlaps(NamedTuple):
    """Photon-energy-integrated bilinears of the one-photon amplitudes.

    Computed in the time domain (Parseval), so they stay exact long after the
    pulse when the emission line is far narrower than any photon grid step.
    Marginals are densities over the photoelectron energy grid.
    """

    eval_time: float
    p_gamma: float
    p_delta: float
    cross: complex  # int deps int depsl gamma* delta
    gamma_marginal: np.ndarray  # (n_eps,)
    delta_marginal: np.ndarray  # (n_eps,)


@dataclass(frozen=True)
class AmplitudeSet:
    """All amplitude densities of one run evaluated at a single time."""

    eval_time: float
    eps: EnergyGrid
    epsl: EnergyGrid
    alpha: np.ndarray  # (n_eps,)
    beta: np.ndarray  # (n_eps,)
    gamma: np.ndarray  # (n_eps, n_epsl)
    delta: np.ndarray  # (n_eps, n_epsl)
    g_times: np.ndarray
    g_values: np.ndarray
    g_eval: float
    k_pulse: float  # kappa / 4
    k_post: float  # kappa / 2
    sector: SectorOverlaps | None = None


class Populations(NamedTuple):
    p_ground: float
    p_alpha: float
    p_beta: float
    p_gamma: float
    p_delta: float

    @property
    def total(self) -> float:
        return sum(self)


class _EvalNodes:
    """Quadrature nodes for one evaluation time.

    Uses the pulse tables' uniform nodes up to T = min(eval_time, t1); if the
    evaluation time falls between nodes the exact endpoint is appended, with
    table values interpolated there (the envelope itself is exact).
    """

    def __init__(self, tables: PulseTables, eval_time: float):
        shape = tables.shape
        if eval_time < shape.t0:
            raise ConfigError(f"evaluation time {eval_time} precedes the pulse start {shape.t0}")
        self.in_pulse = eval_time < shape.t1
        t_end = min(eval_time, shape.t1)
        t = tables.t
        k_last = int(np.searchsorted(t, t_end, side="right")) - 1
        k_last = max(k_last, 0)
        if t_end - t[k_last] > 1e-9 * max(1.0, abs(t_end)):
            self.t = np.append(t[: k_last + 1], t_end)
            self.lam = np.append(tables.lam[: k_last + 1], tables.shape.envelope(t_end))
            self.theta = np.append(tables.theta[: k_last + 1], tables.theta_at(t_end))
            self.g = np.append(tables.g[: k_last + 1], tables.g_at(t_end))
        else:
            sl = slice(0, k_last + 1)
            self.t = t[sl]
            self.lam = tables.lam[sl]
            self.theta = tables.theta[sl]
            self.g = tables.g[sl]
        self.t_end = float(self.t[-1])
        self.c = np.cos(0.5 * self.theta)
        self.s = np.sin(0.5 * self.theta)
        # half-angle at the evaluation time (frozen after the pulse)
        self.c_f = float(self.c[-1])
        self.s_f = float(self.s[-1])
        self.weights = _trapezoid_weights(self.t)
        self.g_end = float(self.g[-1])


def _trapezoid_weights(t: np.ndarray) -> np.ndarray:
    w = np.zeros_like(t)
    if t.size >= 2:
        dt = np.diff(t)
        w[:-1] += 0.5 * dt
        w[1:] += 0.5 * dt
    return w


def _suffix_trapezoid(values: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Suffix integrals S[k] = int_{t_k}^{t_end} along axis 0."""
    dt = np.diff(t)
    contrib = 0.5 * dt[:, None] * (values[1:] + values[:-1])
    out = np.zeros_like(values)
    np.cumsum(contrib[::-1], axis=0, out=out[:-1][::-1])
    return out


def _tables_for(config: RunConfig, shape: PulseShape, n_time: int | None) -> PulseTables:
    n = n_time if n_time is not None else config.n_time_for(shape)
    return PulseTables(shape, config.physical.omega_rabi, config.physical.omega_ag, n)


def ground_amplitude(shape: PulseShape, config: RunConfig, time_grid: TimeGrid) -> np.ndarray:
    """g(t) over the pulse nodes of a time grid (constant after the pulse)."""
    tables = _tables_for(config, shape, time_grid.n_pulse)
    return tables.g_at(time_grid.pulse_times)


def first_order(
    shape: PulseShape,
    config: RunConfig,
    eps_grid: EnergyGrid,
    eval_time: float,
    n_time: int | None = None,
    _tables: PulseTables | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """(alpha, beta) on the photoelectron grid at one evaluation time."""
    phys = config.physical
    tables = _tables_for(config, shape, n_time) if _tables is None else _tables
    nodes = _EvalNodes(tables, eval_time)
    kappa = phys.kappa
    k_beta = 0.25 * kappa if nodes.in_pulse else 0.5 * kappa

    eps = eps_grid.values
    phase = np.exp(1j * np.outer(nodes.t, eps))  # (n_t, n_eps)

    base = nodes.weights * nodes.lam * nodes.g
    rabi_a = nodes.c_f * nodes.c + nodes.s_f * nodes.s
    rabi_b = nodes.s_f * nodes.c - nodes.c_f * nodes.s

    integ_a = base * rabi_a * np.exp(0.25 * kappa * nodes.t)
    integ_b = base * rabi_b * np.exp(k_beta * nodes.t)

    pref_a = -0.5j * phys.omega_ag * math.exp(-0.25 * kappa * nodes.t_end)
    pref_b = -0.5 * phys.omega_ag * math.exp(-k_beta * eval_time)
    alpha = pref_a * (integ_a @ phase)
    beta = pref_b * (integ_b @ phase)
    return alpha, beta


def second_order(
    shape: PulseShape,
    config: RunConfig,
    eps_grid: EnergyGrid,
    epsl_grid: EnergyGrid,
    eval_time: float,
    n_time: int | None = None,
    _tables: PulseTables | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """(gamma, delta) on the (eps, eps_l) grids at one evaluation time."""
    phys = config.physical
    tables = _tables_for(config, shape, n_time) if _tables is None else _tables
    nodes = _EvalNodes(tables, eval_time)
    if phys.v_sp == 0.0:
        zeros = np.zeros((eps_grid.n, epsl_grid.n), dtype=complex)
        return zeros, zeros.copy()

    f_gamma, f_delta = _emission_integrands(nodes, phys.kappa, epsl_grid.values, eval_time)

    eps = eps_grid.values
    phase = np.exp(1j * np.outer(nodes.t, eps))
    weight = (nodes.weights * nodes.lam * nodes.g * np.exp(0.25 * phys.kappa * nodes.t))[:, None]

    pref = -0.5 * phys.omega_ag * phys.v_sp
    k_final = 0.25 * phys.kappa if nodes.in_pulse else 0.5 * phys.kappa
    gamma = pref * (phase.T @ (weight * f_gamma))
    delta = (pref * math.exp(-k_final * eval_time)) * (phase.T @ (weight * f_delta))
    return gamma, delta


def _emission_integrands(nodes: _EvalNodes, kappa: float, epsl: np.ndarray, eval_time: float):
    """Inner t' integrals for gamma and delta, per outer node and photon energy.

    Returns (f_gamma, f_delta) of shape (n_t, n_epsl) where

        f_gamma[k, l] = int_{t_k}^{t_f} a(t_f, t') b(t', t_k) e^{(i epsl - K(t')) t'} dt'
        f_delta[k, l] = int_{t_k}^{min(t_f, t1)} b(t_f, t') b(t', t_k) e^{i epsl t'} dt'
    """
    t = nodes.t
    c, s = nodes.c, nodes.s
    cf, sf = nodes.c_f, nodes.s_f

    phase_l = np.exp(1j * np.outer(t, epsl))  # (n_t, n_l)
    decay4 = np.exp(-0.25 * kappa * t)[:, None]

    kern = phase_l * decay4
    q_cc = _suffix_trapezoid((c * c)[:, None] * kern, t)
    q_ss = _suffix_trapezoid((s * s)[:, None] * kern, t)
    q_cs = _suffix_trapezoid((c * s)[:, None] * kern, t)

    if not nodes.in_pulse and eval_time > nodes.t_end:
        # analytic tail over (t1, t_f] where the envelope is zero: the surviving
        # excited fraction keeps radiating at K = kappa/2 with frozen Rabi angle
        z = 1j * epsl - 0.5 * kappa
        tail = (np.exp(z * eval_time) - np.exp(z * nodes.t_end)) / z
        c1, s1 = nodes.c_f, nodes.s_f
        q_cc = q_cc + (c1 * c1) * tail[None, :]
        q_ss = q_ss + (s1 * s1) * tail[None, :]
        q_cs = q_cs + (c1 * s1) * tail[None, :]

    f_gamma = -1j * (
        c[:, None] * (cf * q_cs + sf * q_ss) - s[:, None] * (cf * q_cc + sf * q_cs)
    )

    l_cc = _suffix_trapezoid((c * c)[:, None] * phase_l, t)
    l_ss = _suffix_trapezoid((s * s)[:, None] * phase_l, t)
    l_cs = _suffix_trapezoid((c * s)[:, None] * phase_l, t)
    f_delta = -(
        c[:, None] * (sf * l_cs - cf * l_ss) - s[:, None] * (sf * l_cc - cf * l_cs)
    )
    return f_gamma, f_delta


def sector_overlaps(
    shape: PulseShape,
    config: RunConfig,
    eval_time: float,
    eps_grid: EnergyGrid | None = None,
    n_time: int | None = None,
    _tables: PulseTables | None = None,
) -> SectorOverlaps:
    """Exact photon-energy-integrated populations and gamma-delta coherence.

    Writing gamma(eps, epsl) = int dt' exp(i epsl t') A_gamma(eps, t') and
    using int depsl exp(i epsl (t'-t'')) = 2 pi delta(t'-t''), every bilinear
    int depsl f* g collapses to 2 pi int dt' A_f* A_g.  The A kernels are
    prefix accumulations of the same rotation/phase factors the gridded
    second-order route uses as suffixes, so the two routes agree wherever the
    photon grid resolves the line; this one has no resolution floor, which is
    what the decay-time populations need (post-pulse linewidth kappa is orders
    below any sane grid step).  The post-pulse stretch, where the kernels
    factorize with frozen angles, contributes through a closed-form tail.
    """
    phys = config.physical
    eps_grid = eps_grid if eps_grid is not None else config.eps_grid
    tables = _tables if _tables is not None else _tables_for(config, shape, n_time)
    nodes = _EvalNodes(tables, eval_time)
    n_eps = eps_grid.n
    if phys.v_sp == 0.0 or nodes.t.size < 2:
        zero = np.zeros(n_eps)
        return SectorOverlaps(eval_time, 0.0, 0.0, 0.0 + 0.0j, zero, zero)

    from scipy.integrate import cumulative_trapezoid

    t = nodes.t
    c, s = nodes.c, nodes.s
    cf, sf = nodes.c_f, nodes.s_f
    kappa = phys.kappa
    pref = -0.5 * phys.omega_ag * phys.v_sp

    # ionization-time prefix integrals, one row per emission node t'
    ion = nodes.lam * nodes.g * np.exp(0.25 * kappa * t)
    phase = np.exp(1j * np.outer(t, eps_grid.values))  # (n_t, n_eps)
    u_c = cumulative_trapezoid((c * ion)[:, None] * phase, t, axis=0, initial=0.0)
    u_s = cumulative_trapezoid((s * ion)[:, None] * phase, t, axis=0, initial=0.0)

    decay4 = np.exp(-0.25 * kappa * t)[:, None]
    a_gam = decay4 * (
        (cf * c * s + sf * s * s)[:, None] * u_c - (cf * c * c + sf * s * c)[:, None] * u_s
    )
    k_final = 0.25 * kappa if nodes.in_pulse else 0.5 * kappa
    post = math.exp(-k_final * eval_time)
    a_del = post * (
        (sf * c * s - cf * s * s)[:, None] * u_c - (sf * c * c - cf * c * s)[:, None] * u_s
    )

    w_t = nodes.weights[:, None]
    scale = 2.0 * math.pi * pref * pref
    gamma_marg = scale * np.sum(w_t * np.abs(a_gam) ** 2, axis=0)
    delta_marg = scale * np.sum(w_t * np.abs(a_del) ** 2, axis=0)
    # full kernels carry -i (gamma) and -1 (delta); moduli drop them, the
    # coherence keeps conj(-i) * (-1) = -i
    cross_marg = -1j * scale * np.sum(w_t * a_gam.conj() * a_del, axis=0)

    if not nodes.in_pulse and eval_time > nodes.t_end:
        # frozen angles after the pulse: a(t_f,t') = 1, b(t',t) = b(t1,t)
        v = sf * u_c[-1] - cf * u_s[-1]
        t_int = (math.exp(-kappa * nodes.t_end) - math.exp(-kappa * eval_time)) / kappa
        gamma_marg = gamma_marg + scale * t_int * np.abs(v) ** 2

    w_e = eps_grid.trapezoid_weights
    return SectorOverlaps(
        eval_time=eval_time,
        p_gamma=float(w_e @ gamma_marg),
        p_delta=float(w_e @ delta_marg),
        cross=complex(w_e @ cross_marg),
        gamma_marginal=gamma_marg,
        delta_marginal=delta_marg,
    )


def sector_from_grid(amps: AmplitudeSet) -> SectorOverlaps:
    """Grid-trapezoid fallback with the SectorOverlaps signature.

    Only as good as the photon grid's resolution of the emission line; meant
    for synthetic amplitude sets in tests, not for post-pulse physics.
    """
    w_l = amps.epsl.trapezoid_weights
    w_e = amps.eps.trapezoid_weights
    gamma_marg = np.abs(amps.gamma) ** 2 @ w_l
    delta_marg = np.abs(amps.delta) ** 2 @ w_l
    cross_marg = (amps.gamma.conj() * amps.delta) @ w_l
    return SectorOverlaps(
        eval_time=amps.eval_time,
        p_gamma=float(w_e @ gamma_marg),
        p_delta=float(w_e @ delta_marg),
        cross=complex(w_e @ cross_marg),
        gamma_marginal=gamma_marg,
        delta_marginal=delta_marg,
    )


def evaluate(
    shape: PulseShape,
    config: RunConfig,
    eval_time: float,
    eps_grid: EnergyGrid | None = None,
    epsl_grid: EnergyGrid | None = None,
    n_time: int | None = None,
    with_second_order: bool = True,
) -> AmplitudeSet:
    """Build the full AmplitudeSet at one evaluation time."""
    eps_grid = eps_grid if eps_grid is not None else config.eps_grid
    epsl_grid = epsl_grid if epsl_grid is not None else config.epsl_grid
    tables = _tables_for(config, shape, n_time)
    alpha, beta = first_order(shape, config, eps_grid, eval_time, _tables=tables)
    if with_second_order:
        gamma, delta = second_order(shape, config, eps_grid, epsl_grid, eval_time, _tables=tables)
        sector = sector_overlaps(shape, config, eval_time, eps_grid, _tables=tables)
    else:
        gamma = np.zeros((eps_grid.n, epsl_grid.n), dtype=complex)
        delta = np.zeros_like(gamma)
        sector = None
    return AmplitudeSet(
        eval_time=eval_time,
        eps=eps_grid,
        epsl=epsl_grid,
        alpha=alpha,
        beta=beta,
        gamma=gamma,
        delta=delta,
        g_times=tables.t.copy(),
        g_values=tables.g.copy(),
        g_eval=float(tables.g_at(min(eval_time, shape.t1))),
        k_pulse=0.25 * config.physical.kappa,
        k_post=0.5 * config.physical.kappa,
        sector=sector,
    )


def populations(amps: AmplitudeSet, exact: bool = True) -> Populations:
    """Channel populations by trapezoid integration over the energy grids.

    With exact=True (default) the one-photon channels come from the
    time-domain sector overlaps when present, so they remain meaningful at
    decay times where the photon grid cannot resolve the line.
    """
    w_e = amps.eps.trapezoid_weights
    w_l = amps.epsl.trapezoid_weights
    p_a = float(w_e @ np.abs(amps.alpha) ** 2)
    p_b = float(w_e @ np.abs(amps.beta) ** 2)
    if exact and amps.sector is not None:
        p_g = amps.sector.p_gamma
        p_d = amps.sector.p_delta
    else:
        p_g = float(w_e @ (np.abs(amps.gamma) ** 2 @ w_l))
        p_d = float(w_e @ (np.abs(amps.delta) ** 2 @ w_l))
    return Populations(
        p_ground=float(amps.g_eval**2),
        p_alpha=p_a,
        p_beta=p_b,
        p_gamma=p_g,
        p_delta=p_d,
    )


def mode_overlap_gram(
    shape: PulseShape,
    config: RunConfig,
    epsl_grid: EnergyGrid,
    eval_time: float,
    n_time: int | None = None,
    _block: int | None = None,
) -> tuple[np.ndarray, float]:
    """Photon-mode overlap matrix integrated over eps in the time domain.

    By Parseval the photoelectron-energy integral of gamma*(eps, l) gamma(eps, l')
    equals 2 pi times the time overlap of the emission integrands, so the mode
    matrix can be formed without any eps grid. Returns the matrix with the
    sqrt-weight measure absorbed symmetrically, plus its trace (the combined
    one-photon population). Used by the long duration sweeps where resolving
    eps would be wasteful.
    """
    phys = config.physical
    kappa = phys.kappa
    tables = _tables_for(config, shape, n_time)
    nodes = _EvalNodes(tables, eval_time)
    epsl = epsl_grid.values
    n_l = epsl_grid.n
    if phys.v_sp == 0.0:
        return np.zeros((n_l, n_l), dtype=complex), 0.0

    pref = -0.5 * phys.omega_ag * phys.v_sp
    k_final = 0.25 * kappa if nodes.in_pulse else 0.5 * kappa
    t = nodes.t
    c, s = nodes.c, nodes.s
    cf, sf = nodes.c_f, nodes.s_f
    outer = nodes.lam * nodes.g * np.exp(0.25 * kappa * t)
    sq_t = np.sqrt(nodes.weights)
    sq_l = np.sqrt(epsl_grid.trapezoid_weights)[None, :]

    # Mirrors _emission_integrands, but walks the time axis backwards in
    # blocks so the (n_t, n_l) intermediates never materialize: long pulses
    # push both axes into the thousands.  Each suffix integral is carried
    # across block edges at the shared node; the post-pulse tail enters as
    # the carry seed.
    q_cc = np.zeros(n_l, dtype=complex)
    q_ss = np.zeros(n_l, dtype=complex)
    q_cs = np.zeros(n_l, dtype=complex)
    if not nodes.in_pulse and eval_time > nodes.t_end:
        z = 1j * epsl - 0.5 * kappa
        tail = (np.exp(z * eval_time) - np.exp(z * nodes.t_end)) / z
        c1, s1 = nodes.c_f, nodes.s_f
        q_cc = (c1 * c1) * tail
        q_ss = (s1 * s1) * tail
        q_cs = (c1 * s1) * tail
    l_cc = np.zeros(n_l, dtype=complex)
    l_ss = np.zeros(n_l, dtype=complex)
    l_cs = np.zeros(n_l, dtype=complex)

    gram = np.zeros((n_l, n_l), dtype=complex)
    block = _block if _block is not None else max(int(4.0e6 / max(n_l, 1)), 16)
    block = max(block, 1)
    hi = t.size - 1
    while True:
        lo = max(hi - block, 0)
        sl = slice(lo, hi + 1)  # overlap one node with the later block
        phase_l = np.exp(1j * np.outer(t[sl], epsl))
        kern = phase_l * np.exp(-0.25 * kappa * t[sl])[:, None]
        cb, sb = c[sl], s[sl]

        bq_cc = _suffix_trapezoid((cb * cb)[:, None] * kern, t[sl]) + q_cc
        bq_ss = _suffix_trapezoid((sb * sb)[:, None] * kern, t[sl]) + q_ss
        bq_cs = _suffix_trapezoid((cb * sb)[:, None] * kern, t[sl]) + q_cs
        bl_cc = _suffix_trapezoid((cb * cb)[:, None] * phase_l, t[sl]) + l_cc
        bl_ss = _suffix_trapezoid((sb * sb)[:, None] * phase_l, t[sl]) + l_ss
        bl_cs = _suffix_trapezoid((cb * sb)[:, None] * phase_l, t[sl]) + l_cs

        f_gamma = -1j * (
            cb[:, None] * (cf * bq_cs + sf * bq_ss) - sb[:, None] * (cf * bq_cc + sf * bq_cs)
        )
        f_delta = -(
            cb[:, None] * (sf * bl_cs - cf * bl_ss) - sb[:, None] * (sf * bl_cc - cf * bl_cs)
        )

        w = (sq_t[sl] * outer[sl])[:, None]
        a_g = (pref * w * f_gamma) * sq_l
        a_d = ((pref * math.exp(-k_final * eval_time)) * w * f_delta) * sq_l
        if hi != t.size - 1:
            # the shared node was already accumulated by the later block
            a_g = a_g[:-1]
            a_d = a_d[:-1]
        gram += a_g.conj().T @ a_g
        gram += a_d.conj().T @ a_d

        q_cc, q_ss, q_cs = bq_cc[0], bq_ss[0], bq_cs[0]
        l_cc, l_ss, l_cs = bl_cc[0], bl_ss[0], bl_cs[0]
        if lo == 0:
            break
        hi = lo

    gram *= 2.0 * math.pi
    return gram, float(np.trace(gram).real)
