"""Configuration: plain-text `key = value` input resolved into atomic units.

The default parameter set describes helium photoionized by an XUV pulse
resonant with the 1s-2p line of the remaining ion: photon energy 40.8 eV,
peak intensity 1.25e13 W/cm^2, ionic dipole z_ba = 0.37247 a.u. (hydrogenic
Z = 2 value) and bound-continuum dipole z_ag = 0.4537 a.u., chosen so a
44 fs Gaussian pulse leaves 80 percent of the ground state.
"""

from __future__ import annotations

import hashlib
import math
import os
from dataclasses import dataclass, replace
from typing import Mapping

from . import units
from .errors import ConfigError
from .pulse import PulseShape
from .units import EnergyGrid, TimeGrid

_FLOAT_KEYS = (
    "omega0_ev",
    "intensity_wcm2",
    "z_ag",
    "z_ba",
    "tau_fs",
    "t_delta_fs",
    "ramp_fs",
    "eps_min_ev",
    "eps_max_ev",
    "epsl_min_ev",
    "epsl_max_ev",
    "tf_s",
)
_INT_KEYS = ("n_eps", "n_epsl", "n_time")
_STR_KEYS = ("pulse_shape", "parity")

DEFAULTS: dict = {
    "omega0_ev": 40.8,
    "intensity_wcm2": 1.25e13,
    "z_ag": 0.4537,
    "z_ba": 0.37247,
    "tau_fs": 44.0,
    "pulse_shape": "gaussian",
    "parity": "even",
    "t_delta_fs": None,  # resolved to 2.5 * tau_fs
    "ramp_fs": 5.0,
    "eps_min_ev": -0.6,
    "eps_max_ev": 0.6,
    "n_eps": 481,
    "epsl_min_ev": -0.6,
    "epsl_max_ev": 0.6,
    "n_epsl": 481,
    "tf_s": None,  # resolved to 10 / kappa
    "n_time": None,  # resolved from the step rule
}

# Step rule: resolve both the Rabi oscillation and the fastest continuum phase.
_STEPS_PER_RABI_PERIOD = 200
_PHASE_PER_STEP = 2.0 * math.pi / 40.0


@dataclass(frozen=True)
class PhysicalConfig:
    """Atomic-unit constants of one run.

    omega0      photon energy, resonant with the ionic a -> b transition
    e0          peak field amplitude
    z_ag        ground-continuum dipole, z_ba ionic transition dipole
    kappa       spontaneous b -> a decay rate, 4 z_ba^2 omega0^3 / c^3
    v_sp        emission coupling density z_ba sqrt(2 omega0^3 / (pi c^3)),
                satisfying kappa = 2 pi v_sp^2
    eps_a/b     ionic level energies with eps_b - eps_a = omega0
    """

    omega0: float
    intensity: float
    e0: float
    z_ag: float
    z_ba: float
    kappa: float
    v_sp: float
    eps_a: float
    eps_b: float

    @classmethod
    def from_inputs(
        cls, omega0: float, intensity: float, z_ag: float, z_ba: float, eps_a: float = -2.0
    ) -> "PhysicalConfig":
        e0 = units.intensity_to_field(intensity)
        kappa = 4.0 * z_ba**2 * omega0**3 / units.C_AU**3
        v_sp = z_ba * math.sqrt(2.0 * omega0**3 / (math.pi * units.C_AU**3))
        return cls(
            omega0=omega0,
            intensity=intensity,
            e0=e0,
            z_ag=z_ag,
            z_ba=z_ba,
            kappa=kappa,
            v_sp=v_sp,
            eps_a=eps_a,
            eps_b=eps_a + omega0,
        )

    @property
    def omega_ag(self) -> float:
        """Bound-continuum Rabi parameter z_ag * E0."""
        return self.z_ag * self.e0

    @property
    def omega_rabi(self) -> float:
        """Ionic Rabi frequency Omega0 = z_ba * E0 at peak field."""
        return self.z_ba * self.e0

    @property
    def rabi_period(self) -> float:
        if self.omega_rabi == 0.0:
            return math.inf
        return 2.0 * math.pi / self.omega_rabi


def validate_physical(phys: PhysicalConfig) -> None:
    if not phys.omega0 > 0:
        raise ConfigError(f"omega0_ev must be positive, got {units.au_to_ev(phys.omega0)}", key="omega0_ev")
    if not phys.e0 > 0:
        raise ConfigError("intensity_wcm2 must give a positive field", key="intensity_wcm2")
    if not phys.kappa > 0:
        raise ConfigError("z_ba must be nonzero so the ion can fluoresce", key="z_ba")
    if phys.v_sp < 0:
        raise ConfigError("emission coupling must be non-negative", key="z_ba")
    if abs(phys.kappa - 2.0 * math.pi * phys.v_sp**2) > 1e-12 * phys.kappa:
        raise ConfigError("inconsistent kappa and v_sp", key="z_ba")
    expected = 4.0 * phys.z_ba**2 * phys.omega0**3 / units.C_AU**3
    if abs(phys.kappa - expected) > 1e-12 * expected:
        raise ConfigError("kappa inconsistent with dipole and photon energy", key="z_ba")
    if abs((phys.eps_b - phys.eps_a) - phys.omega0) > 1e-12 * phys.omega0:
        raise ConfigError("ionic splitting must equal the photon energy", key="omega0_ev")


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved run description (all values in atomic units)."""

    physical: PhysicalConfig
    pulse_shape: str
    tau: float
    t_delta: float
    ramp: float
    parity: str
    eps_grid: EnergyGrid
    epsl_grid: EnergyGrid
    tf: float
    n_time: int
    resolved: Mapping[str, object]  # canonical key = value view, lab units

    def pulse(self, tau: float | None = None, kind: str | None = None,
              parity: str | None = None, t_delta: float | None = None) -> PulseShape:
        """The configured pulse, with optional overrides for scans."""
        return PulseShape(
            kind=kind if kind is not None else self.pulse_shape,
            tau=tau if tau is not None else self.tau,
            ramp=self.ramp,
            t_delta=t_delta if t_delta is not None else self.t_delta,
            parity=parity if parity is not None else self.parity,
        )

    def n_time_for(self, shape: PulseShape) -> int:
        """Uniform node count for an arbitrary pulse window under the step rule."""
        return _resolve_n_time(self.physical, shape, self.eps_grid, self.epsl_grid, None)

    def time_grid(self, n_checkpoints: int = 60) -> TimeGrid:
        shape = self.pulse()
        checkpoints = _log_checkpoints(shape.t1, self.tf, n_checkpoints)
        return TimeGrid(
            t0=shape.t0,
            t1=shape.t1,
            tf=self.tf,
            n_pulse=self.n_time,
            checkpoints=checkpoints,
        )

    def canonical_text(self) -> str:
        lines = []
        for key in sorted(self.resolved):
            lines.append(f"{key} = {_format_value(self.resolved[key])}")
        return "\n".join(lines) + "\n"

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical_text().encode()).hexdigest()


def _format_value(v) -> str:
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def _log_checkpoints(t1: float, tf: float, n: int) -> tuple[float, ...]:
    if tf <= t1 or n < 1:
        return ()
    span = tf - t1
    import numpy as np

    deltas = np.geomspace(span * 1e-4, span, n)
    return tuple(float(t1 + d) for d in deltas)


def parse_config_text(text: str) -> dict:
    """Parse `key = value` lines ('#' starts a comment) into raw overrides."""
    overrides: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in DEFAULTS:
            raise ConfigError(f"unknown configuration key {key!r}", key=key)
        overrides[key] = _coerce(key, value)
    return overrides


def _coerce(key: str, value: str):
    if key in _STR_KEYS:
        return value
    try:
        if key in _INT_KEYS:
            as_float = float(value)
            if as_float != int(as_float):
                raise ValueError
            return int(as_float)
        return float(value)
    except ValueError:
        raise ConfigError(f"value for {key!r} must be numeric, got {value!r}", key=key) from None


def build_config(overrides: Mapping[str, object] | None = None) -> RunConfig:
    """Resolve raw overrides on top of the defaults into a validated RunConfig."""
    raw = dict(DEFAULTS)
    if overrides:
        for key, value in overrides.items():
            if key not in DEFAULTS:
                raise ConfigError(f"unknown configuration key {key!r}", key=key)
            raw[key] = value

    for key in _FLOAT_KEYS:
        if raw[key] is not None:
            raw[key] = float(raw[key])
    for key in _INT_KEYS:
        if raw[key] is not None:
            raw[key] = int(raw[key])

    if raw["pulse_shape"] not in ("gaussian", "flattop", "double_gaussian"):
        raise ConfigError(f"unknown pulse_shape {raw['pulse_shape']!r}", key="pulse_shape")
    if raw["parity"] not in ("even", "odd"):
        raise ConfigError(f"parity must be 'even' or 'odd', got {raw['parity']!r}", key="parity")
    for key in ("tau_fs", "ramp_fs"):
        if not raw[key] > 0:
            raise ConfigError(f"{key} must be positive, got {raw[key]}", key=key)
    if not raw["omega0_ev"] > 0:
        raise ConfigError(f"omega0_ev must be positive, got {raw['omega0_ev']}", key="omega0_ev")
    if raw["intensity_wcm2"] < 0:
        raise ConfigError("intensity_wcm2 must be non-negative", key="intensity_wcm2")

    if raw["t_delta_fs"] is None:
        raw["t_delta_fs"] = 2.5 * raw["tau_fs"]
    if not raw["t_delta_fs"] > 0:
        raise ConfigError("t_delta_fs must be positive", key="t_delta_fs")

    phys = PhysicalConfig.from_inputs(
        omega0=units.ev_to_au(raw["omega0_ev"]),
        intensity=raw["intensity_wcm2"],
        z_ag=raw["z_ag"],
        z_ba=raw["z_ba"],
    )
    validate_physical(phys)

    eps_grid = _grid(raw, "eps_min_ev", "eps_max_ev", "n_eps")
    epsl_grid = _grid(raw, "epsl_min_ev", "epsl_max_ev", "n_epsl")

    if raw["tf_s"] is None:
        tf = 10.0 / phys.kappa
        raw["tf_s"] = units.au_to_s(tf)
    else:
        tf = units.s_to_au(raw["tf_s"])

    shape = PulseShape(
        kind=raw["pulse_shape"],
        tau=units.fs_to_au(raw["tau_fs"]),
        ramp=units.fs_to_au(raw["ramp_fs"]),
        t_delta=units.fs_to_au(raw["t_delta_fs"]),
        parity=raw["parity"],
    )
    if tf < shape.t1:
        raise ConfigError(f"tf_s ends before the pulse does ({raw['tf_s']} s)", key="tf_s")

    n_time = _resolve_n_time(phys, shape, eps_grid, epsl_grid, raw["n_time"])
    raw["n_time"] = n_time

    return RunConfig(
        physical=phys,
        pulse_shape=raw["pulse_shape"],
        tau=shape.tau,
        t_delta=shape.t_delta,
        ramp=shape.ramp,
        parity=raw["parity"],
        eps_grid=eps_grid,
        epsl_grid=epsl_grid,
        tf=tf,
        n_time=n_time,
        resolved=dict(sorted(raw.items())),
    )


def _grid(raw: Mapping[str, object], kmin: str, kmax: str, kn: str) -> EnergyGrid:
    lo = units.ev_to_au(raw[kmin])
    hi = units.ev_to_au(raw[kmax])
    if not hi > lo:
        raise ConfigError(f"{kmax} must exceed {kmin}", key=kmax)
    n = raw[kn]
    if n < 2:
        raise ConfigError(f"{kn} must be at least 2, got {n}", key=kn)
    return EnergyGrid(e_min=lo, e_max=hi, n=n)


def _resolve_n_time(
    phys: PhysicalConfig,
    shape: PulseShape,
    eps_grid: EnergyGrid,
    epsl_grid: EnergyGrid,
    requested: int | None,
) -> int:
    window = shape.t1 - shape.t0
    if requested is not None:
        if requested < 2:
            raise ConfigError(f"n_time must be at least 2, got {requested}", key="n_time")
        return requested
    max_phase = max(abs(eps_grid.e_min), abs(eps_grid.e_max)) + max(
        abs(epsl_grid.e_min), abs(epsl_grid.e_max)
    )
    dt = math.inf
    if phys.omega_rabi > 0:
        dt = phys.rabi_period / _STEPS_PER_RABI_PERIOD
    if max_phase > 0:
        dt = min(dt, _PHASE_PER_STEP / max_phase)
    if not math.isfinite(dt):
        return 401
    return max(401, int(math.ceil(window / dt)) + 1)


def default_config() -> RunConfig:
    return build_config()


def load_config(source: str | os.PathLike) -> RunConfig:
    """Load a config from a file path, from raw text, or the literal 'default'."""
    if isinstance(source, os.PathLike):
        path = os.fspath(source)
        if not os.path.exists(path):
            raise ConfigError(f"config file not found: {path}")
        with open(path) as fh:
            return build_config(parse_config_text(fh.read()))
    if source == "default":
        return default_config()
    if "\n" in source or "=" in source:
        return build_config(parse_config_text(source))
    if not os.path.exists(source):
        raise ConfigError(f"config file not found: {source}")
    with open(source) as fh:
        return build_config(parse_config_text(fh.read()))


def with_grids(config: RunConfig, eps_grid: EnergyGrid | None = None,
               epsl_grid: EnergyGrid | None = None) -> RunConfig:
    """Clone a config with replacement energy grids (resolved view untouched
    except for the grid keys)."""
    raw = dict(config.resolved)
    if eps_grid is not None:
        raw["eps_min_ev"] = units.au_to_ev(eps_grid.e_min)
        raw["eps_max_ev"] = units.au_to_ev(eps_grid.e_max)
        raw["n_eps"] = eps_grid.n
    if epsl_grid is not None:
        raw["epsl_min_ev"] = units.au_to_ev(epsl_grid.e_min)
        raw["epsl_max_ev"] = units.au_to_ev(epsl_grid.e_max)
        raw["n_epsl"] = epsl_grid.n
    raw["n_time"] = None
    return build_config(raw)
