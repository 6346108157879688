"""Entanglement dynamics of a laser-ionized atom, desk scale.

The package follows the physics pipeline: a pulse ionizes the atom
(electron-ion entanglement), the ion decays and emits a photon
(electron-ion-photon entanglement), and after the decay the remaining
correlation lives between the electron and the photon number.  Amplitudes
come from closed-form integrals on energy grids; an independent Runge-Kutta
propagator cross-checks them; conditioned density matrices and entropy /
concurrence measures sit on top; experiment drivers and a CLI produce the
data files.
"""

__version__ = "0.1.0"

from .amplitudes import AmplitudeSet, Populations, evaluate, populations
from .conditioning import (
    ReducedDensity,
    rho_electron_ion,
    rho_electron_photon_number,
    rho_modes,
    rho_qutrit,
    rho_ququart,
)
from .config import RunConfig, build_config, default_config, load_config, with_grids
from .errors import (
    ConfigError,
    ConvergenceError,
    GridMismatchError,
    IonentError,
    MeasureError,
    NonHermitianError,
    StepSizeError,
    UndefinedConditionError,
    ValidationGateError,
)
from .experiments import (
    run_duration_sweep,
    run_population_trace,
    run_transfer_trace,
    run_two_pulse_suite,
)
from .measures import concurrence, density_spectrum, hermitian_eigenvalues, von_neumann_entropy
from .observables import (
    find_peaks,
    fluorescence_spectrum,
    overlap_coefficient,
    photoelectron_spectrum,
)
from .propagator import oracle_compare, rk4_propagate
from .pulse import PulseShape
from .units import EnergyGrid, TimeGrid

__all__ = [
    "__version__",
    "AmplitudeSet",
    "ConfigError",
    "ConvergenceError",
    "EnergyGrid",
    "GridMismatchError",
    "IonentError",
    "MeasureError",
    "NonHermitianError",
    "Populations",
    "PulseShape",
    "ReducedDensity",
    "RunConfig",
    "StepSizeError",
    "TimeGrid",
    "UndefinedConditionError",
    "ValidationGateError",
    "build_config",
    "concurrence",
    "default_config",
    "density_spectrum",
    "evaluate",
    "find_peaks",
    "fluorescence_spectrum",
    "hermitian_eigenvalues",
    "load_config",
    "oracle_compare",
    "overlap_coefficient",
    "photoelectron_spectrum",
    "populations",
    "rho_electron_ion",
    "rho_electron_photon_number",
    "rho_modes",
    "rho_qutrit",
    "rho_ququart",
    "run_duration_sweep",
    "run_population_trace",
    "run_transfer_trace",
    "run_two_pulse_suite",
    "von_neumann_entropy",
    "with_grids",
]
