"""zenodyn: quantum Zeno dynamics on finite-dimensional systems.

Implements the three physically equivalent Zeno procedures -- pulsed
projective measurements, unitary kicks, and strong continuous coupling
-- together with their exact limiting evolutions (Zeno subspaces and
the Zeno Hamiltonian), a library of reference models with closed-form
survival probabilities, and a CSV-emitting experiment CLI (``zeno``).
"""

from .engine import (
    CouplingSpec,
    KickSpec,
    PulsedSpec,
    ZenoSplit,
    continuous_evolve,
    continuous_limit,
    convergence_profile,
    dephase,
    effective_decay_rate,
    kicked_evolve,
    kicked_limit,
    nonselective_evolve,
    offdiagonal_leakage,
    pulsed_limit_evolution,
    pulsed_selective_evolve,
    survival_amplitude,
    survival_probability,
    survival_probability_density,
    zeno_hamiltonian,
    zeno_limit_nonselective,
    zeno_time,
)
from .errors import (
    ExceptionalPointError,
    IntegrityError,
    NumericalError,
    PreconditionError,
    SingularityError,
    StructuralError,
    SurvivalUnderflowError,
    UsageError,
    ZenodynError,
)
from .linalg import (
    Operator,
    ProjectorFamily,
    QuantumState,
    SpectralProjector,
    eig_hermitian,
    operator_distance,
    propagator,
    spectral_norm,
    spectral_projections,
)
from .config import ExperimentConfig, SweepSpec, load_config, parse_config
from .models import (
    MODEL_NAMES,
    ModelParams,
    basis_labels,
    closed_form_rabi,
    closed_form_sp3,
    closed_form_sp3s,
    closed_form_two_level_decay,
    control_operator,
    coupling_base,
    four_level,
    qubit_rabi_generator,
    rabi_two_level,
    three_level_dissipative,
    three_level_ideal,
    two_level_effective,
)
from .presets import PRESET_NAMES, build_preset
from .runner import ExperimentResult, describe_subspaces, run_experiment, run_sweep
from .timeseries import TimeSeries, format_float

__version__ = "0.1.0"

__all__ = [
    "CouplingSpec",
    "ExceptionalPointError",
    "ExperimentConfig",
    "ExperimentResult",
    "IntegrityError",
    "KickSpec",
    "MODEL_NAMES",
    "ModelParams",
    "NumericalError",
    "Operator",
    "PRESET_NAMES",
    "PreconditionError",
    "ProjectorFamily",
    "PulsedSpec",
    "QuantumState",
    "SingularityError",
    "SpectralProjector",
    "StructuralError",
    "SurvivalUnderflowError",
    "SweepSpec",
    "TimeSeries",
    "UsageError",
    "ZenoSplit",
    "ZenodynError",
    "basis_labels",
    "build_preset",
    "closed_form_rabi",
    "closed_form_sp3",
    "closed_form_sp3s",
    "closed_form_two_level_decay",
    "continuous_evolve",
    "continuous_limit",
    "control_operator",
    "convergence_profile",
    "coupling_base",
    "dephase",
    "describe_subspaces",
    "effective_decay_rate",
    "eig_hermitian",
    "format_float",
    "four_level",
    "kicked_evolve",
    "kicked_limit",
    "load_config",
    "nonselective_evolve",
    "offdiagonal_leakage",
    "operator_distance",
    "parse_config",
    "propagator",
    "pulsed_limit_evolution",
    "pulsed_selective_evolve",
    "qubit_rabi_generator",
    "rabi_two_level",
    "run_experiment",
    "run_sweep",
    "spectral_norm",
    "spectral_projections",
    "survival_amplitude",
    "survival_probability",
    "survival_probability_density",
    "three_level_dissipative",
    "three_level_ideal",
    "two_level_effective",
    "zeno_hamiltonian",
    "zeno_limit_nonselective",
    "zeno_time",
]
