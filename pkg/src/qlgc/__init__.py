"""qlgc: compile ladder-system unitaries into resonant pulse schedules.

The toolchain factorizes an N x N target unitary into elementary
rotation factors (one resonant pulse each), synthesizes square-wave or
Gaussian pulse schedules realizing them, and simulates the driven
dynamics both analytically and with an ODE integrator.
"""

from .constants import C_LIGHT, EPSILON_0, HBAR
from .decompose import (
    ANGLE_EPS,
    Factorization,
    decompose_mod_phase,
    elimination_step,
    eliminate_phases,
    factor_product,
    factorization_from_json,
    factorization_to_json,
    reconstruct,
)
from .dynamics import (
    QuantumState,
    TimeSeries,
    coherence_pairs,
    density_state,
    free_propagator,
    ground_state,
    observables,
    propagate_ode,
    propagate_piecewise,
    pure_state,
)
from .linalg import (
    DiagonalPhases,
    RotationFactor,
    factor_matrix,
    gram_schmidt_extend,
    hermitian_eigensystem,
    matrix_from_json,
    matrix_to_json,
    unitarity_defect,
    wrap_angle,
)
from .pulses import (
    GWP,
    SWP,
    FixedAmplitude,
    FixedDuration,
    PulseSchedule,
    PulseSpec,
    ValidationReport,
    amplitude_for_area,
    duration_for_amplitude,
    envelope,
    schedule_from_factorization,
    schedule_from_json,
    schedule_to_json,
    total_duration_bound,
    validate_schedule,
    window_area_fraction,
)
from .schemes import (
    SchemeResult,
    inversion_scheme,
    kinematical_bound,
    observable_max_scheme,
    phase_sensitivity_probe,
    population_transfer_scheme,
    superposition_phase_solution,
    superposition_scheme,
    transition_dipole_observable,
)
from .systems import (
    LevelSystem,
    ValidityBudget,
    build_ladder_system,
    get_system,
    hf4_preset,
    min_detuning,
    morse_system,
    rb4_preset,
    system_from_json,
    system_to_json,
    validity_budget,
)

__version__ = "0.1.0"

__all__ = [
    "ANGLE_EPS",
    "C_LIGHT",
    "DiagonalPhases",
    "EPSILON_0",
    "Factorization",
    "FixedAmplitude",
    "FixedDuration",
    "GWP",
    "HBAR",
    "LevelSystem",
    "PulseSchedule",
    "PulseSpec",
    "QuantumState",
    "RotationFactor",
    "SWP",
    "SchemeResult",
    "TimeSeries",
    "ValidationReport",
    "ValidityBudget",
    "amplitude_for_area",
    "build_ladder_system",
    "coherence_pairs",
    "decompose_mod_phase",
    "density_state",
    "duration_for_amplitude",
    "eliminate_phases",
    "elimination_step",
    "envelope",
    "factor_matrix",
    "factor_product",
    "factorization_from_json",
    "factorization_to_json",
    "free_propagator",
    "get_system",
    "gram_schmidt_extend",
    "ground_state",
    "hermitian_eigensystem",
    "hf4_preset",
    "inversion_scheme",
    "kinematical_bound",
    "matrix_from_json",
    "matrix_to_json",
    "min_detuning",
    "morse_system",
    "observable_max_scheme",
    "observables",
    "phase_sensitivity_probe",
    "population_transfer_scheme",
    "propagate_ode",
    "propagate_piecewise",
    "pure_state",
    "rb4_preset",
    "reconstruct",
    "schedule_from_factorization",
    "schedule_from_json",
    "schedule_to_json",
    "superposition_phase_solution",
    "superposition_scheme",
    "system_from_json",
    "system_to_json",
    "total_duration_bound",
    "transition_dipole_observable",
    "unitarity_defect",
    "validate_schedule",
    "validity_budget",
    "window_area_fraction",
    "wrap_angle",
]
