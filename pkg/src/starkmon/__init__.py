"""starkmon: quantum trajectories of a monitored, feedback-steered
free-fermion chain with a linear (Wannier-Stark) tilt.

The package simulates stochastic Schrodinger evolution of Slater
determinants under bond monitoring with phase feedback, computes the
entanglement / transport observables of the resulting ensembles, and
provides the finite-size analysis (log-law fits, transition-time
estimates via curve crossing and data collapse) plus a CLI that writes
CSV/JSON artifacts for downstream plotting.
"""

__version__ = "0.1.0"

from .model import (
    BondMode,
    ConfigurationError,
    ModelParams,
    build_effective_hamiltonian,
    build_hamiltonian,
    build_jump_modes,
    make_params,
)
from .gaussian import (
    EmptyQuasimodeError,
    RankDeficientError,
    SlaterState,
    apply_jump,
    correlation_matrix,
    domain_wall_state,
    neel_state,
    orthonormalize,
    overlap,
)
from .trajectory import (
    ObservableSeries,
    TrajectoryFailure,
    TrajectorySchedule,
    evolve_trajectory,
    jump_probabilities,
    make_propagator,
)
from .backend import active_backend, available_backends, get_kernel
from .ensemble import (
    EnsembleStatistics,
    ExcessiveFailures,
    mean_position,
    run_ensemble,
    trajectory_seed,
    velocity_from_density,
)
from .scaling import (
    Curve,
    LogLawFit,
    SizeSweep,
    TransitionEstimate,
    collapse_cost,
    estimate_transition_time,
    fit_log_law,
    log_law_at,
)

__all__ = [
    "BondMode",
    "ConfigurationError",
    "Curve",
    "EmptyQuasimodeError",
    "EnsembleStatistics",
    "ExcessiveFailures",
    "LogLawFit",
    "ModelParams",
    "ObservableSeries",
    "RankDeficientError",
    "SizeSweep",
    "SlaterState",
    "TrajectoryFailure",
    "TrajectorySchedule",
    "TransitionEstimate",
    "__version__",
    "active_backend",
    "apply_jump",
    "available_backends",
    "build_effective_hamiltonian",
    "build_hamiltonian",
    "build_jump_modes",
    "collapse_cost",
    "correlation_matrix",
    "domain_wall_state",
    "estimate_transition_time",
    "evolve_trajectory",
    "fit_log_law",
    "get_kernel",
    "jump_probabilities",
    "log_law_at",
    "make_params",
    "make_propagator",
    "mean_position",
    "neel_state",
    "orthonormalize",
    "overlap",
    "run_ensemble",
    "trajectory_seed",
    "velocity_from_density",
]
