"""Discrete-time quantum walk on a phase-space circle, driven either by
alternating coin/shift steps or by the joint coin+shift Hamiltonian."""

from .linalg import (
    DimensionMismatch,
    NoConvergence,
    NotHermitian,
    Spectrum,
    dft_matrix,
    hermitian_eig,
    kron,
    partial_trace_coin,
    partial_transpose_coin,
    unitary_exp,
)
from .metrics import TrajectoryReport, build_report, fit_growth, hellinger, negativity, negativity_pure
from .optimizer import OptimizationResult, c_ratio, objective, optimize
from .phase_space import (
    PhaseDistribution,
    WalkConfig,
    circular_stats,
    coherent_state,
    peak_separation,
    phase_distribution,
)
from .walk import (
    StepOperators,
    Trajectory,
    build_operators,
    dephasing_step,
    exact_step,
    run_trajectory,
    standard_step,
    trotter_step,
)

__version__ = "0.1.0"
