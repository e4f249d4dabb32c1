"""Steady state, linear stability and stationary entanglement of a driven
three-mode optomechanical loop: one cavity mode coupled to two mechanical
resonators that exchange phonons through a phase-modulated hopping term,
with a Duffing nonlinearity on the first resonator.

Workflow: :func:`steady_state` converges the mean amplitudes, the dynamics
module linearizes around them, :func:`solve_lyapunov` yields the stationary
covariance, and :func:`log_negativity` quantifies bipartite entanglement.
The sweep module evaluates the pipeline over parameter grids, including
presets for the published stability maps and entanglement curves.
"""

from .errors import (
    ConfigError,
    ConvergenceError,
    DivergenceError,
    GaugeError,
    NumericalError,
    PreconditionError,
    TrimodeError,
    UnstableSystemError,
)
from .model import (
    MeanFields,
    SystemParams,
    mean_field_residual,
    steady_state,
    thermal_occupancy,
)
from .dynamics import (
    LinearModel,
    StabilityReport,
    assess_stability,
    complex_matrix,
    drift_matrix,
    hurwitz_stable,
    linear_model,
    noise_matrix,
)
from .gaussian import (
    Bipartition,
    BipartiteBlock,
    CovarianceMatrix,
    DarkModeCoupling,
    dark_mode_coupling,
    log_negativity,
    nu_minus,
    reduce_bipartite,
    solve_lyapunov,
    symplectic_eigenvalues,
)
from .sweep import (
    PointResult,
    SweepAxis,
    SweepRecord,
    SweepSpec,
    emit_results,
    evaluate_point,
    figure_preset,
    run_sweep,
)

__version__ = "0.1.0"

__all__ = [
    "Bipartition",
    "BipartiteBlock",
    "ConfigError",
    "ConvergenceError",
    "CovarianceMatrix",
    "DarkModeCoupling",
    "DivergenceError",
    "GaugeError",
    "LinearModel",
    "MeanFields",
    "NumericalError",
    "PointResult",
    "PreconditionError",
    "StabilityReport",
    "SweepAxis",
    "SweepRecord",
    "SweepSpec",
    "SystemParams",
    "TrimodeError",
    "UnstableSystemError",
    "assess_stability",
    "complex_matrix",
    "dark_mode_coupling",
    "drift_matrix",
    "emit_results",
    "evaluate_point",
    "figure_preset",
    "hurwitz_stable",
    "linear_model",
    "log_negativity",
    "mean_field_residual",
    "noise_matrix",
    "nu_minus",
    "reduce_bipartite",
    "run_sweep",
    "solve_lyapunov",
    "steady_state",
    "symplectic_eigenvalues",
    "thermal_occupancy",
    "__version__",
]
