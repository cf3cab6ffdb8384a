"""Source reconstruction for the 1-D heat equation with dynamic boundary conditions."""

__version__ = "0.1.0"

from .adjoint import AdjointTrajectory, TerminalResidual, adjoint_identity_gap, solve_adjoint
from .estimator import FinalTimeMap, LandweberSourceEstimator
from .exceptions import (
    GridMismatchError,
    NullSpaceDirectionError,
    PreconditionError,
    SolverInstabilityError,
)
from .fields import (
    BoundarySourcePair,
    ProductState,
    SpaceSource,
    SpatialGrid,
    TimeGrid,
    l2_space_norm,
    product_inner,
    product_norm,
    space_inner,
    spacetime_inner,
)
from .forward import (
    ProblemSetup,
    Trajectory,
    conservation_residual,
    default_setup,
    final_state,
    input_output,
    solve_forward,
    stability_gap,
)
from .landweber import (
    NOISE_MODES,
    LandweberConfig,
    Observation,
    TraceRow,
    ReconstructionTrace,
    error_metrics,
    make_observation,
    rate_bound_check,
    relaxation_alpha,
    run,
)
from .objective import (
    GradientField,
    TikhonovConfig,
    evaluate,
    gradient,
    lipschitz_constant,
    monotonicity_gap,
)
