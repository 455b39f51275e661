"""Four-rod endcap trap: geometry, electrostatics, and field analysis."""
from .fields import (
    DegenerateAxisError,
    FieldTrace,
    PolyFitReport,
    analytic_field_at,
    central_gradient_tensor,
    default_sample_point,
    extract_effective_theta,
    field_trace,
    fit_diagonal_potential,
    frame_rotation,
    grid_to_csv,
    measure_diagonal_angle,
    tilted_gradient_tensor,
    trace_to_csv,
)
from .geometry import Rod, TrapModel, default_trap, load_trap, trap_from_dict
from .solver import (
    PotentialGrid,
    SolverConvergenceError,
    laplace_solve,
    solve_dirichlet_box,
    sor_solve,
)

__all__ = [
    "Rod", "TrapModel", "default_trap", "load_trap", "trap_from_dict",
    "PotentialGrid", "SolverConvergenceError", "laplace_solve",
    "solve_dirichlet_box", "sor_solve",
    "FieldTrace", "PolyFitReport", "DegenerateAxisError",
    "frame_rotation", "tilted_gradient_tensor", "analytic_field_at",
    "field_trace", "default_sample_point", "fit_diagonal_potential",
    "extract_effective_theta", "central_gradient_tensor",
    "measure_diagonal_angle", "trace_to_csv", "grid_to_csv",
]
