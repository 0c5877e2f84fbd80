from .bb import (
    BEST_BOUND,
    DEPTH_FIRST,
    FIRST_FRACTIONAL,
    MOST_FRACTIONAL,
    STATUS_FEASIBLE_GAP,
    STATUS_INFEASIBLE,
    STATUS_LIMIT,
    STATUS_OPTIMAL,
    STATUS_UNBOUNDED,
    LpResult,
    SolveOptions,
    SolveResult,
    SolverError,
    solve_bb,
    solve_lp,
)
from .external import (
    ExternalSolverError,
    default_external_command,
    parse_solution_file,
    solve,
    solve_external,
)
from .simplex import KERNEL_BACKEND, SimplexError, SimplexResult, simplex_solve

__all__ = [
    "BEST_BOUND",
    "DEPTH_FIRST",
    "FIRST_FRACTIONAL",
    "KERNEL_BACKEND",
    "MOST_FRACTIONAL",
    "STATUS_FEASIBLE_GAP",
    "STATUS_INFEASIBLE",
    "STATUS_LIMIT",
    "STATUS_OPTIMAL",
    "STATUS_UNBOUNDED",
    "ExternalSolverError",
    "LpResult",
    "SimplexError",
    "SimplexResult",
    "SolveOptions",
    "SolveResult",
    "SolverError",
    "default_external_command",
    "parse_solution_file",
    "simplex_solve",
    "solve",
    "solve_bb",
    "solve_external",
    "solve_lp",
]
