from .external import ExternalSolverError, parse_dimacs, solve_external
from .solver import (
    DEFAULT_CONFLICT_BUDGET,
    CdclSolver,
    ModelVerificationError,
    SolveOutcome,
    SolverError,
    Verdict,
    check_model,
    solve,
)

__all__ = [
    "CdclSolver", "DEFAULT_CONFLICT_BUDGET", "ExternalSolverError", "ModelVerificationError",
    "SolveOutcome", "SolverError", "Verdict", "check_model", "parse_dimacs", "solve",
    "solve_external",
]
