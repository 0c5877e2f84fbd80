from .model import (
    BINARY,
    CONTINUOUS,
    DEFAULT_TOL,
    EQ,
    GE,
    INTEGER,
    LE,
    MAXIMIZE,
    MINIMIZE,
    Constraint,
    FeasibilityReport,
    LinearExpr,
    MilpModel,
    ModelError,
    Variable,
    Violation,
)
from .mps import MpsSyntaxError, read_mps, render_mps, write_mps

__all__ = [
    "BINARY",
    "CONTINUOUS",
    "Constraint",
    "DEFAULT_TOL",
    "EQ",
    "FeasibilityReport",
    "GE",
    "INTEGER",
    "LE",
    "LinearExpr",
    "MAXIMIZE",
    "MINIMIZE",
    "MilpModel",
    "ModelError",
    "MpsSyntaxError",
    "Variable",
    "Violation",
    "read_mps",
    "render_mps",
    "write_mps",
]
