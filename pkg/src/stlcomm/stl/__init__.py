from .ast import (
    Always,
    And,
    Eventually,
    Formula,
    FormulaError,
    Negation,
    Or,
    Predicate,
    TrueFormula,
    Until,
    conjoin,
    disjoin,
    formula_horizon,
)
from .builders import (
    DISJUNCTION,
    PAPER_CONJUNCTION,
    build_agent_formula,
    build_goal_formula,
    build_safety_formula,
)
from .monitor import Signal, SignalError, eval_monitor
from .parser import ParseError, format_formula, parse_formula

__all__ = [
    "Always",
    "And",
    "DISJUNCTION",
    "Eventually",
    "Formula",
    "FormulaError",
    "Negation",
    "Or",
    "PAPER_CONJUNCTION",
    "ParseError",
    "Predicate",
    "Signal",
    "SignalError",
    "TrueFormula",
    "Until",
    "build_agent_formula",
    "build_goal_formula",
    "build_safety_formula",
    "conjoin",
    "disjoin",
    "eval_monitor",
    "format_formula",
    "formula_horizon",
    "parse_formula",
]
