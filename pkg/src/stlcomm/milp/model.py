"""Solver-agnostic mixed-integer linear program representation.

A model is built incrementally (single writer), then finalised; a
finalised model is immutable and safe to share across threads.  Rows
store sparse coefficient lists keyed by variable id; within a row,
coefficients are kept in ascending variable-id order so that identical
build sequences produce byte-identical MPS output.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

CONTINUOUS = "continuous"
BINARY = "binary"
INTEGER = "integer"

LE = "<="
EQ = "=="
GE = ">="

MINIMIZE = "minimize"
MAXIMIZE = "maximize"

DEFAULT_TOL = 1e-6


class ModelError(ValueError):
    """Raised for malformed model mutations or queries."""


@dataclass(frozen=True)
class Variable:
    index: int
    name: str
    kind: str
    lower: float
    upper: float


@dataclass(frozen=True)
class Constraint:
    index: int
    name: str
    coeffs: tuple[tuple[int, float], ...]
    relation: str
    rhs: float


@dataclass(frozen=True)
class LinearExpr:
    """Sparse linear expression with an optional constant term."""

    coeffs: tuple[tuple[int, float], ...]
    constant: float = 0.0

    @staticmethod
    def of(terms: Mapping[int, float] | Iterable[tuple[int, float]],
           constant: float = 0.0) -> "LinearExpr":
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[int, float] = {}
        for var, coef in items:
            acc[var] = acc.get(var, 0.0) + float(coef)
        pruned = tuple(sorted((v, c) for v, c in acc.items() if c != 0.0))
        return LinearExpr(pruned, float(constant))

    def value(self, values: np.ndarray) -> float:
        return self.constant + sum(c * values[v] for v, c in self.coeffs)

    def scaled(self, factor: float) -> "LinearExpr":
        return LinearExpr(
            tuple((v, c * factor) for v, c in self.coeffs), self.constant * factor
        )

    def plus(self, other: "LinearExpr") -> "LinearExpr":
        acc: dict[int, float] = dict(self.coeffs)
        for v, c in other.coeffs:
            acc[v] = acc.get(v, 0.0) + c
        pruned = tuple(sorted((v, c) for v, c in acc.items() if c != 0.0))
        return LinearExpr(pruned, self.constant + other.constant)


@dataclass
class Violation:
    kind: str  # "bound" | "constraint" | "integrality"
    name: str
    amount: float


@dataclass
class FeasibilityReport:
    violations: list[Violation]
    objective: float

    @property
    def feasible(self) -> bool:
        return not self.violations


class MilpModel:
    """Mutable-until-finalised MILP with named rows and columns."""

    def __init__(self, name: str = "model"):
        self.name = name
        self.variables: list[Variable] = []
        self.constraints: list[Constraint] = []
        self.objective = LinearExpr(())
        self.sense = MINIMIZE
        self._var_names: dict[str, int] = {}
        self._con_names: dict[str, int] = {}
        self._finalized = False

    # -- construction ----------------------------------------------------

    def _check_mutable(self):
        if self._finalized:
            raise ModelError("model is finalised and immutable")

    def add_variable(
        self,
        name: str,
        kind: str = CONTINUOUS,
        lower: float = -np.inf,
        upper: float = np.inf,
    ) -> int:
        self._check_mutable()
        if name in self._var_names:
            raise ModelError(f"duplicate variable name {name!r}")
        if kind not in (CONTINUOUS, BINARY, INTEGER):
            raise ModelError(f"unknown variable kind {kind!r}")
        if kind == BINARY:
            lower, upper = 0.0, 1.0
        if lower > upper:
            raise ModelError(f"inverted bounds [{lower}, {upper}] on {name!r}")
        idx = len(self.variables)
        self.variables.append(Variable(idx, name, kind, float(lower), float(upper)))
        self._var_names[name] = idx
        return idx

    def add_constraint(
        self,
        name: str,
        coeffs: Mapping[int, float] | Iterable[tuple[int, float]],
        relation: str,
        rhs: float,
    ) -> int:
        self._check_mutable()
        if name in self._con_names:
            raise ModelError(f"duplicate constraint name {name!r}")
        if relation not in (LE, EQ, GE):
            raise ModelError(f"unknown relation {relation!r}")
        expr = LinearExpr.of(coeffs)
        for var, _ in expr.coeffs:
            if not 0 <= var < len(self.variables):
                raise ModelError(f"constraint {name!r} references unknown variable {var}")
        idx = len(self.constraints)
        self.constraints.append(
            Constraint(idx, name, expr.coeffs, relation, float(rhs))
        )
        self._con_names[name] = idx
        return idx

    def set_objective(self, expr: LinearExpr, sense: str = MINIMIZE):
        self._check_mutable()
        if sense not in (MINIMIZE, MAXIMIZE):
            raise ModelError(f"unknown objective sense {sense!r}")
        for var, _ in expr.coeffs:
            if not 0 <= var < len(self.variables):
                raise ModelError(f"objective references unknown variable {var}")
        self.objective = expr
        self.sense = sense

    def finalize(self) -> "MilpModel":
        self._finalized = True
        return self

    @property
    def finalized(self) -> bool:
        return self._finalized

    # -- queries -----------------------------------------------------------

    def variable_id(self, name: str) -> int:
        try:
            return self._var_names[name]
        except KeyError:
            raise ModelError(f"unknown variable {name!r}") from None

    def has_variable(self, name: str) -> bool:
        return name in self._var_names

    @property
    def num_variables(self) -> int:
        return len(self.variables)

    @property
    def num_constraints(self) -> int:
        return len(self.constraints)

    @property
    def integer_indices(self) -> list[int]:
        return [v.index for v in self.variables if v.kind in (BINARY, INTEGER)]

    def bounds_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        lb = np.array([v.lower for v in self.variables], dtype=float)
        ub = np.array([v.upper for v in self.variables], dtype=float)
        return lb, ub

    def objective_value(self, values: np.ndarray) -> float:
        return self.objective.value(values)

    # -- checking ----------------------------------------------------------

    def check_solution(
        self, assignment: Mapping[int, float] | np.ndarray, tol: float = DEFAULT_TOL
    ) -> FeasibilityReport:
        """List every bound, constraint, and integrality violation beyond tol.

        The assignment must cover every variable.
        """
        values = self._assignment_vector(assignment)
        violations: list[Violation] = []
        for v in self.variables:
            x = values[v.index]
            if x < v.lower - tol:
                violations.append(Violation("bound", v.name, v.lower - x))
            elif x > v.upper + tol:
                violations.append(Violation("bound", v.name, x - v.upper))
            if v.kind in (BINARY, INTEGER):
                frac = abs(x - round(x))
                if frac > tol:
                    violations.append(Violation("integrality", v.name, frac))
        for c in self.constraints:
            lhs = sum(coef * values[var] for var, coef in c.coeffs)
            if c.relation == LE and lhs > c.rhs + tol:
                violations.append(Violation("constraint", c.name, lhs - c.rhs))
            elif c.relation == GE and lhs < c.rhs - tol:
                violations.append(Violation("constraint", c.name, c.rhs - lhs))
            elif c.relation == EQ and abs(lhs - c.rhs) > tol:
                violations.append(Violation("constraint", c.name, abs(lhs - c.rhs)))
        return FeasibilityReport(violations, self.objective.value(values))

    def _assignment_vector(self, assignment) -> np.ndarray:
        if isinstance(assignment, np.ndarray):
            if assignment.shape != (len(self.variables),):
                raise ModelError(
                    f"assignment has {assignment.shape} values, "
                    f"model has {len(self.variables)} variables"
                )
            return assignment.astype(float)
        values = np.empty(len(self.variables))
        missing = []
        for v in self.variables:
            if v.index in assignment:
                values[v.index] = assignment[v.index]
            else:
                missing.append(v.name)
        if missing:
            raise ModelError(
                f"partial assignment: missing {len(missing)} variables "
                f"(first: {missing[:3]})"
            )
        return values
