"""Bounded-time STL syntax trees over affine predicates.

Formulas are kept in negation normal form: negation is only allowed
directly on atomic predicates.  Temporal intervals are integer sample
indices; the sample period is carried as signal metadata only.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence


class FormulaError(ValueError):
    """Raised when a formula violates a structural invariant."""


class Formula:
    """Base class for STL formula nodes. All nodes are immutable."""

    kind: str = "?"

    def horizon(self) -> int:
        """Number of future steps needed to decide satisfaction at an index.

        Satisfaction at index t depends only on samples t .. t + horizon().
        """
        raise NotImplementedError

    def children(self) -> tuple["Formula", ...]:
        return ()

    def walk(self) -> Iterator["Formula"]:
        """Yield this node and all descendants, depth first."""
        yield self
        for child in self.children():
            yield from child.walk()


@dataclass(frozen=True)
class TrueFormula(Formula):
    """The constant-true formula."""

    kind = "True"

    def horizon(self) -> int:
        return 0


@dataclass(frozen=True)
class Predicate(Formula):
    """Affine atomic predicate over one sample of the signal.

    With mu(x) = coeffs . x + offset, the predicate holds when mu(x) > 0
    (strict) or mu(x) >= 0 (non-strict).
    """

    coeffs: tuple[float, ...]
    offset: float
    strict: bool = True

    kind = "Predicate"

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        object.__setattr__(self, "offset", float(self.offset))
        if not any(c != 0.0 for c in self.coeffs):
            raise FormulaError("predicate needs at least one nonzero coefficient")

    @property
    def dim(self) -> int:
        return len(self.coeffs)

    def mu(self, sample: Sequence[float]) -> float:
        if len(sample) != len(self.coeffs):
            raise FormulaError(
                f"sample dimension {len(sample)} != predicate dimension {len(self.coeffs)}"
            )
        return sum(c * v for c, v in zip(self.coeffs, sample)) + self.offset

    def holds(self, sample: Sequence[float]) -> bool:
        value = self.mu(sample)
        return value > 0.0 if self.strict else value >= 0.0

    def negated(self) -> "Predicate":
        """The complement predicate: not(mu > 0) == (-mu >= 0), and vice versa."""
        return Predicate(
            tuple(-c for c in self.coeffs), -self.offset, strict=not self.strict
        )

    def horizon(self) -> int:
        return 0


@dataclass(frozen=True)
class Negation(Formula):
    """Negated atomic predicate (negation normal form admits nothing else)."""

    child: Predicate

    kind = "NegPredicate"

    def __post_init__(self):
        if not isinstance(self.child, Predicate):
            raise FormulaError("negation applies only to predicates")

    def children(self) -> tuple[Formula, ...]:
        return (self.child,)

    def horizon(self) -> int:
        return 0


def _check_interval(a: int, b: int) -> tuple[int, int]:
    a, b = int(a), int(b)
    if a < 0 or b < 0:
        raise FormulaError(f"interval bounds must be non-negative, got [{a},{b}]")
    if a > b:
        raise FormulaError(f"empty interval [{a},{b}]")
    return a, b


@dataclass(frozen=True)
class And(Formula):
    operands: tuple[Formula, ...]

    kind = "And"

    def __post_init__(self):
        object.__setattr__(self, "operands", tuple(self.operands))
        if len(self.operands) < 2:
            raise FormulaError("And needs at least two operands")

    def children(self) -> tuple[Formula, ...]:
        return self.operands

    def horizon(self) -> int:
        return max(child.horizon() for child in self.operands)


@dataclass(frozen=True)
class Or(Formula):
    operands: tuple[Formula, ...]

    kind = "Or"

    def __post_init__(self):
        object.__setattr__(self, "operands", tuple(self.operands))
        if len(self.operands) < 2:
            raise FormulaError("Or needs at least two operands")

    def children(self) -> tuple[Formula, ...]:
        return self.operands

    def horizon(self) -> int:
        return max(child.horizon() for child in self.operands)


@dataclass(frozen=True)
class Always(Formula):
    child: Formula
    a: int
    b: int

    kind = "Always"

    def __post_init__(self):
        a, b = _check_interval(self.a, self.b)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def children(self) -> tuple[Formula, ...]:
        return (self.child,)

    def horizon(self) -> int:
        return self.b + self.child.horizon()


@dataclass(frozen=True)
class Eventually(Formula):
    child: Formula
    a: int
    b: int

    kind = "Eventually"

    def __post_init__(self):
        a, b = _check_interval(self.a, self.b)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def children(self) -> tuple[Formula, ...]:
        return (self.child,)

    def horizon(self) -> int:
        return self.b + self.child.horizon()


@dataclass(frozen=True)
class Until(Formula):
    left: Formula
    right: Formula
    a: int
    b: int

    kind = "Until"

    def __post_init__(self):
        a, b = _check_interval(self.a, self.b)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def children(self) -> tuple[Formula, ...]:
        return (self.left, self.right)

    def horizon(self) -> int:
        return self.b + max(self.left.horizon(), self.right.horizon())


def conjoin(operands: Sequence[Formula]) -> Formula:
    """And over a possibly short list: [] -> True, [f] -> f."""
    operands = list(operands)
    if not operands:
        return TrueFormula()
    if len(operands) == 1:
        return operands[0]
    return And(tuple(operands))


def disjoin(operands: Sequence[Formula]) -> Formula:
    """Or over a possibly short list; [] is rejected (an empty Or is false,
    which the NNF grammar has no literal for)."""
    operands = list(operands)
    if not operands:
        raise FormulaError("disjunction of nothing")
    if len(operands) == 1:
        return operands[0]
    return Or(tuple(operands))


def formula_horizon(formula: Formula) -> int:
    """Minimal number of future steps the formula can look at."""
    return formula.horizon()
