"""Boolean monitor for bounded-time STL over finite discrete signals."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

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
)


class SignalError(ValueError):
    """Raised for malformed signals or out-of-range evaluation requests."""


@dataclass(frozen=True)
class Signal:
    """Finite discrete-time signal: one real vector per sample index.

    ``dt`` is metadata only; all temporal semantics use integer indices.
    """

    samples: np.ndarray
    dt: float = 1.0

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=float)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        if arr.ndim != 2:
            raise SignalError("signal samples must be a (steps, dim) array")
        if arr.shape[0] < 1:
            raise SignalError("signal needs at least one sample")
        object.__setattr__(self, "samples", arr)

    @property
    def step_count(self) -> int:
        return self.samples.shape[0]

    @property
    def dim(self) -> int:
        return self.samples.shape[1]

    def at(self, t: int) -> np.ndarray:
        return self.samples[t]


def eval_monitor(formula: Formula, signal: Signal, t: int = 0) -> bool:
    """Decide whether ``signal`` satisfies ``formula`` at index ``t``.

    Strict predicates require mu > 0, non-strict mu >= 0.  Raises
    SignalError when the signal is too short for the formula horizon.
    """
    if t < 0:
        raise SignalError(f"negative evaluation index {t}")
    needed = t + formula.horizon()
    if needed >= signal.step_count:
        raise SignalError(
            f"signal too short: index {t} plus horizon {formula.horizon()} "
            f"needs {needed + 1} samples, signal has {signal.step_count}"
        )
    cache: dict[tuple[int, int], bool] = {}
    return _eval(formula, signal, t, cache)


def _eval(f: Formula, x: Signal, t: int, cache: dict[tuple[int, int], bool]) -> bool:
    key = (id(f), t)
    hit = cache.get(key)
    if hit is not None:
        return hit
    if isinstance(f, TrueFormula):
        out = True
    elif isinstance(f, Predicate):
        out = f.holds(x.at(t))
    elif isinstance(f, Negation):
        out = not _eval(f.child, x, t, cache)
    elif isinstance(f, And):
        out = all(_eval(c, x, t, cache) for c in f.operands)
    elif isinstance(f, Or):
        out = any(_eval(c, x, t, cache) for c in f.operands)
    elif isinstance(f, Always):
        out = all(_eval(f.child, x, tp, cache) for tp in range(t + f.a, t + f.b + 1))
    elif isinstance(f, Eventually):
        out = any(_eval(f.child, x, tp, cache) for tp in range(t + f.a, t + f.b + 1))
    elif isinstance(f, Until):
        out = False
        for tp in range(t + f.a, t + f.b + 1):
            if _eval(f.right, x, tp, cache) and all(
                _eval(f.left, x, tpp, cache) for tpp in range(t, tp + 1)
            ):
                out = True
                break
    else:
        raise FormulaError(f"unknown formula node {type(f).__name__}")
    cache[key] = out
    return out
