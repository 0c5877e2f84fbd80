"""Bounded-variable primal simplex with a dense tableau.

Correctness-first LP engine for desk-scale models: two phases with
artificial variables, Dantzig pricing with a Bland's-rule fallback after
a degenerate stall, periodic refactorisation, and a from-scratch
verification pass before claiming optimality.  The pivot kernels come
from the compiled extension when available, else the numpy fallback.

Status codes per column: at-lower / at-upper / free-at-zero / basic /
fixed (see the kernel module).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

try:  # compiled kernels, built by setup.py
    from . import _pivot_c as _kern

    KERNEL_BACKEND = "cython"
except ImportError:  # pragma: no cover - depends on build environment
    from . import _pivot_py as _kern

    KERNEL_BACKEND = "python"

from ._pivot_py import AT_LOWER, AT_UPPER, BASIC, FIXED, FREE

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_REL_LE = 0
_REL_EQ = 1
_REL_GE = 2


class SimplexError(RuntimeError):
    """Numerical failure that survived the configured refactorisation retries."""


@dataclass
class SimplexResult:
    status: str
    x: np.ndarray | None
    objective: float
    iterations: int


def _initial_value(lo: float, up: float) -> tuple[float, int]:
    if lo == up:
        return lo, FIXED
    if np.isfinite(lo):
        return lo, AT_LOWER
    if np.isfinite(up):
        return up, AT_UPPER
    return 0.0, FREE


def simplex_solve(
    c: np.ndarray,
    A: np.ndarray,
    rel: np.ndarray,
    rhs: np.ndarray,
    lb: np.ndarray,
    ub: np.ndarray,
    tol: float = 1e-9,
    feas_tol: float = 1e-7,
    max_iter: int | None = None,
    stall_threshold: int = 300,
    refresh_every: int = 400,
) -> SimplexResult:
    """Minimise c.x subject to A x (<=,==,>=) rhs and lb <= x <= ub.

    ``rel`` holds the per-row relation codes 0/1/2 for <=, ==, >=.
    """
    c = np.asarray(c, dtype=float)
    A = np.asarray(A, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    m, n = A.shape if A.ndim == 2 else (0, c.size)
    if m == 0:
        return _solve_bounds_only(c, lb, ub)

    if np.any(lb > ub):
        return SimplexResult(INFEASIBLE, None, np.inf, 0)

    total = n + 2 * m  # vars, slacks, artificials
    lb_all = np.full(total, -np.inf)
    ub_all = np.full(total, np.inf)
    lb_all[:n] = lb
    ub_all[:n] = ub
    for i in range(m):
        j = n + i
        if rel[i] == _REL_LE:
            lb_all[j], ub_all[j] = 0.0, np.inf
        elif rel[i] == _REL_GE:
            lb_all[j], ub_all[j] = -np.inf, 0.0
        else:
            lb_all[j], ub_all[j] = 0.0, 0.0
    lb_all[n + m :] = 0.0  # artificials

    values = np.zeros(total)
    status = np.zeros(total, dtype=np.int8)
    for j in range(n + m):
        values[j], status[j] = _initial_value(lb_all[j], ub_all[j])

    A_std = np.zeros((m, total))
    A_std[:, :n] = A
    A_std[:, n : n + m] = np.eye(m)
    b = rhs.astype(float).copy()

    residual = b - A_std[:, : n + m] @ values[: n + m]
    flip = residual < 0
    A_std[flip, :] *= -1.0
    b[flip] *= -1.0
    A_std[:, n + m :] = np.eye(m)

    basis = np.arange(n + m, total)
    status[basis] = BASIC
    xB = np.abs(residual)

    state = _State(A_std, b, basis, status, values, xB, lb_all, ub_all, n, m)
    if max_iter is None:
        max_iter = 2000 + 200 * (m + n)

    # Phase 1: drive artificial infeasibility to zero.
    cost1 = np.zeros(total)
    cost1[n + m :] = 1.0
    state.T = A_std.copy()
    state.dj = cost1 - state.T.sum(axis=0)  # c_B = 1 on every basic artificial
    state.cost = cost1
    outcome = _optimize(state, tol, max_iter, stall_threshold, refresh_every,
                        phase=1)
    if outcome == "iterlimit":
        raise SimplexError("phase 1 iteration limit hit")
    art_values = state.xB[state.basis >= n + m]
    if art_values.size and float(np.sum(np.abs(art_values))) > feas_tol * (1.0 + np.abs(b).max()):
        return SimplexResult(INFEASIBLE, None, np.inf, state.iterations)

    _pin_artificials(state, tol)

    # Phase 2: the real objective.
    cost2 = np.zeros(total)
    cost2[:n] = c
    state.cost = cost2
    state.refresh()
    outcome = _optimize(state, tol, max_iter, stall_threshold, refresh_every,
                        phase=2)
    if outcome == "iterlimit":
        raise SimplexError("phase 2 iteration limit hit")
    if outcome == UNBOUNDED:
        return SimplexResult(UNBOUNDED, None, -np.inf, state.iterations)

    # Verify against a from-scratch refactorisation; retry with Bland's rule
    # from the current basis if the incremental state drifted.
    for attempt in range(2):
        state.refresh()
        if state.primal_feasible(feas_tol) and state.dual_feasible(10.0 * feas_tol):
            break
        outcome = _optimize(state, tol, max_iter, stall_threshold,
                            refresh_every, phase=2, force_bland=attempt == 1)
        if outcome == UNBOUNDED:
            return SimplexResult(UNBOUNDED, None, -np.inf, state.iterations)
    else:
        state.refresh()
        if not (state.primal_feasible(feas_tol) and state.dual_feasible(10.0 * feas_tol)):
            raise SimplexError("numerical failure: could not certify optimality")

    x = state.extract(n)
    objective = float(c @ x)
    return SimplexResult(OPTIMAL, x, objective, state.iterations)


def _solve_bounds_only(c, lb, ub) -> SimplexResult:
    x = np.zeros_like(c)
    for j, cj in enumerate(c):
        if cj > 0:
            if not np.isfinite(lb[j]):
                return SimplexResult(UNBOUNDED, None, -np.inf, 0)
            x[j] = lb[j]
        elif cj < 0:
            if not np.isfinite(ub[j]):
                return SimplexResult(UNBOUNDED, None, -np.inf, 0)
            x[j] = ub[j]
        else:
            x[j], _ = _initial_value(lb[j], ub[j])
    if np.any(lb > ub):
        return SimplexResult(INFEASIBLE, None, np.inf, 0)
    return SimplexResult(OPTIMAL, x, float(c @ x), 0)


class _State:
    def __init__(self, A_std, b, basis, status, values, xB, lb, ub, n, m):
        self.A_std = A_std
        self.b = b
        self.basis = basis
        self.status = status
        self.values = values  # nonbasic values (basic entries stale)
        self.xB = xB
        self.lb = lb
        self.ub = ub
        self.n = n
        self.m = m
        self.T = A_std.copy()
        self.dj = np.zeros(A_std.shape[1])
        self.cost = np.zeros(A_std.shape[1])
        self.iterations = 0

    def refresh(self):
        """Recompute tableau, reduced costs, and basic values from scratch."""
        B = self.A_std[:, self.basis]
        try:
            self.T = np.linalg.solve(B, self.A_std)
        except np.linalg.LinAlgError as exc:
            raise SimplexError(f"singular basis during refactorisation: {exc}") from exc
        nb_value = self.values.copy()
        nb_value[self.basis] = 0.0
        rhs_eff = self.b - self.A_std @ nb_value
        self.xB = np.linalg.solve(B, rhs_eff)
        cB = self.cost[self.basis]
        self.dj = self.cost - cB @ self.T

    def primal_feasible(self, tol: float) -> bool:
        lbB = self.lb[self.basis]
        ubB = self.ub[self.basis]
        scale = 1.0 + np.abs(self.xB).max(initial=0.0)
        return bool(
            np.all(self.xB >= lbB - tol * scale)
            and np.all(self.xB <= ubB + tol * scale)
        )

    def dual_feasible(self, tol: float) -> bool:
        scale = 1.0 + np.abs(self.cost).max(initial=0.0)
        j = _kern.choose_entering(self.dj, self.status, tol * scale, False)
        return j < 0

    def extract(self, n: int) -> np.ndarray:
        full = self.values.copy()
        full[self.basis] = self.xB
        return full[:n]


def _pin_artificials(state: _State, tol: float):
    """After phase 1: fix artificials at zero and pivot basic ones out
    where a usable pivot exists (rows without one are redundant)."""
    n, m = state.n, state.m
    art_start = n + m
    state.lb[art_start:] = 0.0
    state.ub[art_start:] = 0.0
    for j in range(art_start, state.A_std.shape[1]):
        if state.status[j] != BASIC:
            state.status[j] = FIXED
            state.values[j] = 0.0
    for r in range(m):
        j = state.basis[r]
        if j < art_start:
            continue
        row = state.T[r, :art_start]
        candidates = np.flatnonzero(np.abs(row) > 1e-7)
        usable = [k for k in candidates if state.status[k] in (AT_LOWER, AT_UPPER, FREE)]
        if not usable:
            continue  # redundant row; artificial stays basic at zero
        k = usable[0]
        enter_val = state.values[k]
        _kern.pivot_update(state.T, state.dj, r, k)
        state.status[j] = FIXED
        state.values[j] = 0.0
        state.status[k] = BASIC
        state.basis[r] = k
        state.xB[r] = enter_val


def _optimize(state: _State, tol, max_iter, stall_threshold, refresh_every,
              phase: int, force_bland: bool = False) -> str:
    stall = 0
    bland = force_bland
    since_refresh = 0
    while state.iterations < max_iter:
        j = _kern.choose_entering(state.dj, state.status, tol, bland)
        if j < 0:
            return OPTIMAL
        state.iterations += 1
        since_refresh += 1
        if state.status[j] == AT_UPPER:
            dirn = -1.0
        elif state.status[j] == FREE:
            dirn = 1.0 if state.dj[j] < 0 else -1.0
        else:
            dirn = 1.0
        col = state.T[:, j].copy()
        lbB = state.lb[state.basis]
        ubB = state.ub[state.basis]
        t_block, row, hit = _kern.ratio_test(col, state.xB, lbB, ubB, dirn, tol)
        span = state.ub[j] - state.lb[j]
        if not np.isfinite(t_block) and not np.isfinite(span):
            return UNBOUNDED
        if span <= t_block:
            # bound flip, no basis change
            state.xB -= dirn * span * col
            state.values[j] = state.ub[j] if state.status[j] == AT_LOWER else state.lb[j]
            state.status[j] = AT_UPPER if state.status[j] == AT_LOWER else AT_LOWER
            step = span
        else:
            start = state.values[j]
            enter_val = start + dirn * t_block
            leaving = state.basis[row]
            state.xB -= dirn * t_block * col
            _kern.pivot_update(state.T, state.dj, row, j)
            if state.lb[leaving] == state.ub[leaving]:
                state.status[leaving] = FIXED
            else:
                state.status[leaving] = AT_LOWER if hit == 0 else AT_UPPER
            state.values[leaving] = lbB[row] if hit == 0 else ubB[row]
            state.status[j] = BASIC
            state.basis[row] = j
            state.xB[row] = enter_val
            step = t_block
        if step <= tol:
            stall += 1
            if stall > stall_threshold:
                bland = True
        else:
            stall = 0
            if not force_bland:
                bland = False
        if since_refresh >= refresh_every:
            state.refresh()
            since_refresh = 0
    return "iterlimit"
