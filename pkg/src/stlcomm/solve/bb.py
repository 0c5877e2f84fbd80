"""LP-relaxation branch-and-bound over the MILP model.

Correctness-first embedded solver: no cuts, no heuristics, no warm
starts.  Each node solves its LP relaxation from scratch, prunes against
the incumbent, and branches on a fractional integer variable with
floor/ceil bound splits.  Everything is deterministic for fixed options:
ties break on creation order (node queue) and lowest variable index
(branching).

Node relaxations run on the embedded simplex for desk-scale models and
are backed by scipy's HiGHS ``linprog`` beyond a dense-tableau size
threshold (``lp_engine="auto"``); either engine can be forced.
"""

from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass, field

import numpy as np
import scipy.optimize
import scipy.sparse

from ..milp.model import MilpModel
from .arrays import REL_EQ, REL_GE, REL_LE, ProblemArrays, model_to_arrays
from .simplex import INFEASIBLE, OPTIMAL, UNBOUNDED, SimplexError, simplex_solve

BEST_BOUND = "best-bound"
DEPTH_FIRST = "depth-first"
MOST_FRACTIONAL = "most-fractional"
FIRST_FRACTIONAL = "first-fractional"

# SolveResult statuses
STATUS_OPTIMAL = "optimal"
STATUS_FEASIBLE_GAP = "feasible-gap"
STATUS_INFEASIBLE = "infeasible"
STATUS_UNBOUNDED = "unbounded"
STATUS_LIMIT = "limit"

# Dense-tableau budget for the embedded simplex: beyond this the node
# relaxations go through HiGHS (sparse, much faster on occupancy models).
_DENSE_CELL_LIMIT = 150_000


class SolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class SolveOptions:
    mode: str = "internal"  # internal | external
    rel_gap: float = 1e-6
    feas_tol: float = 1e-6
    int_tol: float = 1e-6
    node_limit: int = 2_000_000
    time_limit: float = 3600.0
    branching: str = MOST_FRACTIONAL
    node_selection: str = BEST_BOUND
    external_cmd: str | None = None
    lp_engine: str = "auto"  # auto | simplex | highs

    def __post_init__(self):
        if self.rel_gap <= 0 or self.feas_tol <= 0 or self.int_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.node_limit <= 0 or self.time_limit <= 0:
            raise ValueError("limits must be positive")
        if self.branching not in (MOST_FRACTIONAL, FIRST_FRACTIONAL):
            raise ValueError(f"unknown branching rule {self.branching!r}")
        if self.node_selection not in (BEST_BOUND, DEPTH_FIRST):
            raise ValueError(f"unknown node selection {self.node_selection!r}")
        if self.lp_engine not in ("auto", "simplex", "highs"):
            raise ValueError(f"unknown lp engine {self.lp_engine!r}")


@dataclass
class SolveResult:
    status: str
    assignment: dict[int, float] | None
    objective: float
    bound: float
    nodes: int
    wall_time: float
    iterations: int = 0
    bound_trace: list[float] = field(default_factory=list)

    @property
    def values(self) -> np.ndarray | None:
        if self.assignment is None:
            return None
        out = np.zeros(len(self.assignment))
        for k, v in self.assignment.items():
            out[k] = v
        return out


@dataclass
class LpResult:
    status: str
    assignment: dict[int, float] | None
    objective: float
    iterations: int = 0


class _LpBackend:
    """Shared relaxation engine over fixed rows with per-node bounds."""

    def __init__(self, arrays: ProblemArrays, engine: str):
        self.arrays = arrays
        m, n = arrays.A.shape
        if engine == "auto":
            cells = (m + 1) * (n + 2 * m + 1)
            engine = "simplex" if cells <= _DENSE_CELL_LIMIT else "highs"
        self.engine = engine
        self.A_dense: np.ndarray | None = None
        self._highs_ready = False
        if engine == "simplex":
            self.A_dense = arrays.dense()
        else:
            self._ensure_highs()

    def _ensure_highs(self):
        if self._highs_ready:
            return
        arrays = self.arrays
        le = arrays.rel == REL_LE
        ge = arrays.rel == REL_GE
        eq = arrays.rel == REL_EQ
        blocks = []
        rhs_ub = []
        if le.any():
            blocks.append(arrays.A[le])
            rhs_ub.append(arrays.rhs[le])
        if ge.any():
            blocks.append(-arrays.A[ge])
            rhs_ub.append(-arrays.rhs[ge])
        self.A_ub = scipy.sparse.vstack(blocks).tocsr() if blocks else None
        self.b_ub = np.concatenate(rhs_ub) if rhs_ub else None
        self.A_eq = arrays.A[eq].tocsr() if eq.any() else None
        self.b_eq = arrays.rhs[eq] if eq.any() else None
        self._highs_ready = True

    def solve(self, lb: np.ndarray, ub: np.ndarray) -> tuple[str, np.ndarray | None, float, int]:
        """Solve min c.x with the fixed rows and the given bounds.

        Returns (status, x, raw_objective_without_constant, iterations).
        """
        if np.any(lb > ub):
            return INFEASIBLE, None, math.inf, 0
        if self.engine == "simplex":
            try:
                res = simplex_solve(
                    self.arrays.c, self.A_dense, self.arrays.rel,
                    self.arrays.rhs, lb, ub,
                )
                return res.status, res.x, res.objective, res.iterations
            except SimplexError:
                # Deterministic fallback: hand the node to HiGHS.
                pass
        return self._solve_highs(lb, ub)

    def _solve_highs(self, lb, ub):
        self._ensure_highs()
        res = scipy.optimize.linprog(
            self.arrays.c,
            A_ub=self.A_ub,
            b_ub=self.b_ub,
            A_eq=self.A_eq,
            b_eq=self.b_eq,
            bounds=np.column_stack([lb, ub]),
            method="highs",
        )
        iters = int(res.nit) if hasattr(res, "nit") else 0
        if res.status == 0:
            return OPTIMAL, res.x, float(res.fun), iters
        if res.status == 2:
            return INFEASIBLE, None, math.inf, iters
        if res.status == 3:
            return UNBOUNDED, None, -math.inf, iters
        raise SolverError(f"LP backend failure: {res.message}")


def solve_lp(model: MilpModel, options: SolveOptions | None = None) -> LpResult:
    """Solve the LP relaxation of the model (integrality dropped)."""
    options = options or SolveOptions()
    arrays = model_to_arrays(model)
    backend = _LpBackend(arrays, options.lp_engine)
    status, x, raw, iters = backend.solve(arrays.lb.copy(), arrays.ub.copy())
    if status != OPTIMAL:
        return LpResult(status, None, math.inf if status == INFEASIBLE else -math.inf,
                        iters)
    objective = arrays.objective_of(x)
    return LpResult(OPTIMAL, {i: float(v) for i, v in enumerate(x)}, objective, iters)


@dataclass
class _Node:
    creation: int
    depth: int
    bound: float
    parent: "_Node | None"
    branch_var: int = -1
    branch_is_upper: bool = False  # True: ub <- value, False: lb <- value
    branch_value: float = 0.0

    def materialize(self, lb: np.ndarray, ub: np.ndarray):
        """Apply this node's ancestry of bound changes onto base bounds."""
        node = self
        while node.parent is not None:
            v = node.branch_var
            if node.branch_is_upper:
                if node.branch_value < ub[v]:
                    ub[v] = node.branch_value
            else:
                if node.branch_value > lb[v]:
                    lb[v] = node.branch_value
            node = node.parent


def _select_branch(x: np.ndarray, int_idx: np.ndarray, rule: str, tol: float) -> int:
    frac = x[int_idx] - np.floor(x[int_idx])
    dist = np.minimum(frac, 1.0 - frac)
    fractional = dist > tol
    if not fractional.any():
        return -1
    if rule == FIRST_FRACTIONAL:
        return int(int_idx[np.flatnonzero(fractional)[0]])
    cand = np.where(fractional, dist, -1.0)
    return int(int_idx[int(np.argmax(cand))])


def solve_bb(model: MilpModel, options: SolveOptions | None = None) -> SolveResult:
    """Branch-and-bound minimisation (maximise models are pre-negated in
    array form and reported back in the original sense)."""
    options = options or SolveOptions()
    t0 = time.perf_counter()
    arrays = model_to_arrays(model)
    backend = _LpBackend(arrays, options.lp_engine)
    int_idx = np.flatnonzero(arrays.integer_mask)

    base_lb = arrays.lb.copy()
    base_ub = arrays.ub.copy()
    # Integer variables get integral bounds up front.
    base_lb[int_idx] = np.ceil(base_lb[int_idx] - options.int_tol)
    base_ub[int_idx] = np.floor(base_ub[int_idx] + options.int_tol)

    creation = 0
    root = _Node(creation, 0, -math.inf, None)
    heap: list[tuple[float, int, _Node]] = []
    stack: list[_Node] = []
    use_heap = options.node_selection == BEST_BOUND
    if use_heap:
        heapq.heappush(heap, (root.bound, root.creation, root))
    else:
        stack.append(root)

    incumbent_x: np.ndarray | None = None
    incumbent_obj = math.inf  # raw (minimisation) objective, no constant
    nodes = 0
    total_iters = 0
    bound_trace: list[float] = []
    hit_limit = False
    unbounded = False

    def open_bounds() -> float:
        if use_heap:
            return heap[0][0] if heap else math.inf
        return min((n.bound for n in stack), default=math.inf)

    def gap_ok(bound: float) -> bool:
        if incumbent_obj == math.inf:
            return False
        return incumbent_obj - bound <= options.rel_gap * max(1.0, abs(incumbent_obj))

    while heap or stack:
        if nodes >= options.node_limit or time.perf_counter() - t0 > options.time_limit:
            hit_limit = True
            break
        node = heapq.heappop(heap)[2] if use_heap else stack.pop()
        if gap_ok(node.bound):
            continue
        lb = base_lb.copy()
        ub = base_ub.copy()
        node.materialize(lb, ub)
        status, x, raw, iters = backend.solve(lb, ub)
        nodes += 1
        total_iters += iters
        if status == UNBOUNDED:
            unbounded = True
            break
        if status == OPTIMAL:
            node.bound = raw
            if not gap_ok(raw):
                var = _select_branch(x, int_idx, options.branching, options.int_tol)
                if var < 0:
                    if raw < incumbent_obj - 1e-12:
                        incumbent_obj = raw
                        incumbent_x = x.copy()
                else:
                    # Ceil child is created first, hence explored first (heap
                    # tie-break / stack order): big-M indicator binaries sit at
                    # tiny fractional artifacts whose honest value is 1, and
                    # the up-branch keeps the relaxation nearly intact.
                    value = x[var]
                    creation += 1
                    ceil_child = _Node(creation, node.depth + 1, raw, node, var,
                                       False, float(np.ceil(value)))
                    creation += 1
                    floor_child = _Node(creation, node.depth + 1, raw, node, var,
                                        True, float(np.floor(value)))
                    if use_heap:
                        heapq.heappush(heap, (ceil_child.bound, ceil_child.creation,
                                              ceil_child))
                        heapq.heappush(heap, (floor_child.bound, floor_child.creation,
                                              floor_child))
                    else:
                        stack.append(floor_child)
                        stack.append(ceil_child)  # ceil side explored first
        ob = open_bounds()
        bound_trace.append(ob if math.isfinite(ob) else incumbent_obj)

    wall = time.perf_counter() - t0

    if unbounded:
        return SolveResult(STATUS_UNBOUNDED, None, arrays.bound_of(-math.inf),
                           arrays.bound_of(-math.inf), nodes, wall, total_iters,
                           bound_trace)

    if incumbent_x is None:
        if hit_limit:
            return SolveResult(STATUS_LIMIT, None, math.nan,
                               arrays.bound_of(open_bounds()), nodes, wall,
                               total_iters, bound_trace)
        return SolveResult(STATUS_INFEASIBLE, None, math.nan, math.nan, nodes, wall,
                           total_iters, bound_trace)

    assignment = {i: float(v) for i, v in enumerate(incumbent_x)}
    objective = arrays.objective_of(incumbent_x)
    if hit_limit:
        proven = min(open_bounds(), incumbent_obj)
        return SolveResult(STATUS_FEASIBLE_GAP, assignment, objective,
                           arrays.bound_of(proven), nodes, wall, total_iters,
                           bound_trace)
    return SolveResult(STATUS_OPTIMAL, assignment, objective, objective, nodes, wall,
                       total_iters, bound_trace)
