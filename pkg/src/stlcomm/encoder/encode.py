"""Lowering of the planning problem into one MILP.

Pieces, in model order: fixed initial states, discrete dynamics,
velocity-polygon rows, absolute-value cost slacks, per-agent STL
satisfaction (big-M indicator encoding, satisfaction pinned at step 0),
grid-cell occupancy for every communicating pair, and the convex
combination objective alpha*J1 + (1-alpha)*J2.

Big-M handling: every indicator row is validated by interval arithmetic
over the variable bounds; a configured M that cannot cover a row is
rejected rather than silently truncating the feasible set.  In
``big_m_mode="tight"`` each row instead uses its own minimal valid M,
which leaves the integer feasible set untouched but strengthens the LP
relaxation considerably (rows whose minimal M is zero are dropped as
redundant).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..channel import GainMatrix
from ..milp.model import BINARY, CONTINUOUS, EQ, GE, INTEGER, LE, MINIMIZE, LinearExpr, MilpModel
from ..stl.ast import (
    Always,
    And,
    Eventually,
    Formula,
    Negation,
    Or,
    Predicate,
    TrueFormula,
    Until,
)
from ..stl.builders import build_agent_formula
from .index import DecisionIndex
from .scenario import BIG_M_TIGHT, Scenario

STATE_DIMS = 4
CONTROL_DIMS = 2


class EncodingError(ValueError):
    pass


@dataclass
class EncodedProblem:
    model: MilpModel
    index: DecisionIndex
    formulas: list[Formula]
    j1: LinearExpr
    j2: LinearExpr
    meta: dict


class MilpEncoder:
    """Single-use encoder: construct, call :meth:`assemble`, discard."""

    def __init__(
        self,
        scenario: Scenario,
        gain: GainMatrix | None,
        objective_mode: str = "joint",
    ):
        if objective_mode not in ("joint", "motion_only"):
            raise EncodingError(f"unknown objective mode {objective_mode!r}")
        if objective_mode == "joint" and scenario.pairs() and gain is None:
            raise EncodingError("joint objective needs a gain matrix")
        self.scenario = scenario
        self.gain = gain
        self.objective_mode = objective_mode
        self.model = MilpModel(scenario.name)
        self.index = DecisionIndex(scenario.num_agents, scenario.horizon)
        self._node_ids: dict[int, int] = {}
        self._next_node = 0
        self._aux_count = 0
        self._tight = scenario.big_m_mode == BIG_M_TIGHT

    # -- variable creation -------------------------------------------------

    def _declare_trajectory_variables(self):
        s = self.scenario
        grid = s.grid
        side = grid.cells_per_side * grid.cell_size
        v_bound = s.v_max / math.cos(math.pi / s.polygon_sides)
        pos_lo = (grid.x_min, grid.y_min)
        pos_hi = (grid.x_min + side, grid.y_min + side)
        for agent in range(s.num_agents):
            label = agent + 1
            for t in range(s.horizon + 1):
                for k in range(STATE_DIMS):
                    if k < 2:
                        lo, hi = pos_lo[k], pos_hi[k]
                    else:
                        lo, hi = -v_bound, v_bound
                    self.index.state[(agent, t, k)] = self.model.add_variable(
                        f"x_{label}_{t}_{k}", CONTINUOUS, lo, hi
                    )
                for k in range(STATE_DIMS):
                    self.index.state_slack[(agent, t, k)] = self.model.add_variable(
                        f"sa_{label}_{t}_{k}", CONTINUOUS, 0.0, np.inf
                    )
            for t in range(s.horizon):
                for k in range(CONTROL_DIMS):
                    self.index.control[(agent, t, k)] = self.model.add_variable(
                        f"u_{label}_{t}_{k}", CONTINUOUS, -s.u_max, s.u_max
                    )
                for k in range(CONTROL_DIMS):
                    self.index.control_slack[(agent, t, k)] = self.model.add_variable(
                        f"sb_{label}_{t}_{k}", CONTINUOUS, 0.0, np.inf
                    )

    # -- dynamics ----------------------------------------------------------

    def encode_dynamics(self):
        s = self.scenario
        a_d, b_d = s.dynamics()
        for agent in range(s.num_agents):
            label = agent + 1
            x0 = s.agents[agent].initial_state
            for k in range(STATE_DIMS):
                self.model.add_constraint(
                    f"init_{label}_{k}",
                    {self.index.state[(agent, 0, k)]: 1.0},
                    EQ,
                    x0[k],
                )
            for t in range(s.horizon):
                for k in range(STATE_DIMS):
                    coeffs = {self.index.state[(agent, t + 1, k)]: 1.0}
                    for k2 in range(STATE_DIMS):
                        if a_d[k, k2] != 0.0:
                            var = self.index.state[(agent, t, k2)]
                            coeffs[var] = coeffs.get(var, 0.0) - a_d[k, k2]
                    for k2 in range(CONTROL_DIMS):
                        if b_d[k, k2] != 0.0:
                            var = self.index.control[(agent, t, k2)]
                            coeffs[var] = coeffs.get(var, 0.0) - b_d[k, k2]
                    self.model.add_constraint(
                        f"dyn_{label}_{t}_{k}", coeffs, EQ, 0.0
                    )

    def encode_input_velocity_bounds(self):
        """Velocity limited by the regular H-polygon rows over t in [1, T_f]
        (step 0 velocity is fixed by the initial state); input bounds are
        plain variable bounds set at declaration."""
        s = self.scenario
        H = s.polygon_sides
        for agent in range(s.num_agents):
            label = agent + 1
            for t in range(1, s.horizon + 1):
                vx = self.index.state[(agent, t, 2)]
                vy = self.index.state[(agent, t, 3)]
                for h in range(1, H + 1):
                    angle = 2.0 * math.pi * h / H
                    self.model.add_constraint(
                        f"vpoly_{label}_{t}_{h}",
                        {vx: math.sin(angle), vy: math.cos(angle)},
                        LE,
                        s.v_max,
                    )

    # -- motion cost ---------------------------------------------------------

    def encode_cost_motion(self) -> LinearExpr:
        """Absolute-value slack rows; returns J1 = sum q.|x| + r.|u| with
        state terms over t in [0, T_f] and input terms over [0, T_f-1]."""
        s = self.scenario
        terms: dict[int, float] = {}
        for agent in range(s.num_agents):
            label = agent + 1
            for t in range(s.horizon + 1):
                for k in range(STATE_DIMS):
                    x = self.index.state[(agent, t, k)]
                    sa = self.index.state_slack[(agent, t, k)]
                    self.model.add_constraint(
                        f"absx_p_{label}_{t}_{k}", {x: 1.0, sa: -1.0}, LE, 0.0
                    )
                    self.model.add_constraint(
                        f"absx_n_{label}_{t}_{k}", {x: -1.0, sa: -1.0}, LE, 0.0
                    )
                    if s.state_weight[k] != 0.0:
                        terms[sa] = terms.get(sa, 0.0) + s.state_weight[k]
            for t in range(s.horizon):
                for k in range(CONTROL_DIMS):
                    u = self.index.control[(agent, t, k)]
                    sb = self.index.control_slack[(agent, t, k)]
                    self.model.add_constraint(
                        f"absu_p_{label}_{t}_{k}", {u: 1.0, sb: -1.0}, LE, 0.0
                    )
                    self.model.add_constraint(
                        f"absu_n_{label}_{t}_{k}", {u: -1.0, sb: -1.0}, LE, 0.0
                    )
                    if s.input_weight[k] != 0.0:
                        terms[sb] = terms.get(sb, 0.0) + s.input_weight[k]
        return LinearExpr.of(terms)

    # -- predicates and formulas ----------------------------------------------

    def _mu_range(self, pred: Predicate, t: int) -> tuple[float, float]:
        lo = hi = pred.offset
        for k, coef in enumerate(pred.coeffs):
            if coef == 0.0:
                continue
            agent, dim = divmod(k, STATE_DIMS)
            var = self.model.variables[self.index.state[(agent, t, dim)]]
            if coef > 0:
                lo += coef * var.lower
                hi += coef * var.upper
            else:
                lo += coef * var.upper
                hi += coef * var.lower
        return lo, hi

    def _node_id(self, node: Formula) -> int:
        key = id(node)
        if key not in self._node_ids:
            self._node_ids[key] = self._next_node
            self._next_node += 1
        return self._node_ids[key]

    def encode_predicate(self, pred: Predicate, t: int) -> int:
        """Indicator binary z for mu(x_t) with the margin-epsilon big-M rows."""
        s = self.scenario
        if not 0 <= t <= s.horizon:
            raise EncodingError(
                f"predicate needs step {t}, beyond the horizon {s.horizon}"
            )
        if len(pred.coeffs) != s.stacked_dim:
            raise EncodingError(
                f"predicate dimension {len(pred.coeffs)} != stacked dim {s.stacked_dim}"
            )
        nid = self._node_id(pred)
        memo_key = (nid, t)
        if memo_key in self.index.formula_z:
            return self.index.formula_z[memo_key]
        eps = s.epsilon
        mu_lo, mu_hi = self._mu_range(pred, t)
        need_a = eps - mu_lo
        need_b = (eps + mu_hi) if pred.strict else mu_hi
        if self._tight:
            m_a = max(need_a, 0.0)
            m_b = max(need_b, 0.0)
        else:
            if s.big_m < max(need_a, need_b):
                raise EncodingError(
                    f"big-M {s.big_m} too small for predicate at step {t}: "
                    f"needs at least {max(need_a, need_b):.6g} "
                    "(a small M silently truncates the feasible set)"
                )
            m_a = m_b = s.big_m
        z = self.model.add_variable(f"z{nid}_{t}", BINARY)
        self.index.formula_z[memo_key] = z
        coeffs = {}
        for k, coef in enumerate(pred.coeffs):
            if coef == 0.0:
                continue
            agent, dim = divmod(k, STATE_DIMS)
            var = self.index.state[(agent, t, dim)]
            coeffs[var] = coeffs.get(var, 0.0) + coef
        # z = 1  =>  mu >= eps
        row_a = dict(coeffs)
        row_a[z] = -m_a
        self.model.add_constraint(f"pA_z{nid}_{t}", row_a, GE, eps - m_a - pred.offset)
        # z = 0  =>  mu <= -eps (strict) / mu <= 0 (non-strict)
        row_b = dict(coeffs)
        row_b[z] = -m_b
        rhs_b = (-eps if pred.strict else 0.0) - pred.offset
        self.model.add_constraint(f"pB_z{nid}_{t}", row_b, LE, rhs_b)
        return z

    def _combine_and(self, zs: list[int], label: str) -> int:
        if len(zs) == 1:
            return zs[0]
        z = self.model.add_variable(f"z{label}", BINARY)
        for k, zk in enumerate(zs):
            self.model.add_constraint(f"and_{label}_{k}", {z: 1.0, zk: -1.0}, LE, 0.0)
        coeffs = {zk: -1.0 for zk in zs}
        coeffs[z] = 1.0
        self.model.add_constraint(
            f"and_{label}_lb", coeffs, GE, -(len(zs) - 1)
        )
        return z

    def _combine_or(self, zs: list[int], label: str) -> int:
        if len(zs) == 1:
            return zs[0]
        z = self.model.add_variable(f"z{label}", BINARY)
        for k, zk in enumerate(zs):
            self.model.add_constraint(f"or_{label}_{k}", {z: 1.0, zk: -1.0}, GE, 0.0)
        coeffs = {zk: -1.0 for zk in zs}
        coeffs[z] = 1.0
        self.model.add_constraint(f"or_{label}_ub", coeffs, LE, 0.0)
        return z

    def encode_formula(self, node: Formula, t: int) -> int:
        """Satisfaction binary z_t for the subformula, memoised per (node, t)."""
        s = self.scenario
        nid = self._node_id(node)
        memo_key = (nid, t)
        if memo_key in self.index.formula_z:
            return self.index.formula_z[memo_key]
        if isinstance(node, Predicate):
            return self.encode_predicate(node, t)
        if isinstance(node, TrueFormula):
            z = self.model.add_variable(f"z{nid}_{t}", BINARY)
            self.model.add_constraint(f"true_z{nid}_{t}", {z: 1.0}, EQ, 1.0)
        elif isinstance(node, Negation):
            z_child = self.encode_predicate(node.child, t)
            z = self.model.add_variable(f"z{nid}_{t}", BINARY)
            self.model.add_constraint(
                f"neg_z{nid}_{t}", {z: 1.0, z_child: 1.0}, EQ, 1.0
            )
        elif isinstance(node, And):
            zs = [self.encode_formula(child, t) for child in node.operands]
            z = self._combine_and(zs, f"{nid}_{t}")
        elif isinstance(node, Or):
            zs = [self.encode_formula(child, t) for child in node.operands]
            z = self._combine_or(zs, f"{nid}_{t}")
        elif isinstance(node, Always):
            self._check_window(node, t)
            zs = [
                self.encode_formula(node.child, tp)
                for tp in range(t + node.a, t + node.b + 1)
            ]
            z = self._combine_and(zs, f"{nid}_{t}")
        elif isinstance(node, Eventually):
            self._check_window(node, t)
            zs = [
                self.encode_formula(node.child, tp)
                for tp in range(t + node.a, t + node.b + 1)
            ]
            z = self._combine_or(zs, f"{nid}_{t}")
        elif isinstance(node, Until):
            self._check_window(node, t)
            options = []
            for tp in range(t + node.a, t + node.b + 1):
                parts = [self.encode_formula(node.right, tp)]
                parts.extend(
                    self.encode_formula(node.left, tpp) for tpp in range(t, tp + 1)
                )
                self._aux_count += 1
                options.append(self._combine_and(parts, f"u{self._aux_count}"))
            z = self._combine_or(options, f"{nid}_{t}")
        else:
            raise EncodingError(f"unknown formula node {type(node).__name__}")
        self.index.formula_z[memo_key] = z
        return z

    def _check_window(self, node, t: int):
        if isinstance(node, Until):
            nested = max(node.left.horizon(), node.right.horizon())
        else:
            nested = node.child.horizon()
        if t + node.b + nested > self.scenario.horizon:
            raise EncodingError(
                f"temporal window at step {t} reaches step {t + node.b} plus "
                f"nested horizon {nested}, beyond the planning horizon "
                f"{self.scenario.horizon}"
            )

    def encode_stl(self, formula: Formula, agent_label: int) -> int:
        """Encode a top-level requirement and pin its step-0 satisfaction."""
        if formula.horizon() > self.scenario.horizon:
            raise EncodingError(
                f"formula horizon {formula.horizon()} exceeds planning horizon "
                f"{self.scenario.horizon}"
            )
        z_top = self.encode_formula(formula, 0)
        self.model.add_constraint(f"require_{agent_label}", {z_top: 1.0}, EQ, 1.0)
        return z_top

    # -- occupancy -----------------------------------------------------------

    def _declare_cell_variables(self, agent: int):
        s = self.scenario
        if (agent, 0) in self.index.cell_row:
            return
        grid = s.grid
        N = grid.cells_per_side
        n = grid.partition_count
        d = grid.cell_size
        label = agent + 1
        for t in range(s.horizon + 1):
            a = self.model.add_variable(f"a_{label}_{t}", INTEGER, 1, N)
            bb = self.model.add_variable(f"b_{label}_{t}", INTEGER, 1, N)
            r = self.model.add_variable(f"r_{label}_{t}", INTEGER, 1, n)
            self.index.cell_row[(agent, t)] = a
            self.index.cell_col[(agent, t)] = bb
            self.index.partition[(agent, t)] = r
            px = self.index.state[(agent, t, 0)]
            py = self.index.state[(agent, t, 1)]
            self.model.add_constraint(
                f"cellx_lo_{label}_{t}", {px: 1.0, a: -d}, GE, grid.x_min - d
            )
            self.model.add_constraint(
                f"cellx_hi_{label}_{t}", {px: 1.0, a: -d}, LE, grid.x_min
            )
            self.model.add_constraint(
                f"celly_lo_{label}_{t}", {py: 1.0, bb: -d}, GE, grid.y_min - d
            )
            self.model.add_constraint(
                f"celly_hi_{label}_{t}", {py: 1.0, bb: -d}, LE, grid.y_min
            )
            self.model.add_constraint(
                f"cellr_{label}_{t}", {r: 1.0, a: -float(N), bb: -1.0}, EQ, -float(N)
            )

    def encode_occupancy(self, p: int, q: int):
        """Occupancy binaries O_{ijt} for pair (p, q) with the four big-M rows
        per entry and the sum row forcing exactly one zero."""
        s = self.scenario
        if p == q:
            raise EncodingError(f"occupancy needs two distinct agents, got ({p},{q})")
        n = s.grid.partition_count
        if not self._tight and s.big_m < n - 1:
            raise EncodingError(
                f"big-M {s.big_m} too small for occupancy over {n} partitions "
                f"(needs at least {n - 1})"
            )
        self._declare_cell_variables(p)
        self._declare_cell_variables(q)
        pl, ql = p + 1, q + 1
        for t in range(s.horizon + 1):
            r_p = self.index.partition[(p, t)]
            r_q = self.index.partition[(q, t)]
            ids = np.empty((n, n), dtype=np.int64)
            for i in range(1, n + 1):
                for j in range(1, n + 1):
                    o = self.model.add_variable(
                        f"O_{pl}_{ql}_{i}_{j}_{t}", BINARY
                    )
                    ids[i - 1, j - 1] = o
                    tag = f"{pl}_{ql}_{i}_{j}_{t}"
                    m1 = (i - 1) if self._tight else s.big_m  # (i - r_p) <= m1 O
                    m2 = (n - i) if self._tight else s.big_m  # (r_p - i) <= m2 O
                    m3 = (j - 1) if self._tight else s.big_m
                    m4 = (n - j) if self._tight else s.big_m
                    if m1 > 0:
                        self.model.add_constraint(
                            f"occA_{tag}", {r_p: -1.0, o: -m1}, LE, -float(i)
                        )
                    if m2 > 0:
                        self.model.add_constraint(
                            f"occB_{tag}", {r_p: 1.0, o: -m2}, LE, float(i)
                        )
                    if m3 > 0:
                        self.model.add_constraint(
                            f"occC_{tag}", {r_q: -1.0, o: -m3}, LE, -float(j)
                        )
                    if m4 > 0:
                        self.model.add_constraint(
                            f"occD_{tag}", {r_q: 1.0, o: -m4}, LE, float(j)
                        )
            self.index.occupancy[(p, q, t)] = ids
            self.model.add_constraint(
                f"occsum_{pl}_{ql}_{t}",
                {int(o): 1.0 for o in ids.ravel()},
                EQ,
                float(n * n - 1),
            )

    def encode_cost_comm(self) -> LinearExpr:
        """J2 = sum over steps and pairs of G_ij (1 - O_ijt)."""
        s = self.scenario
        pairs = self.index.pairs
        if not pairs:
            return LinearExpr(())
        assert self.gain is not None
        G = self.gain.entries
        steps = s.horizon + 1
        terms: dict[int, float] = {}
        constant = 0.0
        for (p, q) in pairs:
            constant += float(G.sum()) * steps
            for t in range(steps):
                ids = self.index.occupancy[(p, q, t)]
                flat_ids = ids.ravel()
                flat_g = G.ravel()
                for o, g in zip(flat_ids, flat_g):
                    terms[int(o)] = terms.get(int(o), 0.0) - float(g)
        return LinearExpr.of(terms, constant)

    # -- assembly ------------------------------------------------------------

    def assemble(self) -> EncodedProblem:
        s = self.scenario
        self._declare_trajectory_variables()
        self.encode_dynamics()
        self.encode_input_velocity_bounds()
        j1 = self.encode_cost_motion()

        formulas: list[Formula] = []
        for agent in range(s.num_agents):
            formula = build_agent_formula(
                s.agents[agent].goal.faces,
                [o.faces for o in s.obstacles],
                agent,
                s.num_agents,
                s.d1,
                s.d2,
                s.horizon,
                collision_mode=s.collision_mode,
                obstacle_mode=s.obstacle_mode,
            )
            formulas.append(formula)
            self.index.top_z[agent] = self.encode_stl(formula, agent + 1)

        pairs = s.pairs()
        self.index.pairs = pairs
        for (p, q) in pairs:
            self.encode_occupancy(p, q)
        j2 = self.encode_cost_comm() if self.gain is not None else LinearExpr(())

        if self.objective_mode == "joint":
            objective = j1.scaled(s.alpha).plus(j2.scaled(1.0 - s.alpha))
        else:
            objective = j1
        self.model.set_objective(objective, MINIMIZE)
        self.model.finalize()
        meta = {
            "num_variables": self.model.num_variables,
            "num_constraints": self.model.num_constraints,
            "num_binaries": sum(
                1 for v in self.model.variables if v.kind == BINARY
            ),
            "num_integers": sum(
                1 for v in self.model.variables if v.kind == INTEGER
            ),
            "objective_mode": self.objective_mode,
            "big_m_mode": s.big_m_mode,
        }
        return EncodedProblem(self.model, self.index, formulas, j1, j2, meta)


def assemble(
    scenario: Scenario, gain: GainMatrix | None, objective_mode: str = "joint"
) -> EncodedProblem:
    """Build the full MILP for a scenario (gain may be None when there are
    no communicating pairs, or in motion-only mode)."""
    return MilpEncoder(scenario, gain, objective_mode).assemble()
