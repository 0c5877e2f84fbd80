"""Builders for the planner's per-agent task formulas.

Formulas range over the stacked state of all agents at one step: agent i
(0-based) occupies coordinates [4i, 4i+4) as (px, py, vx, vy).  Goal and
obstacle regions are convex polytopes given as half-plane faces
a . p + b <= 0 (inside).
"""

from __future__ import annotations

from typing import Sequence

from .ast import (
    Always,
    And,
    Eventually,
    Formula,
    FormulaError,
    Or,
    Predicate,
    TrueFormula,
    conjoin,
)

PAPER_CONJUNCTION = "paper_conjunction"
DISJUNCTION = "disjunction"

STATE_DIM_PER_AGENT = 4


def _position_coeffs(num_agents: int, agent: int, ax: float, ay: float) -> list[float]:
    coeffs = [0.0] * (STATE_DIM_PER_AGENT * num_agents)
    coeffs[STATE_DIM_PER_AGENT * agent + 0] = ax
    coeffs[STATE_DIM_PER_AGENT * agent + 1] = ay
    return coeffs


def build_goal_formula(
    goal_faces: Sequence[tuple[Sequence[float], float]],
    horizon: int,
    agent: int,
    num_agents: int,
) -> Formula:
    """Reach the goal polytope within ``horizon`` steps.

    Returns F[0,horizon] of the conjunction of non-strict face predicates
    a . p + b <= 0 over the agent's position coordinates.
    """
    faces = list(goal_faces)
    if len(faces) < 3:
        raise FormulaError(
            f"goal polytope needs at least 3 faces, got {len(faces)}"
        )
    preds: list[Formula] = []
    for a_vec, b in faces:
        ax, ay = float(a_vec[0]), float(a_vec[1])
        # a.p + b <= 0  <=>  -a.p - b >= 0
        preds.append(
            Predicate(
                tuple(_position_coeffs(num_agents, agent, -ax, -ay)),
                -float(b),
                strict=False,
            )
        )
    return Eventually(And(tuple(preds)), 0, horizon)


def _obstacle_clause(
    obstacle_faces: Sequence[tuple[Sequence[float], float]],
    agent: int,
    num_agents: int,
    mode: str,
) -> Formula:
    # Face predicates a.p + b > 0 ("outside this face"), strict.
    preds: list[Formula] = []
    for a_vec, b in obstacle_faces:
        ax, ay = float(a_vec[0]), float(a_vec[1])
        preds.append(
            Predicate(
                tuple(_position_coeffs(num_agents, agent, ax, ay)),
                float(b),
                strict=True,
            )
        )
    if len(preds) == 1:
        return preds[0]
    if mode == DISJUNCTION:
        return Or(tuple(preds))
    if mode == PAPER_CONJUNCTION:
        return And(tuple(preds))
    raise ValueError(f"unknown obstacle mode {mode!r}")


def _axis_separation(
    agent: int, other: int, axis: int, dist: float, num_agents: int
) -> Formula:
    # |p_i,axis - p_j,axis| >= dist as the two-sided disjunction.
    coeffs = [0.0] * (STATE_DIM_PER_AGENT * num_agents)
    coeffs[STATE_DIM_PER_AGENT * agent + axis] = 1.0
    coeffs[STATE_DIM_PER_AGENT * other + axis] = -1.0
    fwd = Predicate(tuple(coeffs), -dist, strict=False)
    back = Predicate(tuple(-c for c in coeffs), -dist, strict=False)
    return Or((fwd, back))


def build_safety_formula(
    obstacles: Sequence[Sequence[tuple[Sequence[float], float]]],
    agent: int,
    num_agents: int,
    d1: float,
    d2: float,
    horizon: int,
    collision_mode: str = PAPER_CONJUNCTION,
    obstacle_mode: str = DISJUNCTION,
) -> Formula:
    """Never hit an obstacle nor come within (d1, d2) of another agent.

    Returns G[0,horizon] of (obstacle clauses AND collision clauses) for
    one agent.  With no obstacles and no other agents this degenerates to
    G[0,horizon] True.

    ``obstacle_mode`` selects between the geometrically-correct "outside
    at least one face" disjunction (default) and the literal conjunction
    over faces; ``collision_mode`` selects how the two axis-separation
    conditions combine (default conjunction: both axes must separate).
    """
    if d1 <= 0 or d2 <= 0:
        raise ValueError(f"safety distances must be positive, got d1={d1}, d2={d2}")
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    clauses: list[Formula] = []
    for faces in obstacles:
        clauses.append(_obstacle_clause(faces, agent, num_agents, obstacle_mode))
    for other in range(num_agents):
        if other == agent:
            continue
        axis_x = _axis_separation(agent, other, 0, d1, num_agents)
        axis_y = _axis_separation(agent, other, 1, d2, num_agents)
        if collision_mode == PAPER_CONJUNCTION:
            clauses.append(And((axis_x, axis_y)))
        elif collision_mode == DISJUNCTION:
            clauses.append(Or((axis_x, axis_y)))
        else:
            raise ValueError(f"unknown collision mode {collision_mode!r}")
    if not clauses:
        return Always(TrueFormula(), 0, horizon)
    return Always(conjoin(clauses), 0, horizon)


def build_agent_formula(
    goal_faces: Sequence[tuple[Sequence[float], float]],
    obstacles: Sequence[Sequence[tuple[Sequence[float], float]]],
    agent: int,
    num_agents: int,
    d1: float,
    d2: float,
    horizon: int,
    collision_mode: str = PAPER_CONJUNCTION,
    obstacle_mode: str = DISJUNCTION,
) -> Formula:
    """Full per-agent task: reach the goal and stay safe throughout."""
    return And(
        (
            build_goal_formula(goal_faces, horizon, agent, num_agents),
            build_safety_formula(
                obstacles,
                agent,
                num_agents,
                d1,
                d2,
                horizon,
                collision_mode=collision_mode,
                obstacle_mode=obstacle_mode,
            ),
        )
    )
