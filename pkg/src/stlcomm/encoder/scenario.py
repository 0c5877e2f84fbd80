"""Planning scenario: agents, regions, weights, grid, channel config.

The JSON schema mirrors these dataclasses field for field (see README);
``from_dict`` validates every invariant and reports violations with the
offending field path.  Polytopes are half-plane face lists
``a . p + b <= 0``; axis-aligned rectangles can be given directly and
are expanded to four faces.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np
import scipy.optimize

from ..channel import ChannelHyperparams, GridSpec

SCHEMA_VERSION = 1

PAPER_A_D = (
    (1.0, 0.0, 1.0, 0.0),
    (0.0, 1.0, 0.0, 1.0),
    (0.0, 0.0, 1.0, 0.0),
    (0.0, 0.0, 0.0, 1.0),
)
PAPER_B_D = (
    (0.5, 0.0),
    (0.0, 0.5),
    (1.0, 0.0),
    (0.0, 1.0),
)

BIG_M_LITERAL = "literal"
BIG_M_TIGHT = "tight"


class ScenarioError(ValueError):
    """Raised for schema or invariant violations, naming the field."""


Face = tuple[tuple[float, float], float]


def rect_faces(xlo: float, ylo: float, xhi: float, yhi: float) -> tuple[Face, ...]:
    """Four inward faces (a.p + b <= 0) of an axis-aligned rectangle."""
    if xlo >= xhi or ylo >= yhi:
        raise ScenarioError(f"degenerate rectangle [{xlo},{xhi}]x[{ylo},{yhi}]")
    return (
        ((-1.0, 0.0), xlo),
        ((1.0, 0.0), -xhi),
        ((0.0, -1.0), ylo),
        ((0.0, 1.0), -yhi),
    )


@dataclass(frozen=True)
class Polytope:
    faces: tuple[Face, ...]
    display_rect: tuple[float, float, float, float] | None = None

    def __post_init__(self):
        norm = tuple(
            ((float(a[0]), float(a[1])), float(b)) for a, b in self.faces
        )
        object.__setattr__(self, "faces", norm)

    def contains(self, p: Sequence[float], tol: float = 1e-9) -> bool:
        return all(a[0] * p[0] + a[1] * p[1] + b <= tol for a, b in self.faces)

    def bounding_box(self) -> tuple[float, float, float, float]:
        """(xlo, ylo, xhi, yhi) via four tiny LPs; raises if empty/unbounded."""
        A = np.array([[a[0], a[1]] for a, _ in self.faces])
        b_ub = np.array([-b for _, b in self.faces])
        out = []
        for c in ([1, 0], [-1, 0], [0, 1], [0, -1]):
            res = scipy.optimize.linprog(
                c, A_ub=A, b_ub=b_ub, bounds=[(None, None)] * 2, method="highs"
            )
            if res.status == 2:
                raise ScenarioError("empty polytope")
            if res.status == 3:
                raise ScenarioError("unbounded polytope")
            out.append(res.fun if c in ([1, 0], [0, 1]) else -res.fun)
        xlo, xhi, ylo, yhi = out[0], out[1], out[2], out[3]
        return float(xlo), float(ylo), float(xhi), float(yhi)


@dataclass(frozen=True)
class AgentSpec:
    initial_state: tuple[float, float, float, float]
    goal: Polytope
    mass: float = 1.0

    def __post_init__(self):
        state = tuple(float(v) for v in self.initial_state)
        if len(state) != 4:
            raise ScenarioError(
                f"initial state needs 4 entries (px,py,vx,vy), got {len(state)}"
            )
        object.__setattr__(self, "initial_state", state)
        if self.mass <= 0:
            raise ScenarioError(f"agent mass must be positive, got {self.mass}")
        if len(self.goal.faces) < 3:
            raise ScenarioError(
                f"goal polytope needs at least 3 faces, got {len(self.goal.faces)}"
            )


@dataclass(frozen=True)
class ChannelConfig:
    hyperparams: ChannelHyperparams
    training_csv: str | None = None
    rssi_exclusion_db: float = 0.1


@dataclass(frozen=True)
class Scenario:
    agents: tuple[AgentSpec, ...]
    obstacles: tuple[Polytope, ...]
    horizon: int
    dt: float
    u_max: float
    v_max: float
    polygon_sides: int
    d1: float
    d2: float
    state_weight: tuple[float, float, float, float]
    input_weight: tuple[float, float]
    alpha: float
    big_m: float
    epsilon: float
    grid: GridSpec
    channel: ChannelConfig
    a_d: tuple[tuple[float, ...], ...] = PAPER_A_D
    b_d: tuple[tuple[float, ...], ...] = PAPER_B_D
    collision_mode: str = "paper_conjunction"
    obstacle_mode: str = "disjunction"
    comm_pairs: tuple[tuple[int, int], ...] | None = None  # 0-based, p < q
    big_m_mode: str = BIG_M_LITERAL
    baseline_mode: bool = False
    name: str = "scenario"

    def __post_init__(self):
        if not self.agents:
            raise ScenarioError("at least one agent is required")
        if self.horizon < 1:
            raise ScenarioError(f"horizon must be >= 1, got {self.horizon}")
        if self.dt <= 0:
            raise ScenarioError(f"dt must be positive, got {self.dt}")
        if not (0.0 < self.alpha < 1.0):
            if not (self.baseline_mode and self.alpha == 1.0):
                raise ScenarioError(
                    f"alpha must lie in (0,1), got {self.alpha} "
                    "(alpha=1 requires baseline_mode)"
                )
        if self.polygon_sides < 3:
            raise ScenarioError(
                f"velocity polygon needs >= 3 sides, got {self.polygon_sides}"
            )
        if self.big_m <= 0:
            raise ScenarioError(f"big-M must be positive, got {self.big_m}")
        if self.epsilon <= 0:
            raise ScenarioError(f"epsilon must be positive, got {self.epsilon}")
        if self.d1 <= 0 or self.d2 <= 0:
            raise ScenarioError(
                f"safety distances must be positive, got ({self.d1}, {self.d2})"
            )
        if self.u_max <= 0 or self.v_max <= 0:
            raise ScenarioError("u_max and v_max must be positive")
        if any(w < 0 for w in self.state_weight) or any(
            w < 0 for w in self.input_weight
        ):
            raise ScenarioError("weight vectors must be non-negative")
        if len(self.state_weight) != 4 or len(self.input_weight) != 2:
            raise ScenarioError("state weight has 4 entries, input weight 2")
        a_d = np.asarray(self.a_d, dtype=float)
        b_d = np.asarray(self.b_d, dtype=float)
        if a_d.shape != (4, 4) or b_d.shape != (4, 2):
            raise ScenarioError(
                f"dynamics matrices must be 4x4 and 4x2, got {a_d.shape} and {b_d.shape}"
            )
        if self.big_m_mode not in (BIG_M_LITERAL, BIG_M_TIGHT):
            raise ScenarioError(f"unknown big_m_mode {self.big_m_mode!r}")
        if self.collision_mode not in ("paper_conjunction", "disjunction"):
            raise ScenarioError(f"unknown collision_mode {self.collision_mode!r}")
        if self.obstacle_mode not in ("paper_conjunction", "disjunction"):
            raise ScenarioError(f"unknown obstacle_mode {self.obstacle_mode!r}")
        # Workspace must contain initial positions and goal polytopes.
        xlo, ylo = self.grid.x_min, self.grid.y_min
        side = self.grid.cells_per_side * self.grid.cell_size
        xhi, yhi = xlo + side, ylo + side
        for i, agent in enumerate(self.agents):
            px, py = agent.initial_state[0], agent.initial_state[1]
            if not (xlo <= px <= xhi and ylo <= py <= yhi):
                raise ScenarioError(
                    f"agents[{i}].initial_state position ({px},{py}) outside "
                    f"workspace [{xlo},{xhi}]x[{ylo},{yhi}]"
                )
            gx0, gy0, gx1, gy1 = agent.goal.bounding_box()
            if gx0 < xlo - 1e-9 or gy0 < ylo - 1e-9 or gx1 > xhi + 1e-9 or gy1 > yhi + 1e-9:
                raise ScenarioError(
                    f"agents[{i}].goal extends outside the workspace"
                )
        pairs = self.comm_pairs
        if pairs is not None:
            seen = set()
            for p, q in pairs:
                if not (0 <= p < len(self.agents)) or not (0 <= q < len(self.agents)):
                    raise ScenarioError(f"comm pair ({p},{q}) references unknown agent")
                if p >= q:
                    raise ScenarioError(f"comm pairs must have p < q, got ({p},{q})")
                if (p, q) in seen:
                    raise ScenarioError(f"duplicate comm pair ({p},{q})")
                seen.add((p, q))

    @property
    def num_agents(self) -> int:
        return len(self.agents)

    @property
    def stacked_dim(self) -> int:
        return 4 * len(self.agents)

    def pairs(self) -> tuple[tuple[int, int], ...]:
        """Communicating pairs, 0-based; defaults to all unordered pairs."""
        if self.comm_pairs is not None:
            return self.comm_pairs
        n = len(self.agents)
        return tuple((p, q) for p in range(n) for q in range(p + 1, n))

    def dynamics(self) -> tuple[np.ndarray, np.ndarray]:
        return np.asarray(self.a_d, dtype=float), np.asarray(self.b_d, dtype=float)


def _get(data: dict, key: str, path: str, required: bool = True, default=None):
    if key not in data:
        if required:
            raise ScenarioError(f"missing field {path}.{key}")
        return default
    return data[key]


def _faces_from(data: Any, path: str) -> tuple[tuple[Face, ...], tuple | None]:
    if not isinstance(data, dict):
        raise ScenarioError(f"{path} must be an object")
    display = None
    if "display_rect" in data:
        display = tuple(float(v) for v in data["display_rect"])
        if len(display) != 4:
            raise ScenarioError(f"{path}.display_rect needs [xlo,ylo,xhi,yhi]")
    if "rect" in data:
        rect = data["rect"]
        if len(rect) != 4:
            raise ScenarioError(f"{path}.rect needs [xlo,ylo,xhi,yhi]")
        xlo, ylo, xhi, yhi = (float(v) for v in rect)
        return rect_faces(xlo, ylo, xhi, yhi), display
    if "faces" in data:
        faces = []
        for k, f in enumerate(data["faces"]):
            a = f.get("a")
            if a is None or len(a) != 2 or "b" not in f:
                raise ScenarioError(
                    f"{path}.faces[{k}] needs 'a' (2 coefficients) and 'b'"
                )
            faces.append(((float(a[0]), float(a[1])), float(f["b"])))
        return tuple(faces), display
    raise ScenarioError(f"{path} needs either 'rect' or 'faces'")


def scenario_from_dict(data: dict) -> Scenario:
    if not isinstance(data, dict):
        raise ScenarioError("scenario document must be a JSON object")
    version = data.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ScenarioError(
            f"unsupported schema_version {version} (expected {SCHEMA_VERSION})"
        )
    grid_data = _get(data, "grid", "scenario")
    grid = GridSpec(
        int(_get(grid_data, "cells_per_side", "grid")),
        float(_get(grid_data, "cell_size", "grid")),
        float(_get(grid_data, "x_min", "grid")),
        float(_get(grid_data, "y_min", "grid")),
    )
    ch = _get(data, "channel", "scenario")
    channel = ChannelConfig(
        ChannelHyperparams(
            float(_get(ch, "l0_db", "channel")),
            float(_get(ch, "path_loss_exponent", "channel")),
            float(_get(ch, "fading_var_db2", "channel")),
            float(_get(ch, "shadowing_var_db2", "channel")),
            float(_get(ch, "length_scale_m", "channel")),
        ),
        ch.get("training_csv"),
        float(ch.get("rssi_exclusion_db", 0.1)),
    )
    agents = []
    for i, a in enumerate(_get(data, "agents", "scenario")):
        faces, display = _faces_from(_get(a, "goal", f"agents[{i}]"), f"agents[{i}].goal")
        agents.append(
            AgentSpec(
                tuple(float(v) for v in _get(a, "initial_state", f"agents[{i}]")),
                Polytope(faces, display),
                float(a.get("mass", 1.0)),
            )
        )
    obstacles = []
    for i, o in enumerate(data.get("obstacles", [])):
        faces, display = _faces_from(o, f"obstacles[{i}]")
        obstacles.append(Polytope(faces, display))
    sd = data.get("safety_distance", [0.5, 0.5])
    if len(sd) != 2:
        raise ScenarioError("safety_distance needs [d1, d2]")
    dyn = data.get("dynamics")
    a_d = tuple(tuple(float(v) for v in row) for row in dyn["a_d"]) if dyn else PAPER_A_D
    b_d = tuple(tuple(float(v) for v in row) for row in dyn["b_d"]) if dyn else PAPER_B_D
    pairs_raw = data.get("comm_pairs")
    pairs = None
    if pairs_raw is not None:
        # JSON uses the paper's 1-based agent numbering.
        pairs = tuple(tuple(sorted((int(p) - 1, int(q) - 1))) for p, q in pairs_raw)
    return Scenario(
        agents=tuple(agents),
        obstacles=tuple(obstacles),
        horizon=int(_get(data, "horizon", "scenario")),
        dt=float(data.get("dt", 1.0)),
        u_max=float(_get(data, "u_max", "scenario")),
        v_max=float(_get(data, "v_max", "scenario")),
        polygon_sides=int(data.get("polygon_sides", 8)),
        d1=float(sd[0]),
        d2=float(sd[1]),
        state_weight=tuple(float(v) for v in _get(data, "state_weight", "scenario")),
        input_weight=tuple(float(v) for v in _get(data, "input_weight", "scenario")),
        alpha=float(_get(data, "alpha", "scenario")),
        big_m=float(data.get("big_m", 1e5)),
        epsilon=float(data.get("epsilon", 1e-4)),
        grid=grid,
        channel=channel,
        a_d=a_d,
        b_d=b_d,
        collision_mode=data.get("collision_mode", "paper_conjunction"),
        obstacle_mode=data.get("obstacle_mode", "disjunction"),
        comm_pairs=pairs,
        big_m_mode=data.get("big_m_mode", BIG_M_LITERAL),
        baseline_mode=bool(data.get("baseline_mode", False)),
        name=data.get("name", "scenario"),
    )


def scenario_from_json(text: str | bytes) -> Scenario:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"invalid JSON: {exc}") from exc
    return scenario_from_dict(data)
