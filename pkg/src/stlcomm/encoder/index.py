"""Mapping between scenario entities and MILP variable ids.

Variable names (visible in MPS output) follow the scheme
``x_<agent>_<t>_<dim>``, ``u_...``, ``sa_...``/``sb_...`` (absolute-value
slacks), ``a_<agent>_<t>``/``b_...``/``r_...`` (grid cell integers),
``O_<p>_<q>_<i>_<j>_<t>`` (occupancy binaries), ``z<node>_<t>``
(formula satisfaction binaries).  Agents are numbered 1-based in names,
matching the scenario file; all ids are 0-based model indices.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class DecisionIndex:
    num_agents: int
    horizon: int
    state: dict[tuple[int, int, int], int] = field(default_factory=dict)
    control: dict[tuple[int, int, int], int] = field(default_factory=dict)
    state_slack: dict[tuple[int, int, int], int] = field(default_factory=dict)
    control_slack: dict[tuple[int, int, int], int] = field(default_factory=dict)
    cell_row: dict[tuple[int, int], int] = field(default_factory=dict)
    cell_col: dict[tuple[int, int], int] = field(default_factory=dict)
    partition: dict[tuple[int, int], int] = field(default_factory=dict)
    occupancy: dict[tuple[int, int, int], np.ndarray] = field(default_factory=dict)
    formula_z: dict[tuple[int, int], int] = field(default_factory=dict)
    top_z: dict[int, int] = field(default_factory=dict)
    pairs: tuple[tuple[int, int], ...] = ()

    def state_id(self, agent: int, t: int, dim: int) -> int:
        return self.state[(agent, t, dim)]

    def control_id(self, agent: int, t: int, dim: int) -> int:
        return self.control[(agent, t, dim)]

    def partition_id(self, agent: int, t: int) -> int:
        return self.partition[(agent, t)]

    def occupancy_ids(self, p: int, q: int, t: int) -> np.ndarray:
        """(n, n) array of O variable ids for pair (p, q) at step t."""
        return self.occupancy[(p, q, t)]

    def states_of(self, values: np.ndarray, agent: int) -> np.ndarray:
        """(horizon+1, 4) decoded state trajectory."""
        out = np.empty((self.horizon + 1, 4))
        for t in range(self.horizon + 1):
            for k in range(4):
                out[t, k] = values[self.state[(agent, t, k)]]
        return out

    def controls_of(self, values: np.ndarray, agent: int) -> np.ndarray:
        """(horizon, 2) decoded input trajectory."""
        out = np.empty((self.horizon, 2))
        for t in range(self.horizon):
            for k in range(2):
                out[t, k] = values[self.control[(agent, t, k)]]
        return out

    def partitions_of(self, values: np.ndarray, agent: int) -> np.ndarray:
        """(horizon+1,) decoded 1-based partition index per step (rounded)."""
        out = np.empty(self.horizon + 1, dtype=int)
        for t in range(self.horizon + 1):
            out[t] = int(round(values[self.partition[(agent, t)]]))
        return out

    def stacked_signal(self, values: np.ndarray) -> np.ndarray:
        """(horizon+1, 4*P) stacked state signal for the monitor."""
        out = np.empty((self.horizon + 1, 4 * self.num_agents))
        for agent in range(self.num_agents):
            out[:, 4 * agent : 4 * agent + 4] = self.states_of(values, agent)
        return out
