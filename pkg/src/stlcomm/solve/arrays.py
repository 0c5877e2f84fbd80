"""Conversion from the MILP model to array form shared by the LP engines."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse

from ..milp.model import EQ, GE, LE, MAXIMIZE, MilpModel

REL_LE = 0
REL_EQ = 1
REL_GE = 2

_REL_CODE = {LE: REL_LE, EQ: REL_EQ, GE: REL_GE}


@dataclass
class ProblemArrays:
    """Minimisation-form arrays for a model (maximise is pre-negated)."""

    c: np.ndarray
    A: scipy.sparse.csr_matrix
    rel: np.ndarray
    rhs: np.ndarray
    lb: np.ndarray
    ub: np.ndarray
    integer_mask: np.ndarray
    constant: float
    negated: bool  # True when the original sense was maximise

    @property
    def num_rows(self) -> int:
        return self.A.shape[0]

    @property
    def num_cols(self) -> int:
        return self.A.shape[1]

    def objective_of(self, x: np.ndarray) -> float:
        """Objective in the model's original sense, constant included."""
        return self.bound_of(float(self.c @ x))

    def bound_of(self, raw: float) -> float:
        """Map a raw minimisation value (no constant) to the original sense."""
        full = raw + self.constant
        return -full if self.negated else full

    def dense(self) -> np.ndarray:
        return self.A.toarray()


def model_to_arrays(model: MilpModel) -> ProblemArrays:
    n = model.num_variables
    m = model.num_constraints
    lb, ub = model.bounds_arrays()
    c = np.zeros(n)
    for var, coef in model.objective.coeffs:
        c[var] = coef
    constant = model.objective.constant
    negated = model.sense == MAXIMIZE
    if negated:
        c = -c
        constant = -constant
    rel = np.zeros(m, dtype=np.int8)
    rhs = np.zeros(m)
    data, rows, cols = [], [], []
    for con in model.constraints:
        rel[con.index] = _REL_CODE[con.relation]
        rhs[con.index] = con.rhs
        for var, coef in con.coeffs:
            rows.append(con.index)
            cols.append(var)
            data.append(coef)
    A = scipy.sparse.csr_matrix(
        (data, (rows, cols)), shape=(m, n), dtype=float
    )
    integer_mask = np.zeros(n, dtype=bool)
    for idx in model.integer_indices:
        integer_mask[idx] = True
    return ProblemArrays(c, A, rel, rhs, lb, ub, integer_mask, constant, negated)
