"""Stand-alone MPS solver front end.

Reads a free-format MPS file, solves it with scipy's HiGHS (``milp``),
and writes a plain solution file: ``=status=`` / ``=obj=`` metadata
lines followed by one ``<name> <value>`` line per variable.  Installed
as the ``stlcomm-solve-mps`` console script; it is the default external
solver used by the MPS exchange path.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np
import scipy.sparse
from scipy.optimize import Bounds, LinearConstraint, milp

from ..milp.model import BINARY, EQ, GE, INTEGER, LE
from ..milp.mps import read_mps


def solve_mps_file(mps_path: str, sol_path: str, time_limit: float | None = None,
                   rel_gap: float = 1e-9) -> str:
    model = read_mps(mps_path)
    n = model.num_variables
    c = np.zeros(n)
    for var, coef in model.objective.coeffs:
        c[var] = coef
    lb, ub = model.bounds_arrays()
    integrality = np.zeros(n)
    for idx in model.integer_indices:
        integrality[idx] = 1
    constraints = []
    if model.num_constraints:
        data, rows, cols = [], [], []
        lo = np.full(model.num_constraints, -np.inf)
        hi = np.full(model.num_constraints, np.inf)
        for con in model.constraints:
            for var, coef in con.coeffs:
                rows.append(con.index)
                cols.append(var)
                data.append(coef)
            if con.relation == LE:
                hi[con.index] = con.rhs
            elif con.relation == GE:
                lo[con.index] = con.rhs
            else:
                lo[con.index] = hi[con.index] = con.rhs
        A = scipy.sparse.csr_matrix(
            (data, (rows, cols)), shape=(model.num_constraints, n)
        )
        constraints.append(LinearConstraint(A, lo, hi))
    options = {"mip_rel_gap": rel_gap}
    if time_limit is not None:
        options["time_limit"] = time_limit
    result = milp(
        c=c,
        constraints=constraints,
        integrality=integrality,
        bounds=Bounds(lb, ub),
        options=options,
    )
    lines = []
    if result.status == 0:
        status = "optimal"
    elif result.status == 2:
        status = "infeasible"
    elif result.status == 3:
        status = "unbounded"
    elif result.status == 1:
        status = "limit"
    else:
        status = "error"
    lines.append(f"=status= {status}")
    if result.x is not None:
        objective = float(c @ result.x) + model.objective.constant
        lines.append(f"=obj= {objective!r}")
        dual_bound = getattr(result, "mip_dual_bound", None)
        if dual_bound is not None:
            lines.append(f"=bound= {float(dual_bound) + model.objective.constant!r}")
        for var in model.variables:
            lines.append(f"{var.name} {result.x[var.index]!r}")
    with open(sol_path, "w", encoding="ascii") as handle:
        handle.write("\n".join(lines) + "\n")
    return status


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="stlcomm-solve-mps",
        description="Solve a free-format MPS file with scipy's HiGHS backend.",
    )
    parser.add_argument("mps", help="input MPS path")
    parser.add_argument("sol", help="output solution path")
    parser.add_argument("--time-limit", type=float, default=None)
    parser.add_argument("--rel-gap", type=float, default=1e-9)
    args = parser.parse_args(argv)
    try:
        status = solve_mps_file(args.mps, args.sol, args.time_limit, args.rel_gap)
    except Exception as exc:  # surface parse/solve errors on stderr
        print(f"stlcomm-solve-mps: {exc}", file=sys.stderr)
        return 1
    return 0 if status in ("optimal", "limit", "infeasible", "unbounded") else 1


if __name__ == "__main__":
    sys.exit(main())
