"""External MILP solver adapter via MPS + solution-file exchange.

The command template holds ``{mps}`` and ``{sol}`` placeholders.  The
model is written as free-format MPS to a temp directory, the command is
run without a shell, and the solution file is parsed back by variable
name.  Parsed assignments are validated with ``check_solution`` before
being returned, so an inconsistent external solver is reported rather
than trusted.

Solution file format: ``<name> <value>`` per line.  Lines starting with
``#``, ``*``, or ``//`` are comments; ``=key= value`` lines carry solver
metadata (``=status=``, ``=obj=``).  CBC-style ``<idx> <name> <value>
<cost>`` rows are also accepted.  Variables missing from the file
default to zero (solvers routinely omit zeros).
"""

from __future__ import annotations

import math
import shlex
import subprocess
import sys
import tempfile
import time
from pathlib import Path

from ..milp.model import MilpModel
from ..milp.mps import write_mps
from .bb import (
    STATUS_INFEASIBLE,
    STATUS_LIMIT,
    STATUS_OPTIMAL,
    STATUS_UNBOUNDED,
    SolveOptions,
    SolveResult,
    SolverError,
)


class ExternalSolverError(SolverError):
    pass


def default_external_command() -> str:
    """Command template for the bundled MPS front end to scipy's HiGHS."""
    return f"{shlex.quote(sys.executable)} -m stlcomm.solve.mps_cli {{mps}} {{sol}}"


def parse_solution_file(text: str) -> tuple[dict[str, float], dict[str, str]]:
    """Parse name/value lines plus ``=key= value`` metadata."""
    values: dict[str, float] = {}
    meta: dict[str, str] = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith(("#", "*", "//")):
            continue
        parts = line.split()
        if parts[0].startswith("=") and parts[0].endswith("="):
            if len(parts) > 1:
                meta[parts[0].strip("=")] = parts[1]
            continue
        candidates = []
        if len(parts) >= 2:
            candidates.append((parts[0], parts[1]))
        if len(parts) >= 3:
            candidates.append((parts[1], parts[2]))  # CBC: idx name value cost
        for name, value_text in candidates:
            try:
                values[name] = float(value_text)
                break
            except ValueError:
                continue
    return values, meta


def solve_external(model: MilpModel, options: SolveOptions | None = None) -> SolveResult:
    """Solve by invoking an external MPS-consuming solver."""
    options = options or SolveOptions(mode="external")
    template = options.external_cmd or default_external_command()
    t0 = time.perf_counter()
    with tempfile.TemporaryDirectory(prefix="stlcomm_") as tmp:
        mps_path = Path(tmp) / "model.mps"
        sol_path = Path(tmp) / "model.sol"
        write_mps(model, str(mps_path))
        argv = [
            part.format(mps=str(mps_path), sol=str(sol_path))
            for part in shlex.split(template)
        ]
        try:
            proc = subprocess.run(
                argv,
                capture_output=True,
                text=True,
                timeout=options.time_limit,
            )
        except FileNotFoundError as exc:
            raise ExternalSolverError(f"external solver not found: {argv[0]}") from exc
        except subprocess.TimeoutExpired as exc:
            raise ExternalSolverError(
                f"external solver exceeded the {options.time_limit}s time limit"
            ) from exc
        wall = time.perf_counter() - t0
        sol_text = sol_path.read_text() if sol_path.exists() else ""
        if proc.returncode != 0 and not sol_text:
            raise ExternalSolverError(
                f"external solver exited with {proc.returncode}: "
                f"{proc.stderr.strip()[-500:] or proc.stdout.strip()[-500:]}"
            )
        values, meta = parse_solution_file(sol_text)
        status = meta.get("status", "").lower()
        if status in ("infeasible",) or (
            not values and "infeasible" in (proc.stdout + proc.stderr).lower()
        ):
            return SolveResult(STATUS_INFEASIBLE, None, math.nan, math.nan, 0, wall)
        if status in ("unbounded",):
            return SolveResult(STATUS_UNBOUNDED, None, math.nan, math.nan, 0, wall)
        if not values:
            raise ExternalSolverError(
                "external solver produced no parseable solution "
                f"(stdout tail: {proc.stdout.strip()[-300:]!r})"
            )
        assignment: dict[int, float] = {}
        unknown = []
        for name, value in values.items():
            if model.has_variable(name):
                assignment[model.variable_id(name)] = value
            else:
                unknown.append(name)
        if unknown and not assignment:
            raise ExternalSolverError(
                f"solution names do not match the model (first: {unknown[:3]})"
            )
        for var in model.variables:
            assignment.setdefault(var.index, 0.0)
        report = model.check_solution(assignment, tol=options.feas_tol)
        if not report.feasible:
            worst = max(report.violations, key=lambda v: v.amount)
            raise ExternalSolverError(
                "external solver returned an infeasible point "
                f"({len(report.violations)} violations; worst {worst.kind} "
                f"{worst.name} by {worst.amount:.3e})"
            )
        objective = report.objective
        if status == "limit":
            result_status = STATUS_LIMIT
        else:
            result_status = STATUS_OPTIMAL
        bound = float(meta.get("bound", objective))
        return SolveResult(result_status, assignment, objective, bound, 0, wall)


def solve(model: MilpModel, options: SolveOptions | None = None) -> SolveResult:
    """Dispatch on options.mode: embedded branch-and-bound or external."""
    from .bb import solve_bb

    options = options or SolveOptions()
    if options.mode == "external":
        return solve_external(model, options)
    return solve_bb(model, options)
