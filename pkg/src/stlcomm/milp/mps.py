"""Free-format MPS writer and reader.

The writer is deterministic: identical models produce byte-identical
files.  Rows appear in creation order, column entries in ascending
variable-id order (objective entry first), and every variable gets
explicit bounds so readers with different defaults agree.  A maximise
objective is negated on output and flagged in the NAME record.

The reader understands the subset the writer emits (plus MPS bound
defaults) and is used by the bundled MPS solver front end and the
round-trip tests.
"""

from __future__ import annotations

import io
from typing import TextIO

from .model import (
    BINARY,
    CONTINUOUS,
    EQ,
    GE,
    INTEGER,
    LE,
    MAXIMIZE,
    MINIMIZE,
    LinearExpr,
    MilpModel,
    ModelError,
)

OBJECTIVE_ROW = "OBJ"

_REL_TO_ROWTYPE = {LE: "L", GE: "G", EQ: "E"}
_ROWTYPE_TO_REL = {"L": LE, "G": GE, "E": EQ}


def _num(value: float) -> str:
    out = repr(float(value))
    if out == "-0.0":
        return "0.0"
    return out


def render_mps(model: MilpModel) -> str:
    """Render the model to free-format MPS text."""
    negate = model.sense == MAXIMIZE
    name = model.name + ("_negated_from_max" if negate else "")
    lines = [f"NAME {name}"]
    lines.append("ROWS")
    lines.append(f" N {OBJECTIVE_ROW}")
    for con in model.constraints:
        lines.append(f" {_REL_TO_ROWTYPE[con.relation]} {con.name}")

    obj_coeffs = dict(model.objective.coeffs)
    factor = -1.0 if negate else 1.0
    columns: list[list[tuple[str, float]]] = [[] for _ in model.variables]
    for var, coef in sorted(obj_coeffs.items()):
        columns[var].append((OBJECTIVE_ROW, factor * coef))
    for con in model.constraints:
        for var, coef in con.coeffs:
            columns[var].append((con.name, coef))

    lines.append("COLUMNS")
    in_integer_block = False
    marker_count = 0
    for var in model.variables:
        wants_integer = var.kind in (BINARY, INTEGER)
        if wants_integer and not in_integer_block:
            lines.append(f" MARK{marker_count:04d} 'MARKER' 'INTORG'")
            marker_count += 1
            in_integer_block = True
        elif not wants_integer and in_integer_block:
            lines.append(f" MARK{marker_count:04d} 'MARKER' 'INTEND'")
            marker_count += 1
            in_integer_block = False
        entries = columns[var.index]
        if not entries:
            entries = [(OBJECTIVE_ROW, 0.0)]
        for row_name, coef in entries:
            lines.append(f" {var.name} {row_name} {_num(coef)}")
    if in_integer_block:
        lines.append(f" MARK{marker_count:04d} 'MARKER' 'INTEND'")

    lines.append("RHS")
    if model.objective.constant != 0.0:
        lines.append(f" RHS {OBJECTIVE_ROW} {_num(-factor * model.objective.constant)}")
    for con in model.constraints:
        if con.rhs != 0.0:
            lines.append(f" RHS {con.name} {_num(con.rhs)}")

    lines.append("BOUNDS")
    for var in model.variables:
        lo, up = var.lower, var.upper
        if lo == up:
            lines.append(f" FX BND {var.name} {_num(lo)}")
            continue
        if lo == float("-inf") and up == float("inf"):
            lines.append(f" FR BND {var.name}")
            continue
        if lo == float("-inf"):
            lines.append(f" MI BND {var.name}")
        else:
            lines.append(f" LO BND {var.name} {_num(lo)}")
        if up == float("inf"):
            lines.append(f" PL BND {var.name}")
        else:
            lines.append(f" UP BND {var.name} {_num(up)}")
    lines.append("ENDATA")
    return "\n".join(lines) + "\n"


def write_mps(model: MilpModel, sink) -> None:
    """Write free-format MPS to a path or open text/binary sink."""
    text = render_mps(model)
    if isinstance(sink, (str, bytes)):
        with open(sink, "w", encoding="ascii") as handle:
            handle.write(text)
        return
    if hasattr(sink, "write"):
        try:
            sink.write(text)
        except TypeError:
            sink.write(text.encode("ascii"))
        return
    raise ModelError(f"cannot write MPS to {type(sink).__name__}")


class MpsSyntaxError(ValueError):
    pass


def read_mps(source) -> MilpModel:
    """Parse free-format MPS from a path, text, or open handle."""
    if hasattr(source, "read"):
        text = source.read()
        if isinstance(text, bytes):
            text = text.decode("ascii")
    elif isinstance(source, str) and "\n" not in source:
        with open(source, "r", encoding="ascii") as handle:
            text = handle.read()
    else:
        text = source

    model_name = "model"
    row_types: dict[str, str] = {}
    row_order: list[str] = []
    obj_row: str | None = None
    col_entries: dict[str, list[tuple[str, float]]] = {}
    col_order: list[str] = []
    integer_cols: set[str] = set()
    rhs: dict[str, float] = {}
    bounds: dict[str, list[tuple[str, float | None]]] = {}

    section = None
    in_integer_block = False
    for lineno, raw in enumerate(io.StringIO(text), start=1):
        line = raw.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("*"):
            continue
        if not line[0].isspace():
            parts = line.split()
            section = parts[0].upper()
            if section == "NAME" and len(parts) > 1:
                model_name = parts[1]
            if section == "ENDATA":
                break
            continue
        tokens = line.split()
        if section == "ROWS":
            if len(tokens) != 2:
                raise MpsSyntaxError(f"line {lineno}: malformed row record")
            rtype, rname = tokens[0].upper(), tokens[1]
            if rtype == "N":
                if obj_row is None:
                    obj_row = rname
                continue
            if rtype not in _ROWTYPE_TO_REL:
                raise MpsSyntaxError(f"line {lineno}: unknown row type {rtype!r}")
            row_types[rname] = rtype
            row_order.append(rname)
        elif section == "COLUMNS":
            if len(tokens) >= 3 and tokens[1] == "'MARKER'":
                marker = tokens[2].strip("'").upper()
                in_integer_block = marker == "INTORG"
                continue
            if len(tokens) < 3 or len(tokens) % 2 == 0:
                raise MpsSyntaxError(f"line {lineno}: malformed column record")
            cname = tokens[0]
            if cname not in col_entries:
                col_entries[cname] = []
                col_order.append(cname)
            if in_integer_block:
                integer_cols.add(cname)
            for k in range(1, len(tokens), 2):
                col_entries[cname].append((tokens[k], float(tokens[k + 1])))
        elif section == "RHS":
            if len(tokens) < 3 or len(tokens) % 2 == 0:
                raise MpsSyntaxError(f"line {lineno}: malformed RHS record")
            for k in range(1, len(tokens), 2):
                rhs[tokens[k]] = float(tokens[k + 1])
        elif section == "BOUNDS":
            btype = tokens[0].upper()
            if btype in ("FR", "MI", "PL", "BV"):
                if len(tokens) < 3:
                    raise MpsSyntaxError(f"line {lineno}: malformed bound record")
                bounds.setdefault(tokens[2], []).append((btype, None))
            else:
                if len(tokens) < 4:
                    raise MpsSyntaxError(f"line {lineno}: malformed bound record")
                bounds.setdefault(tokens[2], []).append((btype, float(tokens[3])))
        elif section == "RANGES":
            raise MpsSyntaxError("RANGES section is not supported")

    if obj_row is None:
        raise MpsSyntaxError("no objective (N) row")

    model = MilpModel(model_name)
    inf = float("inf")
    for cname in col_order:
        lo, up = 0.0, inf  # MPS defaults
        explicit_binary = False
        for btype, val in bounds.get(cname, []):
            if btype == "LO":
                lo = val
            elif btype == "UP":
                up = val
            elif btype == "FX":
                lo = up = val
            elif btype == "FR":
                lo, up = -inf, inf
            elif btype == "MI":
                lo = -inf
            elif btype == "PL":
                up = inf
            elif btype == "BV":
                explicit_binary = True
                lo, up = 0.0, 1.0
            else:
                raise MpsSyntaxError(f"unknown bound type {btype!r}")
        if cname in integer_cols or explicit_binary:
            kind = BINARY if (lo, up) == (0.0, 1.0) else INTEGER
        else:
            kind = CONTINUOUS
        if kind == BINARY:
            model.add_variable(cname, kind)
        else:
            model.add_variable(cname, kind, lo, up)

    obj_terms: dict[int, float] = {}
    row_coeffs: dict[str, list[tuple[int, float]]] = {r: [] for r in row_order}
    for cname in col_order:
        var = model.variable_id(cname)
        for row_name, coef in col_entries[cname]:
            if row_name == obj_row:
                obj_terms[var] = obj_terms.get(var, 0.0) + coef
            elif row_name in row_coeffs:
                row_coeffs[row_name].append((var, coef))
            else:
                raise MpsSyntaxError(f"column {cname!r} references unknown row {row_name!r}")
    for rname in row_order:
        model.add_constraint(
            rname,
            row_coeffs[rname],
            _ROWTYPE_TO_REL[row_types[rname]],
            rhs.get(rname, 0.0),
        )
    constant = -rhs.get(obj_row, 0.0)
    model.set_objective(LinearExpr.of(obj_terms, constant), MINIMIZE)
    return model.finalize()
