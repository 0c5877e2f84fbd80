"""Concrete syntax for STL formulas.

Grammar (lowest precedence first)::

    formula    := or_expr
    or_expr    := and_expr ('|' and_expr)*
    and_expr   := until_expr ('&' until_expr)*
    until_expr := unary ('U' '[' a ',' b ']' unary)*        # left associative
    unary      := 'G' '[' a ',' b ']' unary
                | 'F' '[' a ',' b ']' unary
                | '!' unary                                  # predicates only
                | atom
    atom       := '(' formula ')' | 'True' | predicate
    predicate  := term (('+'|'-') term)* CMP number
    term       := [number '*'] 'x' INDEX
    CMP        := '>' | '>=' | '<' | '<='

Indices refer to coordinates of the stacked state vector.  ``<`` and
``<=`` are normalised to ``>`` / ``>=`` with negated coefficients, so a
parsed AST is always in the canonical "mu > 0 / mu >= 0" form.
"""

from __future__ import annotations

import re

from .ast import (
    Always,
    And,
    Eventually,
    Formula,
    FormulaError,
    Negation,
    Or,
    Predicate,
    TrueFormula,
    Until,
)


class ParseError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


_TOKEN_RE = re.compile(
    r"\s*(?:"
    r"(?P<num>\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<var>x\d+)"
    r"|(?P<word>True|[GFU])"
    r"|(?P<op><=|>=|[()\[\],&|!*+\-<>])"
    r")"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            if text[pos:].strip() == "":
                break
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        pos = m.end()
        for kind in ("num", "var", "word", "op"):
            val = m.group(kind)
            if val is not None:
                tokens.append((kind, val, m.start(kind)))
                break
    return tokens


class _Parser:
    def __init__(self, text: str, state_dim: int):
        self.text = text
        self.state_dim = state_dim
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> tuple[str, str, int] | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def next(self) -> tuple[str, str, int]:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", len(self.text))
        self.i += 1
        return tok

    def expect(self, value: str) -> tuple[str, str, int]:
        tok = self.next()
        if tok[1] != value:
            raise ParseError(f"expected {value!r}, found {tok[1]!r}", tok[2])
        return tok

    def accept(self, value: str) -> bool:
        tok = self.peek()
        if tok is not None and tok[1] == value:
            self.i += 1
            return True
        return False

    # grammar rules -----------------------------------------------------

    def formula(self) -> Formula:
        return self.or_expr()

    def or_expr(self) -> Formula:
        parts = [self.and_expr()]
        while self.accept("|"):
            parts.append(self.and_expr())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def and_expr(self) -> Formula:
        parts = [self.until_expr()]
        while self.accept("&"):
            parts.append(self.until_expr())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def until_expr(self) -> Formula:
        left = self.unary()
        while True:
            tok = self.peek()
            if tok is None or tok[1] != "U":
                return left
            self.next()
            a, b = self.interval(tok[2])
            right = self.unary()
            left = Until(left, right, a, b)

    def unary(self) -> Formula:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", len(self.text))
        if tok[1] == "G":
            self.next()
            a, b = self.interval(tok[2])
            return Always(self.unary(), a, b)
        if tok[1] == "F":
            self.next()
            a, b = self.interval(tok[2])
            return Eventually(self.unary(), a, b)
        if tok[1] == "!":
            self.next()
            child = self.unary()
            if not isinstance(child, Predicate):
                raise ParseError("'!' applies only to predicates", tok[2])
            return Negation(child)
        return self.atom()

    def interval(self, at: int) -> tuple[int, int]:
        self.expect("[")
        a_tok = self.next()
        if a_tok[0] != "num" or "." in a_tok[1] or "e" in a_tok[1].lower():
            raise ParseError("interval bounds must be non-negative integers", a_tok[2])
        self.expect(",")
        b_tok = self.next()
        if b_tok[0] != "num" or "." in b_tok[1] or "e" in b_tok[1].lower():
            raise ParseError("interval bounds must be non-negative integers", b_tok[2])
        self.expect("]")
        a, b = int(a_tok[1]), int(b_tok[1])
        if a > b:
            raise ParseError(f"empty interval [{a},{b}]", at)
        return a, b

    def atom(self) -> Formula:
        tok = self.peek()
        assert tok is not None
        if tok[1] == "(":
            # Could be a parenthesised formula or a parenthesised predicate;
            # the formula rule subsumes both.
            self.next()
            inner = self.formula()
            self.expect(")")
            return inner
        if tok[1] == "True":
            self.next()
            return TrueFormula()
        return self.predicate()

    def predicate(self) -> Predicate:
        start = self.peek()
        assert start is not None
        coeffs = [0.0] * self.state_dim
        sign = 1.0
        saw_term = False
        while True:
            tok = self.peek()
            if tok is None:
                raise ParseError("unterminated predicate", len(self.text))
            if tok[1] == "-":
                self.next()
                sign = -sign
                continue
            if tok[1] == "+":
                self.next()
                continue
            if tok[0] == "num":
                self.next()
                coef = sign * float(tok[1])
                self.expect("*")
                var = self.next()
            elif tok[0] == "var":
                self.next()
                coef = sign
                var = tok
            else:
                if saw_term:
                    break
                raise ParseError(f"expected predicate term, found {tok[1]!r}", tok[2])
            if var[0] != "var":
                raise ParseError(f"expected variable, found {var[1]!r}", var[2])
            idx = int(var[1][1:])
            if idx >= self.state_dim:
                raise ParseError(
                    f"variable x{idx} out of range for state dimension {self.state_dim}",
                    var[2],
                )
            coeffs[idx] += coef
            sign = 1.0
            saw_term = True
            nxt = self.peek()
            if nxt is None or nxt[1] not in ("+", "-"):
                break
        op = self.next()
        if op[1] not in (">", ">=", "<", "<="):
            raise ParseError(f"expected comparison, found {op[1]!r}", op[2])
        rhs_sign = 1.0
        while self.accept("-"):
            rhs_sign = -rhs_sign
        num = self.next()
        if num[0] != "num":
            raise ParseError(f"expected number, found {num[1]!r}", num[2])
        k = rhs_sign * float(num[1])
        # Normalise to mu > 0 / mu >= 0 with mu = coeffs . x + offset.
        if op[1] in (">", ">="):
            final = coeffs
            offset = -k
            strict = op[1] == ">"
        else:
            final = [-c for c in coeffs]
            offset = k
            strict = op[1] == "<"
        try:
            return Predicate(tuple(final), offset, strict=strict)
        except FormulaError as exc:
            raise ParseError(str(exc), start[2]) from exc


def parse_formula(text: str, state_dim: int) -> Formula:
    """Parse STL concrete syntax into an AST in negation normal form."""
    if state_dim <= 0:
        raise ValueError(f"state_dim must be positive, got {state_dim}")
    parser = _Parser(text, state_dim)
    result = parser.formula()
    trailing = parser.peek()
    if trailing is not None:
        raise ParseError(f"trailing input {trailing[1]!r}", trailing[2])
    return result


def _fmt(value: float) -> str:
    out = repr(float(value))
    return out[:-2] if out.endswith(".0") else out


def _pred_text(p: Predicate) -> str:
    parts: list[str] = []
    for idx, coef in enumerate(p.coeffs):
        if coef == 0.0:
            continue
        mag = _fmt(abs(coef))
        term = f"{mag}*x{idx}"
        if not parts:
            parts.append(term if coef > 0 else f"-{term}")
        else:
            parts.append(f"+ {term}" if coef > 0 else f"- {term}")
    body = " ".join(parts)
    op = ">" if p.strict else ">="
    return f"({body} {op} {_fmt(-p.offset)})"


def format_formula(formula: Formula) -> str:
    """Render an AST back to concrete syntax (fully parenthesised)."""
    if isinstance(formula, TrueFormula):
        return "True"
    if isinstance(formula, Predicate):
        return _pred_text(formula)
    if isinstance(formula, Negation):
        return f"!{_pred_text(formula.child)}"
    if isinstance(formula, And):
        return "(" + " & ".join(format_formula(c) for c in formula.operands) + ")"
    if isinstance(formula, Or):
        return "(" + " | ".join(format_formula(c) for c in formula.operands) + ")"
    if isinstance(formula, Always):
        return f"G[{formula.a},{formula.b}] {format_formula(formula.child)}"
    if isinstance(formula, Eventually):
        return f"F[{formula.a},{formula.b}] {format_formula(formula.child)}"
    if isinstance(formula, Until):
        return (
            f"({format_formula(formula.left)} U[{formula.a},{formula.b}] "
            f"{format_formula(formula.right)})"
        )
    raise FormulaError(f"unknown formula node {type(formula).__name__}")
