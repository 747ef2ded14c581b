"""A tiny expression language for user-supplied generator functions.

Grammar (user-facing), in one variable ``x``:

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom (('^' | '**') unary)?          right-associative
    atom   := NUMBER | 'x' | 'pi' | 'e'
            | ('sin' | 'cos' | 'abs' | 'sqrt') '(' expr ')'
            | ('min' | 'max') '(' expr ',' expr ')'
            | '(' expr ')'

Numbers are decimal literals with optional fraction and exponent.  Error
offsets are 1-based byte positions into the source string.

Derivatives are symbolic.  min, max and abs differentiate piecewise with the
LEFT branch chosen on the tie set, carried by an internal selector node that
prints as ``ifle(a, b, p, q)`` (p where a <= b, else q).  The power rule for
a variable base and exponent needs a logarithm, carried by an internal
``ln(t)`` node.  Both internal forms re-parse, so printing and parsing round
trip for every expression this module can produce, but neither is part of
the advertised input grammar.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

__all__ = [
    "Expression",
    "Num",
    "Var",
    "Unary",
    "Binary",
    "Branch",
    "ExpressionError",
    "ExpressionSyntaxError",
    "UnknownIdentifierError",
    "EvaluationDomainError",
    "parse",
    "evaluate",
    "differentiate",
    "to_source",
]


# ---------------------------------------------------------------------------
# Errors


class ExpressionError(ValueError):
    """Base class for everything this module raises on purpose."""


class ExpressionSyntaxError(ExpressionError):
    """Malformed source text.

    offset is the 1-based byte position of the offending token (end of input
    counts as len(source) + 1); expected is the set of token descriptions
    that would have been accepted there.
    """

    def __init__(self, message: str, offset: int, expected: frozenset[str]) -> None:
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset
        self.expected = expected


class UnknownIdentifierError(ExpressionError):
    """An identifier that is not x, pi, e or a known function."""

    def __init__(self, name: str, offset: int) -> None:
        super().__init__(f"unknown identifier {name!r} at offset {offset}")
        self.name = name
        self.offset = offset


class EvaluationDomainError(ExpressionError):
    """Evaluation left the real domain (division by zero, sqrt of a negative,
    zero to a negative power, overflow past the finite doubles)."""

    def __init__(self, message: str, node: "Expression", x: float) -> None:
        super().__init__(f"{message} in {to_source(node)!r} at x={x!r}")
        self.node = node
        self.x = x


# ---------------------------------------------------------------------------
# AST


class Expression:
    """Base node type; concrete nodes are frozen dataclasses."""

    __slots__ = ()

    def __str__(self) -> str:
        return to_source(self)


@dataclass(frozen=True)
class Num(Expression):
    value: float


@dataclass(frozen=True)
class Var(Expression):
    """The single free variable x."""


@dataclass(frozen=True)
class Unary(Expression):
    op: str  # neg | sin | cos | abs | sqrt | ln
    arg: Expression


@dataclass(frozen=True)
class Binary(Expression):
    op: str  # + | - | * | / | ^ | min | max
    lhs: Expression
    rhs: Expression


@dataclass(frozen=True)
class Branch(Expression):
    """Selector: value is ``low`` when a <= b, else ``high``.

    Only produced by differentiation; prints as ifle(a, b, low, high).
    """

    a: Expression
    b: Expression
    low: Expression
    high: Expression


_X = Var()

_UNARY_FUNCS = ("sin", "cos", "abs", "sqrt", "ln")
_CONSTANTS = {"pi": math.pi, "e": math.e}


# ---------------------------------------------------------------------------
# Tokenizer

_OPERATORS = ("**", "+", "-", "*", "/", "^", "(", ")", ",")


@dataclass(frozen=True)
class _Token:
    kind: str  # "number" | "ident" | "op" | "end"
    text: str
    pos: int  # 1-based byte offset


def _tokenize(source: str) -> list[_Token]:
    tokens: list[_Token] = []
    i = 0
    n = len(source)
    while i < n:
        ch = source[i]
        if ch in " \t\r\n":
            i += 1
            continue
        pos = i + 1
        if ch.isdigit() or (ch == "." and i + 1 < n and source[i + 1].isdigit()):
            j = i
            while j < n and source[j].isdigit():
                j += 1
            if j < n and source[j] == ".":
                j += 1
                while j < n and source[j].isdigit():
                    j += 1
            if j < n and source[j] in "eE":
                k = j + 1
                if k < n and source[k] in "+-":
                    k += 1
                if k < n and source[k].isdigit():
                    j = k
                    while j < n and source[j].isdigit():
                        j += 1
            tokens.append(_Token("number", source[i:j], pos))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            tokens.append(_Token("ident", source[i:j], pos))
            i = j
            continue
        if source.startswith("**", i):
            tokens.append(_Token("op", "**", pos))
            i += 2
            continue
        if ch in "+-*/^(),":
            tokens.append(_Token("op", ch, pos))
            i += 1
            continue
        raise ExpressionSyntaxError(
            f"unexpected character {ch!r}", pos, frozenset({"token"})
        )
    tokens.append(_Token("end", "", n + 1))
    return tokens


# ---------------------------------------------------------------------------
# Parser

_ATOM_EXPECTED = frozenset({"number", "'x'", "'pi'", "'e'", "function", "'('", "'-'"})


class _Parser:
    def __init__(self, source: str) -> None:
        self._tokens = _tokenize(source)
        self._i = 0

    def _peek(self) -> _Token:
        return self._tokens[self._i]

    def _advance(self) -> _Token:
        tok = self._tokens[self._i]
        self._i += 1
        return tok

    def _match_op(self, *texts: str) -> _Token | None:
        tok = self._peek()
        if tok.kind == "op" and tok.text in texts:
            return self._advance()
        return None

    def _expect_op(self, text: str) -> _Token:
        tok = self._peek()
        if tok.kind == "op" and tok.text == text:
            return self._advance()
        raise ExpressionSyntaxError(
            f"expected {text!r}", tok.pos, frozenset({f"'{text}'"})
        )

    def parse(self) -> Expression:
        node = self._expr()
        tok = self._peek()
        if tok.kind != "end":
            raise ExpressionSyntaxError(
                f"unexpected trailing input {tok.text!r}",
                tok.pos,
                frozenset({"end of input", "operator"}),
            )
        return node

    def _expr(self) -> Expression:
        node = self._term()
        while True:
            tok = self._match_op("+", "-")
            if tok is None:
                return node
            node = Binary(tok.text, node, self._term())

    def _term(self) -> Expression:
        node = self._unary()
        while True:
            tok = self._match_op("*", "/")
            if tok is None:
                return node
            node = Binary(tok.text, node, self._unary())

    def _unary(self) -> Expression:
        if self._match_op("-"):
            return Unary("neg", self._unary())
        return self._power()

    def _power(self) -> Expression:
        base = self._atom()
        if self._match_op("^", "**"):
            return Binary("^", base, self._unary())
        return base

    def _atom(self) -> Expression:
        tok = self._peek()
        if tok.kind == "number":
            self._advance()
            value = float(tok.text)
            if not math.isfinite(value):
                raise ExpressionSyntaxError(
                    f"numeric literal {tok.text!r} overflows a double",
                    tok.pos,
                    frozenset({"number"}),
                )
            return Num(value)
        if tok.kind == "ident":
            self._advance()
            name = tok.text
            if name == "x":
                return _X
            if name in _CONSTANTS:
                return Num(_CONSTANTS[name])
            if name in _UNARY_FUNCS:
                self._expect_op("(")
                arg = self._expr()
                self._expect_op(")")
                return Unary(name, arg)
            if name in ("min", "max"):
                self._expect_op("(")
                lhs = self._expr()
                self._expect_op(",")
                rhs = self._expr()
                self._expect_op(")")
                return Binary(name, lhs, rhs)
            if name == "ifle":
                self._expect_op("(")
                a = self._expr()
                self._expect_op(",")
                b = self._expr()
                self._expect_op(",")
                low = self._expr()
                self._expect_op(",")
                high = self._expr()
                self._expect_op(")")
                return Branch(a, b, low, high)
            raise UnknownIdentifierError(name, tok.pos)
        if tok.kind == "op" and tok.text == "(":
            self._advance()
            node = self._expr()
            self._expect_op(")")
            return node
        raise ExpressionSyntaxError(
            f"expected an operand, found {tok.text or 'end of input'!r}",
            tok.pos,
            _ATOM_EXPECTED,
        )


def parse(source: str) -> Expression:
    """Parse source text into an expression tree."""
    return _Parser(source).parse()


# ---------------------------------------------------------------------------
# Evaluation


def evaluate(expr: Expression, x: float) -> float:
    """Evaluate expr at x; finite result or EvaluationDomainError."""
    if not math.isfinite(x):
        raise ValueError("x must be finite")
    return _eval(expr, float(x))


def _require_finite(value: float, node: Expression, x: float) -> float:
    if not math.isfinite(value):
        raise EvaluationDomainError("result is not finite", node, x)
    return value


def _eval(node: Expression, x: float) -> float:
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return x
    if isinstance(node, Unary):
        v = _eval(node.arg, x)
        op = node.op
        if op == "neg":
            return -v
        if op == "sin":
            return math.sin(v)
        if op == "cos":
            return math.cos(v)
        if op == "abs":
            return abs(v)
        if op == "sqrt":
            if v < 0.0:
                raise EvaluationDomainError("sqrt of a negative value", node, x)
            return math.sqrt(v)
        if op == "ln":
            if v <= 0.0:
                raise EvaluationDomainError("log of a non-positive value", node, x)
            return math.log(v)
        raise AssertionError(f"unhandled unary op {op!r}")
    if isinstance(node, Binary):
        a = _eval(node.lhs, x)
        b = _eval(node.rhs, x)
        op = node.op
        if op == "+":
            return _require_finite(a + b, node, x)
        if op == "-":
            return _require_finite(a - b, node, x)
        if op == "*":
            return _require_finite(a * b, node, x)
        if op == "/":
            if b == 0.0:
                raise EvaluationDomainError("division by zero", node, x)
            return _require_finite(a / b, node, x)
        if op == "^":
            return _pow_value(a, b, node, x)
        if op == "min":
            return min(a, b)
        if op == "max":
            return max(a, b)
        raise AssertionError(f"unhandled binary op {op!r}")
    if isinstance(node, Branch):
        if _eval(node.a, x) <= _eval(node.b, x):
            return _eval(node.low, x)
        return _eval(node.high, x)
    raise TypeError(f"not an expression node: {node!r}")


def _pow_value(a: float, b: float, node: Expression, x: float) -> float:
    if a == 0.0 and b < 0.0:
        raise EvaluationDomainError("zero raised to a negative power", node, x)
    if a < 0.0 and b != math.floor(b):
        raise EvaluationDomainError(
            "negative base with a non-integer exponent", node, x
        )
    try:
        value = a**b
    except OverflowError:
        raise EvaluationDomainError("overflow", node, x) from None
    except ZeroDivisionError:  # pragma: no cover - guarded above
        raise EvaluationDomainError("zero raised to a negative power", node, x) from None
    if isinstance(value, complex):  # pragma: no cover - guarded above
        raise EvaluationDomainError("complex result", node, x)
    return _require_finite(value, node, x)


# ---------------------------------------------------------------------------
# Differentiation (with constant folding in the smart constructors)

_ZERO = Num(0.0)
_ONE = Num(1.0)


def _is_num(node: Expression, value: float | None = None) -> bool:
    return isinstance(node, Num) and (value is None or node.value == value)


def _neg(a: Expression) -> Expression:
    if isinstance(a, Num):
        return Num(-a.value)
    if isinstance(a, Unary) and a.op == "neg":
        return a.arg
    return Unary("neg", a)


def _fold(a: Expression, b: Expression, op: str, value: float) -> Expression:
    if math.isfinite(value):
        return Num(value)
    return Binary(op, a, b)


def _add(a: Expression, b: Expression) -> Expression:
    if _is_num(a, 0.0):
        return b
    if _is_num(b, 0.0):
        return a
    if isinstance(a, Num) and isinstance(b, Num):
        return _fold(a, b, "+", a.value + b.value)
    return Binary("+", a, b)


def _sub(a: Expression, b: Expression) -> Expression:
    if _is_num(b, 0.0):
        return a
    if _is_num(a, 0.0):
        return _neg(b)
    if isinstance(a, Num) and isinstance(b, Num):
        return _fold(a, b, "-", a.value - b.value)
    return Binary("-", a, b)


def _mul(a: Expression, b: Expression) -> Expression:
    if _is_num(a, 0.0) or _is_num(b, 0.0):
        return _ZERO
    if _is_num(a, 1.0):
        return b
    if _is_num(b, 1.0):
        return a
    if isinstance(a, Num) and isinstance(b, Num):
        return _fold(a, b, "*", a.value * b.value)
    return Binary("*", a, b)


def _div(a: Expression, b: Expression) -> Expression:
    if _is_num(b, 1.0):
        return a
    if isinstance(a, Num) and isinstance(b, Num) and b.value != 0.0:
        folded = a.value / b.value
        if math.isfinite(folded):
            return Num(folded)
    return Binary("/", a, b)


def _pow(a: Expression, b: Expression) -> Expression:
    if _is_num(b, 1.0):
        return a
    if _is_num(b, 0.0):
        return _ONE
    return Binary("^", a, b)


def _ln(a: Expression) -> Expression:
    if isinstance(a, Num) and a.value > 0.0:
        return Num(math.log(a.value))
    return Unary("ln", a)


def differentiate(expr: Expression) -> Expression:
    """Symbolic derivative with the left-branch convention on tie sets.

    min(a,b), max(a,b) and abs(u) differentiate piecewise; on the tie set the
    branch written first (a for min/max, the non-negated branch for abs) is
    the one whose derivative is used.  The result is an ordinary expression:
    evaluating it at a kink yields the left-branch one-sided derivative.
    """
    if isinstance(expr, Num):
        return _ZERO
    if isinstance(expr, Var):
        return _ONE
    if isinstance(expr, Unary):
        du = differentiate(expr.arg)
        u = expr.arg
        op = expr.op
        if op == "neg":
            return _neg(du)
        if op == "sin":
            return _mul(Unary("cos", u), du)
        if op == "cos":
            return _neg(_mul(Unary("sin", u), du))
        if op == "abs":
            # |u| treated as u for u >= 0, -u for u < 0; tie -> left branch u.
            return Branch(_ZERO, u, du, _neg(du))
        if op == "sqrt":
            return _div(du, _mul(Num(2.0), Unary("sqrt", u)))
        if op == "ln":
            return _div(du, u)
        raise AssertionError(f"unhandled unary op {op!r}")
    if isinstance(expr, Binary):
        a, b = expr.lhs, expr.rhs
        da = differentiate(a)
        db = differentiate(b)
        op = expr.op
        if op == "+":
            return _add(da, db)
        if op == "-":
            return _sub(da, db)
        if op == "*":
            return _add(_mul(da, b), _mul(a, db))
        if op == "/":
            return _div(_sub(_mul(da, b), _mul(a, db)), _mul(b, b))
        if op == "^":
            if isinstance(b, Num):
                c = b.value
                return _mul(_mul(b, _pow(a, Num(c - 1.0))), da)
            if isinstance(a, Num):
                return _mul(_mul(expr, _ln(a)), db)
            # general power rule: a^b * (db*ln(a) + b*da/a)
            return _mul(expr, _add(_mul(db, _ln(a)), _div(_mul(b, da), a)))
        if op == "min":
            return Branch(a, b, da, db)
        if op == "max":
            return Branch(b, a, da, db)
        raise AssertionError(f"unhandled binary op {op!r}")
    if isinstance(expr, Branch):
        return Branch(expr.a, expr.b, differentiate(expr.low), differentiate(expr.high))
    raise TypeError(f"not an expression node: {expr!r}")


# ---------------------------------------------------------------------------
# Printing

_PREC_ADD = 1
_PREC_MUL = 2
_PREC_NEG = 3
_PREC_POW = 4
_PREC_ATOM = 5


def _render(node: Expression) -> tuple[str, int]:
    if isinstance(node, Num):
        text = repr(node.value)
        prec = _PREC_NEG if text.startswith("-") else _PREC_ATOM
        return text, prec
    if isinstance(node, Var):
        return "x", _PREC_ATOM
    if isinstance(node, Unary):
        if node.op == "neg":
            inner = _wrap(node.arg, _PREC_NEG)
            return f"-{inner}", _PREC_NEG
        inner, _ = _render(node.arg)
        return f"{node.op}({inner})", _PREC_ATOM
    if isinstance(node, Binary):
        op = node.op
        if op in ("min", "max"):
            return f"{op}({_render(node.lhs)[0]},{_render(node.rhs)[0]})", _PREC_ATOM
        if op == "^":
            lhs = _wrap(node.lhs, _PREC_ATOM)
            rhs = _wrap(node.rhs, _PREC_NEG)
            return f"{lhs}^{rhs}", _PREC_POW
        if op in ("*", "/"):
            lhs = _wrap(node.lhs, _PREC_MUL)
            rhs = _wrap(node.rhs, _PREC_NEG)
            return f"{lhs}{op}{rhs}", _PREC_MUL
        lhs = _wrap(node.lhs, _PREC_ADD)
        rhs = _wrap(node.rhs, _PREC_MUL)
        return f"{lhs}{op}{rhs}", _PREC_ADD
    if isinstance(node, Branch):
        parts = ",".join(
            _render(part)[0] for part in (node.a, node.b, node.low, node.high)
        )
        return f"ifle({parts})", _PREC_ATOM
    raise TypeError(f"not an expression node: {node!r}")


def _wrap(node: Expression, min_prec: int) -> str:
    text, prec = _render(node)
    if prec < min_prec:
        return f"({text})"
    return text


def to_source(expr: Expression) -> str:
    """Render an expression to source text that parses back to the same tree
    (same node shapes up to constant spelling, identical evaluation)."""
    return _render(expr)[0]
