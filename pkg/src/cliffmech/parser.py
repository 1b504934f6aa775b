"""Expression language for user-supplied Lagrangians.

Grammar (whitespace ignored)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := atom ('^' unary)?            # right-associative
    atom    := NUMBER | COORD | NAME '(' expr ')' | '(' expr ')'

Coordinates are flat names ``x0`` .. ``x{8n-1}``; block ``k`` of the
``x_{kn+i}`` notation maps to ``x{k*n}`` .. ``x{k*n+n-1}``.  Unary minus
binds looser than ``^`` so ``-x0^2`` is ``-(x0^2)``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from . import jet
from .geometry import Dimension
from .jet import Jet2

FUNCTIONS = ("sin", "cos", "exp", "sqrt", "ln")


@dataclass(frozen=True)
class SourceSpan:
    begin: int
    end: int

    def __post_init__(self):
        if not 0 <= self.begin <= self.end:
            raise ValueError(f"bad span [{self.begin}, {self.end})")

    def cover(self, other: SourceSpan) -> SourceSpan:
        return SourceSpan(min(self.begin, other.begin), max(self.end, other.end))

    def excerpt(self, source: str) -> str:
        return source[self.begin:self.end]


class ExpressionError(ValueError):
    """Base class for errors that point into the source text."""

    kind = "expression error"

    def __init__(self, message: str, span: SourceSpan, source: str | None = None):
        self.message = message
        self.span = span
        self.source = source
        super().__init__(self._render())

    def _render(self) -> str:
        text = f"{self.kind}: {self.message} at [{self.span.begin}:{self.span.end}]"
        if self.source is not None:
            text += f"\n  {self.source}\n  {' ' * self.span.begin}{'^' * max(1, self.span.end - self.span.begin)}"
        return text


class LexError(ExpressionError):
    kind = "lex error"


class ParseError(ExpressionError):
    kind = "parse error"


class BindError(ExpressionError):
    kind = "bind error"


class ArityError(ExpressionError):
    kind = "arity error"


class DomainError(ExpressionError):
    kind = "domain error"


# --- AST -------------------------------------------------------------------

def _span():
    return field(default=SourceSpan(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Constant:
    value: float
    span: SourceSpan = _span()


@dataclass(frozen=True)
class Coord:
    index: int
    span: SourceSpan = _span()


@dataclass(frozen=True)
class Neg:
    operand: Expr
    span: SourceSpan = _span()


@dataclass(frozen=True)
class Add:
    left: Expr
    right: Expr
    span: SourceSpan = _span()


@dataclass(frozen=True)
class Sub:
    left: Expr
    right: Expr
    span: SourceSpan = _span()


@dataclass(frozen=True)
class Mul:
    left: Expr
    right: Expr
    span: SourceSpan = _span()


@dataclass(frozen=True)
class Div:
    left: Expr
    right: Expr
    span: SourceSpan = _span()


@dataclass(frozen=True)
class Pow:
    base: Expr
    exponent: Expr
    span: SourceSpan = _span()


@dataclass(frozen=True)
class Call:
    name: str
    arg: Expr
    span: SourceSpan = _span()


Expr = Union[Constant, Coord, Neg, Add, Sub, Mul, Div, Pow, Call]

_BINARY = {"+": Add, "-": Sub, "*": Mul, "/": Div}


# --- lexer -----------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # "num", "name", "op", "end"
    text: str
    span: SourceSpan


def tokenize(source: str) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(source):
        m = _TOKEN.match(source, pos)
        if m is None:
            raise LexError(f"unexpected character {source[pos]!r}", SourceSpan(pos, pos + 1), source)
        if m.lastgroup != "ws":
            tokens.append(Token(m.lastgroup, m.group(), SourceSpan(m.start(), m.end())))
        pos = m.end()
    tokens.append(Token("end", "", SourceSpan(len(source), len(source))))
    return tokens


# --- parser ----------------------------------------------------------------


class _Parser:
    def __init__(self, source: str, dim: Dimension):
        self.source = source
        self.dim = dim
        self.tokens = tokenize(source)
        self.pos = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        t = self.tokens[self.pos]
        self.pos += 1
        return t

    def expect(self, text: str) -> Token:
        if self.tok.kind != "op" or self.tok.text != text:
            self.fail(f"expected {text!r}")
        return self.advance()

    def fail(self, message: str):
        t = self.tok
        found = "end of input" if t.kind == "end" else repr(t.text)
        raise ParseError(f"{message}, found {found}", t.span, self.source)

    def at_op(self, *ops: str) -> bool:
        return self.tok.kind == "op" and self.tok.text in ops

    def parse(self) -> Expr:
        if self.tok.kind == "end":
            self.fail("empty expression")
        e = self.expr()
        if self.tok.kind != "end":
            self.fail("unexpected token")
        return e

    def binary_level(self, ops: tuple[str, ...], operand):
        left = operand()
        while self.at_op(*ops):
            op = self.advance().text
            right = operand()
            left = _BINARY[op](left, right, left.span.cover(right.span))
        return left

    def expr(self) -> Expr:
        return self.binary_level(("+", "-"), self.term)

    def term(self) -> Expr:
        return self.binary_level(("*", "/"), self.unary)

    def unary(self) -> Expr:
        if self.at_op("-"):
            start = self.advance().span
            operand = self.unary()
            return Neg(operand, start.cover(operand.span))
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.at_op("^"):
            self.advance()
            exponent = self.unary()
            return Pow(base, exponent, base.span.cover(exponent.span))
        return base

    def atom(self) -> Expr:
        t = self.tok
        if t.kind == "num":
            self.advance()
            return Constant(float(t.text), t.span)
        if t.kind == "name":
            self.advance()
            if self.at_op("("):
                return self.call(t)
            return self.coord(t)
        if self.at_op("("):
            open_ = self.advance().span
            inner = self.expr()
            close = self.expect(")").span
            # parenthesised spans include the brackets
            return _respan(inner, open_.cover(close))
        self.fail("expected a number, coordinate, function call or '('")

    def coord(self, t: Token) -> Coord:
        m = re.fullmatch(r"x(\d+)", t.text)
        if m is None:
            if t.text in FUNCTIONS:
                raise ParseError(f"function {t.text!r} needs an argument list", t.span, self.source)
            raise BindError(f"unknown name {t.text!r}", t.span, self.source)
        index = int(m.group(1))
        if index >= self.dim.total:
            raise BindError(
                f"coordinate {t.text} out of range; n={self.dim.n} allows x0..x{self.dim.total - 1}",
                t.span,
                self.source,
            )
        return Coord(index, t.span)

    def call(self, name: Token) -> Call:
        self.advance()  # '('
        args = []
        if not self.at_op(")"):
            args.append(self.expr())
            while self.at_op(","):
                self.advance()
                args.append(self.expr())
        close = self.expect(")").span
        span = name.span.cover(close)
        if name.text not in FUNCTIONS:
            raise BindError(f"unknown function {name.text!r}; known: {', '.join(FUNCTIONS)}", name.span, self.source)
        if len(args) != 1:
            raise ArityError(f"{name.text} takes 1 argument, got {len(args)}", span, self.source)
        return Call(name.text, args[0], span)


def _respan(e: Expr, span: SourceSpan) -> Expr:
    return type(e)(*[getattr(e, f) for f in e.__dataclass_fields__ if f != "span"], span=span)


def parse(source: str, dim: Dimension) -> Expr:
    return _Parser(source, dim).parse()


# --- printing --------------------------------------------------------------

_SYMBOL = {Add: "+", Sub: "-", Mul: "*", Div: "/", Pow: "^"}


def pretty(e: Expr) -> str:
    """Fully parenthesised source that reparses to the same tree."""
    if isinstance(e, Constant):
        return repr(float(e.value))
    if isinstance(e, Coord):
        return f"x{e.index}"
    if isinstance(e, Neg):
        return f"(-{pretty(e.operand)})"
    if isinstance(e, Call):
        return f"{e.name}({pretty(e.arg)})"
    if isinstance(e, Pow):
        return f"({pretty(e.base)} ^ {pretty(e.exponent)})"
    return f"({pretty(e.left)} {_SYMBOL[type(e)]} {pretty(e.right)})"


def coordinates(e: Expr) -> set[int]:
    """Flat indices referenced by ``e``."""
    if isinstance(e, Coord):
        return {e.index}
    if isinstance(e, Constant):
        return set()
    if isinstance(e, (Neg,)):
        return coordinates(e.operand)
    if isinstance(e, Call):
        return coordinates(e.arg)
    if isinstance(e, Pow):
        return coordinates(e.base) | coordinates(e.exponent)
    return coordinates(e.left) | coordinates(e.right)


# --- evaluation ------------------------------------------------------------


def _integer_exponent(e: Expr) -> int | None:
    if isinstance(e, Constant) and float(e.value).is_integer():
        return int(e.value)
    if isinstance(e, Neg) and isinstance(e.operand, Constant) and float(e.operand.value).is_integer():
        return -int(e.operand.value)
    return None


def _is_constant_integer(j: Jet2) -> bool:
    return float(j.value).is_integer() and not j.gradient.any() and not j.hessian.any()


def _where(node: Expr, x: np.ndarray) -> str:
    used = sorted(coordinates(node))
    if not used:
        return ""
    return " with " + ", ".join(f"x{i}={x[i]!r}" for i in used)


def eval_expr_jet(e: Expr, x, source: str | None = None) -> Jet2:
    """Value, gradient and Hessian of ``e`` at ``x``."""
    x = np.asarray(x, dtype=float)
    m = x.shape[0]
    variables = jet.seed(x)

    def ev(node: Expr) -> Jet2:
        if isinstance(node, Constant):
            return Jet2.constant(node.value, m)
        if isinstance(node, Coord):
            if node.index >= m:
                raise BindError(f"coordinate x{node.index} out of range for point of length {m}", node.span, source)
            return variables[node.index]
        if isinstance(node, Neg):
            return -ev(node.operand)
        if isinstance(node, Add):
            return ev(node.left) + ev(node.right)
        if isinstance(node, Sub):
            return ev(node.left) - ev(node.right)
        if isinstance(node, Mul):
            return ev(node.left) * ev(node.right)
        if isinstance(node, Div):
            den = ev(node.right)
            if den.value == 0.0:
                raise DomainError("division by zero" + _where(node.right, x), node.span, source)
            return ev(node.left) * den.reciprocal()
        if isinstance(node, Pow):
            base = ev(node.base)
            k = _integer_exponent(node.exponent)
            exponent = None
            if k is None:
                exponent = ev(node.exponent)
                if _is_constant_integer(exponent):
                    k = int(exponent.value)
            if k is not None:
                if k < 0 and base.value == 0.0:
                    raise DomainError("negative power of zero" + _where(node.base, x), node.span, source)
                return base.ipow(k)
            if base.value <= 0.0:
                raise DomainError(
                    "non-integer power needs a positive base" + _where(node.base, x), node.span, source
                )
            return jet.exp(exponent * jet.log(base))
        if isinstance(node, Call):
            arg = ev(node.arg)
            if node.name == "sqrt" and arg.value <= 0.0:
                raise DomainError("sqrt needs a positive argument" + _where(node.arg, x), node.span, source)
            if node.name == "ln" and arg.value <= 0.0:
                raise DomainError("ln needs a positive argument" + _where(node.arg, x), node.span, source)
            fn = {"sin": jet.sin, "cos": jet.cos, "exp": jet.exp, "sqrt": jet.sqrt, "ln": jet.log}[node.name]
            try:
                return fn(arg)
            except OverflowError:
                raise DomainError(f"{node.name} overflows" + _where(node.arg, x), node.span, source) from None
        raise TypeError(f"not an expression node: {node!r}")

    return ev(e).symmetrized()


def eval_value(e: Expr, x) -> float:
    """Plain float evaluation (no derivatives); used by finite-difference checks."""
    x = np.asarray(x, dtype=float)

    def ev(node: Expr) -> float:
        if isinstance(node, Constant):
            return node.value
        if isinstance(node, Coord):
            return float(x[node.index])
        if isinstance(node, Neg):
            return -ev(node.operand)
        if isinstance(node, Add):
            return ev(node.left) + ev(node.right)
        if isinstance(node, Sub):
            return ev(node.left) - ev(node.right)
        if isinstance(node, Mul):
            return ev(node.left) * ev(node.right)
        if isinstance(node, Div):
            return ev(node.left) / ev(node.right)
        if isinstance(node, Pow):
            return ev(node.base) ** ev(node.exponent)
        if isinstance(node, Call):
            fn = {"sin": math.sin, "cos": math.cos, "exp": math.exp, "sqrt": math.sqrt, "ln": math.log}[node.name]
            return fn(ev(node.arg))
        raise TypeError(f"not an expression node: {node!r}")

    return ev(e)
