"""Smooth scalar expressions in (h, y1..yn).

A tiny real-valued expression language: rational constants, the sweep
parameter `h`, coordinates `y1..yn`, the four arithmetic operators, integer
powers, and sin/cos/exp/sqrt.  Supports exact symbolic partial derivatives
and IEEE-double evaluation (scalars or numpy arrays).

Grammar (EBNF):

    expr    = term { ("+" | "-") term } ;
    term    = unary { ("*" | "/") unary } ;
    unary   = "-" unary | power ;                (unary minus binds above *,/)
    power   = atom [ "^" [ "-" ] integer ] ;     (and below ^)
    atom    = integer | "h" | "y" digits
            | ("sin" | "cos" | "exp" | "sqrt") "(" expr ")"
            | "(" expr ")" ;

A quotient of two integer literals is folded to a rational constant, and a
negated constant to its negative, so printing round-trips to the same tree.
Complex values never appear here; the algebra layer pairs two real
expressions per mode coefficient.
"""
from __future__ import annotations

import re
from fractions import Fraction

import numpy as np

from .errors import EvalDomainError, ParseError

__all__ = [
    "Expr", "Const", "H", "Y", "Add", "Sub", "Mul", "Div", "Neg", "Pow", "Fun",
    "parse", "to_text", "d_dh", "d_dy", "evaluate",
    "shift_y", "subs_h", "const", "ComplexExpr",
]

_FUNCTIONS = ("sin", "cos", "exp", "sqrt")


class Expr:
    """Immutable expression node; compare and hash structurally."""

    __slots__ = ()

    def __eq__(self, other):
        return type(self) is type(other) and self._key() == other._key()

    def __hash__(self):
        return hash((type(self).__name__, self._key()))

    def __str__(self):
        return to_text(self)

    def __repr__(self):
        return f"{type(self).__name__}({to_text(self)!r})"


class Const(Expr):
    __slots__ = ("value",)

    def __init__(self, value):
        object.__setattr__(self, "value", Fraction(value))

    def __setattr__(self, *a):
        raise AttributeError("expression nodes are immutable")

    def _key(self):
        return (self.value,)


class H(Expr):
    __slots__ = ()

    def _key(self):
        return ()


class Y(Expr):
    __slots__ = ("index",)

    def __init__(self, index):
        if index < 1:
            raise ParseError(f"coordinate index must be >= 1, got {index}")
        object.__setattr__(self, "index", int(index))

    def __setattr__(self, *a):
        raise AttributeError("expression nodes are immutable")

    def _key(self):
        return (self.index,)


class _Binary(Expr):
    __slots__ = ("a", "b")

    def __init__(self, a, b):
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def __setattr__(self, *a):
        raise AttributeError("expression nodes are immutable")

    def _key(self):
        return (self.a, self.b)


class Add(_Binary):
    __slots__ = ()


class Sub(_Binary):
    __slots__ = ()


class Mul(_Binary):
    __slots__ = ()


class Div(_Binary):
    __slots__ = ()


class Neg(Expr):
    __slots__ = ("a",)

    def __init__(self, a):
        object.__setattr__(self, "a", a)

    def __setattr__(self, *a):
        raise AttributeError("expression nodes are immutable")

    def _key(self):
        return (self.a,)


class Pow(Expr):
    __slots__ = ("a", "exponent")

    def __init__(self, a, exponent):
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "exponent", int(exponent))

    def __setattr__(self, *a):
        raise AttributeError("expression nodes are immutable")

    def _key(self):
        return (self.a, self.exponent)


class Fun(Expr):
    __slots__ = ("name", "a")

    def __init__(self, name, a):
        if name not in _FUNCTIONS:
            raise ParseError(f"unknown function '{name}'")
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "a", a)

    def __setattr__(self, *a):
        raise AttributeError("expression nodes are immutable")

    def _key(self):
        return (self.name, self.a)


def const(value) -> Const:
    """Exact rational constant node."""
    return Const(Fraction(value))


_ZERO = Const(0)
_ONE = Const(1)


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(r"(\d+)|([A-Za-z_][A-Za-z_0-9]*)|([()+\-*/^])")


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = "int" if m.group(1) else ("name" if m.group(2) else "op")
        tokens.append((kind, m.group(0), pos))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text, n):
        self.text = text
        self.n = n
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def next(self):
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", len(self.text))
        self.i += 1
        return tok

    def expect(self, value):
        tok = self.next()
        if tok[1] != value:
            raise ParseError(f"expected {value!r}, got {tok[1]!r}", tok[2])
        return tok

    def parse(self):
        e = self.expr()
        tok = self.peek()
        if tok is not None:
            raise ParseError(f"unexpected token {tok[1]!r}", tok[2])
        return e

    def expr(self):
        e = self.term()
        while (tok := self.peek()) and tok[1] in "+-":
            self.next()
            rhs = self.term()
            e = Add(e, rhs) if tok[1] == "+" else Sub(e, rhs)
        return e

    def term(self):
        e = self.unary()
        while (tok := self.peek()) and tok[1] in "*/":
            self.next()
            rhs = self.unary()
            if tok[1] == "*":
                e = Mul(e, rhs)
            elif isinstance(e, Const) and isinstance(rhs, Const) and rhs.value != 0:
                # fold integer quotients so "p/q" stays one rational constant
                e = Const(e.value / rhs.value)
            else:
                e = Div(e, rhs)
        return e

    def unary(self):
        tok = self.peek()
        if tok and tok[1] == "-":
            self.next()
            inner = self.unary()
            if isinstance(inner, Const):
                return Const(-inner.value)
            return Neg(inner)
        return self.power()

    def power(self):
        base = self.atom()
        tok = self.peek()
        if tok and tok[1] == "^":
            self.next()
            sign = 1
            tok = self.peek()
            if tok and tok[1] == "-":
                self.next()
                sign = -1
            tok = self.next()
            if tok[0] != "int":
                raise ParseError(f"exponent must be an integer, got {tok[1]!r}", tok[2])
            return Pow(base, sign * int(tok[1]))
        return base

    def atom(self):
        tok = self.next()
        kind, value, pos = tok
        if kind == "int":
            return Const(int(value))
        if value == "(":
            e = self.expr()
            self.expect(")")
            return e
        if kind == "name":
            if value == "h":
                return H()
            if value in _FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Fun(value, arg)
            m = re.fullmatch(r"y(\d+)", value)
            if m:
                idx = int(m.group(1))
                if not 1 <= idx <= self.n:
                    raise ParseError(
                        f"coordinate y{idx} out of range (n = {self.n})", pos)
                return Y(idx)
            raise ParseError(f"unknown identifier {value!r}", pos)
        raise ParseError(f"unexpected token {value!r}", pos)


def parse(text: str, n: int) -> Expr:
    """Parse an expression in h, y1..yn.  Raises ParseError with a position."""
    return _Parser(text, n).parse()


# ---------------------------------------------------------------------------
# printing (inverse of parse up to tree equality)

def _prec(e) -> int:
    if isinstance(e, (Add, Sub)):
        return 1
    if isinstance(e, (Mul, Div)):
        return 2
    if isinstance(e, Neg):
        return 3
    if isinstance(e, Const):
        if e.value.denominator != 1:
            return 2         # prints as a quotient
        if e.value < 0:
            return 3         # prints with a leading minus
        return 9
    if isinstance(e, Pow):
        return 4
    return 9


def _wrap(e, level, strict=False):
    text = to_text(e)
    p = _prec(e)
    if p < level or (strict and p == level):
        return f"({text})"
    return text


def to_text(e: Expr) -> str:
    """Render an expression; parse(to_text(e), n) rebuilds the same tree."""
    if isinstance(e, Const):
        return str(e.value)
    if isinstance(e, H):
        return "h"
    if isinstance(e, Y):
        return f"y{e.index}"
    # +,-,*,/ are left-associative: right operands of equal precedence need
    # parentheses or reparsing would rebuild a left-leaning tree
    if isinstance(e, Add):
        return f"{_wrap(e.a, 1)} + {_wrap(e.b, 1, strict=True)}"
    if isinstance(e, Sub):
        return f"{_wrap(e.a, 1)} - {_wrap(e.b, 1, strict=True)}"
    if isinstance(e, Mul):
        return f"{_wrap(e.a, 2)}*{_wrap(e.b, 2, strict=True)}"
    if isinstance(e, Div):
        return f"{_wrap(e.a, 2)}/{_wrap(e.b, 2, strict=True)}"
    if isinstance(e, Neg):
        return f"-{_wrap(e.a, 3, strict=True)}"
    if isinstance(e, Pow):
        return f"{_wrap(e.a, 4, strict=True)}^{e.exponent}"
    if isinstance(e, Fun):
        return f"{e.name}({to_text(e.a)})"
    raise TypeError(f"not an expression: {e!r}")


# ---------------------------------------------------------------------------
# light smart constructors (keep derivative trees from exploding; no deeper
# simplification is attempted, equality is tested by evaluation elsewhere)

def _add(a, b):
    if a == _ZERO:
        return b
    if b == _ZERO:
        return a
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value + b.value)
    if isinstance(b, Neg):
        return Sub(a, b.a)
    return Add(a, b)


def _sub(a, b):
    if b == _ZERO:
        return a
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value - b.value)
    if a == _ZERO:
        return _neg(b)
    return Sub(a, b)


_MINUS_ONE = Const(-1)


def _mul(a, b):
    if a == _ZERO or b == _ZERO:
        return _ZERO
    if a == _ONE:
        return b
    if b == _ONE:
        return a
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value * b.value)
    if a == _MINUS_ONE:
        return _neg(b)
    if b == _MINUS_ONE:
        return _neg(a)
    if isinstance(b, Const) and not isinstance(a, Const):
        a, b = b, a
    return Mul(a, b)


def _div(a, b):
    if a == _ZERO and b != _ZERO:
        return _ZERO
    if b == _ONE:
        return a
    if isinstance(a, Const) and isinstance(b, Const) and b.value != 0:
        return Const(a.value / b.value)
    return Div(a, b)


def _neg(a):
    if isinstance(a, Const):
        return Const(-a.value)
    if isinstance(a, Neg):
        return a.a
    return Neg(a)


def _pow(a, p):
    if p == 0:
        return _ONE
    if p == 1:
        return a
    return Pow(a, p)


# ---------------------------------------------------------------------------
# derivatives

def _derive(e, wrt):
    """wrt: 'h' or a coordinate index (int)."""
    if isinstance(e, Const):
        return _ZERO
    if isinstance(e, H):
        return _ONE if wrt == "h" else _ZERO
    if isinstance(e, Y):
        return _ONE if e.index == wrt else _ZERO
    if isinstance(e, Add):
        return _add(_derive(e.a, wrt), _derive(e.b, wrt))
    if isinstance(e, Sub):
        return _sub(_derive(e.a, wrt), _derive(e.b, wrt))
    if isinstance(e, Mul):
        return _add(_mul(_derive(e.a, wrt), e.b), _mul(e.a, _derive(e.b, wrt)))
    if isinstance(e, Div):
        num = _sub(_mul(_derive(e.a, wrt), e.b), _mul(e.a, _derive(e.b, wrt)))
        return _div(num, _pow(e.b, 2))
    if isinstance(e, Neg):
        return _neg(_derive(e.a, wrt))
    if isinstance(e, Pow):
        if e.exponent == 0:
            return _ZERO
        inner = _derive(e.a, wrt)
        return _mul(_mul(Const(e.exponent), _pow(e.a, e.exponent - 1)), inner)
    if isinstance(e, Fun):
        inner = _derive(e.a, wrt)
        if e.name == "sin":
            return _mul(Fun("cos", e.a), inner)
        if e.name == "cos":
            return _neg(_mul(Fun("sin", e.a), inner))
        if e.name == "exp":
            return _mul(e, inner)
        if e.name == "sqrt":
            # introduces a quotient; domain issues surface at evaluation
            return _div(inner, _mul(Const(2), e))
    raise TypeError(f"not an expression: {e!r}")


def d_dh(e: Expr) -> Expr:
    """Exact symbolic derivative with respect to h."""
    return _derive(e, "h")


def d_dy(e: Expr, i: int) -> Expr:
    """Exact symbolic derivative with respect to y_i (1-based)."""
    return _derive(e, int(i))


# ---------------------------------------------------------------------------
# substitution

def _substitute(e, h_node, y_nodes):
    if isinstance(e, Const):
        return e
    if isinstance(e, H):
        return h_node if h_node is not None else e
    if isinstance(e, Y):
        repl = y_nodes.get(e.index)
        return repl if repl is not None else e
    if isinstance(e, Add):
        return _add(_substitute(e.a, h_node, y_nodes), _substitute(e.b, h_node, y_nodes))
    if isinstance(e, Sub):
        return _sub(_substitute(e.a, h_node, y_nodes), _substitute(e.b, h_node, y_nodes))
    if isinstance(e, Mul):
        return _mul(_substitute(e.a, h_node, y_nodes), _substitute(e.b, h_node, y_nodes))
    if isinstance(e, Div):
        return _div(_substitute(e.a, h_node, y_nodes), _substitute(e.b, h_node, y_nodes))
    if isinstance(e, Neg):
        return _neg(_substitute(e.a, h_node, y_nodes))
    if isinstance(e, Pow):
        return _pow(_substitute(e.a, h_node, y_nodes), e.exponent)
    if isinstance(e, Fun):
        return Fun(e.name, _substitute(e.a, h_node, y_nodes))
    raise TypeError(f"not an expression: {e!r}")


def shift_y(e: Expr, k) -> Expr:
    """Substitute y_i -> y_i + h*k_i for the integer vector k."""
    y_nodes = {}
    for i, ki in enumerate(k, start=1):
        ki = int(ki)
        if ki != 0:
            y_nodes[i] = _add(Y(i), _mul(Const(ki), H()))
    return _substitute(e, None, y_nodes)


def subs_h(e: Expr, value) -> Expr:
    """Substitute an exact rational value for h."""
    return _substitute(e, Const(Fraction(value)), {})


# ---------------------------------------------------------------------------
# evaluation

def _eval(e, h, y):
    if isinstance(e, Const):
        return float(e.value)
    if isinstance(e, H):
        return h
    if isinstance(e, Y):
        if e.index > len(y):
            raise EvalDomainError(
                f"point has {len(y)} coordinates, expression uses y{e.index}", e)
        return y[e.index - 1]
    if isinstance(e, Add):
        return _eval(e.a, h, y) + _eval(e.b, h, y)
    if isinstance(e, Sub):
        return _eval(e.a, h, y) - _eval(e.b, h, y)
    if isinstance(e, Mul):
        return _eval(e.a, h, y) * _eval(e.b, h, y)
    if isinstance(e, Div):
        num = _eval(e.a, h, y)
        den = _eval(e.b, h, y)
        if np.any(den == 0):
            raise EvalDomainError("division by zero", e)
        return num / den
    if isinstance(e, Neg):
        return -_eval(e.a, h, y)
    if isinstance(e, Pow):
        base = _eval(e.a, h, y)
        if e.exponent < 0 and np.any(base == 0):
            raise EvalDomainError("zero raised to a negative power", e)
        return base ** e.exponent
    if isinstance(e, Fun):
        arg = _eval(e.a, h, y)
        if e.name == "sin":
            return np.sin(arg)
        if e.name == "cos":
            return np.cos(arg)
        if e.name == "exp":
            return np.exp(arg)
        if np.any(arg < 0):
            raise EvalDomainError("sqrt of a negative value", e)
        return np.sqrt(arg)
    raise TypeError(f"not an expression: {e!r}")


def evaluate(e: Expr, h, y):
    """IEEE-double evaluation at h and the coordinate vector y.

    Accepts scalars or numpy arrays (broadcast elementwise); rational inputs
    are converted to float.  Deterministic; raises EvalDomainError carrying
    the offending subexpression at singular points.
    """
    if isinstance(h, Fraction):
        h = float(h)
    yy = []
    for v in y:
        if isinstance(v, Fraction):
            v = float(v)
        yy.append(v)
    out = _eval(e, h, yy)
    if isinstance(out, np.ndarray):
        return out
    return float(out)


# ---------------------------------------------------------------------------
# complex coefficients: a pair of real expressions

class ComplexExpr:
    """Complex-valued coefficient as a (re, im) pair of real expressions."""

    __slots__ = ("re", "im")

    def __init__(self, re_part, im_part=None):
        self.re = re_part
        self.im = im_part if im_part is not None else _ZERO

    @classmethod
    def from_real(cls, e):
        return cls(e, _ZERO)

    @classmethod
    def zero(cls):
        return cls(_ZERO, _ZERO)

    def __eq__(self, other):
        return (isinstance(other, ComplexExpr)
                and self.re == other.re and self.im == other.im)

    def __hash__(self):
        return hash((self.re, self.im))

    def __repr__(self):
        return f"ComplexExpr({to_text(self.re)!r}, {to_text(self.im)!r})"

    def __add__(self, other):
        return ComplexExpr(_add(self.re, other.re), _add(self.im, other.im))

    def __sub__(self, other):
        return ComplexExpr(_sub(self.re, other.re), _sub(self.im, other.im))

    def __mul__(self, other):
        re = _sub(_mul(self.re, other.re), _mul(self.im, other.im))
        im = _add(_mul(self.re, other.im), _mul(self.im, other.re))
        return ComplexExpr(re, im)

    def scaled(self, a, b=0):
        """Multiply by the exact complex scalar a + b*i (rationals)."""
        a = Const(Fraction(a))
        b = Const(Fraction(b))
        re = _sub(_mul(a, self.re), _mul(b, self.im))
        im = _add(_mul(a, self.im), _mul(b, self.re))
        return ComplexExpr(re, im)

    def conjugate(self):
        return ComplexExpr(self.re, _neg(self.im))

    def shift_y(self, k):
        return ComplexExpr(shift_y(self.re, k), shift_y(self.im, k))

    def subs_h(self, value):
        return ComplexExpr(subs_h(self.re, value), subs_h(self.im, value))

    def d_dh(self):
        return ComplexExpr(d_dh(self.re), d_dh(self.im))

    def d_dy(self, i):
        return ComplexExpr(d_dy(self.re, i), d_dy(self.im, i))

    def is_zero_tree(self):
        return self.re == _ZERO and self.im == _ZERO

    def evaluate(self, h, y):
        re = evaluate(self.re, h, y)
        im = evaluate(self.im, h, y)
        return re + 1j * im
