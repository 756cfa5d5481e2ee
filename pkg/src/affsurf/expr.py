"""Closed-form surface expressions: parsing and Taylor expansion.

Grammar (whitespace ignored)::

    expr  := term (("+" | "-") term)*
    term  := unary (("*" | "/") unary)*
    unary := ("-" | "+") unary | power
    power := atom ("^" unary)?          # exponent must be an integer constant
    atom  := number | "x" | "y" | name "(" expr ")" | "(" expr ")"

Error positions are 1-based character offsets.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from .errors import (ExprSyntaxError, NotAnalyticAtOrigin, NotExactlyEvaluable,
                     PoleAtOrigin, UnknownFunction)
from .scalar import DEFAULT_PREC, Scalar, _ctx
from .series import Series2

FUNCTIONS = ("sqrt", "tan", "sin", "cos", "exp")


@dataclass(frozen=True)
class Node:
    kind: str           # num, var, neg, add, sub, mul, div, pow, call
    value: object = None  # Fraction for num, name for var/call, int for pow
    args: tuple = ()

    def __str__(self):
        return to_text(self)


def to_text(n: Node) -> str:
    """Fully parenthesized text that parses back to the same tree."""
    k = n.kind
    if k == "num":
        v = n.value
        s = str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
        return f"({s})" if v < 0 or v.denominator != 1 else s
    if k == "var":
        return n.value
    if k == "neg":
        return f"(-{to_text(n.args[0])})"
    if k == "pow":
        return f"({to_text(n.args[0])}^({n.value}))"
    if k == "call":
        return f"{n.value}({to_text(n.args[0])})"
    op = {"add": "+", "sub": "-", "mul": "*", "div": "/"}[k]
    return f"({to_text(n.args[0])} {op} {to_text(n.args[1])})"


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.i = 0

    def skip(self):
        t = self.text
        while self.i < len(t) and t[self.i].isspace():
            self.i += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.i] if self.i < len(self.text) else ""

    def error(self, msg: str):
        raise ExprSyntaxError(msg, self.i + 1)

    def parse(self) -> Node:
        node = self.expr()
        if self.peek():
            self.error(f"unexpected {self.peek()!r}")
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.peek() in ("+", "-"):
            op = self.text[self.i]
            self.i += 1
            rhs = self.term()
            node = Node("add" if op == "+" else "sub", None, (node, rhs))
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.peek() in ("*", "/"):
            op = self.text[self.i]
            self.i += 1
            rhs = self.unary()
            node = Node("mul" if op == "*" else "div", None, (node, rhs))
        return node

    def unary(self) -> Node:
        c = self.peek()
        if c == "-":
            self.i += 1
            return Node("neg", None, (self.unary(),))
        if c == "+":
            self.i += 1
            return self.unary()
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self.peek() == "^":
            self.i += 1
            start = self.i
            e = self.unary()
            n = _const_int(e)
            if n is None:
                self.i = start
                self.skip()
                self.error("exponent must be an integer constant")
            return Node("pow", n, (base,))
        return base

    def atom(self) -> Node:
        c = self.peek()
        if not c:
            self.error("unexpected end of input")
        if c == "(":
            self.i += 1
            node = self.expr()
            if self.peek() != ")":
                self.error("expected ')'")
            self.i += 1
            return node
        if c.isdigit() or c == ".":
            start = self.i
            t = self.text
            while self.i < len(t) and (t[self.i].isdigit() or t[self.i] == "."):
                self.i += 1
            try:
                v = Fraction(t[start:self.i])
            except ValueError:
                self.i = start
                self.error("malformed number")
            return Node("num", v)
        if c.isalpha():
            start = self.i
            t = self.text
            while self.i < len(t) and (t[self.i].isalnum() or t[self.i] == "_"):
                self.i += 1
            name = t[start:self.i]
            if name in ("x", "y"):
                return Node("var", name)
            if self.peek() == "(":
                if name not in FUNCTIONS:
                    raise UnknownFunction(f"unknown function {name!r} at position {start + 1}")
                self.i += 1
                arg = self.expr()
                if self.peek() != ")":
                    self.error("expected ')'")
                self.i += 1
                return Node("call", name, (arg,))
            self.i = start
            self.error(f"unknown identifier {name!r}")
        self.error(f"unexpected {c!r}")


def _const_int(n: Node):
    if n.kind == "num" and n.value.denominator == 1:
        return int(n.value)
    if n.kind == "neg":
        v = _const_int(n.args[0])
        return None if v is None else -v
    return None


def parse(text: str) -> Node:
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# expansion

def _sin_coeffs(n):
    return [Fraction(0) if k % 2 == 0 else Fraction((-1) ** (k // 2), factorial(k)) for k in range(n + 1)]


def _cos_coeffs(n):
    return [Fraction((-1) ** (k // 2), factorial(k)) if k % 2 == 0 else Fraction(0) for k in range(n + 1)]


def _exp_coeffs(n):
    return [Fraction(1, factorial(k)) for k in range(n + 1)]


class _Expander:
    def __init__(self, order: int, x0, y0, mode: str, prec: int):
        self.N = order
        self.mode = mode
        self.prec = prec
        self.x = Series2.var(order, "x") + x0
        self.y = Series2.var(order, "y") + y0

    def const_fn(self, name: str, c: Scalar) -> Scalar:
        if self.mode != "approx":
            raise NotExactlyEvaluable(f"{name}({c}) is not exactly representable")
        ctx = _ctx(self.prec)
        z = c.to_approx(self.prec).approx
        return Scalar.from_complex(getattr(ctx, name)(z), self.prec)

    def run(self, n: Node) -> Series2:
        k = n.kind
        N = self.N
        if k == "num":
            return Series2.constant(N, Scalar(n.value))
        if k == "var":
            return self.x if n.value == "x" else self.y
        if k == "neg":
            return -self.run(n.args[0])
        if k in ("add", "sub", "mul"):
            a, b = self.run(n.args[0]), self.run(n.args[1])
            return a + b if k == "add" else (a - b if k == "sub" else a * b)
        if k == "div":
            a, b = self.run(n.args[0]), self.run(n.args[1])
            if b.constant_term().is_zero():
                raise PoleAtOrigin(f"denominator {to_text(n.args[1])} vanishes at the origin")
            return a * b.inverse()
        if k == "pow":
            a = self.run(n.args[0])
            if n.value < 0 and a.constant_term().is_zero():
                raise PoleAtOrigin(f"negative power of {to_text(n.args[0])}, which vanishes at the origin")
            return a ** n.value
        if k == "call":
            return self.call(n.value, self.run(n.args[0]))
        raise ValueError(f"bad node {k}")

    def call(self, name: str, a: Series2) -> Series2:
        N = self.N
        c = a.constant_term()
        g = a - c
        if name == "sqrt":
            if c.is_zero():
                if a.is_zero():
                    return a
                raise NotAnalyticAtOrigin("sqrt of an expression vanishing at the origin")
            return a.sqrt()
        s, co = g.compose_univariate(_sin_coeffs(N)), g.compose_univariate(_cos_coeffs(N))
        if name == "exp":
            e = g.compose_univariate(_exp_coeffs(N))
            return e if c.is_zero() else e * self.const_fn("exp", c)
        if name == "sin":
            if c.is_zero():
                return s
            return s * self.const_fn("cos", c) + co * self.const_fn("sin", c)
        if name == "cos":
            if c.is_zero():
                return co
            return co * self.const_fn("cos", c) - s * self.const_fn("sin", c)
        if name == "tan":
            t = s * co.inverse()
            if c.is_zero():
                return t
            tc = self.const_fn("tan", c)
            return (t + tc) * (1 - t * tc).inverse()
        raise UnknownFunction(name)


def expand(ast, order: int, mode: str = "exact", prec: int = DEFAULT_PREC) -> Series2:
    """Maclaurin expansion of the expression through total degree ``order``."""
    if isinstance(ast, str):
        ast = parse(ast)
    return _Expander(order, 0, 0, mode, prec).run(ast)


def expand_shifted(ast, order: int, x0, y0, mode: str = "exact", prec: int = DEFAULT_PREC):
    """Expansion of F(x + x0, y + y0) - F(x0, y0); returns (series, F(x0, y0))."""
    if isinstance(ast, str):
        ast = parse(ast)
    ser = _Expander(order, Scalar(x0) if not isinstance(x0, Scalar) else x0,
                    Scalar(y0) if not isinstance(y0, Scalar) else y0, mode, prec).run(ast)
    u0 = ser.constant_term()
    return ser - u0, u0


def surface_from_expr(text_or_ast, order: int, mode: str = "exact", prec: int = DEFAULT_PREC):
    """SurfaceGraph carrying its closed form, so later shifts re-expand exactly."""
    from .series import SurfaceGraph

    ast = parse(text_or_ast) if isinstance(text_or_ast, str) else text_or_ast
    ser = expand(ast, order, mode, prec)
    u0 = ser.constant_term()
    return SurfaceGraph(ser - u0, None, ast, False)
