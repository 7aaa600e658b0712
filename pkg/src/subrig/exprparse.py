"""Recursive-descent parser for the expression grammar shared by all JSON
inputs.

    expr   := term (("+"|"-") term)*
    term   := factor (("*"|"/") factor)*
    factor := base ("^" nonneg-int)?
    base   := rational-literal | identifier | "(" expr ")"

Unary minus is accepted as a superset (reports serialize negative leading
coefficients).  Identifiers must resolve to declared base variables,
radicals, or fiber variables u1..un; anything else raises UnknownSymbol with
its position.  Evaluation happens during parsing, directly into Scalar or
fiber-polynomial values.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional

from .errors import ExprSyntaxError, UnknownSymbol
from .scalars import Scalar, ScalarField
from .sparsepoly import SPoly

__all__ = ["ParseEnv", "parse_expression", "parse_scalar", "parse_fiber"]


class ParseEnv:
    """Identifier resolution context: a scalar field plus optional fiber slots."""

    def __init__(self, field: ScalarField, n_fiber: int = 0):
        self.field = field
        self.n_fiber = n_fiber

    def resolve(self, name: str, col: int):
        if self.n_fiber and name.startswith("u") and name[1:].isdigit():
            idx = int(name[1:])
            if 1 <= idx <= self.n_fiber:
                return _Val.fiber(SPoly({((0,) * (idx - 1)) + (1,): self.field.one}), self)
        sc = self.field.lookup(name)
        if sc is not None:
            return _Val.scalar(sc, self)
        raise UnknownSymbol(name, col)


class _Val:
    """Either a scalar or a fiber polynomial with scalar coefficients."""

    __slots__ = ("kind", "value", "env")

    def __init__(self, kind, value, env):
        self.kind = kind
        self.value = value
        self.env = env

    @staticmethod
    def scalar(s, env):
        return _Val("s", s, env)

    @staticmethod
    def fiber(p, env):
        return _Val("f", p, env)

    def as_fiber(self) -> SPoly:
        if self.kind == "f":
            return self.value
        return SPoly.const(self.value) if self.value else SPoly.zero()

    def add(self, other, col):
        if self.kind == "f" or other.kind == "f":
            return _Val.fiber(self.as_fiber() + other.as_fiber(), self.env)
        return _Val.scalar(self.value + other.value, self.env)

    def sub(self, other, col):
        if self.kind == "f" or other.kind == "f":
            return _Val.fiber(self.as_fiber() - other.as_fiber(), self.env)
        return _Val.scalar(self.value - other.value, self.env)

    def mul(self, other, col):
        if self.kind == "f" or other.kind == "f":
            return _Val.fiber(self.as_fiber() * other.as_fiber(), self.env)
        return _Val.scalar(self.value * other.value, self.env)

    def div(self, other, col):
        if other.kind == "f":
            if not other.value.is_const():
                raise ExprSyntaxError(
                    "division by a fiber-variable expression is not supported",
                    col=col)
            other = _Val.scalar(other.value.const_value(self.env.field.zero), self.env)
        if not other.value:
            from .errors import DivisionByZero
            raise DivisionByZero("division by zero in expression")
        if self.kind == "f":
            inv = 1 / other.value
            return _Val.fiber(self.value.scale(inv), self.env)
        return _Val.scalar(self.value / other.value, self.env)

    def pow(self, k, col):
        if self.kind == "f":
            if k == 0:
                return _Val.fiber(SPoly.const(self.env.field.one), self.env)
            return _Val.fiber(self.value ** k, self.env)
        return _Val.scalar(self.value ** k, self.env)

    def neg(self):
        if self.kind == "f":
            return _Val.fiber(-self.value, self.env)
        return _Val.scalar(-self.value, self.env)


class _Parser:
    def __init__(self, src: str, env: ParseEnv):
        self.src = src
        self.env = env
        self.pos = 0

    def error(self, msg):
        raise ExprSyntaxError(msg, col=self.pos)

    def skip_ws(self):
        while self.pos < len(self.src) and self.src[self.pos] in " \t\n":
            self.pos += 1

    def peek(self) -> Optional[str]:
        self.skip_ws()
        return self.src[self.pos] if self.pos < len(self.src) else None

    def take(self) -> str:
        ch = self.peek()
        if ch is None:
            self.error("unexpected end of expression")
        self.pos += 1
        return ch

    def parse(self):
        v = self.expr()
        if self.peek() is not None:
            self.error(f"unexpected character '{self.peek()}'")
        return v

    def expr(self):
        ch = self.peek()
        negate = False
        if ch == "-":
            self.take()
            negate = True
        elif ch == "+":
            self.take()
        v = self.term()
        if negate:
            v = v.neg()
        while True:
            ch = self.peek()
            if ch == "+":
                self.take()
                v = v.add(self.term(), self.pos)
            elif ch == "-":
                self.take()
                v = v.sub(self.term(), self.pos)
            else:
                return v

    def term(self):
        v = self.factor()
        while True:
            ch = self.peek()
            if ch == "*":
                self.take()
                v = v.mul(self.factor(), self.pos)
            elif ch == "/":
                self.take()
                v = v.div(self.factor(), self.pos)
            else:
                return v

    def factor(self):
        v = self.base()
        if self.peek() == "^":
            self.take()
            neg = False
            if self.peek() == "-":
                self.error("negative exponents are not allowed")
            k = self.integer()
            v = v.pow(k, self.pos)
        return v

    def integer(self) -> int:
        ch = self.peek()
        if ch is None or not ch.isdigit():
            self.error("expected a nonnegative integer exponent")
        start = self.pos
        while self.pos < len(self.src) and self.src[self.pos].isdigit():
            self.pos += 1
        return int(self.src[start : self.pos])

    def base(self):
        ch = self.peek()
        if ch is None:
            self.error("unexpected end of expression")
        if ch == "(":
            self.take()
            v = self.expr()
            if self.peek() != ")":
                self.error("expected ')'")
            self.take()
            return v
        if ch == "-":
            # unary minus inside a product: -x parses as (-1)*x
            self.take()
            return self.base().neg()
        if ch.isdigit():
            start = self.pos
            while self.pos < len(self.src) and self.src[self.pos].isdigit():
                self.pos += 1
            return _Val.scalar(self.env.field.const(Fraction(int(self.src[start : self.pos]))),
                               self.env)
        if ch.isalpha() or ch == "_":
            start = self.pos
            while self.pos < len(self.src) and (self.src[self.pos].isalnum()
                                                or self.src[self.pos] == "_"):
                self.pos += 1
            name = self.src[start : self.pos]
            return self.env.resolve(name, start)
        self.error(f"unexpected character '{ch}'")


def parse_expression(src: str, env: ParseEnv):
    """Parse into a Scalar or a fiber polynomial, depending on which symbols occur."""
    v = _Parser(src, env).parse()
    return v.value


def parse_scalar(src: str, field: ScalarField) -> Scalar:
    v = _Parser(src, ParseEnv(field, 0)).parse()
    assert v.kind == "s"
    return v.value


def parse_fiber(src: str, field: ScalarField, n: int) -> SPoly:
    v = _Parser(src, ParseEnv(field, n)).parse()
    return v.as_fiber()
