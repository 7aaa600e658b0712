"""Fiber polynomials and fiber rational functions.

A fiber polynomial is an :class:`~subrig.sparsepoly.SPoly` in the fiber
coordinates u_1..u_n whose coefficients live either in Q (Fractions, for
constant-coefficient frames) or in a :class:`~subrig.scalars.ScalarField`.
This module adds the weighted-degree bookkeeping, the division by the
quadratic form P, and an exact fraction field on top.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence

from .errors import BadDivisor, ZeroPolynomial
from .sparsepoly import SPoly, grlex_key, poly_gcd

__all__ = [
    "fpoly_zero",
    "fpoly_const",
    "u_var",
    "weighted_degree",
    "highest_weight_part",
    "is_w_homogeneous",
    "divide_by_P",
    "check_P_shape",
    "FRat",
]


def fpoly_zero() -> SPoly:
    return SPoly.zero()


def fpoly_const(c) -> SPoly:
    return SPoly.const(c)


def u_var(i: int, one) -> SPoly:
    return SPoly.var(i, one)


def weighted_degree(p: SPoly, weights: Sequence[int]) -> int:
    """Max over monomials of sum(beta_i * w_i); raises on the zero polynomial."""
    if p.is_zero():
        raise ZeroPolynomial("the zero polynomial has no weighted degree")
    best = None
    for m in p.terms:
        d = sum(e * weights[i] for i, e in enumerate(m) if e)
        if best is None or d > best:
            best = d
    return best


def highest_weight_part(p: SPoly, weights: Sequence[int]) -> SPoly:
    """Sum of the monomials of maximal weighted degree (w-homogeneous)."""
    top = weighted_degree(p, weights)
    return SPoly({m: c for m, c in p.terms.items()
                  if sum(e * weights[i] for i, e in enumerate(m) if e) == top})


def is_w_homogeneous(p: SPoly, weights: Sequence[int]) -> bool:
    if p.is_zero():
        return True
    degs = {sum(e * weights[i] for i, e in enumerate(m) if e) for m in p.terms}
    return len(degs) == 1


def check_P_shape(P: SPoly, m: int) -> list:
    """P must be sum of alpha_i^2 u_i^2 over i < m; returns the coefficients."""
    coeffs = [None] * m
    for mono, c in P.terms.items():
        nz = [(i, e) for i, e in enumerate(mono) if e]
        if len(nz) != 1 or nz[0][1] != 2 or nz[0][0] >= m:
            raise BadDivisor("divisor is not a horizontal quadratic form sum a_i^2 u_i^2")
        coeffs[nz[0][0]] = c
    if any(c is None or not c for c in coeffs):
        raise BadDivisor("quadratic form has a vanishing diagonal coefficient")
    return coeffs


def divide_by_P(p: SPoly, P: SPoly, m: int) -> Optional[SPoly]:
    """Exact quotient p/P for P = sum alpha_i^2 u_i^2, else None.

    Univariate division in u_1 (P is monic-izable there since alpha_1^2 is an
    invertible scalar); the remainder has u_1-degree <= 1 and the quotient is
    unique, so a zero remainder decides divisibility in the full ring.
    """
    coeffs = check_P_shape(P, m)
    lead = coeffs[0]
    inv_lead = (Fraction(1) / lead) if isinstance(lead, Fraction) else 1 / lead
    quotient = SPoly.zero()
    rem = p
    while True:
        top = [(mono, c) for mono, c in rem.terms.items() if mono and mono[0] >= 2]
        if not top:
            break
        mono, c = max(top, key=lambda t: grlex_key(t[0]))
        qmono = (mono[0] - 2,) + mono[1:]
        i = len(qmono)
        while i > 0 and qmono[i - 1] == 0:
            i -= 1
        qmono = qmono[:i]
        qterm = SPoly({qmono: c * inv_lead})
        quotient = quotient + qterm
        rem = rem - qterm * P
    if rem.is_zero():
        return quotient
    return None


# ---------------------------------------------------------------------------


class FRat:
    """Exact fraction of fiber polynomials, gcd-reduced, monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num: SPoly, den: Optional[SPoly] = None, reduce: bool = True):
        if den is None:
            den = SPoly.const(_one_like(num))
        if den.is_zero():
            raise ZeroDivisionError("zero denominator in fiber fraction")
        if num.is_zero():
            self.num, self.den = num, SPoly.const(_one_like(den))
            return
        if reduce and not den.is_const():
            g = poly_gcd(num, den)
            if not g.is_const():
                num = num.exact_div(g)
                den = den.exact_div(g)
        _, lc = den.leading()
        if not _is_one(lc):
            inv = 1 / lc if not isinstance(lc, Fraction) else Fraction(1) / lc
            num = num.scale(inv)
            den = den.scale(inv)
        self.num, self.den = num, den

    @staticmethod
    def of(p: SPoly) -> "FRat":
        return FRat(p, None, reduce=False)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self):
        return not self.num.is_zero()

    def is_poly(self) -> bool:
        return self.den.is_const()

    def as_poly(self) -> SPoly:
        if not self.den.is_one():
            if self.den.is_const():
                c = self.den.const_value()
                return self.num.scale(1 / c if not isinstance(c, Fraction) else Fraction(1) / c)
            raise ValueError("fiber fraction is not polynomial")
        return self.num

    def __neg__(self):
        out = FRat.__new__(FRat)
        out.num, out.den = -self.num, self.den
        return out

    def __add__(self, other: "FRat") -> "FRat":
        if self.den == other.den:
            return FRat(self.num + other.num, self.den)
        g = poly_gcd(self.den, other.den) if not (self.den.is_const() or other.den.is_const()) else None
        if g is not None and not g.is_const():
            da = self.den.exact_div(g)
            db = other.den.exact_div(g)
            return FRat(self.num * db + other.num * da, da * other.den)
        return FRat(self.num * other.den + other.num * self.den, self.den * other.den)

    def __sub__(self, other: "FRat") -> "FRat":
        return self + (-other)

    def __mul__(self, other: "FRat") -> "FRat":
        return FRat(self.num * other.num, self.den * other.den)

    def __truediv__(self, other: "FRat") -> "FRat":
        if other.num.is_zero():
            raise ZeroDivisionError("division by zero fiber fraction")
        return FRat(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        if isinstance(other, int) and other == 1:
            if self.num.is_zero():
                raise ZeroDivisionError("division by zero fiber fraction")
            return FRat(self.den, self.num)
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, FRat):
            return NotImplemented
        return (self.num * other.den - other.num * self.den).is_zero()

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        return f"FRat({self.num!r} / {self.den!r})"


def _one_like(p: SPoly):
    for c in p.terms.values():
        return c / c if not isinstance(c, Fraction) else Fraction(1)
    return Fraction(1)


def _is_one(c) -> bool:
    if isinstance(c, (int, Fraction)):
        return c == 1
    return (c - 1).is_zero() if hasattr(c, "is_zero") else c == 1
