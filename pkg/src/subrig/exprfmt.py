"""Canonical expression strings for reports and JSON documents.

Everything printed here re-parses to the same value through
:mod:`subrig.exprparse`: rationals as ``p/q``, explicit ``*`` and ``^``,
graded-lexicographic term order, parenthesised denominators.
"""

from __future__ import annotations

from fractions import Fraction

from .sparsepoly import SPoly, grlex_key

__all__ = ["fraction_to_str", "poly_to_expr", "coeff_to_expr"]


def fraction_to_str(c: Fraction) -> str:
    c = Fraction(c)
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def _mono_to_factors(mono, names):
    factors = []
    for i, e in enumerate(mono):
        if not e:
            continue
        name = names[i] if i < len(names) else f"_v{i}"
        factors.append(name if e == 1 else f"{name}^{e}")
    return factors


def poly_to_expr(p: SPoly, names) -> str:
    """Fraction-coefficient polynomial as a re-parseable expression."""
    if p.is_zero():
        return "0"
    parts = []
    for mono, c in sorted(p.terms.items(), key=lambda t: grlex_key(t[0]), reverse=True):
        factors = _mono_to_factors(mono, names)
        neg = c < 0
        c = -c if neg else c
        if not factors:
            body = fraction_to_str(c)
        elif c == 1:
            body = "*".join(factors)
        else:
            body = "*".join([fraction_to_str(c)] + factors)
        if not parts:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append((" - " if neg else " + ") + body)
    return "".join(parts)


def coeff_to_expr(c, names=()) -> str:
    """Serialize a Fraction or Scalar coefficient."""
    if isinstance(c, (int, Fraction)):
        return fraction_to_str(Fraction(c))
    return c.to_expr()


def _coeff_factor(c) -> str:
    """Coefficient as a single multiplicative factor (parenthesised if needed)."""
    s = coeff_to_expr(c)
    if any(op in s for op in (" + ", " - ", "/")) or (s.startswith("-") and len(s) > 1):
        return f"({s})"
    return s


def fpoly_to_expr(p, nu: int) -> str:
    """Fiber polynomial (u-variables) as a re-parseable expression."""
    if p.is_zero():
        return "0"
    unames = [f"u{i + 1}" for i in range(nu)]
    parts = []
    for mono, c in sorted(p.terms.items(), key=lambda t: grlex_key(t[0]), reverse=True):
        factors = _mono_to_factors(mono, unames)
        if isinstance(c, (int, Fraction)):
            c = Fraction(c)
            neg = c < 0
            cc = -c if neg else c
            if not factors:
                body = fraction_to_str(cc)
            elif cc == 1:
                body = "*".join(factors)
            else:
                body = "*".join([fraction_to_str(cc)] + factors)
            sep = (" - " if neg else " + ") if parts else ("-" if neg else "")
        else:
            cf = _coeff_factor(c)
            if not factors:
                body = cf
            elif cf == "1":
                body = "*".join(factors)
            else:
                body = "*".join([cf] + factors)
            sep = " + " if parts else ""
        parts.append(sep + body)
    return "".join(parts)


def frat_to_expr(r, nu: int) -> str:
    """Fiber rational function as a re-parseable expression."""
    num = fpoly_to_expr(r.num, nu)
    if r.den.is_one():
        return num
    den = fpoly_to_expr(r.den, nu)
    return f"({num})/({den})"
