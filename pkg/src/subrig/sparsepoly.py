"""Sparse multivariate polynomials over an exact coefficient field.

Monomials are variable-length exponent tuples with trailing zeros stripped,
so a polynomial ring can be extended with new variables (radical slots)
without rewriting existing data.  Coefficients are any exact field elements
that support ``+ - * /``, equality, and are falsy exactly when zero —
``fractions.Fraction`` and :class:`subrig.scalars.Scalar` both qualify.

The monomial order used for leading terms and canonical printing is graded
lexicographic (total degree first, then left-to-right exponent comparison).
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Optional

__all__ = [
    "SPoly",
    "mono_mul",
    "mono_divides",
    "mono_div",
    "grlex_key",
    "frac_gcd",
    "frac_sqrt",
    "poly_gcd",
    "poly_sqrt",
]


def _trim(t: tuple) -> tuple:
    i = len(t)
    while i > 0 and t[i - 1] == 0:
        i -= 1
    return t[:i]


def mono_mul(a: tuple, b: tuple) -> tuple:
    if len(a) < len(b):
        a, b = b, a
    return _trim(tuple(x + (b[i] if i < len(b) else 0) for i, x in enumerate(a)))


def mono_divides(a: tuple, b: tuple) -> bool:
    """True when monomial ``a`` divides ``b``."""
    if len(a) > len(b):
        return False
    return all(a[i] <= b[i] for i in range(len(a)))


def mono_div(b: tuple, a: tuple) -> tuple:
    """Quotient monomial ``b / a``; caller guarantees divisibility."""
    return _trim(tuple(b[i] - (a[i] if i < len(a) else 0) for i in range(len(b))))


def grlex_key(mono: tuple):
    return (sum(mono), mono)


def frac_gcd(a: Fraction, b: Fraction) -> Fraction:
    if not a:
        return abs(b)
    if not b:
        return abs(a)
    num = math.gcd(a.numerator, b.numerator)
    den = a.denominator * b.denominator // math.gcd(a.denominator, b.denominator)
    return Fraction(num, den)


def frac_sqrt(c: Fraction) -> Optional[Fraction]:
    """Exact square root of a rational, or None when not a perfect square."""
    if c < 0:
        return None
    rn = math.isqrt(c.numerator)
    rd = math.isqrt(c.denominator)
    if rn * rn == c.numerator and rd * rd == c.denominator:
        return Fraction(rn, rd)
    return None


class SPoly:
    """Immutable sparse polynomial: dict from trimmed exponent tuple to coeff."""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[dict] = None):
        self.terms = terms if terms is not None else {}

    # -- constructors -------------------------------------------------------

    @staticmethod
    def zero() -> "SPoly":
        return SPoly({})

    @staticmethod
    def const(c) -> "SPoly":
        return SPoly({(): c}) if c else SPoly({})

    @staticmethod
    def var(i: int, one=Fraction(1)) -> "SPoly":
        mono = tuple([0] * i + [1])
        return SPoly({mono: one})

    @staticmethod
    def from_terms(items: Iterable[tuple]) -> "SPoly":
        terms = {}
        for mono, c in items:
            mono = _trim(tuple(mono))
            acc = terms.get(mono)
            c = c if acc is None else acc + c
            if c:
                terms[mono] = c
            elif mono in terms:
                del terms[mono]
        return SPoly(terms)

    # -- predicates ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_const(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and () in self.terms)

    def const_value(self, zero=Fraction(0)):
        if not self.terms:
            return zero
        return self.terms.get((), zero)

    def is_one(self) -> bool:
        if len(self.terms) != 1 or () not in self.terms:
            return False
        c = self.terms[()]
        return c == 1

    def nvars(self) -> int:
        return max((len(m) for m in self.terms), default=0)

    def total_degree(self) -> int:
        return max((sum(m) for m in self.terms), default=0)

    def degree_in(self, v: int) -> int:
        return max((m[v] if v < len(m) else 0 for m in self.terms), default=0)

    def vars_used(self) -> set:
        used = set()
        for m in self.terms:
            for i, e in enumerate(m):
                if e:
                    used.add(i)
        return used

    # -- arithmetic ---------------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, SPoly):
            return self.terms == other.terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset((m, repr(c)) for m, c in self.terms.items()))

    def __neg__(self) -> "SPoly":
        return SPoly({m: -c for m, c in self.terms.items()})

    def __add__(self, other: "SPoly") -> "SPoly":
        if not other.terms:
            return self
        if not self.terms:
            return other
        terms = dict(self.terms)
        for m, c in other.terms.items():
            acc = terms.get(m)
            if acc is None:
                terms[m] = c
            else:
                s = acc + c
                if s:
                    terms[m] = s
                else:
                    del terms[m]
        return SPoly(terms)

    def __sub__(self, other: "SPoly") -> "SPoly":
        return self + (-other)

    def __mul__(self, other: "SPoly") -> "SPoly":
        if not self.terms or not other.terms:
            return SPoly({})
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        terms: dict = {}
        for ma, ca in a.items():
            for mb, cb in b.items():
                m = mono_mul(ma, mb)
                c = ca * cb
                acc = terms.get(m)
                if acc is None:
                    if c:
                        terms[m] = c
                else:
                    s = acc + c
                    if s:
                        terms[m] = s
                    else:
                        del terms[m]
        return SPoly(terms)

    def scale(self, c) -> "SPoly":
        if not c:
            return SPoly({})
        return SPoly({m: coeff * c for m, coeff in self.terms.items()})

    def mul_mono(self, mono: tuple, c=None) -> "SPoly":
        terms = {}
        for m, coeff in self.terms.items():
            terms[mono_mul(m, mono)] = coeff if c is None else coeff * c
        return SPoly(terms)

    def __pow__(self, k: int) -> "SPoly":
        if k < 0:
            raise ValueError("negative power of a polynomial")
        result = None
        base = self
        while True:
            if k & 1:
                result = base if result is None else result * base
            k >>= 1
            if not k:
                break
            base = base * base
        if result is None:
            raise ValueError("SPoly ** 0 needs a coefficient ring; use const")
        return result

    # -- structure ----------------------------------------------------------

    def leading(self) -> tuple:
        """(monomial, coeff) maximal in grlex order; poly must be nonzero."""
        m = max(self.terms, key=grlex_key)
        return m, self.terms[m]

    def sorted_terms(self, reverse: bool = True):
        return sorted(self.terms.items(), key=lambda t: grlex_key(t[0]), reverse=reverse)

    def min_exponents(self) -> tuple:
        """Largest monomial dividing every term (the monomial content)."""
        if not self.terms:
            return ()
        width = max(len(m) for m in self.terms)
        mins = [None] * width
        for m in self.terms:
            for i in range(width):
                e = m[i] if i < len(m) else 0
                if mins[i] is None or e < mins[i]:
                    mins[i] = e
        return _trim(tuple(mins))

    def diff(self, v: int) -> "SPoly":
        terms = {}
        for m, c in self.terms.items():
            if v < len(m) and m[v]:
                e = m[v]
                newm = _trim(m[:v] + (e - 1,) + m[v + 1 :])
                nc = c * e
                acc = terms.get(newm)
                terms[newm] = nc if acc is None else acc + nc
        return SPoly({m: c for m, c in terms.items() if c})

    def eval(self, values):
        """Full evaluation; ``values[i]`` substitutes variable i."""
        out = None
        for m, c in self.terms.items():
            v = c
            for i, e in enumerate(m):
                if e:
                    v = v * values[i] ** e
            out = v if out is None else out + v
        return out if out is not None else Fraction(0)

    def subs_vars(self, mapping: dict) -> "SPoly":
        """Substitute polynomials for variables: mapping[i] = SPoly."""
        out = SPoly({})
        for m, c in self.terms.items():
            part = SPoly({(): c})
            rest = []
            for i, e in enumerate(m):
                if not e:
                    rest.append(0)
                    continue
                if i in mapping:
                    part = part * mapping[i] ** e
                    rest.append(0)
                else:
                    rest.append(e)
            out = out + part.mul_mono(_trim(tuple(rest)))
        return out

    # -- division -----------------------------------------------------------

    def exact_div(self, g: "SPoly") -> Optional["SPoly"]:
        """Exact quotient self/g, or None when g does not divide self."""
        if g.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        if self.is_zero():
            return SPoly({})
        if g.is_const():
            return self.scale(1 / g.terms[()])
        gm, gc = g.leading()
        rem = self
        qterms = {}
        # grlex is a well-order: the leading monomial of rem strictly drops
        # each step, so this terminates whether or not g divides self.
        while rem.terms:
            rm, rc = rem.leading()
            if not mono_divides(gm, rm):
                return None
            qm = mono_div(rm, gm)
            qc = rc / gc
            qterms[qm] = qterms.get(qm, None)
            qterms[qm] = qc if qterms[qm] is None else qterms[qm] + qc
            rem = rem - g.mul_mono(qm, qc)
        return SPoly({m: c for m, c in qterms.items() if c})

    def __repr__(self):
        return f"SPoly({self.terms!r})"


# ---------------------------------------------------------------------------
# gcd via primitive pseudo-remainder sequences
# ---------------------------------------------------------------------------


def _univariatize(f: SPoly, v: int):
    """Coefficient list [c_0 .. c_d] of f seen as univariate in variable v."""
    d = f.degree_in(v)
    coeffs = [dict() for _ in range(d + 1)]
    for m, c in f.terms.items():
        e = m[v] if v < len(m) else 0
        rest = _trim(m[:v] + (0,) + m[v + 1 :]) if v < len(m) else m
        coeffs[e][rest] = c
    return [SPoly(t) for t in coeffs]


def _devariatize(coeffs, v: int) -> SPoly:
    terms = {}
    for e, p in enumerate(coeffs):
        for m, c in p.terms.items():
            mm = list(m) + [0] * (max(0, v + 1 - len(m)))
            mm[v] = mm[v] + e
            terms[_trim(tuple(mm))] = c
    return SPoly(terms)


def _list_trim(lst):
    while lst and lst[-1].is_zero():
        lst.pop()
    return lst


def _list_is_zero(lst):
    return not lst


def _pseudo_rem(A, B):
    """Pseudo-remainder of coefficient lists (univariate over SPoly ring).

    Uses a true division step whenever the leading coefficient divides
    exactly (always over a field), falling back to scaling otherwise; this
    keeps coefficient growth down on the coprime-input worst case.
    """
    A = list(A)
    dB = len(B) - 1
    lB = B[-1]
    while len(A) - 1 >= dB and A:
        dA = len(A) - 1
        lA = A[-1]
        shift = dA - dB
        q = lA.exact_div(lB)
        if q is not None:
            for i, b in enumerate(B):
                A[i + shift] = A[i + shift] - q * b
        else:
            # lB * A  -  lA * x^(dA-dB) * B
            A = [lB * a for a in A]
            for i, b in enumerate(B):
                A[i + shift] = A[i + shift] - lA * b
        A = _list_trim(A)
    return A


def _content(f: SPoly, gcd_fn) -> SPoly:
    """gcd of the coefficients of f w.r.t. its top variable."""
    vs = f.vars_used()
    v = max(vs)
    coeffs = [c for c in _univariatize(f, v) if not c.is_zero()]
    g = coeffs[0]
    for c in coeffs[1:]:
        if g.is_const():
            break
        g = gcd_fn(g, c)
    return g


def _normalize(f: SPoly) -> SPoly:
    """Canonical associate: unit leading coefficient when coeffs are Fractions,
    otherwise leave coefficient scaling alone but keep rational content 1."""
    if f.is_zero():
        return f
    _, lc = f.leading()
    if isinstance(lc, Fraction):
        if lc == 1:
            return f
        return f.scale(1 / lc)
    return f.scale(1 / lc)


_GCD_MEMO: dict = {}
_GCD_MEMO_CAP = 20000


def poly_gcd(f: SPoly, g: SPoly) -> SPoly:
    """gcd over rational coefficients, normalized to unit leading coefficient.

    Monomial content first; then, when a random specialization certifies
    that the gcd is free of a shared variable, that variable is eliminated
    by recursing on the contents; a primitive PRS handles the rest.  The
    layer recursions ask for the same operand pairs thousands of times, so
    rational-coefficient results are memoized structurally.
    """
    if f.is_zero():
        return _normalize(g)
    if g.is_zero():
        return _normalize(f)
    key = None
    if isinstance(next(iter(f.terms.values())), Fraction) and (len(f.terms) > 1 or len(g.terms) > 1):
        ka = frozenset(f.terms.items())
        kb = frozenset(g.terms.items())
        key = (ka, kb) if len(f.terms) <= len(g.terms) else (kb, ka)
        hit = _GCD_MEMO.get(key)
        if hit is not None:
            return hit
    mf = f.min_exponents()
    mg = g.min_exponents()
    common = _trim(tuple(min(a, b) for a, b in zip(list(mf) + [0] * len(mg), list(mg) + [0] * len(mf))))
    f1 = SPoly({mono_div(m, mf): c for m, c in f.terms.items()})
    g1 = SPoly({mono_div(m, mg): c for m, c in g.terms.items()})
    core = _gcd_dispatch(f1, g1)
    out = _normalize(core.mul_mono(common))
    if key is not None:
        if len(_GCD_MEMO) >= _GCD_MEMO_CAP:
            _GCD_MEMO.clear()
        _GCD_MEMO[key] = out
    return out


def _gcd_dispatch(f1: SPoly, g1: SPoly) -> SPoly:
    if f1.is_const() or g1.is_const():
        return _const_one(f1)
    shared = f1.vars_used() & g1.vars_used()
    if not shared:
        # a common divisor can only use variables present in both
        return _const_one(f1)
    keep = _keep_free_variable(f1, g1, shared)
    if keep is not None:
        # the gcd has degree 0 in `keep`: it divides both keep-contents
        cf = _fold_gcd([c for c in _univariatize(f1, keep) if not c.is_zero()])
        if cf.is_const():
            return _const_one(f1)
        cg = _fold_gcd([c for c in _univariatize(g1, keep) if not c.is_zero()])
        if cg.is_const():
            return _const_one(f1)
        return _gcd_dispatch(cf, cg)
    return _gcd_core(f1, g1)


def _keep_free_variable(f: SPoly, g: SPoly, shared):
    """A shared variable provably absent from gcd(f, g), or None.

    Specializing the other variables at random rationals can only enlarge
    the gcd's degree in the kept variable, so a constant specialized gcd
    certifies degree zero there.  Valid only when neither leading
    coefficient vanishes under the specialization; radical slots count as
    ordinary variables of the free polynomial ring here.
    """
    if not isinstance(next(iter(f.terms.values())), Fraction):
        return None
    vs = f.vars_used() | g.vars_used()
    if len(vs) <= 1:
        return None
    import random as _random

    rng = _random.Random(0x5eed)
    for keep in sorted(shared, reverse=True):
        for _ in range(3):
            values = {v: Fraction(rng.randint(1, 64), rng.randint(1, 8))
                      for v in vs if v != keep}
            fu = _specialize_to_univariate(f, keep, values)
            gu = _specialize_to_univariate(g, keep, values)
            if fu is None or gu is None:
                continue
            if len(fu) - 1 != f.degree_in(keep) or len(gu) - 1 != g.degree_in(keep):
                continue  # leading coefficient vanished; retry
            if _univariate_field_gcd_degree(fu, gu) == 0:
                return keep
            break
    return None


def _specialize_to_univariate(f: SPoly, keep: int, values: dict):
    out: dict = {}
    for m, c in f.terms.items():
        v = c
        e_keep = 0
        for i, e in enumerate(m):
            if not e:
                continue
            if i == keep:
                e_keep = e
            else:
                v = v * values[i] ** e
        out[e_keep] = out.get(e_keep, Fraction(0)) + v
    if not any(out.values()):
        return None
    d = max(e for e, c in out.items() if c)
    return [out.get(e, Fraction(0)) for e in range(d + 1)]


def _univariate_field_gcd_degree(A, B) -> int:
    def trim(L):
        while L and not L[-1]:
            L.pop()

    A, B = list(A), list(B)
    trim(A)
    trim(B)
    while B:
        while len(A) >= len(B):
            shift = len(A) - len(B)
            q = A[-1] / B[-1]
            for i, b in enumerate(B):
                A[i + shift] -= q * b
            trim(A)
            if not A:
                break
        A, B = B, A
    return len(A) - 1


def _gcd_core(f: SPoly, g: SPoly) -> SPoly:
    if f.is_const() or g.is_const():
        one = f.terms.get((), None) or g.terms.get((), None) or next(iter(f.terms.values()))
        return SPoly({(): one / one})
    if f == g:
        return f
    vf, vg = f.vars_used(), g.vars_used()
    v = max(vf | vg)
    if v not in vf or v not in vg:
        # top variable missing from one argument: gcd divides the contents
        with_v, without_v = (f, g) if v in vf else (g, f)
        cont = _content(with_v, poly_gcd)
        return _gcd_core(cont, without_v) if not cont.is_const() else _const_one(f)
    A = _univariatize(f, v)
    B = _univariatize(g, v)
    contA = _fold_gcd([c for c in A if not c.is_zero()])
    contB = _fold_gcd([c for c in B if not c.is_zero()])
    A = [c.exact_div(contA) for c in A]
    B = [c.exact_div(contB) for c in B]
    if len(A) < len(B):
        A, B = B, A
    while True:
        R = _pseudo_rem(A, B)
        if _list_is_zero(R):
            gcd_pp = B
            break
        if len(R) == 1:
            gcd_pp = None
            break
        cont = _fold_gcd([c for c in R if not c.is_zero()])
        R = [c.exact_div(cont) for c in R]
        A, B = B, R
    cont_gcd = poly_gcd(contA, contB)
    if gcd_pp is None:
        return cont_gcd
    pp = _devariatize(gcd_pp, v)
    cont_pp = _fold_gcd([c for c in gcd_pp if not c.is_zero()])
    pp = pp.exact_div(cont_pp)
    return cont_gcd * pp


def _fold_gcd(polys):
    g = polys[0]
    for p in polys[1:]:
        if g.is_const():
            break
        g = poly_gcd(g, p)
    return _normalize(g)


def _const_one(sample: SPoly) -> SPoly:
    c = next(iter(sample.terms.values()))
    return SPoly({(): c / c})


# ---------------------------------------------------------------------------
# exact square roots (Fraction coefficients)
# ---------------------------------------------------------------------------


def poly_sqrt(p: SPoly) -> Optional[SPoly]:
    """Exact polynomial square root over Q, or None."""
    if p.is_zero():
        return SPoly({})
    lm, lc = p.leading()
    if any(e % 2 for e in lm):
        return None
    rc = frac_sqrt(lc) if isinstance(lc, Fraction) else None
    if rc is None:
        return None
    s0_mono = tuple(e // 2 for e in lm)
    S = SPoly({_trim(s0_mono): rc})
    guard = 4 * (len(p.terms) + 2) ** 2
    while guard:
        guard -= 1
        R = p - S * S
        if R.is_zero():
            return S
        rm, rcoef = R.leading()
        if not mono_divides(_trim(s0_mono), rm):
            return None
        tm = mono_div(rm, _trim(s0_mono))
        if grlex_key(tm) >= grlex_key(_trim(s0_mono)):
            return None
        S = S + SPoly({tm: rcoef / (2 * rc)})
    return None


def rational_content(p: SPoly) -> Fraction:
    """Positive rational content (for Fraction-coefficient polynomials)."""
    c = Fraction(0)
    for coeff in p.terms.values():
        c = frac_gcd(c, coeff)
        if c == 1:
            break
    return c if c else Fraction(1)
