"""Exact coefficient field: rational functions in the base variables,
optionally extended by declared square roots.

A :class:`Scalar` is a fraction num/den where num lives in
Q[x_1..x_n, s_1..s_r] with every radical exponent <= 1 (the relations
``s_a**2 = r_a(x)`` are applied on every product) and den lives in
Q[x_1..x_n] only.  Keeping denominators radical-free makes the zero test
trivial (num == 0) and fraction arithmetic sound: denominators always live
in the integral domain Q[x].

Radical bookkeeping: a user radical with square N(x)/D(x) is stored through
an internal symbol t with the *polynomial* square N*D, and the user symbol
denotes +-t/D.  New radicals are checked for multiplicative dependence on
the existing ones (any subset product differing by a perfect square reuses
the old symbols), which keeps the whole tower an honest field.

A ``ScalarField`` is append-only: declaring a radical adds a slot but never
changes the meaning of existing values, so scalars remain freely shareable.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Optional, Sequence

from .errors import DivisionByZero, IrrationalValue, PoleAtPoint, RadicalTowerUnsupported
from .sparsepoly import SPoly, frac_sqrt, poly_gcd, poly_sqrt, rational_content

__all__ = ["ScalarField", "Scalar", "RadicalSpec"]


class RadicalSpec:
    """A declared square root: internal slot, polynomial square, display data."""

    __slots__ = ("name", "slot", "square_poly", "user_num", "user_den", "den_sign")

    def __init__(self, name, slot, square_poly, user_num, user_den, den_sign):
        self.name = name
        self.slot = slot                # variable slot of the internal symbol
        self.square_poly = square_poly  # SPoly over base variables: t**2 = square_poly
        self.user_num = user_num        # user square = user_num/user_den (SPoly)
        self.user_den = user_den
        self.den_sign = den_sign        # sign of user_den at the base point


class ScalarField:
    """Shared context: base variable names plus declared radicals."""

    def __init__(self, variables: Sequence[str] = ()):
        self.variables = tuple(variables)
        self.radicals: list[RadicalSpec] = []
        self._names = list(variables)
        # user-declared names (radicals whose value is not a bare slot symbol)
        self.named_values: dict = {}
        self._reserved: set = set()

    # -- slots ----------------------------------------------------------------

    @property
    def nbase(self) -> int:
        return len(self.variables)

    def slot_name(self, i: int) -> str:
        return self._names[i]

    def slot_of_radical(self, name: str) -> Optional[int]:
        for r in self.radicals:
            if r.name == name:
                return r.slot
        return None

    def radical_at_slot(self, slot: int) -> RadicalSpec:
        return self.radicals[slot - self.nbase]

    # -- element constructors ---------------------------------------------------

    @property
    def zero(self) -> "Scalar":
        return Scalar(self, SPoly.zero(), _ONE, normalized=True)

    @property
    def one(self) -> "Scalar":
        return Scalar(self, _ONE, _ONE, normalized=True)

    def const(self, c) -> "Scalar":
        return Scalar(self, SPoly.const(Fraction(c)), _ONE, normalized=True)

    def var(self, i: int) -> "Scalar":
        if not 0 <= i < self.nbase:
            raise IndexError(f"base variable index {i} out of range")
        return Scalar(self, SPoly.var(i), _ONE, normalized=True)

    def var_named(self, name: str) -> "Scalar":
        return self.var(self.variables.index(name))

    def from_fraction_poly(self, num: SPoly, den: SPoly) -> "Scalar":
        return Scalar(self, num, den)

    # -- radicals ---------------------------------------------------------------

    def lookup(self, name: str) -> Optional["Scalar"]:
        """Resolve an identifier: base variable, declared radical, or slot symbol."""
        if name in self.variables:
            return self.var_named(name)
        if name in self.named_values:
            return self.named_values[name]
        slot = self.slot_of_radical(name)
        if slot is not None:
            return Scalar(self, SPoly.var(slot), _ONE, normalized=True)
        return None

    def declare_radical(self, name: str, square: "Scalar",
                        base_point: Optional[Sequence[Fraction]] = None) -> "Scalar":
        """Return a Scalar equal to the positive square root of ``square``.

        Reuses existing radicals (or returns an exact square root) whenever
        possible; otherwise appends a fresh symbol.  When ``base_point`` is
        given, the square must evaluate to a strictly positive number there.
        """
        if square.is_zero():
            raise DivisionByZero("radical square must be nonzero")
        if square.has_radicals():
            raise RadicalTowerUnsupported(
                f"square of radical '{name}' must be radical-free")
        if base_point is not None:
            val = square.eval(base_point)
            if val <= 0:
                raise RadicalTowerUnsupported(
                    f"square of radical '{name}' is not positive at the base point")
        self._reserved.add(name)
        root = self.sqrt_of(square, name_hint=name, base_point=base_point)
        self.named_values[name] = root
        return root

    def sqrt_of(self, square: "Scalar", name_hint: str = "s",
                base_point: Optional[Sequence[Fraction]] = None) -> "Scalar":
        """Positive square root of a radical-free scalar, extending the field
        with at most one new quadratic radical."""
        dec = square.sqrt_decompose()
        if dec is not None:
            root, leftover = dec
            if leftover == 1:
                return self._fix_sign(root, base_point)
            # leftover is a squarefree-ish rational; take its root.  The user
            # name may label the slot only when the value IS the bare slot.
            root_is_one = root.is_rational() and root.as_fraction() == 1
            rad = self._radical_for(SPoly.const(leftover), _ONE,
                                    name_hint if root_is_one else None, base_point)
            return self._fix_sign(root * rad, base_point)
        return self._radical_for(square.num_poly(), square.den_poly(), name_hint, base_point)

    def _fix_sign(self, root: "Scalar", base_point) -> "Scalar":
        if base_point is None:
            return root
        try:
            v = root.eval(base_point)
        except IrrationalValue:
            # declared radicals are positive at the base point, so the float
            # branch decides a sign that is bounded away from zero
            v = root.eval(base_point, numeric=True)
        return -root if v < 0 else root

    def _radical_for(self, num: SPoly, den: SPoly, name_hint: str,
                     base_point=None) -> "Scalar":
        square_poly = num * den  # (t/den)**2 = num/den with t**2 = num*den
        # multiplicative-dependence check against the existing tower
        for k in range(1, len(self.radicals) + 1):
            for combo in itertools.combinations(self.radicals, k):
                prod = square_poly
                for spec in combo:
                    prod = prod * spec.square_poly
                root = _rational_square_root(prod)
                if root is None:
                    continue
                # sqrt(num*den) = root / prod(t_a) * ... : use t_a = R_a / t_a
                value = Scalar(self, root, _ONE)
                for spec in combo:
                    t = Scalar(self, SPoly.var(spec.slot), _ONE)
                    value = value * t / Scalar(self, spec.square_poly, _ONE)
                return self._as_user_root(value, den, base_point)
        direct = _rational_square_root(square_poly)
        if direct is not None:
            return self._as_user_root(Scalar(self, direct, _ONE), den, base_point)
        # A bare slot symbol may carry the user's name only when it equals the
        # user value exactly (polynomial square, positive branch).
        existing = (set(self.named_values) | {r.name for r in self.radicals}
                    | set(self.variables) | (self._reserved - {name_hint}))
        if name_hint is not None and den.is_one() and name_hint not in existing:
            name = name_hint
        else:
            k = len(self.radicals) + 1
            name = f"rad{k}"
            while name in existing or name in self._reserved:
                k += 1
                name = f"rad{k}"
        slot = self.nbase + len(self.radicals)
        spec = RadicalSpec(name, slot, square_poly, num, den, 1)
        self.radicals.append(spec)
        self._names.append(name)
        return self._fix_sign(Scalar(self, SPoly.var(slot), den), base_point)

    def _as_user_root(self, t_value: "Scalar", den: SPoly, base_point=None) -> "Scalar":
        # t_value**2 == num*den, so the user root is t_value/den.
        return self._fix_sign(t_value / Scalar(self, den, _ONE), base_point)

    # -- radical reduction -------------------------------------------------------

    def reduce_radicals(self, p: SPoly) -> SPoly:
        """Rewrite every radical exponent >= 2 through its square relation."""
        nb = self.nbase
        needs = any(len(m) > nb and any(e >= 2 for e in m[nb:]) for m in p.terms)
        if not needs:
            return p
        out = SPoly.zero()
        for m, c in p.terms.items():
            extra = _ONE
            mm = list(m)
            for j in range(nb, len(mm)):
                e = mm[j]
                if e >= 2:
                    spec = self.radical_at_slot(j)
                    extra = extra * spec.square_poly ** (e // 2)
                    mm[j] = e % 2
            term = SPoly({tuple(mm): c}) if extra.is_one() else extra.mul_mono(tuple(mm), c)
            term = SPoly({_strip(mo): co for mo, co in term.terms.items()})
            out = out + term
        return out

    def mul_reduced(self, a: SPoly, b: SPoly) -> SPoly:
        return self.reduce_radicals(a * b)

    def __repr__(self):
        rads = ", ".join(r.name for r in self.radicals)
        return f"ScalarField(vars={list(self.variables)}, radicals=[{rads}])"


_ONE = SPoly.const(Fraction(1))


def _strip(mono):
    i = len(mono)
    while i > 0 and mono[i - 1] == 0:
        i -= 1
    return mono[:i]


def _rational_square_root(p: SPoly) -> Optional[SPoly]:
    """Square root of p in Q[x], allowing a rational square content."""
    if p.is_zero():
        return SPoly.zero()
    root = poly_sqrt(p)
    if root is not None:
        return root
    c = rational_content(p)
    _, lc = p.leading()
    if lc < 0:
        c = -c
    pp = p.scale(1 / c)
    rpp = poly_sqrt(pp)
    if rpp is None:
        return None
    rc = frac_sqrt(c)
    if rc is None:
        return None
    return rpp.scale(rc)


class Scalar:
    """Element of the scalar field; immutable, canonically reduced."""

    __slots__ = ("field", "num", "den")

    def __init__(self, field: ScalarField, num: SPoly, den: SPoly, normalized=False):
        if den.is_zero():
            raise DivisionByZero("zero denominator")
        self.field = field
        if normalized:
            self.num, self.den = num, den
            return
        num = field.reduce_radicals(num)
        if num.is_zero():
            self.num, self.den = num, _ONE
            return
        if den.is_one():
            self.num, self.den = num, den
            return
        g = poly_gcd(num, den)
        if not g.is_one() and not g.is_const():
            num = num.exact_div(g)
            den = den.exact_div(g)
        _, lc = den.leading()
        if lc != 1:
            num = num.scale(1 / lc)
            den = den.scale(1 / lc)
        self.num, self.den = num, den

    # -- basic structure -----------------------------------------------------

    def num_poly(self) -> SPoly:
        return self.num

    def den_poly(self) -> SPoly:
        return self.den

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self) -> bool:
        return not self.num.is_zero()

    def is_rational(self) -> bool:
        return self.num.is_const() and self.den.is_const()

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise IrrationalValue("scalar is not a rational constant")
        return self.num.const_value() / self.den.const_value()

    def is_constant(self) -> bool:
        """No dependence on the base variables (radical constants allowed)."""
        nb = self.field.nbase
        for m in list(self.num.terms) + list(self.den.terms):
            if any(e for e in m[:nb]):
                return False
        return True

    def has_radicals(self) -> bool:
        nb = self.field.nbase
        for m in self.num.terms:
            if len(m) > nb and any(m[nb:]):
                return True
        return False

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        if self.is_rational():
            return hash(self.as_fraction())
        return hash((id(self.field), self.num, self.den))

    # -- arithmetic ------------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Scalar):
            return other
        if isinstance(other, (int, Fraction)):
            return Scalar(self.field, SPoly.const(Fraction(other)), _ONE, normalized=True)
        return NotImplemented

    def __neg__(self):
        return Scalar(self.field, -self.num, self.den, normalized=True)

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.num.is_zero():
            return other
        if other.num.is_zero():
            return self
        d1, d2 = self.den, other.den
        if d1 == d2:
            return Scalar(self.field, self.num + other.num, d1)
        if d1.is_one():
            # reduced inputs: gcd(n1 d2 + n2, d2) = gcd(n2, d2) = 1
            return _monic(self.field, self.num * d2 + other.num, d2)
        if d2.is_one():
            return _monic(self.field, self.num + other.num * d1, d1)
        g0 = poly_gcd(d1, d2)
        if g0.is_const():
            # coprime denominators: the cross sum is already reduced
            return _monic(self.field, self.num * d2 + other.num * d1, d1 * d2)
        d1r = d1.exact_div(g0)
        d2r = d2.exact_div(g0)
        t = self.num * d2r + other.num * d1r
        den = d1 * d2r
        # any residual common factor divides g0
        g1 = poly_gcd(t, g0)
        while not g1.is_const():
            t = t.exact_div(g1)
            den = den.exact_div(g1)
            g1 = poly_gcd(t, g1)
        return _monic(self.field, t, den)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.num.is_zero() or other.num.is_zero():
            return self.field.zero
        n1, d1 = self.num, self.den
        n2, d2 = other.num, other.den
        # cross-cancellation keeps the final gcd trivial for reduced inputs
        if not d2.is_one():
            g = poly_gcd(n1, d2)
            if not g.is_const():
                n1 = n1.exact_div(g)
                d2 = d2.exact_div(g)
        if not d1.is_one():
            g = poly_gcd(n2, d1)
            if not g.is_const():
                n2 = n2.exact_div(g)
                d1 = d1.exact_div(g)
        raw = n1 * n2
        red = self.field.reduce_radicals(raw)
        if red is raw:
            # no radical relation fired: the product of the cancelled parts
            # is already reduced
            return _monic(self.field, raw, d1 * d2)
        return Scalar(self.field, red, d1 * d2)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, k: int):
        if k == 0:
            return self.field.one
        base = self if k > 0 else self.inverse()
        out = base
        for _ in range(abs(k) - 1):
            out = out * base
        return out

    def inverse(self) -> "Scalar":
        if self.num.is_zero():
            raise DivisionByZero("division by zero scalar")
        field = self.field
        nb = field.nbase
        cur = self.num
        mult = _ONE
        # clear radicals from the prospective denominator by conjugation
        while True:
            slot = None
            for m in cur.terms:
                for j in range(nb, len(m)):
                    if m[j]:
                        slot = j
                        break
                if slot is not None:
                    break
            if slot is None:
                break
            even = {}
            odd = {}
            for m, c in cur.terms.items():
                if slot < len(m) and m[slot]:
                    mm = list(m)
                    mm[slot] = 0
                    odd[_strip(tuple(mm))] = c
                else:
                    even[m] = c
            E, O = SPoly(even), SPoly(odd)
            conj = E - O.mul_mono(tuple([0] * slot + [1]))
            mult = field.mul_reduced(mult, conj)
            spec = field.radical_at_slot(slot)
            cur = E * E - field.reduce_radicals(O * O * spec.square_poly)
        if cur.is_zero():
            raise DivisionByZero("scalar is a zero divisor in the radical ring")
        num = field.mul_reduced(self.den, mult)
        return Scalar(field, num, cur)

    # -- calculus ---------------------------------------------------------------

    def diff(self, v: int) -> "Scalar":
        """Exact partial derivative with respect to base variable v."""
        field = self.field
        nb = field.nbase
        dnum = self._poly_diff(self.num, v)
        if self.den.is_one():
            return dnum
        den_s = Scalar(field, self.den, _ONE, normalized=True)
        dden = Scalar(field, self.den.diff(v), _ONE)
        num_s = Scalar(field, self.num, _ONE, normalized=True)
        return (dnum * den_s - num_s * dden) / (den_s * den_s)

    def _poly_diff(self, p: SPoly, v: int) -> "Scalar":
        field = self.field
        nb = field.nbase
        out = field.zero
        plain = p.diff(v)
        if not plain.is_zero():
            out = out + Scalar(field, plain, _ONE)
        # chain rule through radical slots: d t = (d R) t / (2 R)
        for spec in field.radicals:
            j = spec.slot
            dR = spec.square_poly.diff(v)
            if dR.is_zero():
                continue
            part = SPoly({m: c for m, c in p.terms.items() if j < len(m) and m[j]})
            if part.is_zero():
                continue
            out = out + Scalar(field, field.reduce_radicals(part * dR),
                               spec.square_poly * SPoly.const(Fraction(2)))
        return out

    # -- evaluation ---------------------------------------------------------------

    def eval(self, point: Sequence[Fraction], radical_signs: Optional[Sequence[int]] = None,
             numeric: bool = False):
        """Exact evaluation at a rational base point.

        Radical slots evaluate through their squares; a sign tuple (one +-1
        per declared radical, default all +1) picks the branch.  Raises
        PoleAtPoint / IrrationalValue as appropriate; ``numeric=True`` falls
        back to floats instead of raising IrrationalValue.
        """
        field = self.field
        point = [Fraction(p) for p in point]
        if len(point) != field.nbase:
            raise ValueError("evaluation point has wrong dimension")
        dval = self.den.eval(point) if not self.den.is_one() else Fraction(1)
        if dval == 0:
            raise PoleAtPoint("denominator vanishes at the point")
        signs = list(radical_signs) if radical_signs is not None else [1] * len(field.radicals)
        rad_vals = []
        exact = True
        for idx, spec in enumerate(field.radicals):
            if not self._uses_slot(spec.slot):
                rad_vals.append(Fraction(0))
                continue
            sq = spec.square_poly.eval(point)
            if sq < 0:
                raise PoleAtPoint("radical square negative at the point")
            r = frac_sqrt(Fraction(sq))
            if r is None:
                if not numeric:
                    raise IrrationalValue(
                        f"radical '{spec.name}' is irrational at the point; use numeric mode")
                exact = False
                r = float(sq) ** 0.5
            rad_vals.append(signs[idx] * r)
        values = list(point) + rad_vals
        nval = self.num.eval(values) if not self.num.is_zero() else Fraction(0)
        if not exact:
            return float(nval) / float(dval)
        return Fraction(nval) / Fraction(dval)

    def _uses_slot(self, slot: int) -> bool:
        return any(slot < len(m) and m[slot] for m in self.num.terms)

    # -- roots ----------------------------------------------------------------

    def sqrt_decompose(self):
        """Write self = leftover * root**2 with rational ``leftover``.

        Returns (root: Scalar, leftover: Fraction) or None when the primitive
        parts of num/den are not perfect squares.  Radical-bearing scalars
        are not handled (None).
        """
        if self.has_radicals():
            return None
        if self.is_zero():
            return self.field.zero, Fraction(1)
        cn = rational_content(self.num)
        _, lcn = self.num.leading()
        if lcn < 0:
            cn = -cn
        ppn = self.num.scale(1 / cn)
        cd = rational_content(self.den)
        ppd = self.den.scale(1 / cd)
        rn = poly_sqrt(ppn)
        rd = poly_sqrt(ppd)
        if rn is None or rd is None:
            return None
        c = cn / cd
        rc = frac_sqrt(c)
        if rc is not None:
            return Scalar(self.field, rn.scale(rc), rd), Fraction(1)
        # split c = sign*sq * rest with rest squarefree-ish
        root_part, rest = _split_square_fraction(c)
        return Scalar(self.field, rn.scale(root_part), rd), rest

    # -- display -----------------------------------------------------------------

    def __repr__(self):
        return f"Scalar({self.to_expr()})"

    def to_expr(self) -> str:
        from .exprfmt import poly_to_expr  # local import to avoid a cycle
        num = poly_to_expr(self.num, self.field._names)
        if self.den.is_one():
            return num
        den = poly_to_expr(self.den, self.field._names)
        return f"({num})/({den})"


def _monic(field: ScalarField, num: SPoly, den: SPoly) -> Scalar:
    """Construct a Scalar known to be reduced, normalizing the denominator."""
    if num.is_zero():
        return Scalar(field, num, _ONE, normalized=True)
    if den.is_one():
        return Scalar(field, num, den, normalized=True)
    _, lc = den.leading()
    if lc != 1:
        num = num.scale(1 / lc)
        den = den.scale(1 / lc)
    return Scalar(field, num, den, normalized=True)


def _split_square_fraction(c: Fraction):
    """c = root**2 * rest with rest squarefree (rest keeps the sign of c)."""
    sign = -1 if c < 0 else 1
    n, d = abs(c.numerator), c.denominator
    rn, sn = _split_square_int(n)
    rd, sd = _split_square_int(d)
    # c = sign * (rn/rd)**2 * (sn/sd); rationalize rest: sn/sd = sn*sd / sd**2
    root = Fraction(rn, rd * sd)
    rest = Fraction(sign * sn * sd)
    return root, rest


def _split_square_int(n: int):
    """n = r**2 * s with s squarefree (trial division; desk-scale inputs)."""
    r, s = 1, 1
    k = 2
    while k * k <= n:
        if n % k == 0:
            e = 0
            while n % k == 0:
                n //= k
                e += 1
            r *= k ** (e // 2)
            if e % 2:
                s *= k
        k += 1
    s *= n
    return r, s
