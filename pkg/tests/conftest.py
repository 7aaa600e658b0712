"""Shared fixtures and independent oracles.

The oracles deliberately avoid the code paths they check: sympy supplies
brackets, division remainders, gcds and characteristic polynomials; small
hand-rolled generators supply random Carnot algebras with exact validity.
"""

import itertools
import random
from fractions import Fraction as F

import pytest
import sympy as sp

from subrig.frames import FrameData
from subrig.linalg import fraction_rank
from subrig.nilpotent import CarnotAlgebra, validate_carnot
from subrig.scalars import ScalarField


def heisenberg_frame(a1, a2):
    """Abstract Heisenberg pair data with constant eigenvalues."""
    return FrameData(n=3, m=2, weights=(1, 1, 2), structure={(0, 1, 2): F(1)},
                     alpha_sq=[F(a1), F(a2)], base_point=(), field=None)


def double_heisenberg_carnot():
    return CarnotAlgebra(grading=(4, 6), structure={(0, 1, 4): F(1), (2, 3, 5): F(1)})


@pytest.fixture
def heis_realized():
    """Heisenberg realization {d1, d2 + x1 d3} with trivial eigenvalues."""
    fld = ScalarField(("x1", "x2", "x3"))
    zero, one = fld.zero, fld.one
    x1 = fld.var(0)
    X1 = [one, zero, zero]
    X2 = [zero, one, x1]
    return fld, [X1, X2]


def sympy_of_scalar(s, names):
    """Convert a Scalar to a sympy expression through its serialized form."""
    expr = s.to_expr().replace("^", "**")
    syms = {n: sp.Symbol(n) for n in names}
    return sp.sympify(expr, locals=syms)


def sympy_bracket(X, Y, xs):
    n = len(X)
    return [sp.expand(sum(X[j] * sp.diff(Y[l], xs[j]) - Y[j] * sp.diff(X[l], xs[j])
                          for j in range(n))) for l in range(n)]


def random_scalar(fld, rng, max_terms=3, max_deg=2, with_radicals=True):
    nb = fld.nbase
    nslots = nb + (len(fld.radicals) if with_radicals else 0)
    num = {}
    for _ in range(rng.randint(1, max_terms)):
        mono = [0] * nslots
        for v in range(nb):
            mono[v] = rng.randint(0, max_deg)
        if with_radicals:
            for r, spec in enumerate(fld.radicals):
                mono[nb + r] = rng.randint(0, 1)
        c = F(rng.randint(-5, 5))
        if c:
            mono_t = tuple(mono)
            i = len(mono_t)
            while i and mono_t[i - 1] == 0:
                i -= 1
            num[mono_t[:i]] = num.get(mono_t[:i], F(0)) + c
    from subrig.sparsepoly import SPoly

    num = SPoly({m: c for m, c in num.items() if c})
    den_choices = [fld.one, fld.const(2), fld.const(3)]
    if nb:
        den_choices.append(fld.var(0) * fld.var(0) + fld.const(1))
    den = den_choices[rng.randrange(len(den_choices))]
    from subrig.scalars import Scalar

    base = Scalar(fld, num, den.num_poly()) if not num.is_zero() else fld.zero
    return base


def random_step2_carnot(rng):
    """Random exact step-2 fundamental graded algebra with n <= 7."""
    while True:
        m = rng.randint(2, 4)
        n2 = rng.randint(1, min(m * (m - 1) // 2, 7 - m))
        structure = {}
        pairs = list(itertools.combinations(range(m), 2))
        for k in range(n2):
            for (i, j) in pairs:
                c = rng.choice([-2, -1, 0, 0, 1, 2, 3])
                if c:
                    structure[(i, j, m + k)] = F(c)
        vecs = [[structure.get((i, j, m + k), F(0)) for k in range(n2)]
                for (i, j) in pairs]
        if fraction_rank(vecs) == n2:
            g = CarnotAlgebra(grading=(m, m + n2), structure=structure)
            validate_carnot(g)
            return g


def engel_carnot():
    g = CarnotAlgebra(grading=(2, 3, 4), structure={(0, 1, 2): F(1), (0, 2, 3): F(1)})
    validate_carnot(g)
    return g


def free_rank2_step3_carnot():
    g = CarnotAlgebra(grading=(2, 3, 5),
                      structure={(0, 1, 2): F(1), (0, 2, 3): F(1), (1, 2, 4): F(1)})
    validate_carnot(g)
    return g


def random_carnot(rng):
    roll = rng.random()
    if roll < 0.7:
        return random_step2_carnot(rng)
    return engel_carnot() if roll < 0.85 else free_rank2_step3_carnot()


def random_alpha(rng, m, distinct_blocks=None):
    if distinct_blocks is None:
        return [F(rng.randint(1, 9), rng.randint(1, 9)) for _ in range(m)]
    values = [F(rng.randint(1, 9), rng.randint(1, 9)) for _ in range(distinct_blocks)]
    return [values[rng.randrange(distinct_blocks)] for _ in range(m)]


def random_skew(rng, m, lo=-9, hi=9):
    M = [[F(0)] * m for _ in range(m)]
    for i in range(m):
        for j in range(i + 1, m):
            M[i][j] = F(rng.randint(lo, hi))
            M[j][i] = -M[i][j]
    return M
