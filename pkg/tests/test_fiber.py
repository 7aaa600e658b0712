"""Fiber polynomials: weighted degrees, highest parts, division by P."""

import random
from fractions import Fraction as F

import pytest
import sympy as sp

from subrig.errors import BadDivisor, ZeroPolynomial
from subrig.fiber import FRat, divide_by_P, highest_weight_part, is_w_homogeneous, weighted_degree
from subrig.sparsepoly import SPoly


def P_(terms):
    return SPoly.from_terms((m, F(c)) for m, c in terms.items() if c)


def test_weighted_degree_examples():
    w = (1, 1, 2)
    assert weighted_degree(P_({(1, 0, 1): 1}), w) == 3          # u1*u3
    assert weighted_degree(P_({(2,): 1, (0, 0, 1): 1}), w) == 2  # u1^2 + u3
    assert weighted_degree(P_({(): 5}), w) == 0
    with pytest.raises(ZeroPolynomial):
        weighted_degree(SPoly.zero(), w)


def test_highest_weight_part_examples():
    w = (1, 1, 2)
    p = P_({(1, 0, 1): 1, (0, 2): 1})       # u1*u3 + u2^2
    assert highest_weight_part(p, w) == P_({(1, 0, 1): 1})
    hom = P_({(1, 1): 2, (2,): -1})
    assert highest_weight_part(hom, w) == hom
    assert is_w_homogeneous(hom, w)


def test_divide_by_P_constructed_product():
    P = P_({(2,): 1, (0, 2): 1})            # u1^2 + u2^2
    q = P_({(1,): 1, (0, 1): 1})            # u1 + u2
    quotient = divide_by_P(P * q, P, 2)
    assert quotient == q


def test_divide_by_P_not_divisible_oracle():
    # oracle: single-divisor division remainder over a principal ideal decides
    # divisibility; sympy computes the remainder independently
    u1, u2 = sp.symbols("u1 u2")
    _, r = sp.div(u1 ** 3, u1 ** 2 + u2 ** 2, u1, u2)
    assert r != 0
    P = P_({(2,): 1, (0, 2): 1})
    assert divide_by_P(P_({(3,): 1}), P, 2) is None


def test_divide_by_P_zero():
    P = P_({(2,): 1, (0, 2): 1})
    assert divide_by_P(SPoly.zero(), P, 2) == SPoly.zero()


def test_divide_bad_divisor():
    with pytest.raises(BadDivisor):
        divide_by_P(SPoly.zero(), P_({(1, 1): 1}), 2)
    with pytest.raises(BadDivisor):
        divide_by_P(SPoly.zero(), P_({(2,): 1, (0, 0, 2): 1}), 2)


def rnd_poly(rng, nvars=3, deg=2, terms=4):
    p = SPoly.zero()
    for _ in range(rng.randint(1, terms)):
        mono = tuple(rng.randint(0, deg) for _ in range(nvars))
        c = F(rng.randint(-4, 4))
        if c:
            p = p + SPoly.from_terms([(mono, c)])
    return p


def test_weighted_degree_additivity_and_hw_multiplicativity():
    rng = random.Random(9)
    w = (1, 1, 2)
    for _ in range(60):
        p, q = rnd_poly(rng), rnd_poly(rng)
        if p.is_zero() or q.is_zero():
            continue
        assert weighted_degree(p * q, w) == weighted_degree(p, w) + weighted_degree(q, w)
        lhs = highest_weight_part(p * q, w)
        rhs = highest_weight_part(p, w) * highest_weight_part(q, w)
        assert (lhs - rhs).is_zero()


def test_divide_by_P_roundtrip_random():
    rng = random.Random(13)
    P = P_({(2,): 2, (0, 2): 3})
    for _ in range(40):
        q = rnd_poly(rng)
        got = divide_by_P(P * q, P, 2)
        assert got is not None and (got - q).is_zero()


def test_frat_field_ops():
    rng = random.Random(17)
    for _ in range(25):
        a = FRat(rnd_poly(rng), P_({(1,): 1, (): 1}))
        b = FRat(rnd_poly(rng), P_({(0, 1): 1, (): 2}))
        if b.is_zero():
            continue
        assert (a / b) * b == a
        assert a + b == b + a
        assert (a - a).is_zero()
