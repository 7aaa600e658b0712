"""Nilpotent approximation, Carnot validation, highest-weight comparison,
product decomposition."""

import random
from fractions import Fraction as F

import pytest

from subrig.errors import BadInput, JacobiViolation, NotFundamental
from subrig.frames import frame_from_fields, growth_vector
from subrig.fundamental import analyze_pair
from subrig.nilpotent import (
    CarnotAlgebra,
    Obstruction,
    ProductDecomposition,
    carnot_product_structure,
    carnot_to_frame,
    hat_layer_check,
    nilpotent_approximation,
    validate_carnot,
)
from subrig.scalars import ScalarField

from conftest import double_heisenberg_carnot, engel_carnot, free_rank2_step3_carnot, random_carnot


@pytest.fixture
def realized():
    fld = ScalarField(("x1", "x2", "x3"))
    zero, one = fld.zero, fld.one
    x1, x2 = fld.var(0), fld.var(1)
    X1 = [one, zero, zero]
    X2 = [zero, one, x1]
    X2p = [zero, one, x1 + x1 * x1 * x2]
    return fld, X1, X2, X2p


def test_nilpotent_approximation_heisenberg(realized):
    fld, X1, X2, _ = realized
    fd = frame_from_fields([X1, X2], [fld.one, fld.one], [0, 0, 0], fld)
    g = nilpotent_approximation(fd)
    assert g.grading == (2, 3)
    assert g.structure[(0, 1, 2)] == 1


def test_nilpotent_approximation_perturbed(realized):
    fld, X1, _, X2p = realized
    fd = frame_from_fields([X1, X2p], [fld.one, fld.one], [0, 0, 0], fld)
    g = nilpotent_approximation(fd)
    assert g.grading == (2, 3)
    assert g.structure[(0, 1, 2)] == 1
    assert all(k == (0, 1, 2) or k == (1, 0, 2) for k in g.structure)


def test_nilpotent_approximation_carnot_identity():
    g = engel_carnot()
    fd = carnot_to_frame(g, [F(1), F(1)])
    back = nilpotent_approximation(fd)
    assert back.grading == g.grading and back.structure == g.structure


def test_validate_carnot_rejects_nonfundamental():
    with pytest.raises(NotFundamental):
        validate_carnot(CarnotAlgebra(grading=(2, 4), structure={(0, 1, 2): F(1)}))


def test_validate_carnot_rejects_nongraded():
    with pytest.raises(BadInput):
        validate_carnot(CarnotAlgebra(grading=(2, 3), structure={(0, 2, 2): F(1),
                                                                 (0, 1, 2): F(1)}))


def test_validate_carnot_rejects_jacobi_violation():
    # step-3 table violating Jacobi: [e1,[e1,e2]] = e4 but [e2,[e1,e2]] = e4 too,
    # then Jacobi of (e1, e2, e3) forces a contradiction via a crafted c
    bad = CarnotAlgebra(grading=(3, 5, 6),
                        structure={(0, 1, 3): F(1), (0, 2, 4): F(1), (1, 2, 3): F(0),
                                   (0, 3, 5): F(1), (1, 4, 5): F(-1), (2, 3, 5): F(1)})
    with pytest.raises((JacobiViolation, NotFundamental)):
        validate_carnot(bad)


def test_hat_layer_check(realized):
    fld, X1, _, X2p = realized
    fd = frame_from_fields([X1, X2p], [fld.one, fld.one], [0, 0, 0], fld)
    g = nilpotent_approximation(fd)
    for s in (1, 2, 3):
        assert hat_layer_check(fd, g, s)
    wrong = CarnotAlgebra(grading=(2, 3), structure={(0, 1, 2): F(2)})
    assert not hat_layer_check(fd, wrong, 2)


def test_growth_matches_carnot_grading(realized):
    # frame realization of the Heisenberg algebra reproduces its grading
    fld, X1, X2, _ = realized
    dims, _ = growth_vector([X1, X2], [0, 0, 0])
    assert dims == double_heisenberg_carnot().grading[:1] + () or dims == (2, 3)
    assert dims == (2, 3)


def test_product_structure_double_heisenberg():
    g = double_heisenberg_carnot()
    dec = carnot_product_structure(g, [F(1), F(1), F(4), F(4)])
    assert isinstance(dec, ProductDecomposition)
    assert dec.blocks == [[0, 1, 4], [2, 3, 5]]
    assert [s.grading for s in dec.subalgebras] == [(2, 3), (2, 3)]
    assert dec.alpha_sq == [F(1), F(4)]


def test_product_structure_heisenberg_obstruction():
    g = CarnotAlgebra(grading=(2, 3), structure={(0, 1, 2): F(1)})
    ob = carnot_product_structure(g, [F(1), F(4)])
    assert isinstance(ob, Obstruction) and ob.kind == "cross_bracket"
    assert ob.indices[:2] == (1, 2)


def test_product_structure_free_step2_obstruction():
    g = free_rank2_step3_carnot()
    # use the step-2 free algebra on 3 generators instead: n = 6
    g = CarnotAlgebra(grading=(3, 6),
                      structure={(0, 1, 3): F(1), (0, 2, 4): F(1), (1, 2, 5): F(1)})
    ob = carnot_product_structure(g, [F(1), F(1), F(4)])
    assert isinstance(ob, Obstruction) and ob.kind == "cross_bracket"
    assert ob.indices[:2] == (1, 3)


def test_product_structure_conformal_trivial():
    g = double_heisenberg_carnot()
    dec = carnot_product_structure(g, [F(3), F(3), F(3), F(3)])
    assert isinstance(dec, ProductDecomposition) and dec.trivial


def test_product_structure_not_direct():
    # eigenvalue blocks whose generated subalgebras overlap in the center:
    # [e1,e2] = e5, [e3,e4] = e5 with alpha blocks {1,2} vs {3,4}
    g = CarnotAlgebra(grading=(4, 5), structure={(0, 1, 4): F(1), (2, 3, 4): F(1)})
    validate_carnot(g)
    ob = carnot_product_structure(g, [F(1), F(1), F(4), F(4)])
    assert isinstance(ob, Obstruction) and ob.kind == "not_direct"
    assert ob.witness is not None


def test_roundtrip_decomposition_vs_analyze():
    # analyze success (non-conformal) on Carnot data implies decomposability,
    # and the block witness matches alpha_l^2 u_k
    g = double_heisenberg_carnot()
    alpha = [F(1), F(1), F(9), F(9)]
    fd = carnot_to_frame(g, alpha)
    rep = analyze_pair(fd)
    assert rep.verdict == "orbital_diffeo_found"
    assert rep.alpha_phi == ["u5", "9*u6"]
    dec = carnot_product_structure(g, alpha)
    assert isinstance(dec, ProductDecomposition) and not dec.trivial


def test_random_conformal_always_decomposes_trivially():
    rng = random.Random(55)
    for _ in range(8):
        g = random_carnot(rng)
        dec = carnot_product_structure(g, [F(2)] * g.m)
        assert isinstance(dec, ProductDecomposition) and dec.trivial
