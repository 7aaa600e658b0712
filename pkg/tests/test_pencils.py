"""Skew pencils: Pfaffians, elementary divisors, minimal indices,
decomposability, and their invariance properties."""

import itertools
import random
from fractions import Fraction as F

import pytest
import sympy as sp

from subrig.errors import BadBasis, OddDimension
from subrig.pencils import (
    SkewPencil,
    binary_form_to_expr,
    common_kernel,
    decomposability,
    elementary_divisors,
    first_minimal_index,
    pencil_det,
    pfaffian,
)
from subrig.sparsepoly import SPoly

from conftest import random_skew

J = [[0, 1], [-1, 0]]
Z2 = [[0, 0], [0, 0]]


def blk(a, b, c, d):
    out = [[F(0)] * 4 for _ in range(4)]
    for i in range(2):
        for j in range(2):
            out[i][j] = F(a[i][j])
            out[i][j + 2] = F(b[i][j])
            out[i + 2][j] = F(c[i][j])
            out[i + 2][j + 2] = F(d[i][j])
    return out


A_J0 = blk(J, Z2, Z2, Z2)
B_0J = blk(Z2, Z2, Z2, J)
A_JJ = blk(J, Z2, Z2, J)
B_X = [[0, 0, 1, 0], [0, 0, 0, -1], [-1, 0, 0, 0], [0, 1, 0, 0]]


def pf4_oracle(M):
    # 4x4 Pfaffian closed formula: a12 a34 - a13 a24 + a14 a23
    return M[0][1] * M[2][3] - M[0][2] * M[1][3] + M[0][3] * M[1][2]


def test_pfaffian_block_pencil_oracle():
    p = SkewPencil(A_J0, B_0J)
    lam, mu = sp.symbols("lam mu")
    M = [[lam * A_J0[i][j] + mu * B_0J[i][j] for j in range(4)] for i in range(4)]
    assert sp.expand(pf4_oracle(M) - lam * mu) == 0
    assert binary_form_to_expr(pfaffian(p)) == "lam*mu"


def test_pfaffian_definite_oracle():
    p = SkewPencil(A_JJ, B_X)
    lam, mu = sp.symbols("lam mu")
    M = [[lam * A_JJ[i][j] + mu * B_X[i][j] for j in range(4)] for i in range(4)]
    assert sp.expand(pf4_oracle(M) - (lam ** 2 + mu ** 2)) == 0
    assert binary_form_to_expr(pfaffian(p)) == "lam^2 + mu^2"


def test_pfaffian_proportional():
    p = SkewPencil(A_JJ, A_JJ)
    assert binary_form_to_expr(pfaffian(p)) == "lam^2 + 2*lam*mu + mu^2"


def test_pfaffian_odd_dimension():
    Z5 = [[F(0)] * 5 for _ in range(5)]
    with pytest.raises(OddDimension):
        pfaffian(SkewPencil(Z5, Z5))


def test_pfaffian_squared_is_det_random():
    rng = random.Random(2024)
    for _ in range(50):
        m = rng.choice([2, 4, 6, 8])
        p = SkewPencil(random_skew(rng, m), random_skew(rng, m))
        pf = pfaffian(p)
        assert (pf * pf - pencil_det(p)).is_zero()


def test_elementary_divisors_block():
    inv = elementary_divisors(SkewPencil(A_J0, B_0J))
    got = sorted((binary_form_to_expr(g), e) for g, e in inv.elementary_divisors)
    assert got == [("lam", 1), ("lam", 1), ("mu", 1), ("mu", 1)]
    assert inv.regular and inv.first_minimal_index is None


def test_elementary_divisors_diagonal_blocks_oracle():
    # oracle: factor the determinant of the block pencil with sympy
    B3 = blk([[0, 2], [-2, 0]], Z2, Z2, [[0, 3], [-3, 0]])
    lam, mu = sp.symbols("lam mu")
    M = sp.Matrix([[lam * A_JJ[i][j] + mu * B3[i][j] for j in range(4)] for i in range(4)])
    det = sp.factor(M.det())
    assert det == (lam + 2 * mu) ** 2 * (lam + 3 * mu) ** 2
    inv = elementary_divisors(SkewPencil(A_JJ, B3))
    got = sorted((binary_form_to_expr(g), e) for g, e in inv.elementary_divisors)
    assert got == [("lam + 2*mu", 1), ("lam + 2*mu", 1),
                   ("lam + 3*mu", 1), ("lam + 3*mu", 1)]


def test_elementary_divisors_zero_pencil():
    Z4 = [[F(0)] * 4 for _ in range(4)]
    inv = elementary_divisors(SkewPencil(Z4, Z4))
    assert inv.elementary_divisors == [] and inv.minor_gcds == []
    assert not inv.regular and inv.first_minimal_index == 0


def test_first_minimal_index_common_kernel():
    # both forms kill e5: constant branch of degree 0
    A = [[F(0)] * 5 for _ in range(5)]
    B = [[F(0)] * 5 for _ in range(5)]
    A[0][1], A[1][0] = F(1), F(-1)
    B[2][3], B[3][2] = F(1), F(-1)
    assert first_minimal_index(SkewPencil(A, B)) == 0


def test_first_minimal_index_generic_dim5():
    rng = random.Random(99)
    for _ in range(20):
        p = SkewPencil(random_skew(rng, 5), random_skew(rng, 5))
        assert first_minimal_index(p) == 2


def test_first_minimal_index_regular():
    B2 = blk(Z2, Z2, Z2, [[0, 2], [-2, 0]])
    B_reg = blk(J, Z2, Z2, [[0, 2], [-2, 0]])
    p = SkewPencil(A_JJ, B_reg)
    assert not pencil_det(p).is_zero()
    assert first_minimal_index(p) is None


def test_first_minimal_index_congruence_invariant():
    rng = random.Random(31)
    for _ in range(6):
        m = 5
        p = SkewPencil(random_skew(rng, m), random_skew(rng, m))
        base = first_minimal_index(p)
        G = [[F(rng.randint(-4, 4)) for _ in range(m)] for _ in range(m)]
        from subrig.linalg import fraction_rank

        if fraction_rank(G) < m:
            continue
        A2 = [[sum(G[a][i] * p.A[a][b] * G[b][j] for a in range(m) for b in range(m))
               for j in range(m)] for i in range(m)]
        B2 = [[sum(G[a][i] * p.B[a][b] * G[b][j] for a in range(m) for b in range(m))
               for j in range(m)] for i in range(m)]
        assert first_minimal_index(SkewPencil(A2, B2)) == base


def test_common_kernel_examples():
    K = common_kernel([A_J0])
    assert len(K) == 2
    assert common_kernel([A_J0, B_0J]) == []
    rng = random.Random(12)
    forms = [random_skew(rng, 5) for _ in range(3)]
    assert common_kernel(forms) == []


def test_divisor_pairing_random():
    rng = random.Random(500)
    for _ in range(10):
        m = rng.choice([2, 4])
        inv = elementary_divisors(SkewPencil(random_skew(rng, m), random_skew(rng, m)))
        counts = {}
        for g, e in inv.elementary_divisors:
            key = (binary_form_to_expr(g), e)
            counts[key] = counts.get(key, 0) + 1
        assert all(v % 2 == 0 for v in counts.values())


def test_decomposability_lam_mu():
    v = decomposability([A_J0, B_0J])
    assert v.status == "decomposable"
    assert v.splitting[0] == [[F(0), F(0), F(1), F(0)], [F(0), F(0), F(0), F(1)]]
    assert v.splitting[1] == [[F(1), F(0), F(0), F(0)], [F(0), F(1), F(0), F(0)]]


def test_decomposability_definite():
    v = decomposability([A_JJ, B_X])
    assert v.status == "indecomposable"
    assert v.certificate["kind"] == "definite_pfaffian"


def test_decomposability_corank1():
    C = [[F(0)] * 5 for _ in range(5)]
    C[0][1], C[1][0] = F(1), F(-1)
    v = decomposability([C])
    assert v.status == "decomposable"
    # nondegenerate single form on even dimension
    v2 = decomposability([A_JJ])
    assert v2.status == "indecomposable"


def test_decomposability_corank2_odd():
    rng = random.Random(321)
    v = decomposability([random_skew(rng, 5), random_skew(rng, 5)])
    assert v.status == "indecomposable"
    assert v.certificate["kind"] == "odd_no_common_kernel"


def test_decomposability_corank3_odd_scan():
    rng = random.Random(77)
    forms = [random_skew(rng, 5) for _ in range(3)]
    v = decomposability(forms, plane_budget=8, rng=random.Random(1))
    assert v.status == "indecomposable"
    assert v.certificate["kind"] == "plane_fmi_maximal"


def test_decomposability_splitting_block_diagonalizes():
    # every decomposable verdict ships a splitting that block-diagonalizes
    cases = [[A_J0, B_0J]]
    C = [[F(0)] * 5 for _ in range(5)]
    C[0][1], C[1][0] = F(1), F(-1)
    cases.append([C])
    for forms in cases:
        v = decomposability(forms)
        assert v.status == "decomposable"
        U, W = v.splitting
        for F_ in forms:
            for u in U:
                for w in W:
                    s = sum(u[i] * F_[i][j] * w[j]
                            for i in range(len(u)) for j in range(len(w)))
                    assert s == 0


def test_decomposability_bad_basis():
    with pytest.raises(BadBasis):
        decomposability([A_J0, A_J0])
    with pytest.raises(BadBasis):
        decomposability([])
