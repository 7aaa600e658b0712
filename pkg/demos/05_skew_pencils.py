"""Skew pencils: when does a step-2 symbol space split?

A plane of skew forms is the Levi image of a step-2 graded algebra of
corank 2.  Its splitting behavior is controlled by classical pencil
invariants: the Pfaffian binary form, elementary divisors, and the first
minimal index.  Two four-dimensional examples show both outcomes, and a
generic five-dimensional sample shows the maximal minimal index.
"""

import random
from fractions import Fraction as F

from subrig import SkewPencil, decomposability, elementary_divisors, first_minimal_index, pfaffian
from subrig.pencils import binary_form_to_expr

J = [[0, 1], [-1, 0]]


def blk4(tl, br):
    out = [[F(0)] * 4 for _ in range(4)]
    for i in range(2):
        for j in range(2):
            out[i][j] = F(tl[i][j])
            out[i + 2][j + 2] = F(br[i][j])
    return out


Z = [[0, 0], [0, 0]]
A = blk4(J, Z)
B = blk4(Z, J)
print("pencil 1: A = J (+) 0,  B = 0 (+) J")
print("  Pfaffian:", binary_form_to_expr(pfaffian(SkewPencil(A, B))))
v = decomposability([A, B])
print("  verdict:", v.status)
print("  splitting:", [[list(map(str, vec)) for vec in part] for part in v.splitting])

A2 = blk4(J, J)
B2 = [[0, 0, 1, 0], [0, 0, 0, -1], [-1, 0, 0, 0], [0, 1, 0, 0]]
print("pencil 2: definite Pfaffian")
print("  Pfaffian:", binary_form_to_expr(pfaffian(SkewPencil(A2, B2))))
v2 = decomposability([A2, B2])
print("  verdict:", v2.status, "-", v2.certificate)

inv = elementary_divisors(SkewPencil(A, B))
print("elementary divisors of pencil 1:",
      [(binary_form_to_expr(g), e) for g, e in inv.elementary_divisors])

rng = random.Random(0)


def random_skew5():
    M = [[F(0)] * 5 for _ in range(5)]
    for i in range(5):
        for j in range(i + 1, 5):
            M[i][j] = F(rng.randint(-9, 9))
            M[j][i] = -M[i][j]
    return M


p5 = SkewPencil(random_skew5(), random_skew5())
print("generic dim-5 pencil: first minimal index =", first_minimal_index(p5))
v5 = decomposability([p5.A, p5.B])
print("  verdict:", v5.status, "-", v5.certificate.get("kind"))
