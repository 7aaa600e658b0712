"""Rigidity certificate on the Heisenberg group.

Take the Heisenberg algebra ([X1, X2] = X3, a contact rank-2 distribution)
and ask whether the left-invariant metric with orthonormal frame X1, X2 can
share its geodesics with the one whose transition eigenvalues are (1, 4).
The answer is no, and the certificate is a three-line polynomial
computation: the lift of P = u1^2 + 4 u2^2 along the flow is 6 u1 u2 u3,
which P does not divide — and orbital equivalence would force that
divisibility in both directions.
"""

from fractions import Fraction as F

from subrig import CarnotAlgebra, analyze_pair, build_P_and_Q, carnot_product_structure
from subrig.exprfmt import fpoly_to_expr
from subrig.nilpotent import carnot_to_frame

heis = CarnotAlgebra(grading=(2, 3), structure={(0, 1, 2): F(1)})
fd = carnot_to_frame(heis, [F(1), F(4)])

div = build_P_and_Q(fd)
print("P          =", fpoly_to_expr(div.P, 3))
print("vech(P)    =", fpoly_to_expr(div.vech_P, 3))
print("divisible  =", div.holds)

report = analyze_pair(fd)
print("verdict    =", report.verdict)

# The same obstruction at the algebra level: the eigenvalue blocks {1} and
# {2} would have to commute, but [X1, X2] = X3 != 0.
obstruction = carnot_product_structure(heis, [F(1), F(4)])
print("product    =", obstruction.kind, obstruction.indices, "-", obstruction.describe())

# Contrast: proportional eigenvalues are always fine (conformal pair).
print("conformal  =", analyze_pair(carnot_to_frame(heis, [F(4), F(4)])).verdict)
