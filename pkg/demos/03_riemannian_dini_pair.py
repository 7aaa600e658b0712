"""The classical two-dimensional Riemannian pair, exactly.

Factors of dimension one with beta_1 = 1 + x1 and beta_2 = 3 produce the
Dini-type twisted pair.  The adapted frame needs the square root of
gamma = (2 - x1)/(3 (1 + x1)), so the computation runs in a quadratic
radical extension of the rational functions — still with exact zero tests.

Everything the theory promises is checked identically: two-sided
divisibility with the exact logarithmic-derivative factor Q, and the
quadratic first integral of the flow.
"""

from subrig import (
    LCFactor,
    LeviCivitaSpec,
    analyze_pair,
    build_P_and_Q,
    first_integral,
    lc_build,
    lc_verify,
    swap_pair,
)
from subrig.exprfmt import fpoly_to_expr, poly_to_expr

spec = LeviCivitaSpec(factors=[LCFactor(1, None, "1+x1"),
                               LCFactor(1, None, "3")])
pair = lc_build(spec)
fd = pair.fd

print("declared radicals:", [(r.name, poly_to_expr(r.square_poly, fd.field._names))
                             for r in fd.field.radicals])
print("alpha_1^2 =", fd.alpha_sq[0].to_expr())
print("alpha_2^2 =", fd.alpha_sq[1].to_expr())
print("c^2_12    =", fd.structure[(0, 1, 1)].to_expr())

div_fwd = build_P_and_Q(fd)
div_bwd = build_P_and_Q(swap_pair(fd))
print("divisibility (g1,g2):", div_fwd.holds, "- quotient equals Q:", div_fwd.lemma_ok)
print("divisibility (g2,g1):", div_bwd.holds, "- quotient equals Q:", div_bwd.lemma_ok)
print("Q =", fpoly_to_expr(div_fwd.Q, fd.n))

fi = first_integral(fd, div_fwd)
print("first integral exists:", fi.exists, "| nontrivial:", fi.nontrivial, "| N =", fi.N)

print("simplified equations verified:", lc_verify(pair).all_zero)
print("verdict:", analyze_pair(fd).verdict)
