"""Tanaka symbols and the highest-weight layer comparison.

A perturbed realization of the Heisenberg distribution,
{d1, d2 + x1 d3 + x1^2 x2 d3}, has rational-function structure
coefficients, but its symbol at the origin is the plain Heisenberg algebra:
the perturbation sits strictly below the top weighted degree.  The layer
comparison makes that quantitative — the highest graded part of every entry
of the fundamental system coincides with the entry computed on the symbol.
"""

from subrig import frame_from_fields, hat_layer_check, nilpotent_approximation
from subrig.exprfmt import coeff_to_expr
from subrig.scalars import ScalarField

fld = ScalarField(("x1", "x2", "x3"))
zero, one = fld.zero, fld.one
x1, x2 = fld.var(0), fld.var(1)

X1 = [one, zero, zero]
X2 = [zero, one, x1 + x1 * x1 * x2]

fd = frame_from_fields([X1, X2], [one, one], [0, 0, 0], fld)
print("weights:", fd.weights)
print("structure coefficients of the completed frame:")
for (i, j, k), c in sorted(fd.structure.items()):
    if i < j:
        print(f"  c^{k + 1}_{i + 1}{j + 1} = {coeff_to_expr(c)}")

symbol = nilpotent_approximation(fd)
print("symbol grading:", symbol.grading)
print("symbol constants:", {k: str(v) for k, v in symbol.structure.items() if k[0] < k[1]})

for s in (1, 2, 3):
    print(f"highest-weight layer comparison, s = {s}:", hat_layer_check(fd, symbol, s))
