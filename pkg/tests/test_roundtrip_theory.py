"""Theory round trips at desk scale.

Random direct sums of graded algebras with block-constant eigenvalues must
analyze positively with the block witness and decompose with the same
blocks; rank-2 data with distinct eigenvalues must always analyze
negatively; the eigenvalue-derivative consequence identities must hold on a
pair with genuinely varying eigenvalues.
"""

import random
from fractions import Fraction as F

from subrig.fiber import FRat
from subrig.fundamental import (
    analyze_pair,
    build_layers,
    divisibility_consequence_checks,
    solve_system,
)
from subrig.levicivita import LCFactor, LeviCivitaSpec, lc_build
from subrig.nilpotent import (
    CarnotAlgebra,
    Obstruction,
    ProductDecomposition,
    carnot_product_structure,
    carnot_to_frame,
    validate_carnot,
)
from subrig.sparsepoly import SPoly

from conftest import engel_carnot, free_rank2_step3_carnot, random_step2_carnot


def direct_sum(g1: CarnotAlgebra, g2: CarnotAlgebra) -> CarnotAlgebra:
    """Direct sum with the adapted index layout (horizontals first)."""
    step = max(g1.step, g2.step)
    def dims(g, s):
        return (g.grading[min(s, g.step) - 1]) if s >= 1 else 0
    # index maps per layer
    idx1, idx2 = {}, {}
    pos = 0
    for s in range(1, step + 1):
        lo1, hi1 = dims(g1, s - 1), dims(g1, s)
        lo2, hi2 = dims(g2, s - 1), dims(g2, s)
        for a in range(lo1, hi1):
            idx1[a] = pos
            pos += 1
        for a in range(lo2, hi2):
            idx2[a] = pos
            pos += 1
    structure = {}
    for (i, j, k), c in g1.structure.items():
        structure[(idx1[i], idx1[j], idx1[k])] = c
    for (i, j, k), c in g2.structure.items():
        structure[(idx2[i], idx2[j], idx2[k])] = c
    grading = tuple(dims(g1, s) + dims(g2, s) for s in range(1, step + 1))
    g = CarnotAlgebra(grading=grading, structure=structure)
    validate_carnot(g)
    return g


def test_direct_sum_roundtrip_random():
    rng = random.Random(314)
    done = 0
    while done < 8:
        pick = [random_step2_carnot(rng), engel_carnot(),
                free_rank2_step3_carnot()]
        g1 = pick[rng.randrange(3)]
        g2 = pick[rng.randrange(3)]
        if g1.n + g2.n > 9:
            continue
        done += 1
        g = direct_sum(g1, g2)
        a1 = F(rng.randint(1, 6))
        a2 = a1 + F(rng.randint(1, 5))
        alpha = [a1] * g1.m + [a2] * g2.m
        dec = carnot_product_structure(g, alpha)
        assert isinstance(dec, ProductDecomposition) and not dec.trivial
        assert [len(b) for b in dec.blocks] == [g1.n, g2.n]
        fd = carnot_to_frame(g, alpha)
        rep = analyze_pair(fd)
        assert rep.verdict == "orbital_diffeo_found", (g.grading, alpha)
        assert rep.affine is True
        # block witness alpha*Phi_k = alpha_block^2 u_k
        sys = build_layers(fd, 2)
        sol = solve_system(sys)
        depth = 2
        while sol.status == "rank_deficient" and depth < 5:
            depth += 1
            sys.extend(depth)
            sol = solve_system(sys)
        assert sol.status == "solved"
        block_of = {i: 0 for b in [dec.blocks[0]] for i in b}
        for i in dec.blocks[1]:
            block_of[i] = 1
        for k in range(g.m, g.n):
            expected = FRat.of(SPoly.from_terms(
                [(tuple([0] * k + [1]), dec.alpha_sq[block_of[k]])]))
            assert sol.alpha_phi[k - g.m] == expected


def test_rank2_always_negative_for_distinct_eigenvalues():
    # bracket-generating rank-2 symbols: Heisenberg, Engel, free step-3
    cases = [CarnotAlgebra(grading=(2, 3), structure={(0, 1, 2): F(1)}),
             engel_carnot(), free_rank2_step3_carnot()]
    rng = random.Random(2718)
    for g in cases:
        for _ in range(3):
            a1 = F(rng.randint(1, 9))
            a2 = a1 + F(rng.randint(1, 9))
            rep = analyze_pair(carnot_to_frame(g, [a1, a2]))
            assert rep.verdict.startswith("divisibility_failed") \
                or rep.verdict.startswith("inconsistent_at_layer")


def test_consequence_identities_with_varying_eigenvalues():
    # Dini pair: the identities involve genuine radical derivatives
    spec = LeviCivitaSpec(factors=[LCFactor(1, None, "1+x1"),
                                   LCFactor(1, None, "3")])
    pair = lc_build(spec)
    out = divisibility_consequence_checks(pair.fd)
    assert out["ok"], out["violations"]
    # mixed pair with a Carnot factor
    heis = CarnotAlgebra(grading=(2, 3), structure={(0, 1, 2): F(1)})
    spec2 = LeviCivitaSpec(factors=[LCFactor(1, None, "1+x1"),
                                    LCFactor(3, heis, 4)])
    pair2 = lc_build(spec2)
    out2 = divisibility_consequence_checks(pair2.fd)
    assert out2["ok"], out2["violations"]
