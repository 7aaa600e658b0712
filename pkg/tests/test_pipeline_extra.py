"""Pipeline edges: deeper saturation, caps, rank-2 rigidity consistency,
CLI diagnostics and fallbacks."""

import json
from fractions import Fraction as F

from subrig.cli import main
from subrig.fundamental import analyze_pair
from subrig.nilpotent import carnot_to_frame

from conftest import engel_carnot, free_rank2_step3_carnot


def test_engel_saturates_at_layer_two():
    fd = carnot_to_frame(engel_carnot(), [F(1), F(1)])
    rep = analyze_pair(fd, conformal_shortcut=False)
    assert rep.verdict == "orbital_diffeo_found"
    assert rep.ranks[0] == 1 and rep.ranks[1] == 2
    assert rep.k0 == 3
    assert rep.alpha_phi == ["u3", "u4"]


def test_hard_cap_gives_undetermined():
    fd = carnot_to_frame(engel_carnot(), [F(1), F(1)])
    rep = analyze_pair(fd, S_max=1, conformal_shortcut=False)
    assert rep.verdict == "undetermined(S_max=1)"


def test_rank2_distribution_negative_verdict():
    # rank-2 bracket-generating distribution with distinct eigenvalues:
    # the negative verdict is consistent with affine rigidity of rank-2
    # distributions (the computational predicate, not the theorem)
    fd = carnot_to_frame(free_rank2_step3_carnot(), [F(1), F(4)])
    rep = analyze_pair(fd)
    assert rep.verdict == "divisibility_failed(g1g2)"


def test_cli_undetermined_exit_three(tmp_path, capsys):
    doc = {"schema": "subrig/1", "mode": "abstract", "n": 4, "m": 2,
           "weights": [1, 1, 2, 3], "vars": [],
           "alpha_sq": ["1", "1"],
           "structure": [{"i": 1, "j": 2, "k": 3, "c": "1"},
                         {"i": 1, "j": 3, "k": 4, "c": "1"}]}
    path = tmp_path / "engel.json"
    path.write_text(json.dumps(doc))
    code = main(["analyze", str(path), "--max-layers", "1", "--full-pipeline"])
    out = capsys.readouterr().out
    assert code == 3
    assert json.loads(out)["verdict"] == "undetermined(S_max=1)"


def test_cli_point_diagnostics(tmp_path, capsys):
    doc = {"schema": "subrig/1", "mode": "abstract", "n": 3, "m": 2,
           "weights": [1, 1, 2], "vars": [], "alpha_sq": ["1", "1"],
           "structure": [{"i": 1, "j": 2, "k": 3, "c": "1"}]}
    path = tmp_path / "heis.json"
    path.write_text(json.dumps(doc))
    code = main(["analyze", str(path), "--full-pipeline", "--point", "0,0,1"])
    out = capsys.readouterr().out
    assert code == 0
    rep = json.loads(out)
    diag = [d for d in rep["diagnostics"] if "u_point" in d]
    assert diag and diag[0]["jacobi_dim_at_point"] == 5
    assert diag[0]["ampleness_at_point"] is False


def test_cli_nilpotentize_numeric_fallback(tmp_path, capsys):
    doc = {"schema": "subrig/1", "mode": "abstract", "n": 3, "m": 2,
           "weights": [1, 1, 2], "vars": [],
           "radicals": [{"name": "r2", "square": "2"}],
           "alpha_sq": ["1", "1"],
           "structure": [{"i": 1, "j": 2, "k": 3, "c": "r2"}]}
    path = tmp_path / "rad.json"
    path.write_text(json.dumps(doc))
    assert main(["nilpotentize", str(path)]) == 2
    capsys.readouterr()
    code = main(["nilpotentize", str(path), "--numeric-fallback", "1e-9"])
    out = capsys.readouterr().out
    assert code == 0
    rep = json.loads(out)
    assert rep["approximate"] is True
    entry = rep["structure"][0]
    assert abs(entry["c"] - 2 ** 0.5) < 1e-12


def test_report_witness_reparses_and_reverifies(tmp_path, capsys):
    # alphaPhi expressions in a report feed back through the verifier
    doc = {"schema": "subrig/1", "mode": "abstract", "n": 6, "m": 4,
           "weights": [1, 1, 1, 1, 2, 2], "vars": [],
           "alpha_sq": ["2", "2", "4", "4"],
           "structure": [{"i": 1, "j": 2, "k": 5, "c": "2"},
                         {"i": 3, "j": 4, "k": 6, "c": "2"}]}
    path = tmp_path / "dh.json"
    path.write_text(json.dumps(doc))
    assert main(["analyze", str(path)]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["verdict"] == "orbital_diffeo_found"
    from subrig.documents import load_frame
    from subrig.exprparse import parse_fiber
    from subrig.fiber import FRat
    from subrig.fundamental import build_layers, verify_orbital_map
    from subrig.scalars import ScalarField

    fd = load_frame(doc)
    fld = ScalarField(())
    witness = []
    for src in rep["alphaPhi"]:
        p = parse_fiber(src, fld, fd.n)
        # constant-mode frame: coefficients drop to Fractions
        from subrig.sparsepoly import SPoly

        witness.append(FRat.of(SPoly({mo: c.as_fraction() for mo, c in p.terms.items()})))
    sys = build_layers(fd, 2)
    assert verify_orbital_map(fd, witness, sys).all_zero


def test_mixed_varying_factor_pair_full_analysis():
    # non-constant eigenvalues with verticals present: projectively but not
    # affinely equivalent; the witness is alpha_{l(k)}^2 u_k in the radical field
    from subrig.levicivita import LCFactor, LeviCivitaSpec, lc_build, lc_verify
    from subrig.nilpotent import CarnotAlgebra

    heis = CarnotAlgebra(grading=(2, 3), structure={(0, 1, 2): F(1)})
    spec = LeviCivitaSpec(factors=[LCFactor(1, None, "1+x1"),
                                   LCFactor(3, heis, 4)])
    pair = lc_build(spec)
    assert lc_verify(pair).all_zero
    rep = analyze_pair(pair.fd)
    assert rep.verdict == "orbital_diffeo_found"
    assert rep.alpha_phi == ["(16*x1 + 16)*u4"]
    assert rep.affine is False
    assert rep.first_integral == {"exists": True, "nontrivial": True, "N": 2}


def test_three_factor_pair_full_analysis_heavy():
    # heaviest regression: three factors, two varying, N = 3, radical field
    from subrig.levicivita import LCFactor, LeviCivitaSpec, lc_build
    from subrig.nilpotent import CarnotAlgebra

    heis = CarnotAlgebra(grading=(2, 3), structure={(0, 1, 2): F(1)})
    spec = LeviCivitaSpec(factors=[LCFactor(1, None, "1+x1"),
                                   LCFactor(1, None, "3+x2^2"),
                                   LCFactor(3, heis, 5)])
    pair = lc_build(spec)
    rep = analyze_pair(pair.fd)
    assert rep.verdict == "orbital_diffeo_found"
    assert rep.alpha_phi == ["(25*x1*x2^2 + 25*x2^2 + 75*x1 + 75)*u5"]
    assert rep.N == 3 and rep.first_integral["nontrivial"]
