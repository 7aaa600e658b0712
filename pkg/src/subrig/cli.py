"""Command-line front end.

Subcommands: analyze | nilpotentize | carnot-decompose | lc-build |
lc-verify | pencil | validate.  Reports are JSON by default (byte-stable
for identical inputs and --seed); --text renders the same JSON as indented
key/value lines, never computed separately.

Exit codes: 0 completed analysis (negative verdicts included), 2 input
errors, 3 undetermined/inconclusive outcomes.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction

from .documents import (
    SCHEMA,
    carnot_to_doc,
    detect_kind,
    dump_json,
    frame_to_doc,
    load_carnot,
    load_frame,
    load_lc_spec,
    load_pencil_forms,
    parse_rational,
)
from .errors import IrrationalValue, SubrigError
from .exprfmt import fpoly_to_expr, fraction_to_str
from .fundamental import analyze_pair
from .levicivita import lc_build, lc_verify
from .nilpotent import (
    Obstruction,
    ProductDecomposition,
    carnot_product_structure,
    nilpotent_approximation,
)
from .pencils import (
    SkewPencil,
    binary_form_to_expr,
    decomposability,
    elementary_divisors,
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_UNDETERMINED = 3


def _read_doc(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise SubrigError(f"no such file: {path}")
    except json.JSONDecodeError as e:
        raise SubrigError(f"invalid JSON in {path}: {e}")


def _render_text(obj, indent: int = 0) -> str:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k in sorted(obj):
            v = obj[k]
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.append(_render_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_scalar_text(v)}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}-")
                lines.append(_render_text(v, indent + 1))
            else:
                lines.append(f"{pad}- {_scalar_text(v)}")
    else:
        lines.append(f"{pad}{_scalar_text(obj)}")
    return "\n".join(lines)


def _scalar_text(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (dict, list)):
        return "{}" if isinstance(v, dict) else "[]"
    return str(v)


def _emit(report: dict, args) -> None:
    if args.text:
        sys.stdout.write(_render_text(report) + "\n")
    else:
        sys.stdout.write(dump_json(report))


def _u_point(arg):
    if arg is None:
        return None
    return [parse_rational(x) for x in arg.split(",")]


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_validate(args) -> int:
    doc = _read_doc(args.input)
    kind = detect_kind(doc)
    if kind == "frame":
        load_frame(doc)
    elif kind == "carnot":
        load_carnot(doc)
    elif kind == "lc":
        spec = load_lc_spec(doc)
        lc_build(spec)
    else:
        forms = load_pencil_forms(doc)
        SkewPencil(forms[0], forms[0])
    _emit({"schema": SCHEMA, "command": "validate", "input": args.input,
           "kind": kind, "valid": True}, args)
    return EXIT_OK


def cmd_analyze(args) -> int:
    if args.max_layers is not None and args.max_layers < 1:
        raise SubrigError("--max-layers must be at least 1")
    fd = load_frame(_read_doc(args.input))
    rng = random.Random(args.seed)
    rep = analyze_pair(fd, S_max=args.max_layers,
                       conformal_shortcut=not args.full_pipeline,
                       rng=rng, u_point=_u_point(args.point))
    out = rep.to_json_dict()
    out.update({"command": "analyze", "input": args.input, "seed": args.seed})
    _emit(out, args)
    return EXIT_UNDETERMINED if rep.verdict.startswith("undetermined") else EXIT_OK


def cmd_nilpotentize(args) -> int:
    fd = load_frame(_read_doc(args.input))
    try:
        g = nilpotent_approximation(fd)
    except IrrationalValue as e:
        if args.numeric_fallback is None:
            raise
        structure = {}
        for (i, j, k), c in fd.structure.items():
            if fd.weights[i] + fd.weights[j] != fd.weights[k]:
                continue
            v = c if isinstance(c, Fraction) else c.eval(fd.base_point, numeric=True)
            if v:
                structure[(i, j, k)] = float(v)
        out = {"schema": SCHEMA, "command": "nilpotentize", "input": args.input,
               "approximate": True, "tolerance": args.numeric_fallback,
               "grading": None,
               "structure": [{"i": i + 1, "j": j + 1, "k": k + 1, "c": c}
                             for (i, j, k), c in sorted(structure.items()) if i < j],
               "note": f"exact evaluation failed ({e}); floating values reported"}
        _emit(out, args)
        return EXIT_OK
    alpha0 = None
    try:
        alpha0 = [fd.eval_at_base(a) for a in fd.alpha_sq]
    except IrrationalValue:
        pass
    doc = carnot_to_doc(g, alpha0)
    doc.update({"command": "nilpotentize", "input": args.input, "approximate": False})
    _emit(doc, args)
    return EXIT_OK


def cmd_carnot_decompose(args) -> int:
    g, alpha = load_carnot(_read_doc(args.input))
    if args.alpha_sq is not None:
        alpha = [parse_rational(x) for x in args.alpha_sq.split(",")]
    if alpha is None:
        raise SubrigError("no eigenvalues: pass --alpha-sq or an 'alpha_sq' field")
    res = carnot_product_structure(g, alpha)
    out = {"schema": SCHEMA, "command": "carnot-decompose", "input": args.input}
    if isinstance(res, Obstruction):
        out.update({"verdict": "obstruction", "kind": res.kind,
                    "indices": list(res.indices), "witness": res.witness,
                    "detail": res.describe()})
        _emit(out, args)
        return EXIT_OK
    assert isinstance(res, ProductDecomposition)
    out.update({
        "verdict": "conformal" if res.trivial else "decomposed",
        "blocks": [[i + 1 for i in b] for b in res.blocks] if res.blocks else None,
        "eigen_partition": [[i + 1 for i in b] for b in res.eigen_partition],
        "alpha_sq": [fraction_to_str(a) for a in res.alpha_sq],
        "subalgebras": [carnot_to_doc(s) for s in res.subalgebras],
        "block_bases": [[[fraction_to_str(x) for x in v] for v in basis]
                        for basis in res.block_bases],
    })
    _emit(out, args)
    return EXIT_OK


def cmd_lc_build(args) -> int:
    spec = load_lc_spec(_read_doc(args.input))
    pair = lc_build(spec)
    doc = frame_to_doc(pair.fd)
    doc.update({"command": "lc-build", "input": args.input})
    _emit(doc, args)
    return EXIT_OK


def cmd_lc_verify(args) -> int:
    spec = load_lc_spec(_read_doc(args.input))
    pair = lc_build(spec)
    rep = lc_verify(pair)
    n = pair.fd.n

    def ser(lst):
        return [None if p is None else fpoly_to_expr(p, n) for p in lst]

    out = {"schema": SCHEMA, "command": "lc-verify", "input": args.input,
           "all_residuals_zero": rep.all_zero,
           "horizontal_residuals": ser(rep.horizontal_residuals),
           "vertical_residuals": ser(rep.vertical_residuals),
           "r_simplification_residuals": ser(rep.rj_residuals),
           "failing": [list(x) for x in rep.failing_indices()]}
    _emit(out, args)
    return EXIT_OK


def cmd_pencil(args) -> int:
    forms = load_pencil_forms(_read_doc(args.input))
    rng = random.Random(args.seed)
    out = {"schema": SCHEMA, "command": "pencil", "input": args.input,
           "seed": args.seed, "dim": len(forms[0]), "corank": len(forms)}
    if len(forms) == 2:
        inv = elementary_divisors(SkewPencil(forms[0], forms[1]))
        out["invariants"] = {
            "regular": inv.regular,
            "pfaffian": binary_form_to_expr(inv.pfaffian) if inv.pfaffian is not None else None,
            "elementary_divisors": [[binary_form_to_expr(g), e]
                                    for g, e in inv.elementary_divisors],
            "first_minimal_index": inv.first_minimal_index,
            "minor_gcds": [binary_form_to_expr(d) for d in inv.minor_gcds],
        }
    verdict = decomposability(forms, plane_budget=args.plane_budget, rng=rng)
    out["decomposability"] = {
        "status": verdict.status,
        "splitting": None if verdict.splitting is None else
            [[[fraction_to_str(x) for x in vec] for vec in part]
             for part in verdict.splitting],
        "certificate": verdict.certificate,
    }
    _emit(out, args)
    return EXIT_UNDETERMINED if verdict.status == "inconclusive" else EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="subrig",
        description="Exact decision toolkit for projective/affine equivalence "
                    "and rigidity of sub-Riemannian metric pairs.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, seeded=True):
        p.add_argument("input", help="input JSON document")
        p.add_argument("--json", dest="text", action="store_false", default=False,
                       help="JSON report (default)")
        p.add_argument("--text", dest="text", action="store_true",
                       help="plain-text rendering of the JSON report")
        if seeded:
            p.add_argument("--seed", type=int, default=0,
                           help="seed for randomized rank/plane scans (default 0)")

    p = sub.add_parser("analyze", help="decide orbital equivalence of a frame pair")
    common(p)
    p.add_argument("--max-layers", type=int, default=None,
                   help="hard cap on fundamental-system layers (default 2n)")
    p.add_argument("--point", default=None,
                   help="comma-separated u-point for Jacobi/ampleness diagnostics")
    p.add_argument("--full-pipeline", action="store_true",
                   help="run the layered solver even for conformal pairs (N = 1)")
    p.add_argument("--numeric-fallback", type=float, default=None,
                   help="accepted for interface parity; analyze is always exact")
    p.set_defaults(fn=cmd_analyze)

    p = sub.add_parser("nilpotentize", help="nilpotent approximation of a frame")
    common(p, seeded=False)
    p.add_argument("--numeric-fallback", type=float, default=None,
                   help="emit floating structure constants when exact base-point "
                        "values are irrational")
    p.set_defaults(fn=cmd_nilpotentize)

    p = sub.add_parser("carnot-decompose", help="product structure of a Carnot algebra")
    common(p, seeded=False)
    p.add_argument("--alpha-sq", default=None,
                   help="comma-separated transition eigenvalues (overrides the document)")
    p.set_defaults(fn=cmd_carnot_decompose)

    p = sub.add_parser("lc-build", help="build the adapted frame of a Levi-Civita pair")
    common(p, seeded=False)
    p.set_defaults(fn=cmd_lc_build)

    p = sub.add_parser("lc-verify", help="verify the simplified equivalence equations")
    common(p, seeded=False)
    p.set_defaults(fn=cmd_lc_verify)

    p = sub.add_parser("pencil", help="skew-pencil invariants and decomposability")
    common(p)
    p.add_argument("--plane-budget", type=int, default=32,
                   help="random planes scanned for corank >= 3 (default 32)")
    p.set_defaults(fn=cmd_pencil)

    p = sub.add_parser("validate", help="validate an input document")
    common(p, seeded=False)
    p.set_defaults(fn=cmd_validate)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except SubrigError as e:
        sys.stderr.write(f"error [{e.code}]: {e}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
