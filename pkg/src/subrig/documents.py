"""JSON document loading, validation, and emission.

All documents carry ``"schema": "subrig/1"``.  Four input kinds, detected by
their distinguishing keys:

frame    {"schema", "mode": "fields"|"abstract", "n", "m", "weights", "vars",
          "radicals": [{"name","square"}], "fields": [[expr,..],..],
          "structure": [{"i","j","k","c"}], "alpha_sq": [expr],
          "point": [rational,..], "derivations": [[expr,..],..]?}
carnot   {"schema", "grading": [m1,..,mr], "structure": [{"i","j","k","c"}],
          "alpha_sq"?: [rational,..]}
lc       {"schema", "factors": [{"n", "frame": carnot-doc|null, "beta": expr}]}
pencil   {"schema", "dim", "forms": [[[rational,..],..],..]}

Omitted structure entries are zero; the antisymmetric completion is applied.
Rationals serialize as "p/q" strings; expressions serialize in the input
grammar, so reports re-parse losslessly.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import List, Optional, Tuple

from .errors import SchemaError
from .exprfmt import coeff_to_expr, fraction_to_str, poly_to_expr
from .exprparse import parse_scalar
from .frames import FrameData, frame_from_fields, validate_frame_data
from .levicivita import LCFactor, LeviCivitaSpec
from .nilpotent import CarnotAlgebra, validate_carnot
from .scalars import ScalarField

SCHEMA = "subrig/1"

__all__ = [
    "SCHEMA",
    "parse_rational",
    "detect_kind",
    "load_frame",
    "load_carnot",
    "load_lc_spec",
    "load_pencil_forms",
    "frame_to_doc",
    "carnot_to_doc",
    "dump_json",
]


def parse_rational(v) -> Fraction:
    if isinstance(v, bool):
        raise SchemaError(f"expected a rational, got {v!r}")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        try:
            return Fraction(v.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise SchemaError(f"bad rational literal {v!r}: {e}")
    raise SchemaError(f"expected a rational (int or 'p/q'), got {v!r}")


def _require(doc: dict, key: str, kind: str):
    if key not in doc:
        raise SchemaError(f"{kind} document is missing '{key}'")
    return doc[key]


def _check_schema(doc: dict, kind: str) -> None:
    if not isinstance(doc, dict):
        raise SchemaError(f"{kind} document must be a JSON object")
    if doc.get("schema") != SCHEMA:
        raise SchemaError(f"{kind} document must declare \"schema\": \"{SCHEMA}\"")


def detect_kind(doc: dict) -> str:
    if not isinstance(doc, dict):
        raise SchemaError("document must be a JSON object")
    if "mode" in doc:
        return "frame"
    if "factors" in doc:
        return "lc"
    if "grading" in doc:
        return "carnot"
    if "forms" in doc:
        return "pencil"
    raise SchemaError("cannot determine the document kind "
                      "(expected one of: frame, carnot, lc, pencil)")


# ---------------------------------------------------------------------------
# frame documents
# ---------------------------------------------------------------------------


def _build_field(doc: dict, point) -> ScalarField:
    vars_ = doc.get("vars", [])
    if not isinstance(vars_, list) or not all(isinstance(v, str) for v in vars_):
        raise SchemaError("'vars' must be a list of identifier strings")
    fld = ScalarField(tuple(vars_))
    for rad in doc.get("radicals", []):
        name = _require(rad, "name", "radical")
        square_src = _require(rad, "square", "radical")
        square = parse_scalar(square_src, fld)
        fld.declare_radical(name, square, base_point=point)
    return fld


def load_frame(doc: dict) -> FrameData:
    _check_schema(doc, "frame")
    mode = _require(doc, "mode", "frame")
    n = int(_require(doc, "n", "frame"))
    m = int(_require(doc, "m", "frame"))
    if not 1 <= m <= n:
        raise SchemaError("need 1 <= m <= n")
    vars_ = doc.get("vars", [])
    point = [parse_rational(v) for v in doc.get("point", [0] * len(vars_))]
    if len(point) != len(vars_):
        raise SchemaError("'point' length must match 'vars'")
    fld = _build_field(doc, point)
    alpha_src = _require(doc, "alpha_sq", "frame")
    if len(alpha_src) != m:
        raise SchemaError("'alpha_sq' must have m entries")
    alpha_sq = [parse_scalar(src, fld) for src in alpha_src]
    if mode == "fields":
        rows = _require(doc, "fields", "frame")
        if len(rows) not in (m, n):
            raise SchemaError("'fields' must list the m horizontal fields or all n")
        if any(len(r) != n for r in rows):
            raise SchemaError("each field needs n coordinate expressions")
        if len(vars_) != n:
            raise SchemaError("fields mode needs n coordinate variables in 'vars'")
        fields = [[parse_scalar(src, fld) for src in row] for row in rows]
        fd = frame_from_fields(fields, alpha_sq, point, fld)
        return fd
    if mode != "abstract":
        raise SchemaError("'mode' must be 'fields' or 'abstract'")
    weights = _require(doc, "weights", "frame")
    if len(weights) != n:
        raise SchemaError("'weights' must have n entries")
    structure = {}
    for ent in doc.get("structure", []):
        i, j, k = int(ent["i"]), int(ent["j"]), int(ent["k"])
        if not (1 <= i <= n and 1 <= j <= n and 1 <= k <= n):
            raise SchemaError(f"structure indices out of range: {ent}")
        c = parse_scalar(ent["c"], fld)
        if not c.is_zero():
            structure[(i - 1, j - 1, k - 1)] = c
    derivations = None
    if "derivations" in doc and doc["derivations"] is not None:
        rows = doc["derivations"]
        if len(rows) != n or any(len(r) != len(vars_) for r in rows):
            raise SchemaError("'derivations' must be n rows over the declared vars")
        derivations = [[parse_scalar(src, fld) for src in row] for row in rows]
    fd = FrameData(
        n=n, m=m, weights=tuple(int(w) for w in weights),
        structure=structure, alpha_sq=alpha_sq,
        base_point=tuple(point), field=fld,
        derivations=derivations, has_fields=False)
    validate_frame_data(fd)
    return fd.try_constant_mode()


def frame_to_doc(fd: FrameData) -> dict:
    """Abstract-mode document for a FrameData (lossless round trip)."""
    if fd.field is None:
        vars_: Tuple[str, ...] = ()
        radicals = []
        names: List[str] = []
    else:
        vars_ = fd.field.variables
        names = fd.field._names
        radicals = [{"name": spec.name,
                     "square": poly_to_expr(spec.square_poly, names)}
                    for spec in fd.field.radicals]
    doc = {
        "schema": SCHEMA,
        "mode": "abstract",
        "n": fd.n,
        "m": fd.m,
        "weights": list(fd.weights),
        "vars": list(vars_),
        "radicals": radicals,
        "point": [fraction_to_str(p) for p in fd.base_point],
        "alpha_sq": [coeff_to_expr(a) for a in fd.alpha_sq],
        "structure": [
            {"i": i + 1, "j": j + 1, "k": k + 1, "c": coeff_to_expr(c)}
            for (i, j, k), c in sorted(fd.structure.items())
            if i < j
        ],
    }
    if fd.derivations is not None:
        doc["derivations"] = [[coeff_to_expr(c) for c in row] for row in fd.derivations]
    return doc


# ---------------------------------------------------------------------------
# carnot / lc / pencil documents
# ---------------------------------------------------------------------------


def load_carnot(doc: dict) -> Tuple[CarnotAlgebra, Optional[List[Fraction]]]:
    _check_schema(doc, "carnot")
    grading = _require(doc, "grading", "carnot")
    if not grading or any(int(g) <= 0 for g in grading):
        raise SchemaError("'grading' must list positive cumulative dimensions")
    n = int(grading[-1])
    structure = {}
    for ent in doc.get("structure", []):
        i, j, k = int(ent["i"]), int(ent["j"]), int(ent["k"])
        if not (1 <= i <= n and 1 <= j <= n and 1 <= k <= n):
            raise SchemaError(f"structure indices out of range: {ent}")
        structure[(i - 1, j - 1, k - 1)] = parse_rational(ent["c"])
    g = CarnotAlgebra(grading=tuple(int(x) for x in grading), structure=structure)
    validate_carnot(g)
    alpha = None
    if "alpha_sq" in doc and doc["alpha_sq"] is not None:
        alpha = [parse_rational(a) for a in doc["alpha_sq"]]
        if len(alpha) != g.m:
            raise SchemaError("'alpha_sq' must have m_1 entries")
    return g, alpha


def carnot_to_doc(g: CarnotAlgebra, alpha_sq=None) -> dict:
    doc = {
        "schema": SCHEMA,
        "grading": list(g.grading),
        "structure": [
            {"i": i + 1, "j": j + 1, "k": k + 1, "c": fraction_to_str(c)}
            for (i, j, k), c in sorted(g.structure.items())
            if i < j
        ],
    }
    if alpha_sq is not None:
        doc["alpha_sq"] = [fraction_to_str(Fraction(a)) for a in alpha_sq]
    return doc


def load_lc_spec(doc: dict) -> LeviCivitaSpec:
    _check_schema(doc, "lc")
    factors = []
    for ent in _require(doc, "factors", "lc"):
        n = int(_require(ent, "n", "lc factor"))
        beta = _require(ent, "beta", "lc factor")
        frame = None
        if ent.get("frame") is not None:
            frame, _ = load_carnot(ent["frame"])
        factors.append(LCFactor(n=n, frame=frame, beta=beta))
    if not factors:
        raise SchemaError("'factors' must be nonempty")
    return LeviCivitaSpec(factors=factors)


def load_pencil_forms(doc: dict) -> List[List[List[Fraction]]]:
    _check_schema(doc, "pencil")
    dim = int(_require(doc, "dim", "pencil"))
    forms = _require(doc, "forms", "pencil")
    out = []
    for F_ in forms:
        if len(F_) != dim or any(len(row) != dim for row in F_):
            raise SchemaError("each form must be a dim x dim matrix")
        out.append([[parse_rational(c) for c in row] for row in F_])
    if not out:
        raise SchemaError("'forms' must be nonempty")
    return out


# ---------------------------------------------------------------------------
# deterministic serialization
# ---------------------------------------------------------------------------


def dump_json(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, separators=(",", ": ")) + "\n"
