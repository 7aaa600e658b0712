"""Frames adapted to a metric pair: brackets, growth vectors, structure
coefficients, rescaling, the pair swap, and transition-operator
diagonalization.

A :class:`FrameData` is the central input object of the package.  Two modes:

* constant mode (``field is None``): structure coefficients and transition
  eigenvalues are Fractions, derivative actions vanish — Carnot /
  left-invariant data;
* field mode: entries are :class:`~subrig.scalars.Scalar` values and each
  frame field acts on scalars through a derivation row (its coefficients in
  the coordinate directions).

Frames must already be adapted to the ordered pair (g1-orthonormal first m
fields diagonalizing the transition operator); this module checks validity
but does not construct adapted frames from raw metric pairs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .errors import (
    BadInput,
    DimensionMismatch,
    IrrationalSpectrum,
    IrrationalValue,
    JacobiViolation,
    NotBracketGenerating,
    NotPositiveDefinite,
    PoleAtPoint,
    SingularFrame,
    ZeroFactor,
)
from .linalg import bareiss_det, field_nullspace, field_solve, fraction_rank
from .scalars import ScalarField
from .sparsepoly import SPoly, frac_sqrt

__all__ = [
    "FrameData",
    "TransitionDiagonalization",
    "lie_bracket",
    "growth_vector",
    "complete_adapted_frame",
    "structure_coefficients",
    "frame_from_fields",
    "rescale_frame",
    "swap_pair",
    "diagonalize_transition",
    "validate_frame_data",
]

VectorField = List  # list of n coefficient scalars over coordinate directions


@dataclass
class FrameData:
    """Frame adapted to an ordered metric pair, given by structure data."""

    n: int
    m: int
    weights: Tuple[int, ...]
    structure: dict                     # (i, j, k) 0-based -> coeff, antisymmetric
    alpha_sq: list                      # m transition eigenvalues
    base_point: Tuple[Fraction, ...]
    field: Optional[ScalarField] = None
    derivations: Optional[list] = None  # n rows x nbase columns of coeffs
    has_fields: bool = False            # derivation rows are coordinate fields

    def __post_init__(self):
        complete = {}
        for (i, j, k), c in self.structure.items():
            if not c:
                continue
            if i == j:
                if c:
                    raise BadInput(f"c^{k}_{{{i}{j}}} must vanish for i = j")
                continue
            existing = complete.get((i, j, k))
            if existing is not None and not _eq(existing, c):
                raise BadInput(f"conflicting values for structure entry ({i},{j},{k})")
            complete[(i, j, k)] = c
            neg = -c
            existing = complete.get((j, i, k))
            if existing is not None and not _eq(existing, neg):
                raise BadInput(f"antisymmetry violated at ({i},{j},{k})")
            complete[(j, i, k)] = neg
        self.structure = complete

    # -- coefficient helpers -----------------------------------------------------

    @property
    def zero(self):
        return self.field.zero if self.field is not None else Fraction(0)

    @property
    def one(self):
        return self.field.one if self.field is not None else Fraction(1)

    def c(self, i: int, j: int, k: int):
        return self.structure.get((i, j, k), self.zero)

    def x_derive(self, i: int, value):
        """Derivative of a scalar along the i-th frame field."""
        if self.derivations is None or self.field is None:
            return self.zero
        row = self.derivations[i]
        out = self.field.zero
        for v, coeff in enumerate(row):
            if coeff:
                d = value.diff(v)
                if d:
                    out = out + coeff * d
        return out

    def is_constant_mode(self) -> bool:
        return self.field is None

    def eval_at_base(self, value) -> Fraction:
        if isinstance(value, (int, Fraction)):
            return Fraction(value)
        return value.eval(self.base_point)

    def to_field_mode(self) -> "FrameData":
        """Lift a constant-mode frame into a fresh (variable-free) scalar field."""
        if self.field is not None:
            return self
        fld = ScalarField(())
        conv = lambda c: fld.const(c)
        return FrameData(
            n=self.n,
            m=self.m,
            weights=self.weights,
            structure={key: conv(c) for key, c in self.structure.items()},
            alpha_sq=[conv(a) for a in self.alpha_sq],
            base_point=(),
            field=fld,
            derivations=None,
            has_fields=False,
        )

    def try_constant_mode(self) -> "FrameData":
        """Drop back to Fractions when every entry is rational (reports stay clean
        and the fiber arithmetic gets its fast path)."""
        if self.field is None:
            return self
        if self.derivations is not None:
            return self
        entries = list(self.structure.values()) + list(self.alpha_sq)
        if not all(e.is_rational() for e in entries):
            return self
        return FrameData(
            n=self.n,
            m=self.m,
            weights=self.weights,
            structure={key: c.as_fraction() for key, c in self.structure.items()},
            alpha_sq=[a.as_fraction() for a in self.alpha_sq],
            base_point=(),
            field=None,
            derivations=None,
            has_fields=False,
        )


def _eq(a, b) -> bool:
    return not (a - b) if not isinstance(a, (int, Fraction)) else a == b


# ---------------------------------------------------------------------------
# vector-field operations (field mode)
# ---------------------------------------------------------------------------


def lie_bracket(X: VectorField, Y: VectorField) -> VectorField:
    """[X, Y]^l = sum_j (X^j d_j Y^l - Y^j d_j X^l) with Scalar coefficients."""
    if len(X) != len(Y):
        raise DimensionMismatch("vector fields of different dimensions")
    n = len(X)
    out = []
    for l in range(n):
        acc = None
        for j in range(n):
            if X[j]:
                d = Y[l].diff(j)
                if d:
                    t = X[j] * d
                    acc = t if acc is None else acc + t
            if Y[j]:
                d = X[l].diff(j)
                if d:
                    t = Y[j] * d
                    acc = acc - t if acc is not None else -t
        out.append(acc if acc is not None else X[l].field.zero)
    return out


def _bracket_words(fields: List[VectorField], max_step: int):
    """Iterated brackets organized by depth: layer 1 = the given fields."""
    layers = [list(fields)]
    for _ in range(2, max_step + 1):
        new_layer = []
        for X in fields:
            for Y in layers[-1]:
                B = lie_bracket(X, Y)
                if any(B):
                    new_layer.append(B)
        layers.append(new_layer)
    return layers


def _values_at(fields_list: List[VectorField], point) -> List[List[Fraction]]:
    return [[c.eval(point) if not isinstance(c, (int, Fraction)) else Fraction(c)
             for c in X] for X in fields_list]


def growth_vector(fields: List[VectorField], point: Sequence[Fraction],
                  max_step: Optional[int] = None):
    """Dimensions of the weak derived flag at the point, plus the weights.

    Exact ranks over Q of the values of iterated brackets; raises
    NotBracketGenerating when the flag stalls below the ambient dimension.
    """
    n = len(fields[0])
    point = [Fraction(p) for p in point]
    if max_step is None:
        max_step = n
    dims = []
    layers = [list(fields)]
    pool = _values_at(fields, point)
    for step in range(1, max_step + 1):
        if step > 1:
            new_layer = []
            for X in fields:
                for Y in layers[-1]:
                    B = lie_bracket(X, Y)
                    if any(B):
                        new_layer.append(B)
            layers.append(new_layer)
            pool += _values_at(new_layer, point)
        # pointwise ranks may stall and grow again (Martinet-type points),
        # so only the max_step cap decides failure
        r = fraction_rank(pool)
        dims.append(r)
        if r == n:
            break
    else:
        raise NotBracketGenerating(
            f"flag reaches dimension {dims[-1]} < {n} within {max_step} steps")
    weights = []
    for i in range(1, n + 1):
        for s, ms in enumerate(dims, start=1):
            if i <= ms:
                weights.append(s)
                break
    return tuple(dims), tuple(weights)


def complete_adapted_frame(fields: List[VectorField], point: Sequence[Fraction],
                           max_step: Optional[int] = None):
    """Complete m horizontal fields into an adapted frame by adding brackets.

    Deterministic: bracket words are scanned by depth, then in generation
    order, keeping those whose value at the point extends the span.
    """
    n = len(fields[0])
    point = [Fraction(p) for p in point]
    if max_step is None:
        max_step = n
    if fraction_rank(_values_at(fields, point)) < len(fields):
        raise BadInput("horizontal fields are dependent at the base point")
    dims, weights = growth_vector(fields, point, max_step)
    layers = _bracket_words(fields, len(dims))
    frame = list(fields)
    vals = _values_at(fields, point)
    for layer in layers[1:]:
        for B in layer:
            if len(frame) == n:
                break
            v = _values_at([B], point)[0]
            if fraction_rank(vals + [v]) > len(vals):
                frame.append(B)
                vals.append(v)
    if len(frame) < n:
        raise NotBracketGenerating("could not complete the adapted frame")
    return frame, weights


def structure_coefficients(frame: List[VectorField], fld: ScalarField) -> dict:
    """Solve [X_i, X_j] = sum_k c^k_ij X_k exactly over the scalar field."""
    n = len(frame)
    if any(len(X) != n for X in frame):
        raise DimensionMismatch("frame must consist of n fields in n coordinates")
    M = [[frame[k][l] for k in range(n)] for l in range(n)]  # columns are fields
    structure = {}
    for i in range(n):
        for j in range(i + 1, n):
            B = lie_bracket(frame[i], frame[j])
            sol = field_solve(M, B)
            if sol is None:
                raise SingularFrame("frame matrix is singular as a scalar matrix")
            for k, c in enumerate(sol):
                if c:
                    structure[(i, j, k)] = c
    return structure


def frame_from_fields(fields: List[VectorField], alpha_sq, point, fld: ScalarField,
                      max_step: Optional[int] = None) -> FrameData:
    """Build FrameData from explicit coordinate fields (m horizontal fields,
    or a full adapted frame of n fields)."""
    n = len(fields[0])
    m = len(alpha_sq)
    if len(fields) == m and m < n:
        frame, weights = complete_adapted_frame(fields, point, max_step)
    elif len(fields) == n:
        frame = list(fields)
        _, weights = growth_vector(fields[:m], point, max_step)
        # the supplied completion must itself be adapted at the point
        vals = _values_at(frame, point)
        if fraction_rank(vals) < n:
            raise SingularFrame("supplied frame is degenerate at the base point")
    else:
        raise BadInput("supply either the m horizontal fields or all n frame fields")
    structure = structure_coefficients(frame, fld)
    fd = FrameData(
        n=n, m=m, weights=weights,
        structure=structure,
        alpha_sq=list(alpha_sq),
        base_point=tuple(Fraction(p) for p in point),
        field=fld,
        derivations=[list(X) for X in frame],
        has_fields=True,
    )
    validate_frame_data(fd)
    return fd


# ---------------------------------------------------------------------------
# rescale and swap
# ---------------------------------------------------------------------------


def rescale_frame(fd: FrameData, factors: list) -> FrameData:
    """Structure data of the frame {f_i X_i}.

    [fX, gY] = fg[X,Y] + f X(g) Y - g Y(f) X; derivative terms act through
    the frame's own derivations and vanish for abstract constant frames.
    """
    if len(factors) != fd.n:
        raise BadInput("need one factor per frame field")
    for f in factors:
        if not f:
            raise ZeroFactor("rescaling factor is identically zero")
        _assert_nonzero_at_base(fd, f)
    inv = [1 / f if not isinstance(f, (int, Fraction)) else Fraction(1) / Fraction(f)
           for f in factors]
    structure = {}
    for i in range(fd.n):
        for j in range(i + 1, fd.n):
            fifj = factors[i] * factors[j]
            for k in range(fd.n):
                c = fd.c(i, j, k)
                term = fifj * c * inv[k] if c else None
                if k == j:
                    d = fd.x_derive(i, factors[j])
                    if d:
                        extra = factors[i] * d * inv[j]
                        term = extra if term is None else term + extra
                if k == i:
                    d = fd.x_derive(j, factors[i])
                    if d:
                        extra = factors[j] * d * inv[i]
                        term = term - extra if term is not None else -extra
                if term:
                    structure[(i, j, k)] = term
    derivations = None
    if fd.derivations is not None:
        derivations = [[factors[i] * c for c in fd.derivations[i]] for i in range(fd.n)]
    return FrameData(
        n=fd.n, m=fd.m, weights=fd.weights,
        structure=structure,
        alpha_sq=list(fd.alpha_sq),
        base_point=fd.base_point,
        field=fd.field,
        derivations=derivations,
        has_fields=fd.has_fields,
    )


def _assert_nonzero_at_base(fd: FrameData, f):
    if isinstance(f, (int, Fraction)):
        if f == 0:
            raise ZeroFactor("zero rescaling factor")
        return
    try:
        if f.eval(fd.base_point) == 0:
            raise ZeroFactor("rescaling factor vanishes at the base point")
    except IrrationalValue:
        pass  # irrational values are nonzero
    except PoleAtPoint:
        raise ZeroFactor("rescaling factor has a pole at the base point")


def swap_pair(fd: FrameData) -> FrameData:
    """Frame adapted to the swapped pair (g2, g1): first m fields scaled by
    1/alpha_i, eigenvalues inverted.  Square roots are taken exactly,
    declaring quadratic radicals when needed."""
    work = fd.to_field_mode() if fd.field is None else fd
    fld = work.field
    factors = []
    for i in range(work.m):
        alpha = fld.sqrt_of(work.alpha_sq[i], name_hint=f"a{i + 1}",
                            base_point=work.base_point)
        factors.append(1 / alpha)
    factors += [fld.one] * (work.n - work.m)
    out = rescale_frame(work, factors)
    out.alpha_sq = [1 / a for a in work.alpha_sq]
    return out.try_constant_mode()


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------


def jacobi_residual(fd: FrameData, i: int, j: int, k: int, mp: int):
    """Coefficient of X_mp in the cyclic Jacobi sum for (X_i, X_j, X_k)."""
    acc = None
    for l in range(fd.n):
        for (a, b, c_idx) in ((j, k, i), (k, i, j), (i, j, k)):
            c1 = fd.c(a, b, l)
            if not c1:
                continue
            c2 = fd.c(c_idx, l, mp)
            if not c2:
                continue
            t = c1 * c2
            acc = t if acc is None else acc + t
    for (a, b, c_idx) in ((j, k, i), (k, i, j), (i, j, k)):
        cc = fd.c(a, b, mp)
        if cc and fd.derivations is not None:
            d = fd.x_derive(c_idx, cc)
            if d:
                acc = d if acc is None else acc + d
    return acc if acc is not None else fd.zero


def validate_frame_data(fd: FrameData, check_jacobi: bool = True) -> None:
    """Raise on violated FrameData invariants."""
    if len(fd.weights) != fd.n or len(fd.alpha_sq) != fd.m:
        raise BadInput("weights/alpha_sq lengths do not match n/m")
    if any(fd.weights[i] != 1 for i in range(fd.m)):
        raise BadInput("the first m weights must equal 1")
    if any(fd.weights[i] > fd.weights[i + 1] for i in range(fd.n - 1)):
        raise BadInput("weights must be nondecreasing")
    for i, a in enumerate(fd.alpha_sq):
        try:
            v = fd.eval_at_base(a)
        except IrrationalValue:
            v = a.eval(fd.base_point, numeric=True)
        if v <= 0:
            raise BadInput(f"alpha_sq[{i + 1}] is not positive at the base point")
    # adaptedness: horizontal brackets cannot climb more than one level
    for (i, j, k), c in fd.structure.items():
        if i < fd.m and j < fd.m and fd.weights[k] > 2 and c:
            raise BadInput(
                f"frame not adapted: c^{k + 1}_{{{i + 1}{j + 1}}} nonzero with weight "
                f"{fd.weights[k]} > 2")
    if check_jacobi and not fd.has_fields:
        # structure computed from genuine fields satisfies Jacobi automatically
        for i in range(fd.n):
            for j in range(i + 1, fd.n):
                for k in range(j + 1, fd.n):
                    for mp in range(fd.n):
                        r = jacobi_residual(fd, i, j, k, mp)
                        if r:
                            raise JacobiViolation(
                                f"Jacobi identity fails at (i,j,k,m)="
                                f"({i + 1},{j + 1},{k + 1},{mp + 1})")


# ---------------------------------------------------------------------------
# transition-operator diagonalization (constant metrics)
# ---------------------------------------------------------------------------


@dataclass
class TransitionDiagonalization:
    eigenvalues: list          # m entries, ascending, with multiplicity
    basis: list                # m x m change-of-basis matrix (columns eigenvectors)
    partition: List[List[int]]  # 0-based index blocks by distinct eigenvalue
    N: int
    approximate: bool = False
    field: Optional[ScalarField] = None


def _check_spd(G) -> None:
    m = len(G)
    for i in range(m):
        for j in range(m):
            if G[i][j] != G[j][i]:
                raise BadInput("metric matrix is not symmetric")
    for k in range(1, m + 1):
        minor = [[SPoly.const(G[i][j]) for j in range(k)] for i in range(k)]
        det = bareiss_det(minor).const_value()
        if det <= 0:
            raise NotPositiveDefinite(f"leading principal minor {k} is {det} <= 0")


def _char_poly(S) -> List[Fraction]:
    """Coefficients c_0..c_m of det(x I - S), via exact polynomial Bareiss."""
    m = len(S)
    x = SPoly.var(0)
    M = [[x - SPoly.const(S[i][j]) if i == j else SPoly.const(-S[i][j])
          for j in range(m)] for i in range(m)]
    det = bareiss_det(M)
    return [det.terms.get((k,) if k else (), Fraction(0)) for k in range(m + 1)]


def _rational_roots(coeffs: List[Fraction]) -> List[Tuple[Fraction, int]]:
    """All rational roots with multiplicity; empty residual means full split."""
    from math import gcd

    def denom_lcm(cs):
        l = 1
        for c in cs:
            l = l * c.denominator // gcd(l, c.denominator)
        return l

    roots = []
    cur = list(coeffs)
    while len(cur) > 1:
        scale = denom_lcm(cur)
        ints = [int(c * scale) for c in cur]
        while ints and ints[-1] == 0:
            ints.pop()
        lead, const = ints[-1], next((c for c in ints if c), 0)
        k0 = next(i for i, c in enumerate(ints) if c)
        if k0 > 0:
            for _ in range(k0):
                roots.append(Fraction(0))
            cur = [Fraction(c) for c in ints[k0:]]
            continue
        found = None
        for p in _divisors(abs(const)):
            for q in _divisors(abs(lead)):
                for cand in (Fraction(p, q), Fraction(-p, q)):
                    if _poly_eval(cur, cand) == 0:
                        found = cand
                        break
                if found is not None:
                    break
            if found is not None:
                break
        if found is None:
            break
        cur = _deflate(cur, found)
        roots.append(found)
    residual_degree = len(cur) - 1
    return [(r, roots.count(r)) for r in sorted(set(roots))], residual_degree


def _divisors(n: int):
    if n == 0:
        return [1]
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            if d != n // d:
                out.append(n // d)
        d += 1
    return sorted(out)


def _poly_eval(coeffs, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _deflate(coeffs, root: Fraction):
    out = [Fraction(0)] * (len(coeffs) - 1)
    acc = Fraction(0)
    for k in range(len(coeffs) - 1, 0, -1):
        acc = coeffs[k] + acc * root
        out[k - 1] = acc
    return out


def diagonalize_transition(G1, G2, numeric_eps: Optional[float] = None) -> TransitionDiagonalization:
    """Exact eigen-decomposition of S = G1^{-1} G2 for rational SPD matrices.

    Eigenvectors are G1-orthogonalized per eigenspace and normalized, with
    quadratic radicals declared for non-square norms.  Raises
    IrrationalSpectrum when the characteristic polynomial does not split
    over Q, unless ``numeric_eps`` requests the floating fallback.
    """
    m = len(G1)
    G1 = [[Fraction(c) for c in row] for row in G1]
    G2 = [[Fraction(c) for c in row] for row in G2]
    _check_spd(G1)
    _check_spd(G2)
    from .linalg import field_inverse

    G1inv = field_inverse(G1, Fraction(1))
    S = [[sum(G1inv[i][l] * G2[l][j] for l in range(m)) for j in range(m)]
         for i in range(m)]
    coeffs = _char_poly(S)
    roots, residual = _rational_roots(coeffs)
    if residual > 0:
        if numeric_eps is None:
            raise IrrationalSpectrum(
                "characteristic polynomial does not split over Q; "
                "request the numeric fallback with a tolerance")
        return _numeric_diagonalization(S, numeric_eps)
    fld = ScalarField(())
    eigenvalues = []
    partition = []
    basis_cols = []
    idx = 0
    for val, mult in roots:
        rows = [[S[i][j] - (val if i == j else 0) for j in range(m)] for i in range(m)]
        kernel = field_nullspace(rows, m, Fraction(1))
        if len(kernel) != mult:
            raise IrrationalSpectrum("defective transition operator")  # impossible for SPD pairs
        block = []
        ortho = []
        for v in kernel:
            w = list(v)
            for u in ortho:
                num = _g_inner(G1, u, w)
                den = _g_inner(G1, u, u)
                f = num / den
                w = [wi - f * ui for wi, ui in zip(w, u)]
            ortho.append(w)
        for w in ortho:
            norm_sq = _g_inner(G1, w, w)
            root = frac_sqrt(norm_sq)
            if root is not None:
                col = [fld.const(wi / root) for wi in w]
            else:
                s = fld.sqrt_of(fld.const(norm_sq), name_hint=f"n{idx + 1}")
                col = [fld.const(wi) / s for wi in w]
            basis_cols.append(col)
            eigenvalues.append(val)
            block.append(idx)
            idx += 1
        partition.append(block)
    basis = [[basis_cols[j][i] for j in range(m)] for i in range(m)]
    return TransitionDiagonalization(
        eigenvalues=eigenvalues, basis=basis, partition=partition,
        N=len(partition), approximate=False, field=fld)


def _g_inner(G, u, v) -> Fraction:
    return sum(G[i][j] * u[i] * v[j] for i in range(len(u)) for j in range(len(v)))


def _numeric_diagonalization(S, eps: float) -> TransitionDiagonalization:
    import numpy as np

    A = np.array([[float(c) for c in row] for row in S])
    vals, vecs = np.linalg.eig(A)
    order = np.argsort(vals.real)
    vals = vals.real[order]
    vecs = vecs.real[:, order]
    partition = []
    current = [0]
    for i in range(1, len(vals)):
        if abs(vals[i] - vals[i - 1]) <= eps:
            current.append(i)
        else:
            partition.append(current)
            current = [i]
    partition.append(current)
    return TransitionDiagonalization(
        eigenvalues=[float(v) for v in vals],
        basis=[[float(vecs[i][j]) for j in range(len(vals))] for i in range(len(vals))],
        partition=partition, N=len(partition), approximate=True, field=None)
