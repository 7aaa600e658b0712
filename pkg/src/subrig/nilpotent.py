"""Nilpotent approximation, Carnot algebra validation, highest-weight layer
comparison, and the constructive product-structure decomposition.

The Tanaka-symbol filtering keeps only weight-respecting structure constants
at the base point; the resulting graded algebra is validated in full (its
Jacobi identity is a genuine test of adaptedness/regularity of the input).
The product decomposition partitions the first layer by transition
eigenvalues, checks cross brackets, generates the block subalgebras by exact
bracket closure, and certifies directness — the certificate that the pair of
left-invariant metrics is a Levi-Civita pair with constant coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

from .errors import BadInput, JacobiViolation, LayerOutOfRange, NotFundamental
from .fiber import highest_weight_part
from .frames import FrameData
from .fundamental import FundamentalSystem, build_layers
from .linalg import field_rref, fraction_rank
from .sparsepoly import SPoly

__all__ = [
    "CarnotAlgebra",
    "validate_carnot",
    "carnot_to_frame",
    "nilpotent_approximation",
    "hat_layer_check",
    "ProductDecomposition",
    "Obstruction",
    "carnot_product_structure",
]


@dataclass
class CarnotAlgebra:
    """Fundamental graded nilpotent Lie algebra by structure constants.

    ``grading`` holds the cumulative dimensions m_1 <= ... <= m_r = n; the
    structure table is antisymmetric and graded (c^k_ij = 0 unless
    w_k = w_i + w_j).
    """

    grading: Tuple[int, ...]
    structure: dict     # (i, j, k) 0-based -> Fraction, both orders stored

    def __post_init__(self):
        complete = {}
        for (i, j, k), c in self.structure.items():
            c = Fraction(c)
            if not c:
                continue
            if i == j:
                raise BadInput("diagonal structure constant must vanish")
            if (i, j, k) in complete and complete[(i, j, k)] != c:
                raise BadInput(f"conflicting entries at ({i},{j},{k})")
            complete[(i, j, k)] = c
            if (j, i, k) in complete and complete[(j, i, k)] != -c:
                raise BadInput(f"antisymmetry violated at ({i},{j},{k})")
            complete[(j, i, k)] = -c
        self.structure = complete

    @property
    def n(self) -> int:
        return self.grading[-1]

    @property
    def m(self) -> int:
        return self.grading[0]

    @property
    def step(self) -> int:
        return len(self.grading)

    @property
    def weights(self) -> Tuple[int, ...]:
        w = []
        for i in range(self.n):
            for s, ms in enumerate(self.grading, start=1):
                if i < ms:
                    w.append(s)
                    break
        return tuple(w)

    def c(self, i: int, j: int, k: int) -> Fraction:
        return self.structure.get((i, j, k), Fraction(0))

    def bracket(self, u: List[Fraction], v: List[Fraction]) -> List[Fraction]:
        out = [Fraction(0)] * self.n
        for (i, j, k), c in self.structure.items():
            if i < j and u[i] and v[j]:
                out[k] += c * u[i] * v[j]
            if i < j and u[j] and v[i]:
                out[k] -= c * u[j] * v[i]
        return out


def validate_carnot(g: CarnotAlgebra) -> None:
    """Graded + Jacobi + fundamental (first layer generates)."""
    w = g.weights
    n = g.n
    if any(g.grading[i] >= g.grading[i + 1] for i in range(len(g.grading) - 1)):
        raise BadInput("grading dimensions must be strictly increasing")
    for (i, j, k), c in g.structure.items():
        if c and w[k] != w[i] + w[j]:
            raise BadInput(
                f"not graded: c^{k + 1}_{{{i + 1}{j + 1}}} nonzero with "
                f"w_k = {w[k]} != {w[i]} + {w[j]}")
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                for mp in range(n):
                    acc = Fraction(0)
                    for l in range(n):
                        acc += (g.c(j, k, l) * g.c(i, l, mp)
                                + g.c(k, i, l) * g.c(j, l, mp)
                                + g.c(i, j, l) * g.c(k, l, mp))
                    if acc:
                        raise JacobiViolation(
                            f"Jacobi fails at ({i + 1},{j + 1},{k + 1}) -> {mp + 1}")
    # fundamentality: [V^s, V^1] spans V^{s+1}
    m = g.m
    for s in range(1, g.step):
        lo, hi = g.grading[s - 1], g.grading[s]
        vecs = []
        layer_lo = g.grading[s - 2] if s > 1 else 0
        layer_hi = g.grading[s - 1]
        for a in range(layer_lo, layer_hi):
            for i in range(m):
                v = [g.c(i, a, k) for k in range(lo, hi)]
                if any(v):
                    vecs.append(v)
        if fraction_rank(vecs) < hi - lo:
            raise NotFundamental(
                f"layer {s + 1} is not spanned by brackets of the first layer")
        prev = lo


def carnot_to_frame(g: CarnotAlgebra, alpha_sq) -> FrameData:
    """Constant-coefficient FrameData carrying the Carnot data."""
    if len(alpha_sq) != g.m:
        raise BadInput("need one eigenvalue per first-layer direction")
    return FrameData(
        n=g.n, m=g.m, weights=g.weights,
        structure={k: Fraction(c) for k, c in g.structure.items()},
        alpha_sq=[Fraction(a) for a in alpha_sq],
        base_point=(), field=None)


def nilpotent_approximation(fd: FrameData) -> CarnotAlgebra:
    """Tanaka symbol at the base point: keep c^k_ij(q0) when w_i + w_j = w_k.

    Only weight-respecting entries are evaluated, so radical coefficients
    killed by the filter never force an exactness error.  The filtered
    constants are validated in full; a Jacobi failure indicates non-adapted
    or irregular input.
    """
    w = fd.weights
    structure = {}
    for (i, j, k), c in fd.structure.items():
        if w[i] + w[j] != w[k]:
            continue
        val = fd.eval_at_base(c)
        if val:
            structure[(i, j, k)] = val
    grading = []
    for s in range(1, max(w) + 1):
        grading.append(sum(1 for wi in w if wi <= s))
    g = CarnotAlgebra(grading=tuple(grading), structure=structure)
    validate_carnot(g)
    return g


def _eval_fpoly_at_base(p: SPoly, fd: FrameData) -> SPoly:
    if fd.field is None:
        return p
    return SPoly({mono: v for mono, v in
                  ((mono, c.eval(fd.base_point)) for mono, c in p.terms.items()) if v})


def hat_layer_check(fd: FrameData, carnot: CarnotAlgebra, s: int,
                    sys: Optional[FundamentalSystem] = None,
                    hat_sys: Optional[FundamentalSystem] = None) -> bool:
    """Highest-weight comparison of layer s: the top w-graded part of every
    a^s entry (and cleared B numerator) at the base point must equal the
    corresponding entry built from the nilpotent approximation."""
    if s < 1:
        raise LayerOutOfRange("layers are numbered from 1")
    if sys is None:
        sys = build_layers(fd, s)
    elif sys.depth < s:
        sys.extend(s)
    alpha0 = [fd.eval_at_base(a) for a in fd.alpha_sq]
    if hat_sys is None:
        hat_fd = carnot_to_frame(carnot, alpha0)
        hat_sys = build_layers(hat_fd, s)
    elif hat_sys.depth < s:
        hat_sys.extend(s)
    w = fd.weights
    n, m = fd.n, fd.m
    for j in range(m):
        for k in range(m, n):
            a = _eval_fpoly_at_base(sys.a(s, j, k), fd)
            ahat = hat_sys.a(s, j, k)
            if a.is_zero() != ahat.is_zero():
                return False
            if a.is_zero():
                continue
            if not (highest_weight_part(a, w) - ahat).is_zero():
                return False
    for j in range(m):
        B = _eval_fpoly_at_base(sys.B_layers[s - 1][j], fd)
        Bhat = hat_sys.B_layers[s - 1][j]
        if B.is_zero() != Bhat.is_zero():
            return False
        if B.is_zero():
            continue
        if not (highest_weight_part(B, w) - Bhat).is_zero():
            return False
    return True


# ---------------------------------------------------------------------------
# product structure
# ---------------------------------------------------------------------------


@dataclass
class ProductDecomposition:
    blocks: Optional[List[List[int]]]      # 0-based index partition (adapted basis)
    block_bases: List[List[List[Fraction]]]
    subalgebras: List[CarnotAlgebra]
    alpha_sq: List[Fraction]               # one constant eigenvalue per block
    eigen_partition: List[List[int]]       # first-layer index partition I_l
    trivial: bool = False


@dataclass
class Obstruction:
    kind: str                              # "cross_bracket" | "not_direct"
    indices: Tuple[int, ...] = ()
    witness: Optional[list] = None

    def describe(self) -> str:
        if self.kind == "cross_bracket":
            i, j = self.indices[:2]
            return (f"[X_{i}, X_{j}] != 0 although the transition eigenvalues "
                    f"alpha_{i}^2, alpha_{j}^2 differ")
        return "block subalgebras overlap: the sum is not direct"


def carnot_product_structure(carnot: CarnotAlgebra, alpha_sq):
    """Theorem-6-style decomposition: eigenvalue partition, cross-bracket
    test, bracket-closure generation, directness certificate.

    Success doubles as the certificate that the two left-invariant metrics
    form a Levi-Civita pair with constant coefficients.
    """
    m, n = carnot.m, carnot.n
    if len(alpha_sq) != m:
        raise BadInput("alpha_sq length must equal the first-layer dimension")
    alpha_sq = [Fraction(a) for a in alpha_sq]
    if any(a <= 0 for a in alpha_sq):
        raise BadInput("transition eigenvalues must be positive")
    blocks_idx: List[List[int]] = []
    reps: List[Fraction] = []
    for i, a in enumerate(alpha_sq):
        for b_i, r in enumerate(reps):
            if r == a:
                blocks_idx[b_i].append(i)
                break
        else:
            reps.append(a)
            blocks_idx.append([i])
    N = len(blocks_idx)
    if N == 1:
        sub = carnot
        return ProductDecomposition(
            blocks=[list(range(n))], block_bases=[_unit_vectors(n, range(n))],
            subalgebras=[sub], alpha_sq=[reps[0]], eigen_partition=blocks_idx,
            trivial=True)
    # cross brackets between distinct eigenvalue blocks must vanish
    for b_i in range(N):
        for b_j in range(b_i + 1, N):
            for i in blocks_idx[b_i]:
                for j in blocks_idx[b_j]:
                    for k in range(n):
                        if carnot.c(i, j, k):
                            return Obstruction("cross_bracket", (i + 1, j + 1, k + 1))
    # generate each block subalgebra layer by layer
    weights = carnot.weights
    block_bases = []
    for block in blocks_idx:
        layers = [_unit_vectors(n, block)]
        basis = [v for v in layers[0]]
        for s in range(2, carnot.step + 1):
            new_vecs = []
            for i in block:
                ei = _unit_vector(n, i)
                for v in layers[-1]:
                    bv = carnot.bracket(ei, v)
                    if any(bv):
                        new_vecs.append(bv)
            layer_basis = _independent_subset(new_vecs)
            layers.append(layer_basis)
            basis.extend(layer_basis)
        block_bases.append(basis)
    dims = [len(b) for b in block_bases]
    stacked = [v for b in block_bases for v in b]
    total_rank = fraction_rank(stacked)
    if sum(dims) != n or total_rank != n:
        witness = _intersection_witness(block_bases, n)
        return Obstruction("not_direct", (), witness)
    # pairwise trivial intersections (diagnostic completeness)
    for b_i in range(N):
        for b_j in range(b_i + 1, N):
            if fraction_rank(block_bases[b_i] + block_bases[b_j]) != dims[b_i] + dims[b_j]:
                witness = _intersection_witness([block_bases[b_i], block_bases[b_j]], n)
                return Obstruction("not_direct", (b_i + 1, b_j + 1), witness)
    # index-adapted blocks when each coordinate direction sits in one block
    blocks: Optional[List[List[int]]] = []
    assignment = {}
    for a in range(n):
        owner = None
        ea = _unit_vector(n, a)
        for b_i, basis in enumerate(block_bases):
            if _in_span(basis, ea):
                owner = b_i if owner is None else -1
                if owner == -1:
                    break
        if owner is None or owner == -1:
            blocks = None
            break
        assignment[a] = owner
    if blocks is not None:
        blocks = [[a for a in range(n) if assignment[a] == b_i] for b_i in range(N)]
    subalgebras = [_restrict(carnot, basis) for basis in block_bases]
    return ProductDecomposition(
        blocks=blocks, block_bases=block_bases, subalgebras=subalgebras,
        alpha_sq=reps, eigen_partition=blocks_idx, trivial=False)


def _unit_vector(n: int, i: int) -> List[Fraction]:
    v = [Fraction(0)] * n
    v[i] = Fraction(1)
    return v


def _unit_vectors(n: int, idx) -> List[List[Fraction]]:
    return [_unit_vector(n, i) for i in idx]


def _independent_subset(vecs: List[List[Fraction]]) -> List[List[Fraction]]:
    basis: List[List[Fraction]] = []
    for v in vecs:
        if fraction_rank(basis + [v]) > len(basis):
            basis.append(v)
    return basis


def _in_span(basis: List[List[Fraction]], v: List[Fraction]) -> bool:
    return fraction_rank(basis + [v]) == len(basis)


def _intersection_witness(bases: List[List[List[Fraction]]], n: int):
    """A nonzero vector in the span overlap, as an independently checkable witness."""
    stacked = []
    owners = []
    for b_i, basis in enumerate(bases):
        for v in basis:
            stacked.append(v)
            owners.append(b_i)
    cols = len(stacked)
    rows = [[stacked[c][r] for c in range(cols)] for r in range(n)]
    from .linalg import field_nullspace

    null = field_nullspace(rows, cols, Fraction(1))
    for coeffs in null:
        vec = [Fraction(0)] * n
        for c, basis_vec in zip(coeffs, stacked):
            if c:
                for r in range(n):
                    vec[r] += c * basis_vec[r]
        # combination from the first block alone equals minus the rest: overlap
        first = [c for c, o in zip(coeffs, owners) if o == 0]
        if any(first):
            vec0 = [Fraction(0)] * n
            for c, basis_vec, o in zip(coeffs, stacked, owners):
                if o == 0 and c:
                    for r in range(n):
                        vec0[r] += c * basis_vec[r]
            if any(vec0):
                return [str(x) for x in vec0]
    return None


def _restrict(carnot: CarnotAlgebra, basis: List[List[Fraction]]) -> CarnotAlgebra:
    """Structure constants of the subalgebra in the given (graded) basis."""
    nb = len(basis)
    n = carnot.n
    weights = carnot.weights
    bw = []
    for v in basis:
        ws = {weights[i] for i, x in enumerate(v) if x}
        if len(ws) != 1:
            raise BadInput("block basis vector is not weight-homogeneous")
        bw.append(ws.pop())
    order = sorted(range(nb), key=lambda i: bw[i])
    basis = [basis[i] for i in order]
    bw = [bw[i] for i in order]
    grading = []
    for s in range(1, max(bw) + 1):
        grading.append(sum(1 for w in bw if w <= s))
    cols = [[basis[c][r] for c in range(nb)] for r in range(n)]
    structure = {}
    for i in range(nb):
        for j in range(i + 1, nb):
            bv = carnot.bracket(basis[i], basis[j])
            if not any(bv):
                continue
            coeffs = _solve_in_span(cols, bv, nb)
            if coeffs is None:
                raise BadInput("bracket leaves the candidate subalgebra")
            for k, c in enumerate(coeffs):
                if c:
                    structure[(i, j, k)] = c
    sub = CarnotAlgebra(grading=tuple(grading), structure=structure)
    validate_carnot(sub)
    return sub


def _solve_in_span(cols: List[List[Fraction]], v: List[Fraction], nb: int):
    rows = [cols[r] + [v[r]] for r in range(len(v))]
    rank, pcols, _, R = field_rref(rows, ncols=nb)
    # consistency: the augmented column must not create new rank
    for r in range(len(R)):
        if all(not R[r][c] for c in range(nb)) and R[r][nb]:
            return None
    out = [Fraction(0)] * nb
    for r_i, pc in enumerate(pcols):
        out[pc] = R[r_i][nb]
    return out
