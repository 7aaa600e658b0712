"""Exact linear algebra over any field whose elements are falsy iff zero.

Works uniformly for Fraction, Scalar and FRat entries.  Pivots prefer the
sparsest nonzero entry, which keeps symbolic elimination from exploding on
the structured matrices this package produces.
"""

from __future__ import annotations

from fractions import Fraction
from typing import List, Optional, Sequence

from .sparsepoly import SPoly

__all__ = [
    "field_rref",
    "field_rank",
    "field_nullspace",
    "field_solve",
    "field_inverse",
    "bareiss_det",
    "fraction_rank",
]


def _complexity(x) -> int:
    if isinstance(x, (int, Fraction)):
        return 1
    num = getattr(x, "num", None)
    if isinstance(num, SPoly):
        den = getattr(x, "den", None)
        return len(num.terms) + (len(den.terms) if isinstance(den, SPoly) else 0)
    if isinstance(x, SPoly):
        return len(x.terms)
    return 4


def field_rref(rows: Sequence[Sequence], ncols: Optional[int] = None):
    """Row-reduce a copy; returns (rank, pivot_cols, pivot_row_indices, R).

    ``pivot_row_indices[j]`` is the original row index that supplied the
    pivot for ``pivot_cols[j]``.
    """
    R = [list(r) for r in rows]
    order = list(range(len(R)))
    if ncols is None:
        ncols = len(R[0]) if R else 0
    rank = 0
    pivot_cols: List[int] = []
    pivot_rows: List[int] = []
    for col in range(ncols):
        best = None
        for i in range(rank, len(R)):
            if R[i][col]:
                c = _complexity(R[i][col])
                if best is None or c < best[1]:
                    best = (i, c)
                    if c <= 1:
                        break
        if best is None:
            continue
        i = best[0]
        R[rank], R[i] = R[i], R[rank]
        order[rank], order[i] = order[i], order[rank]
        piv = R[rank][col]
        inv = (Fraction(1) / piv) if isinstance(piv, (int, Fraction)) else 1 / piv
        R[rank] = [x * inv if x else x for x in R[rank]]
        for r in range(len(R)):
            if r != rank and R[r][col]:
                f = R[r][col]
                R[r] = [a - f * b if b else a for a, b in zip(R[r], R[rank])]
        pivot_cols.append(col)
        pivot_rows.append(order[rank])
        rank += 1
        if rank == len(R):
            break
    return rank, pivot_cols, pivot_rows, R


def field_rank(rows: Sequence[Sequence]) -> int:
    if not rows:
        return 0
    return field_rref(rows)[0]


def fraction_rank(rows: Sequence[Sequence[Fraction]]) -> int:
    """Plain fraction Gauss rank (fast path, no sparsity heuristics)."""
    R = [list(r) for r in rows]
    if not R:
        return 0
    ncols = len(R[0])
    rank = 0
    for col in range(ncols):
        piv = None
        for i in range(rank, len(R)):
            if R[i][col]:
                piv = i
                break
        if piv is None:
            continue
        R[rank], R[piv] = R[piv], R[rank]
        pv = R[rank][col]
        for i in range(rank + 1, len(R)):
            if R[i][col]:
                f = R[i][col] / pv
                R[i] = [a - f * b for a, b in zip(R[i], R[rank])]
        rank += 1
        if rank == len(R):
            break
    return rank


def field_nullspace(rows: Sequence[Sequence], ncols: int, one) -> List[List]:
    """Basis of the right kernel; ``one`` is the field's multiplicative unit."""
    zero = one - one
    if not rows:
        return [[one if i == j else zero for i in range(ncols)] for j in range(ncols)]
    rank, pivot_cols, _, R = field_rref(rows, ncols)
    free_cols = [c for c in range(ncols) if c not in pivot_cols]
    basis = []
    for fc in free_cols:
        v = [zero] * ncols
        v[fc] = one
        for r, pc in enumerate(pivot_cols):
            coeff = R[r][fc]
            if coeff:
                v[pc] = zero - coeff
        basis.append(v)
    return basis


def field_solve(A: Sequence[Sequence], b: Sequence) -> Optional[List]:
    """Solve A x = b for square invertible A; None when A is singular."""
    n = len(A)
    rows = [list(A[i]) + [b[i]] for i in range(n)]
    rank, pivot_cols, _, R = field_rref(rows, ncols=n)
    if rank < n:
        return None
    x = [None] * n
    for r, pc in enumerate(pivot_cols):
        x[pc] = R[r][n]
    return x


def field_inverse(A: Sequence[Sequence], one) -> Optional[List[List]]:
    n = len(A)
    zero = one - one
    rows = [list(A[i]) + [one if j == i else zero for j in range(n)] for i in range(n)]
    rank, pivot_cols, _, R = field_rref(rows, ncols=n)
    if rank < n:
        return None
    inv = [[zero] * n for _ in range(n)]
    for r, pc in enumerate(pivot_cols):
        inv[pc] = R[r][n:]
    return inv


def bareiss_det(mat: Sequence[Sequence[SPoly]]) -> SPoly:
    """Fraction-free determinant for SPoly entries (any integral domain)."""
    n = len(mat)
    if n == 0:
        raise ValueError("empty matrix")
    M = [list(r) for r in mat]
    sign = 1
    prev = None
    for k in range(n - 1):
        if M[k][k].is_zero():
            swap = None
            for i in range(k + 1, n):
                if not M[i][k].is_zero():
                    swap = i
                    break
            if swap is None:
                return SPoly.zero()
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                t = M[i][j] * M[k][k] - M[i][k] * M[k][j]
                if prev is not None:
                    t = t.exact_div(prev)
                M[i][j] = t
            M[i][k] = SPoly.zero()
        prev = M[k][k]
    det = M[n - 1][n - 1]
    return -det if sign < 0 else det
