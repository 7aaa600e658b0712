"""Twisted-product (Levi-Civita) pairs: construction and verification.

``lc_build`` assembles the frame adapted to the pair of metrics

    g1 = sum_l gamma_l gbar_l,     g2 = sum_l alpha_l^2 gamma_l gbar_l,
    alpha_l^2 = beta_l prod beta_l',
    gamma_l   = prod_{l' != l} (1/beta_l' - 1/beta_l)  (sign-fixed),

realized through structure coefficients only: within-factor coefficients
pick up powers of gamma_l^(1/2), cross-factor coefficients follow the
closed-form eigenvalue-derivative expression, and the frame fields of
1-dimensional factors act on scalars through s_l^{-1} d/dx_l with
s_l^2 = gamma_l.

Supported factor frames: abstract Carnot algebras and 1-dimensional factors
(these cover every case whose verification stays inside quadratic radical
extensions; anything else raises UnsupportedFactorFrame).

Absolute values in gamma are removed by requiring strictly increasing
positive beta_l(0); validity is local to the base point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Union

from .errors import BadInput, SignAmbiguity, UnsupportedFactorFrame
from .exprparse import parse_scalar
from .frames import FrameData, validate_frame_data
from .fundamental import HamiltonianLift, build_layers
from .nilpotent import CarnotAlgebra
from .scalars import Scalar, ScalarField
from .sparsepoly import SPoly

__all__ = ["LCFactor", "LeviCivitaSpec", "LCPair", "lc_build", "lc_verify", "LCVerifyReport"]


@dataclass
class LCFactor:
    n: int
    frame: Optional[CarnotAlgebra]      # None for 1-dimensional factors
    beta: Union[str, Fraction, int]     # expression in this factor's variable


@dataclass
class LeviCivitaSpec:
    factors: List[LCFactor]


@dataclass
class LCPair:
    fd: FrameData
    factor_of_index: List[int]          # global frame index -> factor number
    alpha_sq: list                      # per factor
    gamma: list                         # per factor
    beta: list                          # per factor (Scalar)
    spec: LeviCivitaSpec


def lc_build(spec: LeviCivitaSpec) -> LCPair:
    """Build the adapted FrameData of the pair; validates every invariant."""
    N = len(spec.factors)
    if N < 1:
        raise BadInput("need at least one factor")
    var_names = []
    var_of_factor: List[Optional[int]] = []
    for l, f in enumerate(spec.factors):
        if f.n == 1:
            var_of_factor.append(len(var_names))
            var_names.append(f"x{l + 1}")
        else:
            if f.frame is None:
                raise UnsupportedFactorFrame(
                    f"factor {l + 1} has dimension {f.n} but no Carnot frame")
            if f.frame.n != f.n:
                raise BadInput(f"factor {l + 1}: frame dimension mismatch")
            var_of_factor.append(None)
    fld = ScalarField(tuple(var_names))
    base_point = tuple(Fraction(0) for _ in var_names)

    betas = []
    for l, f in enumerate(spec.factors):
        if isinstance(f.beta, (int, Fraction)):
            b = fld.const(Fraction(f.beta))
        else:
            b = parse_scalar(f.beta, fld)
        # each beta may live on its own factor's coordinate only
        used = set()
        for mono in list(b.num.terms) + list(b.den.terms):
            used |= {i for i, e in enumerate(mono[: fld.nbase]) if e}
        allowed = {var_of_factor[l]} if var_of_factor[l] is not None else set()
        if not used <= allowed:
            raise BadInput(f"beta_{l + 1} must depend only on factor {l + 1}'s variable")
        if f.n > 1 and not b.is_constant():
            raise BadInput(f"beta_{l + 1} must be constant (factor dimension > 1)")
        betas.append(b)
    beta0 = [b.eval(base_point) for b in betas]
    if any(v <= 0 for v in beta0):
        raise SignAmbiguity("all beta_l(0) must be positive")
    for l in range(N - 1):
        if not beta0[l] < beta0[l + 1]:
            raise SignAmbiguity(
                "beta_l(0) must be strictly increasing in the factor order "
                f"(got {beta0[l]} then {beta0[l + 1]})")

    prod_beta = fld.one
    for b in betas:
        prod_beta = prod_beta * b
    alpha_sq_factor = [betas[l] * prod_beta for l in range(N)]
    gammas = []
    for l in range(N):
        g = fld.one
        for lp in range(N):
            if lp == l:
                continue
            diff = (1 / betas[lp]) - (1 / betas[l])
            gammas_sign = diff if lp < l else -diff
            g = g * gammas_sign
        gammas.append(g)
    for l, g in enumerate(gammas):
        if g.eval(base_point) <= 0:
            raise SignAmbiguity(f"gamma_{l + 1} is not positive at the base point")

    # global index layout: all first layers in factor order, then verticals
    # sorted by weight (stable in factor order)
    horiz = []   # (factor, local index)
    vert = []    # (weight, factor, local index)
    for l, f in enumerate(spec.factors):
        if f.n == 1:
            horiz.append((l, 0))
        else:
            w = f.frame.weights
            for a in range(f.frame.m):
                horiz.append((l, a))
            for a in range(f.frame.m, f.frame.n):
                vert.append((w[a], l, a))
    vert.sort()
    m = len(horiz)
    n = m + len(vert)
    weights = tuple([1] * m + [w for (w, _, _) in vert])
    glob = {}
    factor_of_index = []
    for gi, (l, a) in enumerate(horiz):
        glob[(l, a)] = gi
        factor_of_index.append(l)
    for gi, (w, l, a) in enumerate(vert, start=m):
        glob[(l, a)] = gi
        factor_of_index.append(l)

    # radicals s_l (declared on demand)
    s_cache: dict = {}

    def s_of(l: int) -> Scalar:
        if l not in s_cache:
            s_cache[l] = fld.declare_radical(f"s{l + 1}", gammas[l], base_point)
        return s_cache[l]

    structure = {}
    # within-factor coefficients: chat * gamma^((dc - da - db)/2) where
    # d* = 1 for horizontal slots, 0 for vertical ones
    for l, f in enumerate(spec.factors):
        if f.n == 1:
            continue
        car = f.frame
        w = car.weights
        ginv = 1 / gammas[l]
        for (a, b, c), chat in car.structure.items():
            if a >= b:
                continue
            half_power = (0 if w[c] > 1 else 1) - (1 if w[a] == 1 else 0) - (1 if w[b] == 1 else 0)
            coeff = fld.const(chat)
            if half_power % 2 == 0:
                k = half_power // 2
                coeff = coeff * (gammas[l] ** k if k >= 0 else ginv ** (-k))
            else:
                s = s_of(l)
                k = (half_power - 1) // 2
                coeff = coeff * s * (gammas[l] ** k if k >= 0 else ginv ** (-k))
            structure[(glob[(l, a)], glob[(l, b)], glob[(l, c)])] = coeff

    # cross-factor horizontal coefficients from the closed-form expression
    derivation_rows = [[fld.zero] * fld.nbase for _ in range(n)]
    has_derivations = False
    for l, f in enumerate(spec.factors):
        if f.n == 1 and not (betas[l].diff(var_of_factor[l]).is_zero()):
            has_derivations = True
    for gi, (l, a) in enumerate(horiz):
        if spec.factors[l].n == 1:
            v = var_of_factor[l]
            db = betas[l].diff(v)
            if has_derivations:
                derivation_rows[gi][v] = 1 / s_of(l)

    def X_alpha(i_global: int, l_target: int) -> Scalar:
        """X_i(alpha_{l_target}^2) for a horizontal index."""
        l = factor_of_index[i_global]
        if spec.factors[l].n != 1:
            return fld.zero
        v = var_of_factor[l]
        d = alpha_sq_factor[l_target].diff(v)
        if d.is_zero():
            return fld.zero
        return (1 / s_of(l)) * d

    for gi, (li, ai) in enumerate(horiz):
        for gj, (lj, aj) in enumerate(horiz):
            if li == lj or gi >= gj:
                continue
            # c^j_{ij} and c^i_{ij} = -c^i_{ji}
            num_j = alpha_sq_factor[lj] * X_alpha(gi, li)
            if not num_j.is_zero():
                den_j = 4 * alpha_sq_factor[li] * (alpha_sq_factor[lj] - alpha_sq_factor[li])
                structure[(gi, gj, gj)] = num_j / den_j
            num_i = alpha_sq_factor[li] * X_alpha(gj, lj)
            if not num_i.is_zero():
                den_i = 4 * alpha_sq_factor[lj] * (alpha_sq_factor[li] - alpha_sq_factor[lj])
                structure[(gi, gj, gi)] = -(num_i / den_i)

    # consistency of the eigenvalue-derivative relation used above
    for gi, (li, ai) in enumerate(horiz):
        for lt in range(N):
            if lt == li:
                continue
            lhs = X_alpha(gi, lt)
            rhs = alpha_sq_factor[lt] * X_alpha(gi, li) / (2 * alpha_sq_factor[li])
            if not (lhs - rhs).is_zero():
                raise BadInput("internal: eigenvalue-derivative relation failed")

    alpha_sq = [alpha_sq_factor[factor_of_index[i]] for i in range(m)]
    fd = FrameData(
        n=n, m=m, weights=weights,
        structure=structure,
        alpha_sq=alpha_sq,
        base_point=base_point,
        field=fld,
        derivations=derivation_rows if has_derivations else None,
        has_fields=False,
    )
    validate_frame_data(fd)
    fd = fd.try_constant_mode()
    return LCPair(fd=fd, factor_of_index=factor_of_index,
                  alpha_sq=alpha_sq_factor, gamma=gammas, beta=betas, spec=spec)


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------


@dataclass
class LCVerifyReport:
    horizontal_residuals: list   # simplified first-group equations, one per j <= m
    vertical_residuals: list     # derivative equations, one per s > m
    rj_residuals: list           # R_j simplification check, one per j <= m
    all_zero: bool

    def failing_indices(self):
        bad = [("horizontal", j + 1) for j, r in enumerate(self.horizontal_residuals) if r]
        bad += [("vertical", k + 1) for k, r in enumerate(self.vertical_residuals) if r]
        bad += [("r_simplification", j + 1) for j, r in enumerate(self.rj_residuals) if r]
        return bad


def lc_verify(pair: LCPair, alpha_sq_override=None) -> LCVerifyReport:
    """Substitute alpha*Phi_k = alpha_{l(k)}^2 u_k and check, exactly:

    * the simplified horizontal equations
      sum_{k>m} q_jk (alpha_{l(k)}^2 - alpha_{l(j)}^2) u_k = 0,
    * the cleared derivative equations
      2P vech(W_s) - vech(P) W_s - 2P sum_k q_sk W_k = 0  (W_k = alpha^2 u_k),
    * the claimed simplification R_j = alpha_j^2 sum_{i<=m,k>m} c^k_ij u_i u_k.
    """
    fd = pair.fd
    n, m = fd.n, fd.m
    lift = HamiltonianLift(fd)
    sys = build_layers(fd, 1)
    one = fd.one
    if alpha_sq_override is not None:
        table = list(alpha_sq_override)
    else:
        table = [pair.alpha_sq[pair.factor_of_index[k]] for k in range(n)]
        if fd.field is None:
            table = [t.as_fraction() if not isinstance(t, (int, Fraction)) else t
                     for t in table]
    W = [SPoly({tuple([0] * k + [1]): table[k]}) for k in range(n)]
    P, vech_P = sys.div.P, sys.div.vech_P
    horiz = []
    for j in range(m):
        acc = SPoly.zero()
        for k in range(m, n):
            qjk = sys.q.get((j, k))
            if qjk is not None and not qjk.is_zero():
                acc = acc + qjk * (W[k] - SPoly({tuple([0] * k + [1]): table[j]}))
        horiz.append(acc)
    vert = []
    two = SPoly.const(2 * (one if fd.field is not None else Fraction(1)))
    for s in range(m, n):
        t = P * lift.apply(W[s]) * two - vech_P * W[s]
        acc = SPoly.zero()
        for k in range(n):
            qsk = sys.q.get((s, k))
            if qsk is not None and not qsk.is_zero():
                acc = acc + qsk * W[k]
        t = t - P * acc * two
        vert.append(t)
    rj = []
    for j in range(m):
        claimed = SPoly.zero()
        for (i, jj, k), c in fd.structure.items():
            if jj == j and i < m and k >= m:
                mono = [0] * max(i + 1, k + 1)
                mono[i] += 1
                mono[k] += 1
                claimed = claimed + SPoly({tuple(mono): c * table[j]})
        rj.append(sys.B_layers[0][j] - claimed)
    all_zero = all(p.is_zero() for p in horiz + vert + rj)
    return LCVerifyReport([_nz(p) for p in horiz], [_nz(p) for p in vert],
                          [_nz(p) for p in rj], all_zero)


def _nz(p: SPoly):
    return None if p.is_zero() else p
