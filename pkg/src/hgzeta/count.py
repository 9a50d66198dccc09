"""Point counting oracles: projective enumeration and Delsarte character sums."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import gmpy2
import numpy as np

from . import intlin
from .chargauss import ensure_context, gauss_table, mpc, roots_of_unity
from .errors import BudgetExceeded, RoundingGapError
from .family import FamilySpec, family_polys, poly_values, projective_chunks, projective_size
from .ffield import FieldCtx, build_field

DEFAULT_BUDGET = 10**9
GAP = 1e-10

__all__ = [
    "CountReport",
    "brute_count",
    "brute_count_poly",
    "delsarte_torus_count",
    "delsarte_torus_sum",
    "delsarte_full_count",
    "round_with_gap",
]


@dataclass(frozen=True)
class CountReport:
    r: int
    total: int
    zero_part: int
    star_part: int
    per_torus: dict = field(default_factory=dict)
    method: str = "brute"


def round_with_gap(value, gap: float = GAP) -> int:
    """Nearest integer, refusing values that are not clearly integral."""
    z = gmpy2.mpc(value)
    re = z.real
    k = int(gmpy2.rint(re))
    if abs(re - k) > gap or abs(z.imag) > gap:
        raise RoundingGapError(f"value {complex(z)} is not within {gap} of an integer")
    return k


def brute_count_poly(ctx: FieldCtx, nvars: int, monomials, coeffs, budget: int = DEFAULT_BUDGET) -> CountReport:
    """Projective zeros of an arbitrary homogeneous polynomial, stratified by support."""
    size = projective_size(ctx.Q, nvars)
    if size > budget:
        raise BudgetExceeded(f"{size} points exceed the enumeration budget {budget}")
    weights = 1 << np.arange(nvars, dtype=np.int64)
    per_mask = np.zeros(1 << nvars, dtype=np.int64)
    for pts in projective_chunks(ctx, nvars):
        zero = poly_values(ctx, pts, monomials, coeffs) == 0
        masks = (pts[zero] != 0) @ weights
        per_mask += np.bincount(masks, minlength=1 << nvars)
    full = (1 << nvars) - 1
    per_torus = {}
    for m in range(1, 1 << nvars):
        J = tuple(k for k in range(nvars) if m >> k & 1)
        per_torus[J] = int(per_mask[m])
    star = int(per_mask[full])
    total = int(per_mask.sum())
    return CountReport(r=ctx.r, total=total, zero_part=total - star, star_part=star, per_torus=per_torus)


def brute_count(spec: FamilySpec, lam: int, r: int, budget: int = DEFAULT_BUDGET) -> CountReport:
    """#X_lambda(F_{q^r}) by enumerating one representative per projective point."""
    ctx = build_field(spec.p, spec.f, r)
    monos, coeffs = family_polys(spec, lam, ctx)
    return brute_count_poly(ctx, spec.n + 1, monos, coeffs, budget)


def delsarte_torus_sum(ctx: FieldCtx, R, coeffs) -> gmpy2.mpc:
    """``sum over Ker(R~ mod Q-1) of prod_j G(conj chi_j) chi_j(c_j)``; R has one column per monomial."""
    ensure_context()
    R = intlin.as_matrix(R)
    Rt = R + [[1] * len(R[0])]
    N = ctx.order
    K = intlin.kernel_mod(Rt, N)
    G = gauss_table(ctx)
    W = roots_of_unity(N)
    acc = None
    for j, cf in enumerate(coeffs):
        kj = K[:, j]
        term = G[(-kj) % N] * W[(kj * ctx.dlog(cf)) % N]
        acc = term if acc is None else acc * term
    return gmpy2.mpc(gmpy2.fsum([t.real for t in acc]), gmpy2.fsum([t.imag for t in acc]))


def delsarte_torus_count(ctx: FieldCtx, R, coeffs) -> int:
    """Zeros of ``sum_j c_j x^{R[:, j]}`` on ``(F_{q^r}^x)^n`` (affine torus count)."""
    ensure_context()
    R = intlin.as_matrix(R)
    nv, nm = len(R), len(R[0])
    Q = ctx.Q
    S = delsarte_torus_sum(ctx, R, coeffs)
    e = nv + 1 - nm
    scale = gmpy2.mpfr(Q - 1) ** e if e >= 0 else 1 / gmpy2.mpfr(Q - 1) ** (-e)
    val = gmpy2.mpfr((Q - 1) ** nv) / Q + scale * S / Q
    return round_with_gap(val)


def delsarte_full_count(spec: FamilySpec, lam: int, r: int) -> CountReport:
    """Sum of Delsarte torus counts over every coordinate stratum."""
    ctx = build_field(spec.p, spec.f, r)
    nvars = spec.n + 1
    monos, coeffs = family_polys(spec, lam, ctx)
    Q = ctx.Q
    per_torus = {}
    for size in range(1, nvars + 1):
        for J in itertools.combinations(range(nvars), size):
            keep = [
                i for i, m in enumerate(monos)
                if all(m[k] == 0 for k in range(nvars) if k not in J)
            ]
            if not keep:
                per_torus[J] = (Q - 1) ** (size - 1)
                continue
            R = [[monos[i][k] for i in keep] for k in J]
            affine = delsarte_torus_count(ctx, R, [coeffs[i] for i in keep])
            if affine % (Q - 1):
                raise RoundingGapError("stratum count not divisible by q^r - 1")
            per_torus[J] = affine // (Q - 1)
    full = tuple(range(nvars))
    star = per_torus[full]
    total = sum(per_torus.values())
    return CountReport(r=r, total=total, zero_part=total - star, star_part=star, per_torus=per_torus, method="delsarte")
