"""Monomial deformations F_lambda = sum c_i T^{a_i} - lambda T_1...T_{n+1}.

Coefficients ``c`` and ``lam`` are element codes of the base field F_q
(plain residues when q = p).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import intlin
from .errors import AssumptionViolation, BudgetExceeded, InvalidFamilyError, NotNormalizable
from .ffield import FieldCtx, build_field

__all__ = [
    "FamilySpec",
    "SmoothnessVerdict",
    "dwork",
    "yu_yui",
    "normalize",
    "compute_C",
    "check_assumption",
    "assumption_report",
    "monomial_values",
    "poly_values",
    "projective_chunks",
    "smoothness_scan",
]


@dataclass(frozen=True)
class FamilySpec:
    A: tuple
    c: tuple
    p: int
    f: int = 1
    lam: int | None = None

    def __post_init__(self):
        A = tuple(tuple(int(v) for v in row) for row in self.A)
        object.__setattr__(self, "A", A)
        n1 = len(A)
        if any(len(row) != n1 for row in A):
            raise InvalidFamilyError("A must be square, (n+1)x(n+1)")
        if n1 < 3:
            raise InvalidFamilyError("need n >= 2")
        if len(self.c) != n1:
            raise InvalidFamilyError("need one coefficient per monomial")
        q = self.p**self.f
        c = tuple(int(v) % q if self.f == 1 else int(v) for v in self.c)
        if any(v == 0 for v in c):
            raise InvalidFamilyError("coefficients must be nonzero")
        object.__setattr__(self, "c", c)
        if self.lam is not None:
            object.__setattr__(self, "lam", int(self.lam) % q if self.f == 1 else int(self.lam))
        for i in range(n1):
            col = [A[k][i] for k in range(n1)]
            if min(col) < 0:
                raise InvalidFamilyError("exponents must be nonnegative")
            if sum(col) != n1:
                raise InvalidFamilyError(f"monomial {i} does not have degree n+1")
            if all(v == 1 for v in col):
                raise InvalidFamilyError("a monomial equals T_1...T_{n+1}")

    @property
    def n(self) -> int:
        return len(self.A) - 1

    @property
    def q(self) -> int:
        return self.p**self.f

    @property
    def ctx(self) -> FieldCtx:
        return build_field(self.p, self.f, 1)

    @property
    def alpha(self) -> intlin.AlphaData:
        return _alpha(self.A)

    @property
    def C(self) -> int:
        return compute_C(self)

    def with_lambda(self, lam) -> "FamilySpec":
        return replace(self, lam=lam)

    def columns(self) -> list[tuple]:
        return [tuple(self.A[k][i] for k in range(self.n + 1)) for i in range(self.n + 1)]


_alpha_cache: dict = {}


def _alpha(A):
    if A not in _alpha_cache:
        _alpha_cache[A] = intlin.alpha_vector(intlin.shifted_matrix(A))
    return _alpha_cache[A]


def dwork(n: int, p: int, f: int = 1, c=None, lam=None) -> FamilySpec:
    A = tuple(tuple((n + 1) * int(i == j) for j in range(n + 1)) for i in range(n + 1))
    return FamilySpec(A, tuple(c or (1,) * (n + 1)), p, f, lam)


def yu_yui(p: int, f: int = 1, c=None, lam=None) -> FamilySpec:
    """T_1^4 + T_1 T_2^3 + T_3^4 + T_4^4 deformed by the product monomial."""
    A = ((4, 1, 0, 0), (0, 3, 0, 0), (0, 0, 4, 0), (0, 0, 0, 4))
    return FamilySpec(A, tuple(c or (1, 1, 1, 1)), p, f, lam)


def _is_normal(A) -> bool:
    n1 = len(A)
    n = n1 - 1
    for i in range(n1):
        if A[i][i] not in (n, n + 1):
            return False
    for k in range(n1):
        off = [A[k][i] for i in range(n1) if i != k]
        if any(v not in (0, 1) for v in off) or sum(off) > 1:
            return False
    return True


def normalize(spec: FamilySpec) -> tuple[FamilySpec, tuple]:
    """Reorder the monomials so that the diagonal carries the large exponents.

    Returns the reordered family and the permutation ``perm`` (new column i is
    old column ``perm[i]``).  Raises NotNormalizable if no ordering works,
    which happens exactly when X_0 is singular.
    """
    n1 = spec.n + 1
    A = spec.A
    for perm in itertools.permutations(range(n1)):
        B = tuple(tuple(A[k][perm[i]] for i in range(n1)) for k in range(n1))
        if _is_normal(B):
            c = tuple(spec.c[perm[i]] for i in range(n1))
            return replace(spec, A=B, c=c), perm
    raise NotNormalizable("no monomial ordering has the normal shape; X_0 is singular")


def _const(ctx: FieldCtx, v: int) -> int:
    v %= ctx.p
    if v == 0:
        raise AssumptionViolation("p divides one of the alpha's")
    return int(ctx.element(v))


def compute_C(spec: FamilySpec) -> int:
    """``alpha^alpha * prod c_i^{alpha_i} / alpha_i^{alpha_i}`` as an F_q code."""
    ctx = spec.ctx
    al = spec.alpha
    val = int(ctx.power(_const(ctx, al.alpha_total), al.alpha_total))
    for ci, ai in zip(spec.c, al.alphas):
        val = int(ctx.mul(val, ctx.power(ci, ai)))
        val = int(ctx.mul(val, ctx.inv(ctx.power(_const(ctx, ai), ai))))
    return val


def check_assumption(spec: FamilySpec) -> None:
    """p must be prime to every alpha_i and to alpha."""
    al = spec.alpha
    bad = [a for a in al.alphas + (al.alpha_total,) if a % spec.p == 0]
    if bad:
        raise AssumptionViolation(f"p={spec.p} divides {bad}")


@dataclass(frozen=True)
class AssumptionReport:
    coprime: bool
    asm1: bool
    asm2: bool
    asm1_detail: str
    asm2_failures: tuple

    @property
    def ok(self) -> bool:
        return self.coprime and self.asm1 and self.asm2


def assumption_report(spec: FamilySpec) -> AssumptionReport:
    """Combined verdict of the coprimality, divisibility (asm1) and divisor (asm2) conditions."""
    al = spec.alpha
    coprime = all(a % spec.p for a in al.alphas + (al.alpha_total,))
    detail = ""
    try:
        intlin.kernel_reps(spec.A, spec.q, al)
        asm1 = True
    except AssumptionViolation as exc:
        asm1 = False
        detail = str(exc)
    rep = intlin.check_asm2(spec.A, spec.q)
    return AssumptionReport(
        coprime=coprime,
        asm1=asm1,
        asm2=rep.ok,
        asm1_detail=detail,
        asm2_failures=tuple((e.J, e.divisors) for e in rep.failures),
    )


# --- vectorised polynomial evaluation ---------------------------------------------


def monomial_values(ctx: FieldCtx, pts: np.ndarray, exps) -> np.ndarray:
    """Codes of ``prod_k x_k^{e_k}`` for every row of ``pts``."""
    pts = np.asarray(pts, dtype=np.int64)
    N = ctx.order
    acc = np.zeros(pts.shape[0], dtype=np.int64)
    zero = np.zeros(pts.shape[0], dtype=bool)
    for k, e in enumerate(exps):
        if e:
            col = pts[:, k]
            zero |= col == 0
            acc += int(e) * ctx.log[col]
    out = ctx.exp[acc % N]
    return np.where(zero, 0, out)


def poly_values(ctx: FieldCtx, pts: np.ndarray, monomials, coeffs) -> np.ndarray:
    """Codes of ``sum_i coeffs[i] * x^{monomials[i]}`` with coefficients given as codes of ctx."""
    total = np.zeros(len(pts), dtype=np.int64)
    for exps, cf in zip(monomials, coeffs):
        if cf == 0:
            continue
        total = ctx.add(total, ctx.mul(monomial_values(ctx, pts, exps), cf))
    return total


def projective_chunks(ctx: FieldCtx, nvars: int, chunk: int = 1 << 18):
    """Yield arrays of projective representatives (first nonzero coordinate 1)."""
    Q = ctx.Q
    for lead in range(nvars):
        free = nvars - lead - 1
        total = Q**free
        for start in range(0, total, chunk):
            idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
            pts = np.zeros((len(idx), nvars), dtype=np.int64)
            pts[:, lead] = 1
            rem = idx
            for k in range(nvars - 1, lead, -1):
                pts[:, k] = rem % Q
                rem = rem // Q
            yield pts


def projective_size(Q: int, nvars: int) -> int:
    return (Q**nvars - 1) // (Q - 1)


def family_polys(spec: FamilySpec, lam: int, ctx: FieldCtx):
    """Monomials and level-``ctx`` coefficient codes of F_lambda (deformation term last)."""
    monos = spec.columns() + [tuple([1] * (spec.n + 1))]
    coeffs = [int(ctx.from_base(c)) for c in spec.c]
    coeffs.append(int(ctx.neg(ctx.from_base(lam))))
    return monos, coeffs


def _partials(monos, coeffs, ctx: FieldCtx, nvars: int):
    out = []
    for k in range(nvars):
        dm, dc = [], []
        for exps, cf in zip(monos, coeffs):
            e = exps[k]
            if e % ctx.p == 0:
                continue
            new = list(exps)
            new[k] -= 1
            dm.append(tuple(new))
            dc.append(int(ctx.mul(cf, ctx.element(e))))
        out.append((dm, dc))
    return out


@dataclass(frozen=True)
class SmoothnessVerdict:
    singular: bool
    scanned_up_to: int
    point: tuple | None = None
    level: int | None = None
    torus_degenerate: bool = False
    note: str = ""


def smoothness_scan(spec: FamilySpec, lam: int, r_bound: int = 3, budget: int = 10**7) -> SmoothnessVerdict:
    """Look for common zeros of F_lambda and its partials over F_{q^s}, s <= r_bound.

    Stops early (and says so) if the next level would exceed ``budget`` points.
    ``torus_degenerate`` records whether ``lambda^alpha = C``.
    """
    base = spec.ctx
    lam = int(lam)
    degenerate = lam != 0 and int(base.power(lam, spec.alpha.alpha_total)) == compute_C(spec)
    nvars = spec.n + 1
    done = 0
    for s in range(1, r_bound + 1):
        try:
            ctx = build_field(spec.p, spec.f, s)
        except Exception:
            break
        if projective_size(ctx.Q, nvars) > budget:
            break
        monos, coeffs = family_polys(spec, lam, ctx)
        parts = _partials(monos, coeffs, ctx, nvars)
        for pts in projective_chunks(ctx, nvars):
            mask = poly_values(ctx, pts, monos, coeffs) == 0
            for dm, dc in parts:
                if not mask.any():
                    break
                sub = pts[mask]
                vals = poly_values(ctx, sub, dm, dc) if dm else np.zeros(len(sub), dtype=np.int64)
                mask[np.nonzero(mask)[0][vals != 0]] = False
            if mask.any():
                pt = tuple(int(v) for v in pts[np.argmax(mask)])
                return SmoothnessVerdict(True, s, pt, s, degenerate)
        done = s
    note = "" if done == r_bound else f"scan stopped at level {done} (point budget {budget})"
    return SmoothnessVerdict(False, done, None, None, degenerate, note)
