"""Spectral pieces, predicted point counts and the factorisation of P(T).

Conventions used throughout (all checked against the counting oracles):

* ``gamma(j)_r = (-1)^n * prefactor_r * Gamma_r`` where the prefactor holds
  the character values at ``c_i`` and ``-lambda`` and ``Gamma_r`` the Gauss
  products.  With this normalisation ``gamma(0)_r = 1`` and
  ``gamma(j)_r = gamma(j)_1 ** r``.
* ``F(j)_r = Q^{e_j - 1} * tghf(reduced parameters; C lambda^-alpha)`` where
  ``e_j`` is 1 exactly when a trivial pair was cancelled during reduction.
* ``#X(F_Q) = sum_{i<n} Q^i + u_r + D Q^{(n-1)/2} + (-1)^n sum_j gamma(j)_r F(j)_r``.
* ``P(T) = zeta((-1)^{n+1} E)`` with ``E_r = #X(F_Q) - sum_{i<n} Q^i``, so the
  hypergeometric factors of P are ``zeta(-gamma(j) F(j))``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import gmpy2
import mpmath
import numpy as np

from . import intlin
from .chargauss import ensure_context, gauss_table, get_precision, mpc, roots_of_unity
from .count import round_with_gap
from .errors import (
    AssumptionViolation,
    DegreeUndetermined,
    IntegralityError,
    UnclassifiableRoot,
)
from .family import FamilySpec, compute_C, _const
from .ffield import FieldCtx, build_field
from .hgff import ParamList, bracket, reduce_params, tghf

__all__ = [
    "SpectralPiece",
    "UData",
    "ZetaPoly",
    "Factorization",
    "build_pieces",
    "gamma_value",
    "gamma_direct",
    "eval_piece",
    "F_value",
    "compute_u",
    "compute_u_direct",
    "predicted_count",
    "star_identity_check",
    "zeta_series",
    "series_from_counts",
    "fit_recurrence",
    "assemble_P",
    "P_from_counts",
    "classify_weights",
    "hypergeometric_sum",
]


def _fsum(arr) -> gmpy2.mpc:
    return gmpy2.mpc(gmpy2.fsum([t.real for t in arr]), gmpy2.fsum([t.imag for t in arr]))


@dataclass(frozen=True)
class SpectralPiece:
    j: int
    s: tuple
    t_ij: tuple
    t: int
    delta: int
    upper: tuple          # full parameter list rho^{t_j}[phi_alpha], level 1 indices
    lower: tuple          # concatenated rho^{t_ij}[phi_{alpha_i}]
    reduced: ParamList    # level 1
    common: tuple
    eps_pairs: int        # number of trivial pairs removed by the reduction
    x: int                # C * lambda^-alpha as an F_q code
    lam: int
    weight: int           # audit value #{i : s_ij != 0} + 1 - delta
    spec: FamilySpec = field(repr=False, compare=False)

    @property
    def arity(self) -> int:
        return self.reduced.arity


def build_pieces(spec: FamilySpec, lam: int) -> list[SpectralPiece]:
    """One piece per coset of ``Ker(A' mod q-1)`` modulo the alpha line."""
    ctx = spec.ctx
    lam = int(lam)
    if lam == 0:
        raise AssumptionViolation("lambda must be nonzero")
    al = spec.alpha
    if any(a % spec.p == 0 for a in al.alphas + (al.alpha_total,)):
        raise AssumptionViolation(f"p={spec.p} divides some alpha")
    C = compute_C(spec)
    lam_a = int(ctx.power(lam, al.alpha_total))
    if lam_a == C:
        raise AssumptionViolation("lambda^alpha = C: the fibre is singular")
    reps = intlin.kernel_reps(spec.A, spec.q, al)
    x = int(ctx.mul(C, ctx.inv(lam_a)))
    pieces = []
    for j, (s, tij, t, delta) in enumerate(zip(reps.s, reps.t_ij, reps.t, reps.delta)):
        upper = tuple(bracket(ctx, t, al.alpha_total))
        lower = tuple(k for ti, ai in zip(tij, al.alphas) for k in bracket(ctx, ti, ai))
        red, common = reduce_params(ParamList(upper, lower, ctx))
        weight = sum(1 for v in s if v) + 1 - delta
        pieces.append(
            SpectralPiece(
                j=j, s=tuple(s), t_ij=tuple(tij), t=t, delta=delta, upper=upper, lower=lower,
                reduced=red, common=common, eps_pairs=common.count(0), x=x, lam=lam,
                weight=weight, spec=spec,
            )
        )
    return pieces


def _gamma_at(piece: SpectralPiece, ctx: FieldCtx) -> gmpy2.mpc:
    """``(-1)^n * prefactor * Gamma`` evaluated from scratch on ``ctx``."""
    ensure_context()
    spec = piece.spec
    base = spec.ctx
    al = spec.alpha
    N = ctx.order
    L = ctx.lift_factor
    G = gauss_table(ctx)
    W = roots_of_unity(N)

    def ch(k_level1, code_base):
        # rho^k o Norm evaluated at an F_q element, on the level of ctx
        return W[(k_level1 * L * ctx.dlog(ctx.from_base(code_base))) % N]

    val = mpc((-1) ** spec.n)
    minus_lam = int(base.neg(piece.lam))
    for sij, ci in zip(piece.s, spec.c):
        val *= ch(sij, ci)
    val *= ch(-sum(piece.s), minus_lam)
    for tij, ai in zip(piece.t_ij, al.alphas):
        inv_pow = int(base.inv(base.power(_const(base, ai), ai)))
        val *= ch(tij, inv_pow)
        val *= G[(-tij * L) % N]
        step = N // ai
        for b in range(1, ai):
            val *= G[(-tij * L + b * step) % N] / G[b * step]
    a = al.alpha_total
    val *= ch(piece.t, int(base.power(_const(base, a), a)))
    val *= G[(piece.t * L) % N]
    step = N // a
    for b in range(1, a):
        val *= G[(piece.t * L + b * step) % N] / G[b * step]
    return val


def gamma_value(piece: SpectralPiece, r: int = 1) -> gmpy2.mpc:
    """``gamma(j)_r`` via Davenport-Hasse lifting: ``gamma(j)_1 ** r``."""
    ensure_context()
    g1 = _gamma_cache(piece)
    return g1**r


_gcache: dict = {}


def _gamma_cache(piece):
    key = (piece.spec, piece.lam, piece.j, get_precision())
    if key not in _gcache:
        _gcache[key] = _gamma_at(piece, piece.spec.ctx)
    return _gcache[key]


def gamma_direct(piece: SpectralPiece, r: int) -> gmpy2.mpc:
    """``gamma(j)_r`` computed directly with level-r Gauss sums (no lifting)."""
    spec = piece.spec
    return _gamma_at(piece, build_field(spec.p, spec.f, r))


def F_value(piece: SpectralPiece, r: int) -> gmpy2.mpc:
    """``Q^{e-1} * tghf(reduced parameters at level r; C lambda^-alpha)``."""
    ensure_context()
    spec = piece.spec
    ctx = build_field(spec.p, spec.f, r)
    params = piece.reduced if r == 1 else piece.reduced.lift(r)
    x = int(ctx.from_base(piece.x))
    val = tghf(params, x).value
    return val * gmpy2.mpfr(ctx.Q) ** (piece.eps_pairs - 1)


def eval_piece(piece: SpectralPiece, r: int) -> gmpy2.mpc:
    """``gamma(j)_r * F(j)_r``."""
    return gamma_value(piece, r) * F_value(piece, r)


def hypergeometric_sum(pieces, r: int) -> gmpy2.mpc:
    """``sum_j gamma(j)_r F(j)_r``."""
    ensure_context()
    return sum((eval_piece(pc, r) for pc in pieces), mpc(0))


@dataclass(frozen=True)
class UData:
    """``u_r = sum w * beta**r`` over the recorded terms, together with D."""

    terms: tuple      # (w, beta, J, i)
    D: int
    n: int
    q: int

    def value(self, r: int) -> gmpy2.mpc:
        ensure_context()
        return sum((w * b**r for w, b, _, _ in self.terms), mpc(0))


def compute_u(spec: FamilySpec) -> UData:
    """Decompose ``u_r`` into geometric terms from level-1 Gauss sums.

    The inner kernel is taken for each J-restricted matrix; level-r kernels are
    the level-1 ones scaled by ``(q^r-1)/(q-1)``, which needs the divisor
    condition on those matrices.
    """
    ensure_context()
    A = spec.A
    n = spec.n
    n1 = n + 1
    q = spec.q
    ctx = spec.ctx
    N = ctx.order
    G = gauss_table(ctx)
    W = roots_of_unity(N)
    rep = intlin.check_asm2(A, q)
    if not rep.ok:
        raise AssumptionViolation(f"divisor condition fails for q={q}: {[e.J for e in rep.failures]}")
    terms = []
    for t in range(1, n1):
        if 2 * t < n1:
            continue
        for J in itertools.combinations(range(n1), t):
            cols = intlin.columns_inside(A, J)
            s = len(cols)
            if s == 0:
                if 2 * t == n1:
                    continue  # accounted for by D
                kernel = [()]
            else:
                M = [[A[k][i] for i in cols] for k in J] + [[1] * s]
                kernel = [tuple(int(v) for v in row) for row in intlin.kernel_mod(M, N)]
            for kk in kernel:
                nontriv = sum(1 for v in kk if v % N)
                for i in range(0, t - s + 1):
                    if nontriv != n - 2 * i + 1:
                        continue
                    w = math.comb(t - s, i) * (-1) ** (t - s - i + s)
                    beta = mpc(gmpy2.mpq(1, q) if i == 0 else q ** (i - 1))
                    for kj, ci in zip(kk, cols):
                        beta *= -G[(-kj) % N] * W[(kj * ctx.dlog(spec.c[ci])) % N]
                    terms.append((w, beta, J, i))
    return UData(terms=tuple(terms), D=intlin.compute_D(A), n=n, q=q)


def compute_u_direct(spec: FamilySpec, r: int) -> gmpy2.mpc:
    """``u_r`` summed with level-r Gauss sums and level-r kernels (no lifting)."""
    ensure_context()
    A = spec.A
    n = spec.n
    n1 = n + 1
    ctx = build_field(spec.p, spec.f, r)
    N = ctx.order
    Q = ctx.Q
    G = gauss_table(ctx)
    W = roots_of_unity(N)
    total = mpc(0)
    for t in range(1, n1):
        if 2 * t < n1:
            continue
        for J in itertools.combinations(range(n1), t):
            cols = intlin.columns_inside(A, J)
            s = len(cols)
            if s == 0:
                if 2 * t == n1:
                    continue
                kernel = [()]
            else:
                M = [[A[k][i] for i in cols] for k in J] + [[1] * s]
                kernel = [tuple(int(v) for v in row) for row in intlin.kernel_mod(M, N)]
            for kk in kernel:
                nontriv = sum(1 for v in kk if v % N)
                for i in range(0, t - s + 1):
                    if nontriv != n - 2 * i + 1:
                        continue
                    term = mpc(math.comb(t - s, i) * (-1) ** (t - s - i)) * gmpy2.mpfr(Q) ** (i - 1)
                    for kj, ci in zip(kk, cols):
                        term *= G[(-kj) % N] * W[(kj * ctx.dlog(ctx.from_base(spec.c[ci]))) % N]
                    total += term
    return total


def predicted_count(pieces, u: UData, r: int) -> int:
    """The point count predicted by the hypergeometric decomposition, rounded with a gap check."""
    ensure_context()
    spec = pieces[0].spec
    n = spec.n
    Q = spec.q**r
    val = mpc(sum(Q**i for i in range(n)))
    val += u.value(r)
    if u.D:
        val += u.D * gmpy2.mpfr(Q) ** gmpy2.mpq(n - 1, 2)
    val += (-1) ** n * hypergeometric_sum(pieces, r)
    return round_with_gap(val)


def star_identity_check(spec: FamilySpec, lam: int, r: int = 1) -> gmpy2.mpc:
    """``|character sum over Ker - (-1)^n (Q-1) sum_j gamma(j)_r tghf(full params)|``.

    Both sides are computed independently; the identity is exact.
    """
    ensure_context()
    pieces = build_pieces(spec, lam)
    ctx = build_field(spec.p, spec.f, r)
    N = ctx.order
    L = ctx.lift_factor
    G = gauss_table(ctx)
    W = roots_of_unity(N)
    al = np.array(spec.alpha.alphas, dtype=np.int64)
    a_tot = spec.alpha.alpha_total
    a = np.arange(N, dtype=np.int64)
    coeff_logs = [ctx.dlog(ctx.from_base(c)) for c in spec.c]
    mlam_log = ctx.dlog(ctx.from_base(int(spec.ctx.neg(lam))))
    lhs = mpc(0)
    rhs = mpc(0)
    x_r = int(ctx.from_base(pieces[0].x))
    for pc in pieces:
        s = np.array(pc.s, dtype=np.int64) * L
        acc = None
        for i in range(len(s)):
            k = (s[i] + a * al[i]) % N
            term = G[(-k) % N] * W[(k * coeff_logs[i]) % N]
            acc = term if acc is None else acc * term
        ksum = (int(s.sum()) + a * a_tot) % N
        acc = acc * G[ksum] * W[((-ksum) * mlam_log) % N]
        lhs += _fsum(acc)
        full = ParamList(pc.upper, pc.lower, spec.ctx)
        full = full if r == 1 else full.lift(r)
        rhs += gamma_direct(pc, r) * tghf(full, x_r).value
    rhs *= (-1) ** spec.n * (ctx.Q - 1)
    return abs(lhs - rhs)


# --- zeta functions ---------------------------------------------------------------


@dataclass(frozen=True)
class ZetaPoly:
    coeffs: tuple           # c_0 = 1, c_1, ..., c_deg
    degree: int

    def reciprocal_roots(self) -> list:
        if self.degree == 0:
            return []
        mpmath.mp.prec = get_precision()
        poly = [mpmath.mpc(complex(1))] + [_to_mp(c) for c in self.coeffs[1 : self.degree + 1]]
        return list(mpmath.polyroots(poly, maxsteps=400, extraprec=2 * get_precision()))

    def integer_coeffs(self) -> tuple:
        return tuple(round_with_gap(c) for c in self.coeffs)


def _to_mp(z):
    z = gmpy2.mpc(z)
    return mpmath.mpc(mpmath.mpf(str(z.real)), mpmath.mpf(str(z.imag)))


def series_from_counts(values, length: int | None = None) -> list:
    """Coefficients of ``exp(-sum_r f(r) T^r / r)`` up to ``T^len(values)``."""
    ensure_context()
    R = len(values) if length is None else length
    z = [mpc(1)]
    for k in range(1, R + 1):
        acc = mpc(0)
        for i in range(1, k + 1):
            acc += values[i - 1] * z[k - i]
        z.append(-acc / k)
    return z


def _series_mul(a, b, R):
    out = [mpc(0)] * (R + 1)
    for i, x in enumerate(a[: R + 1]):
        if x == 0:
            continue
        for j, y in enumerate(b[: R + 1 - i]):
            out[i + j] += x * y
    return out


def _trim_degree(z, rel_tol=1e-20):
    scale = max(abs(c) for c in z)
    cut = scale * rel_tol if scale > 1 else rel_tol
    deg = 0
    for k, c in enumerate(z):
        if abs(c) > cut:
            deg = k
    return deg


def zeta_series(values, rel_tol: float = 1e-20, min_tail: int = 2) -> ZetaPoly:
    """``zeta(f)`` for a finite horizon of values, recognised as a polynomial.

    The degree is the last coefficient above tolerance; at least ``min_tail``
    vanishing coefficients past it are required, otherwise the horizon does
    not certify a polynomial and DegreeUndetermined is raised.
    """
    z = series_from_counts(values)
    deg = _trim_degree(z, rel_tol)
    if len(z) - 1 - deg < min_tail:
        raise DegreeUndetermined(f"no vanishing tail within horizon {len(values)}")
    rec = fit_recurrence(values, rel_tol)
    if rec is not None and len(rec) - 1 > deg and 2 * (len(rec) - 1) <= len(values):
        raise DegreeUndetermined("recurrence order exceeds the polynomial degree")
    return ZetaPoly(coeffs=tuple(z[: deg + 1]), degree=deg)


def fit_recurrence(values, rel_tol: float = 1e-20):
    """Minimal linear recurrence ``f(r) + a_1 f(r-1) + ... + a_k f(r-k) = 0``.

    Returns ``[1, a_1, ..., a_k]`` for the smallest k whose fit (from the first
    2k values) reproduces every value, or None if no order up to ``len/2`` works.
    """
    mpmath.mp.prec = get_precision()
    f = [_to_mp(v) for v in values]
    R = len(f)
    scale = max([abs(v) for v in f] + [mpmath.mpf(1)])
    tol = scale * rel_tol
    if all(abs(v) <= tol for v in f):
        return [mpmath.mpc(1)]
    for k in range(1, R // 2 + 1):
        M = mpmath.matrix(k, k)
        rhs = mpmath.matrix(k, 1)
        for row in range(k):
            r = k + row  # equation for f(r) using f(r-1..r-k), 0-based
            for col in range(k):
                M[row, col] = f[r - 1 - col]
            rhs[row] = -f[r]
        try:
            sol = mpmath.lu_solve(M, rhs)
        except ZeroDivisionError:
            continue
        coeffs = [mpmath.mpc(1)] + [sol[i] for i in range(k)]
        ok = True
        for r in range(k, R):
            res = f[r] + sum(coeffs[i] * f[r - i] for i in range(1, k + 1))
            if abs(res) > tol:
                ok = False
                break
        if ok and all(mpmath.isfinite(abs(c)) for c in coeffs):
            return coeffs
    return None


def recurrence_roots(coeffs) -> list:
    """Roots of ``x^k + a_1 x^{k-1} + ... + a_k``."""
    mpmath.mp.prec = get_precision()
    if len(coeffs) <= 1:
        return []
    return list(mpmath.polyroots(coeffs, maxsteps=400, extraprec=2 * get_precision()))


@dataclass(frozen=True)
class Factorization:
    P: ZetaPoly
    P_int: tuple
    u_factor: tuple          # series coefficients of zeta((-1)^{n+1} u) up to deg P
    piece_factors: dict      # j -> ZetaPoly of zeta(-gamma F)
    D: int
    horizon: dict


def degree_bound(piece: SpectralPiece) -> int:
    return piece.arity


def assemble_P(spec: FamilySpec, lam: int, R: int | None = None, pieces=None, u: UData | None = None) -> Factorization:
    """``P(T) = zeta((-1)^{n+1} u) * (1 - q^{(n-1)/2} T)^{(-1)^{n+1} D} * prod_j zeta(-gamma(j) F(j))``."""
    ensure_context()
    n = spec.n
    q = spec.q
    if pieces is None:
        pieces = build_pieces(spec, lam)
    if u is None:
        u = compute_u(spec)
    piece_factors = {}
    horizon = {}
    for pc in pieces:
        if pc.arity == 0:
            # F(j)_r vanishes identically since the argument is not 1
            piece_factors[pc.j] = ZetaPoly((mpc(1),), 0)
            horizon[pc.j] = 0
            continue
        Rj = R if R is not None else 2 * degree_bound(pc) + 2
        horizon[pc.j] = Rj
        vals = [-eval_piece(pc, r) for r in range(1, Rj + 1)]
        piece_factors[pc.j] = zeta_series(vals)
    sign = (-1) ** (n + 1)
    deg_guess = sum(f.degree for f in piece_factors.values())
    deg_guess += sum(abs(w) for w, *_ in u.terms) + u.D
    K = max(deg_guess, 1) + 2
    total = [mpc(1)] + [mpc(0)] * K
    for f in piece_factors.values():
        total = _series_mul(total, list(f.coeffs), K)
    # zeta of the u terms: prod (1 - beta T)^{sign * w}
    u_series = series_from_counts([sign * u.value(r) for r in range(1, K + 1)])
    total = _series_mul(total, u_series, K)
    if u.D:
        root = gmpy2.mpfr(q) ** gmpy2.mpq(n - 1, 2)
        d_series = series_from_counts([sign * u.D * root**r for r in range(1, K + 1)])
        total = _series_mul(total, d_series, K)
    deg = _trim_degree(total)
    if deg >= K - 1:
        raise DegreeUndetermined("assembled series does not terminate")
    P = ZetaPoly(tuple(total[: deg + 1]), deg)
    try:
        P_int = P.integer_coeffs()
    except Exception as exc:
        raise IntegralityError(f"P(T) coefficients are not integers: {exc}") from exc
    return Factorization(P=P, P_int=P_int, u_factor=tuple(u_series[: deg + 1]),
                         piece_factors=piece_factors, D=u.D, horizon=horizon)


def P_from_counts(counts, n: int, q: int) -> list:
    """Series of ``zeta((-1)^{n+1} E)`` from raw counts ``#X(F_{q^r})``, r = 1..len(counts)."""
    sign = (-1) ** (n + 1)
    E = [mpc(sign * (c - sum((q**r) ** i for i in range(n)))) for r, c in enumerate(counts, start=1)]
    return series_from_counts(E)


def classify_weights(poly: ZetaPoly, q: int, rel_tol: float = 1e-6) -> dict:
    """Multiplicity of each weight k with ``|root| = q^{k/2}`` among the reciprocal roots."""
    out: dict = {}
    logq = mpmath.log(q)
    for root in poly.reciprocal_roots():
        mag = abs(root)
        if mag == 0:
            raise UnclassifiableRoot("zero reciprocal root")
        k = int(mpmath.nint(2 * mpmath.log(mag) / logq))
        target = mpmath.mpf(q) ** (mpmath.mpf(k) / 2)
        if abs(mag - target) > rel_tol * target:
            raise UnclassifiableRoot(f"|root| = {mag} is not a half-integral power of {q}")
        out[k] = out.get(k, 0) + 1
    return out
