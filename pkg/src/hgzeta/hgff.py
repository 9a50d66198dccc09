"""Hypergeometric functions over F_{q^r} built from Gauss-sum ratios.

All parameters are stored as character indices at one field level.  The
normalisation is the ratio form for every parameter::

    tghf(U; L; x) = 1/(Q-1) * sum_chi  prod_u G(u chi)/G(u)
                                       * prod_l G(conj(l chi))/G(conj(l))
                                       * chi(-1)^{|U|} * chi(x)

so the trivial lower parameter of ``ghf`` contributes ``G(conj chi)/G(eps)``.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import gmpy2
import numpy as np

from .chargauss import (
    CharacterIndex,
    char_values,
    ensure_context,
    eval_char,
    gauss_table,
    mpc,
    roots_of_unity,
)
from .errors import LevelMismatch, ZeroInput
from .ffield import FieldCtx, build_field

__all__ = [
    "ParamList",
    "HgfValue",
    "bracket",
    "tghf",
    "tghf_direct",
    "ghf",
    "reduce_params",
    "summand",
    "cancellation_correction",
    "sheaf_trace",
    "multi_hyper_sides",
]


@dataclass(frozen=True)
class ParamList:
    """Upper and lower parameter multisets as sorted index tuples at one level."""

    upper: tuple
    lower: tuple
    ctx: FieldCtx

    def __post_init__(self):
        N = self.ctx.order
        object.__setattr__(self, "upper", tuple(sorted(int(u) % N for u in self.upper)))
        object.__setattr__(self, "lower", tuple(sorted(int(l) % N for l in self.lower)))

    @classmethod
    def from_chars(cls, upper, lower) -> "ParamList":
        chars = list(upper) + list(lower)
        if not chars:
            raise ValueError("need at least one character to fix the level")
        ctx = chars[0].ctx
        if any(c.ctx is not ctx for c in chars):
            raise LevelMismatch("parameters at different levels")
        return cls(tuple(c.k for c in upper), tuple(c.k for c in lower), ctx)

    @property
    def arity(self) -> int:
        return len(self.upper)

    @property
    def level(self) -> int:
        return self.ctx.r

    def lift(self, r: int) -> "ParamList":
        """Compose every parameter with the norm from ``F_{q^r}``."""
        if self.ctx.r != 1:
            raise LevelMismatch("lifting is defined from the base level")
        up = build_field(self.ctx.p, self.ctx.f, r)
        L = up.lift_factor
        return ParamList(tuple(u * L for u in self.upper), tuple(l * L for l in self.lower), up)

    def is_empty(self) -> bool:
        return not self.upper and not self.lower


@dataclass(frozen=True)
class HgfValue:
    value: gmpy2.mpc
    params: ParamList
    x: int
    reduced: bool = False


def bracket(ctx: FieldCtx, base_k: int, beta: int) -> list[int]:
    """Indices of ``chi[phi_beta] = (chi, chi phi_beta, ..., chi phi_beta^(beta-1))``."""
    N = ctx.order
    if N % beta:
        raise ValueError(f"{beta} does not divide {N}")
    step = N // beta
    return [(base_k + b * step) % N for b in range(beta)]


def _minus_one_log(ctx: FieldCtx) -> int:
    return 0 if ctx.p == 2 else ctx.order // 2


def _summand_array(params: ParamList, x: int) -> np.ndarray:
    """Summand of the character sum for every chi = rho^c, c = 0..N-1."""
    ensure_context()
    ctx = params.ctx
    N = ctx.order
    G = gauss_table(ctx)
    W = roots_of_unity(N)
    cs = np.arange(N, dtype=np.int64)
    lx = ctx.dlog(x)
    sign_log = (_minus_one_log(ctx) * params.arity) % N
    acc = W[(cs * (lx + sign_log)) % N].copy()
    denom = mpc(1)
    for u in params.upper:
        acc = acc * G[(u + cs) % N]
        denom *= G[u]
    for l in params.lower:
        acc = acc * G[(-l - cs) % N]
        denom *= G[(-l) % N]
    return acc / denom


def summand(params: ParamList, x: int, c: int) -> gmpy2.mpc:
    """The single term of the tghf sum at ``chi = rho^c``."""
    ensure_context()
    ctx = params.ctx
    N = ctx.order
    if int(x) == 0:
        return mpc(0)
    G = gauss_table(ctx)
    val = eval_char(CharacterIndex(c, ctx), x)
    val *= roots_of_unity(N)[(c * _minus_one_log(ctx) * params.arity) % N]
    for u in params.upper:
        val *= G[(u + c) % N] / G[u]
    for l in params.lower:
        val *= G[(-l - c) % N] / G[(-l) % N]
    return val


def tghf(params: ParamList, x: int) -> HgfValue:
    """The hypergeometric sum at a field code ``x`` of ``params.ctx``."""
    ensure_context()
    if len(params.upper) != len(params.lower):
        raise ValueError("upper and lower lists must have equal length")
    if int(x) == 0:
        return HgfValue(mpc(0), params, 0)
    terms = _summand_array(params, x)
    total = gmpy2.mpc(gmpy2.fsum([t.real for t in terms]), gmpy2.fsum([t.imag for t in terms]))
    return HgfValue(total / params.ctx.order, params, int(x))


def tghf_direct(params: ParamList, x: int) -> gmpy2.mpc:
    """Independent evaluation: Gauss sums recomputed from the definition, plain double loop."""
    ensure_context()
    ctx = params.ctx
    N = ctx.order
    if int(x) == 0:
        return mpc(0)
    W = roots_of_unity(N)
    Wp = roots_of_unity(ctx.p)
    xs = np.arange(1, ctx.Q)
    th = Wp[ctx.abs_trace[xs]]
    logs = ctx.log[xs]

    cache = {}

    def G(k):
        k %= N
        if k not in cache:
            cache[k] = sum(th * W[(k * logs) % N], mpc(0))
        return cache[k]

    total = mpc(0)
    m1 = _minus_one_log(ctx)
    lx = ctx.dlog(x)
    for c in range(N):
        term = W[(c * (lx + m1 * params.arity)) % N]
        for u in params.upper:
            term = term * G(u + c) / G(u)
        for l in params.lower:
            term = term * G(-l - c) / G(-l)
        total += term
    return total / N


def ghf(upper, lower, x: int, ctx: FieldCtx | None = None) -> HgfValue:
    """``n+1`` upper and ``n`` lower parameters; the trivial character completes the lower list."""
    if ctx is None:
        ctx = (list(upper) + list(lower))[0].ctx
    up = [u.k if isinstance(u, CharacterIndex) else u for u in upper]
    lo = [l.k if isinstance(l, CharacterIndex) else l for l in lower]
    if len(up) != len(lo) + 1:
        raise ValueError("ghf needs one more upper than lower parameter")
    return tghf(ParamList(tuple(up), tuple(lo) + (0,), ctx), x)


def reduce_params(params: ParamList) -> tuple[ParamList, tuple]:
    """Cancel the common multiset; returns the reduced list and the cancelled indices."""
    cu, cl = Counter(params.upper), Counter(params.lower)
    common = cu & cl
    red = ParamList(
        tuple((cu - common).elements()), tuple((cl - common).elements()), params.ctx
    )
    return red, tuple(sorted(common.elements()))


def cancellation_correction(common: int, residual: ParamList, x: int) -> tuple:
    """Correction term for putting one common pair ``common`` back.

    Returns ``(factor, correction)`` with
    ``tghf(residual + common pair) = factor * tghf(residual) + correction``.
    For a nontrivial common character the factor is 1 and the correction is
    ``-(1/Q) * summand(residual, conj(common))``; for the trivial one the
    factor is ``Q`` and the correction is ``-summand(residual, eps)``.
    """
    ensure_context()
    ctx = residual.ctx
    N = ctx.order
    common %= N
    if int(x) == 0:
        return (1 if common else ctx.Q), mpc(0)
    if common:
        return 1, -summand(residual, x, -common) / ctx.Q
    return ctx.Q, -summand(residual, x, 0)


def sheaf_trace(params: ParamList, x: int) -> gmpy2.mpc:
    """``prod G(A_i) G(B_i) * tghf(params, 1/x)``."""
    ensure_context()
    if int(x) == 0:
        raise ZeroInput("the trace is defined on the torus only")
    ctx = params.ctx
    G = gauss_table(ctx)
    pre = mpc(1)
    for k in params.upper + params.lower:
        pre *= G[k]
    return pre * tghf(params, int(ctx.inv(x))).value


def multi_hyper_sides(A_ks, B_k: int, alphas, x: int, ctx: FieldCtx) -> tuple:
    """Both sides of the Gauss-sum multiplication identity that turns a character sum into tghf.

    Left: ``sum_chi prod_i G(conj(A_i chi)^{a_i}) * G((B chi)^a) * chi((-1)^a x)``.
    Right: ``(Q-1) * prod_i A_i(a_i^{-a_i}) * B(a^a) * prod_i {G(conj A_i) prod_b G(conj(A_i) phi_{a_i}^b)/G(phi_{a_i}^b)}
    * G(B) prod_b G(B phi_a^b)/G(phi_a^b) * tghf(B[phi_a]; A_i[phi_{a_i}]; a^a/prod a_i^{a_i} x)``.
    """
    ensure_context()
    N = ctx.order
    p = ctx.p
    alphas = [int(a) for a in alphas]
    al = sum(alphas)
    G = gauss_table(ctx)
    W = roots_of_unity(N)
    cs = np.arange(N, dtype=np.int64)
    sign = ctx.element((-1) ** al)
    lhs_terms = W[(cs * ctx.dlog(ctx.mul(sign, x))) % N].copy()
    for Ak, ai in zip(A_ks, alphas):
        lhs_terms = lhs_terms * G[(-(Ak + cs) * ai) % N]
    lhs_terms = lhs_terms * G[((B_k + cs) * al) % N]
    lhs = gmpy2.mpc(
        gmpy2.fsum([t.real for t in lhs_terms]), gmpy2.fsum([t.imag for t in lhs_terms])
    )

    def const(v):
        return ctx.element(v % p)

    rhs = mpc(N)
    for Ak, ai in zip(A_ks, alphas):
        inv_pow = int(ctx.inv(const(pow(ai, ai, p))))
        rhs *= eval_char(CharacterIndex(Ak, ctx), inv_pow)
        rhs *= G[(-Ak) % N]
        step = N // ai
        for b in range(1, ai):
            rhs *= G[(-Ak + b * step) % N] / G[b * step]
    rhs *= eval_char(CharacterIndex(B_k, ctx), const(pow(al, al, p)))
    rhs *= G[B_k % N]
    step = N // al
    for b in range(1, al):
        rhs *= G[(B_k + b * step) % N] / G[b * step]
    upper = bracket(ctx, B_k, al)
    lower = [k for Ak, ai in zip(A_ks, alphas) for k in bracket(ctx, Ak, ai)]
    scale = const(pow(al, al, p))
    for ai in alphas:
        scale = int(ctx.mul(scale, ctx.inv(const(pow(ai, ai, p)))))
    arg = int(ctx.mul(scale, x))
    rhs *= tghf(ParamList(tuple(upper), tuple(lower), ctx), arg).value
    return lhs, rhs
