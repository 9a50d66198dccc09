"""Multiplicative characters, the additive character theta and Gauss sums.

Values are ``gmpy2.mpc`` numbers at a module-wide working precision
(256 bits unless changed with :func:`set_precision`).  gmpy2 contexts are
thread-local, so every public entry point calls :func:`ensure_context`
before doing arithmetic; worker threads get the right precision for free.

Characters are indices: ``CharacterIndex(k, ctx)`` is ``rho_r**k`` where
``rho_r(gen) = exp(2 pi i / (q^r - 1))``.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from functools import lru_cache

import gmpy2
import numpy as np

from .errors import LevelMismatch
from .ffield import FieldCtx, build_field, prime_factors

AlgValue = gmpy2.mpc

DEFAULT_PRECISION = 256
_precision = DEFAULT_PRECISION
_lock = threading.Lock()

__all__ = [
    "AlgValue",
    "CharacterIndex",
    "DEFAULT_PRECISION",
    "set_precision",
    "get_precision",
    "ensure_context",
    "roots_of_unity",
    "eval_char",
    "char_values",
    "phi",
    "gauss_table",
    "gauss_sum",
    "gauss_sum_direct",
    "dh_lift_check",
    "dh_multiplication",
    "mpc",
    "abs_value",
    "to_complex",
]


def set_precision(bits: int) -> None:
    global _precision
    if bits < 64:
        raise ValueError("precision below 64 bits is not supported")
    _precision = int(bits)
    ensure_context()


def get_precision() -> int:
    return _precision


def ensure_context() -> None:
    ctx = gmpy2.get_context()
    if ctx.precision != _precision:
        ctx.precision = _precision
        ctx.real_prec = _precision
        ctx.imag_prec = _precision


def mpc(x) -> gmpy2.mpc:
    ensure_context()
    if isinstance(x, complex):
        return gmpy2.mpc(x.real, x.imag)
    return gmpy2.mpc(x)


def abs_value(z) -> gmpy2.mpfr:
    ensure_context()
    return gmpy2.sqrt(gmpy2.norm(gmpy2.mpc(z)))


def to_complex(z) -> complex:
    z = gmpy2.mpc(z)
    return complex(float(z.real), float(z.imag))


@lru_cache(maxsize=64)
def _roots(N: int, bits: int) -> np.ndarray:
    ensure_context()
    out = np.empty(N, dtype=object)
    two_pi = 2 * gmpy2.const_pi()
    for j in range(N):
        # exact values on the axes keep real sums exactly real
        if (4 * j) % N == 0:
            out[j] = gmpy2.mpc((1, 0, -1, 0)[4 * j // N], (0, 1, 0, -1)[4 * j // N])
        else:
            ang = two_pi * j / N
            out[j] = gmpy2.mpc(gmpy2.cos(ang), gmpy2.sin(ang))
    out.setflags(write=False)
    return out


def roots_of_unity(N: int) -> np.ndarray:
    """``[exp(2 pi i j / N) for j in range(N)]`` as an object array."""
    ensure_context()
    return _roots(int(N), _precision)


@dataclass(frozen=True)
class CharacterIndex:
    """The character ``rho_r**k`` of ``F_{q^r}^x``."""

    k: int
    ctx: FieldCtx

    def __post_init__(self):
        object.__setattr__(self, "k", int(self.k) % self.ctx.order)

    @property
    def level(self) -> int:
        return self.ctx.r

    @property
    def order(self) -> int:
        """Multiplicative order of the character."""
        return self.ctx.order // math.gcd(self.k, self.ctx.order)

    @property
    def trivial(self) -> bool:
        return self.k == 0

    def conj(self) -> "CharacterIndex":
        return CharacterIndex(-self.k, self.ctx)

    def __mul__(self, other: "CharacterIndex") -> "CharacterIndex":
        if other.ctx is not self.ctx:
            raise LevelMismatch("characters live on different fields")
        return CharacterIndex(self.k + other.k, self.ctx)

    def __pow__(self, e: int) -> "CharacterIndex":
        return CharacterIndex(self.k * e, self.ctx)

    def lift(self, r: int) -> "CharacterIndex":
        """``chi o Norm`` on ``F_{q^{r}}``; only defined from level 1."""
        if self.ctx.r != 1:
            raise LevelMismatch("lifting is defined from the base level")
        up = build_field(self.ctx.p, self.ctx.f, r)
        return CharacterIndex(self.k * up.lift_factor, up)

    def __repr__(self):
        return f"CharacterIndex(k={self.k}, q^r={self.ctx.Q})"


def phi(ctx: FieldCtx, beta: int, b: int = 1) -> CharacterIndex:
    """``phi_beta**b`` where ``phi_beta = rho**((q-1)/beta)``, realised at the level of ``ctx``."""
    if ctx.order % beta:
        raise ValueError(f"{beta} does not divide {ctx.order}")
    return CharacterIndex(b * (ctx.order // beta), ctx)


def char_values(chi: CharacterIndex, xs) -> np.ndarray:
    """Vectorised ``chi(x)`` over field codes; ``chi(0) = 0`` for every chi."""
    ensure_context()
    xs = np.asarray(xs, dtype=np.int64)
    N = chi.ctx.order
    W = roots_of_unity(N)
    idx = (chi.k * chi.ctx.log[xs]) % N
    out = W[idx]
    out = np.where(xs == 0, gmpy2.mpc(0), out)
    return out


def eval_char(chi: CharacterIndex, x, ctx: FieldCtx | None = None) -> gmpy2.mpc:
    if ctx is not None and ctx is not chi.ctx:
        raise LevelMismatch("element and character live on different fields")
    x = int(x)
    if x == 0:
        return mpc(0)
    return roots_of_unity(chi.ctx.order)[(chi.k * chi.ctx.dlog(x)) % chi.ctx.order]


def _theta_table(ctx: FieldCtx) -> np.ndarray:
    """``theta(gen**m) = exp(2 pi i Tr(gen**m)/p)`` for m = 0..order-1."""
    Wp = roots_of_unity(ctx.p)
    return Wp[ctx.abs_trace[ctx.exp]]


def _fft_pow2(X: np.ndarray, W: np.ndarray) -> np.ndarray:
    """Batched radix-2 transform ``out[b,k] = sum_m X[b,m] W[(k m) % M]``, M a power of two."""
    B, M = X.shape
    if M == 1:
        return X.copy()
    even = _fft_pow2(X[:, 0::2], W[0::2])
    odd = _fft_pow2(X[:, 1::2], W[0::2]) * W[: M // 2][None, :]
    return np.concatenate([even + odd, even - odd], axis=1)


def _bluestein(X: np.ndarray, p: int) -> np.ndarray:
    """Batched length-p transform as a chirp convolution through a power-of-two FFT."""
    B = X.shape[0]
    M = 1
    while M < 2 * p - 1:
        M *= 2
    W2p = roots_of_unity(2 * p)
    k = np.arange(p, dtype=np.int64)
    chirp = W2p[(k * k) % (2 * p)]
    a = np.empty((B, M), dtype=object)
    a[...] = gmpy2.mpc(0)
    a[:, :p] = X * chirp[None, :]
    b = np.empty(M, dtype=object)
    b[...] = gmpy2.mpc(0)
    inv_chirp = W2p[(-(k * k)) % (2 * p)]
    b[:p] = inv_chirp
    b[M - p + 1 :] = inv_chirp[1:][::-1]
    WM = roots_of_unity(M)
    fa = _fft_pow2(a, WM)
    fb = _fft_pow2(b.reshape(1, M), WM)[0]
    prod = fa * fb[None, :]
    # inverse transform: conjugate trick
    conj = np.vectorize(lambda z: z.conjugate(), otypes=[object])
    conv = conj(_fft_pow2(conj(prod), WM)) / M
    return conv[:, :p] * chirp[None, :]


BLUESTEIN_MIN = 64


def _dft(X: np.ndarray, radices: list[int], W: np.ndarray) -> np.ndarray:
    """Batched ``out[b,k] = sum_m X[b,m] W[(k m) % N]`` along axis 1, mixed radix.

    Radices are consumed from the front; a single remaining large prime is
    handed to Bluestein's algorithm.
    """
    B, N = X.shape
    if N == 1:
        return X.copy()
    if len(radices) == 1 and N >= BLUESTEIN_MIN:
        return _bluestein(X, N)
    p1, rest = radices[0], radices[1:]
    M = N // p1
    sub = np.concatenate([X[:, a::p1] for a in range(p1)], axis=0)  # (p1*B, M)
    Y = _dft(sub, rest, W[::p1]).reshape(p1, B, M)
    k = np.arange(N)
    out = np.empty((B, N), dtype=object)
    out[...] = gmpy2.mpc(0)
    for a in range(p1):
        tw = W[(a * k) % N]
        out = out + np.tile(Y[a], (1, p1)) * tw[None, :]
    return out


@lru_cache(maxsize=32)
def _gauss_table(ctx: FieldCtx, bits: int) -> np.ndarray:
    ensure_context()
    N = ctx.order
    h = _theta_table(ctx)
    radices = []
    for ell in prime_factors(N):
        e = N
        while e % ell == 0:
            radices.append(ell)
            e //= ell
    radices.sort()
    G = _dft(h.reshape(1, N), radices, roots_of_unity(N))[0]
    G.setflags(write=False)
    return G


def gauss_table(ctx: FieldCtx) -> np.ndarray:
    """``G[k] = G(rho_r**k)`` for every k, built once per field and precision."""
    ensure_context()
    with _lock:
        return _gauss_table(ctx, _precision)


def gauss_sum(chi: CharacterIndex) -> gmpy2.mpc:
    """``sum_{x != 0} theta_r(x) chi(x)`` with ``theta_r = theta o Tr``."""
    return gauss_table(chi.ctx)[chi.k]


def gauss_sum_direct(chi: CharacterIndex) -> gmpy2.mpc:
    """Same sum computed term by term, without the memo; an oracle for tests."""
    ensure_context()
    ctx = chi.ctx
    h = _theta_table(ctx)
    W = roots_of_unity(ctx.order)
    m = np.arange(ctx.order)
    terms = h * W[(chi.k * m) % ctx.order]
    return gmpy2.mpc(gmpy2.fsum([t.real for t in terms]), gmpy2.fsum([t.imag for t in terms]))


def dh_lift_check(chi: CharacterIndex, r: int) -> tuple:
    """``(-G(chi_r), (-G(chi))**r)``; the two agree by Davenport-Hasse lifting."""
    ensure_context()
    lifted = chi.lift(r)
    return -gauss_sum(lifted), (-gauss_sum(chi)) ** r


def dh_multiplication(chi: CharacterIndex, beta: int) -> tuple:
    """``(G(chi**beta), product form)`` for ``beta | q^r - 1``.

    Product form: ``chi(beta**beta) * prod_{b<beta} G(chi phi_beta^b) / prod_{0<b<beta} G(phi_beta^b)``.
    """
    ensure_context()
    ctx = chi.ctx
    if ctx.order % beta:
        raise ValueError(f"{beta} does not divide {ctx.order}")
    lhs = gauss_sum(chi**beta)
    bb = ctx.element(pow(beta, beta, ctx.p))
    if bb == 0:
        raise ValueError("beta must be prime to p")
    rhs = eval_char(chi, bb)
    for b in range(beta):
        rhs *= gauss_sum(chi * phi(ctx, beta, b))
    for b in range(1, beta):
        rhs /= gauss_sum(phi(ctx, beta, b))
    return lhs, rhs
