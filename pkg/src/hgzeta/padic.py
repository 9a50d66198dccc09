"""p-adic side: W(F_q)/p^m, the series F(x), unit roots and formal-group coefficients.

W(F_q)/p^m is realised as (Z/p^m)[x]/(h~) where h~ is the integer lift of
the modulus used by :mod:`ffield` (digits 0..p-1).  Frobenius sends x to the
root of h~ that reduces to x^p, found by Newton iteration.

The series

    F(x) = sum_k (alpha k)! / prod_i (alpha_i k)!  *  (prod_i c~_i^{alpha_i} * x)^k

is the hypergeometric series with upper parameters 1/alpha, ..., (alpha-1)/alpha, 1
and the lower ones grouped by alpha_i, written with the Pochhammer products
already collapsed into factorials.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import AssumptionViolation, PrecisionLoss, StabilizationError
from .family import FamilySpec
from .ffield import FieldCtx, build_field

DEFAULT_PADIC_PRECISION = 6

__all__ = [
    "PadicRing",
    "PadicElem",
    "padic_ring",
    "F_coefficients",
    "F_coefficient_pochhammer",
    "eval_F_trunc",
    "F11_mod_p",
    "fgl_log_coefficient",
    "unit_root",
    "UnitRootResult",
    "height_one_test",
    "unit_root_count",
    "unit_root_of_polynomial",
    "DEFAULT_PADIC_PRECISION",
]


def _vp(n: int, p: int) -> int:
    if n == 0:
        return 10**9
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@dataclass(frozen=True, eq=False)
class PadicRing:
    p: int
    f: int
    m: int
    modulus: tuple        # monic lift of the F_q modulus, low degree first
    frob_x: tuple         # sigma(x) as a coefficient vector

    @property
    def pm(self) -> int:
        return self.p**self.m

    def elem(self, coeffs) -> "PadicElem":
        c = [int(v) % self.pm for v in coeffs] + [0] * (self.f - len(coeffs))
        return PadicElem(tuple(c[: self.f]), self)

    def const(self, v) -> "PadicElem":
        if isinstance(v, Fraction):
            if v.denominator % self.p == 0:
                raise PrecisionLoss(f"denominator of {v} is divisible by p")
            v = v.numerator * pow(v.denominator, -1, self.pm)
        return self.elem([int(v)])

    def zero(self) -> "PadicElem":
        return self.elem([0])

    def one(self) -> "PadicElem":
        return self.elem([1])

    def teichmuller(self, code: int) -> "PadicElem":
        """The lift of an F_q element (given by its code) with w^q = w."""
        ctx = build_field(self.p, self.f, 1)
        digits = [(code // self.p**i) % self.p for i in range(self.f)]
        w = self.elem(digits)
        if code == 0:
            return w
        q = self.p**self.f
        for _ in range(self.m + 1):
            w = w**q
        return w

    def _mulpoly(self, a, b):
        f, pm = self.f, self.pm
        out = [0] * (2 * f - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        h = self.modulus
        for k in range(len(out) - 1, f - 1, -1):
            c = out[k] % pm
            if c:
                for i in range(f):
                    out[k - f + i] -= c * h[i]
            out[k] = 0
        return tuple(v % pm for v in out[:f])


@lru_cache(maxsize=None)
def padic_ring(p: int, f: int = 1, m: int = DEFAULT_PADIC_PRECISION) -> PadicRing:
    ctx = build_field(p, f, 1)
    h = tuple(int(v) for v in ctx.modulus)  # monic, length f+1
    if f == 1:
        return PadicRing(p, 1, m, h, (1,))
    tmp = PadicRing(p, f, m, h, tuple([0, 1] + [0] * (f - 2)))
    x = tmp.elem([0, 1])
    y = x**p

    def h_at(z):
        acc = tmp.zero()
        for c in reversed(h):
            acc = acc * z + tmp.const(c)
        return acc

    def dh_at(z):
        acc = tmp.zero()
        for k in range(len(h) - 1, 0, -1):
            acc = acc * z + tmp.const(k * h[k])
        return acc

    for _ in range(m + 2):
        y = y - h_at(y) * dh_at(y).inverse()
    return PadicRing(p, f, m, h, y.coeffs)


@dataclass(frozen=True)
class PadicElem:
    coeffs: tuple
    ring: PadicRing

    def _wrap(self, other):
        if isinstance(other, PadicElem):
            return other
        return self.ring.const(other)

    def __add__(self, other):
        o = self._wrap(other)
        return self.ring.elem([a + b for a, b in zip(self.coeffs, o.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return self.ring.elem([-a for a in self.coeffs])

    def __sub__(self, other):
        return self + (-self._wrap(other))

    def __rsub__(self, other):
        return self._wrap(other) - self

    def __mul__(self, other):
        o = self._wrap(other)
        if self.ring.f == 1:
            return self.ring.elem([self.coeffs[0] * o.coeffs[0]])
        return PadicElem(self.ring._mulpoly(self.coeffs, o.coeffs), self.ring)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result, base = self.ring.one(), self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __truediv__(self, other):
        return self * self._wrap(other).inverse()

    def __eq__(self, other):
        if not isinstance(other, PadicElem):
            other = self.ring.const(other)
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def valuation(self) -> int:
        return min(_vp(c, self.ring.p) for c in self.coeffs)

    def is_unit(self) -> bool:
        return self.valuation() == 0

    def reduce(self) -> int:
        """Residue in F_q as an element code."""
        p = self.ring.p
        return sum((c % p) * p**i for i, c in enumerate(self.coeffs))

    def inverse(self) -> "PadicElem":
        if not self.is_unit():
            raise ZeroDivisionError("not a p-adic unit")
        ring = self.ring
        ctx = build_field(ring.p, ring.f, 1)
        inv_code = int(ctx.inv(self.reduce()))
        y = ring.elem([(inv_code // ring.p**i) % ring.p for i in range(ring.f)])
        for _ in range(ring.m.bit_length() + 1):
            y = y * (2 - self * y)
        return y

    def frobenius(self, times: int = 1) -> "PadicElem":
        out = self
        ring = self.ring
        if ring.f == 1:
            return self
        sx = ring.elem(ring.frob_x)
        for _ in range(times % ring.f if ring.f else 0):
            acc = ring.zero()
            for c in reversed(out.coeffs):
                acc = acc * sx + ring.const(c)
            out = acc
        return out

    def mod_pk(self, k: int) -> tuple:
        return tuple(c % self.ring.p**k for c in self.coeffs)

    def __repr__(self):
        if self.ring.f == 1:
            return f"PadicElem({self.coeffs[0]} mod {self.ring.p}^{self.ring.m})"
        return f"PadicElem({self.coeffs} mod {self.ring.p}^{self.ring.m})"


# --- the series F ------------------------------------------------------------------


def F_coefficients(alphas, K: int, p: int, m: int) -> np.ndarray:
    """Cached front end of :func:`_F_coefficients`; the result must not be modified."""
    return _F_coefficients(tuple(int(a) for a in alphas), int(K), int(p), int(m))


@lru_cache(maxsize=16)
def _F_coefficients(alphas, K: int, p: int, m: int) -> np.ndarray:
    """``(alpha k)! / prod_i (alpha_i k)!  mod p^m`` for k < K, tracking p-adic valuations.

    Built from the ratio of consecutive terms, ``prod_{b<=alpha}(alpha k+b) /
    prod_i prod_{b<=alpha_i}(alpha_i k+b)``, whose factors are split into a
    power of p and a unit before reduction.
    """
    alphas = [int(a) for a in alphas]
    a_tot = sum(alphas)
    pm = p**m
    out = np.zeros(K, dtype=object)
    unit, val = 1, 0
    for k in range(K):
        out[k] = (unit * pow(p, val, pm)) % pm if val < m else 0
        for b in range(1, a_tot + 1):
            x = a_tot * k + b
            while x % p == 0:
                x //= p
                val += 1
            unit = unit * x % pm
        for ai in alphas:
            for b in range(1, ai + 1):
                x = ai * k + b
                while x % p == 0:
                    x //= p
                    val -= 1
                unit = unit * pow(x, -1, pm) % pm
        if val < 0:
            raise PrecisionLoss("negative valuation: the coefficients are not p-integral")
    return out


def F_coefficient_pochhammer(alphas, k: int) -> Fraction:
    """k-th coefficient from the displayed Pochhammer parameters, as an exact rational.

    ``prod_b (b/alpha)_k / (prod_i prod_{b<=alpha_i} (b/alpha_i)_k)`` times the
    ``(alpha^alpha / prod alpha_i^alpha_i)^k`` carried by C~; equals the factorial form.
    """
    a_tot = sum(alphas)

    def poch(a: Fraction, k: int) -> Fraction:
        out = Fraction(1)
        for j in range(k):
            out *= a + j
        return out

    num = Fraction(1)
    for b in range(1, a_tot + 1):
        num *= poch(Fraction(b, a_tot), k)
    den = Fraction(1)
    for ai in alphas:
        for b in range(1, ai + 1):
            den *= poch(Fraction(b, ai), k)
    scale = Fraction(a_tot**a_tot, math.prod(ai**ai for ai in alphas)) ** k
    return num / den * scale


def _c_alpha_code(spec: FamilySpec) -> int:
    ctx = spec.ctx
    val = 1
    for ci, ai in zip(spec.c, spec.alpha.alphas):
        val = int(ctx.mul(val, ctx.power(ci, ai)))
    return val


def _teich_power_sum(coeffs: np.ndarray, w: PadicElem, order: int) -> PadicElem:
    """``sum_k coeffs[k] * w^k`` for a Teichmuller w of multiplicative order dividing ``order``."""
    ring = w.ring
    pm = ring.pm
    K = len(coeffs)
    if pm < 2**31 and K < 2**31:
        small = np.asarray(coeffs, dtype=np.int64) % pm
        acc64 = np.zeros(order, dtype=np.int64)
        np.add.at(acc64, np.arange(K, dtype=np.int64) % order, small)
        buckets = [int(v) % pm for v in acc64]
    else:
        buckets = [0] * order
        for k in range(K):
            c = coeffs[k]
            if c:
                buckets[k % order] = (buckets[k % order] + int(c)) % pm
    acc = ring.zero()
    wk = ring.one()
    for e in range(order):
        if buckets[e]:
            acc = acc + wk * buckets[e]
        wk = wk * w
    return acc


def eval_F_trunc(spec: FamilySpec, x, s: int, mult: int = 1, m: int = DEFAULT_PADIC_PRECISION) -> PadicElem:
    """``F_{mult,s}(x)``: the series truncated to degree ``mult * p^s - 1``.

    ``x`` is either a PadicElem or an F_q code; a code is replaced by its
    Teichmuller lift, which lets the sum be folded modulo q-1.
    """
    p, f = spec.p, spec.f
    ring = padic_ring(p, f, m)
    K = mult * p**s
    coeffs = F_coefficients(spec.alpha.alphas, K, p, m)
    cpow = ring.teichmuller(_c_alpha_code(spec))
    if isinstance(x, PadicElem):
        if x.ring is not ring:
            x = ring.elem(x.coeffs)
        y = cpow * x
        acc = ring.zero()
        for k in range(K - 1, -1, -1):
            acc = acc * y + int(coeffs[k])
        return acc
    w = ring.teichmuller(int(spec.ctx.mul(_c_alpha_code(spec), int(x))))
    return _teich_power_sum(coeffs, w, p**f - 1)


def F11_mod_p(spec: FamilySpec, x_code: int) -> int:
    """``F_{1,1}(x)`` reduced to F_q, for an F_q code x."""
    ctx = spec.ctx
    p = spec.p
    coeffs = F_coefficients(spec.alpha.alphas, p, p, 1)
    y = int(ctx.mul(_c_alpha_code(spec), int(x_code)))
    acc = 0
    for k in range(p - 1, -1, -1):
        acc = int(ctx.add(ctx.mul(acc, y), ctx.element(int(coeffs[k]))))
    return acc


@dataclass(frozen=True)
class UnitRootResult:
    value: PadicElem | None
    f_value: PadicElem | None
    F11: int
    precision: int

    @property
    def ordinary(self) -> bool:
        return self.value is not None


def _f_at(spec: FamilySpec, x_code: int, level: int, top: int | None = None) -> PadicElem:
    """``F_{1,level}(t) / sigma(F_{1,level-1}(t))`` at the Teichmuller point t, mod p^level.

    Coefficients are taken from the (cached) table at precision ``top >= level``.
    """
    p, f = spec.p, spec.f
    top = level if top is None else top
    ring = padic_ring(p, f, level)
    coeffs = F_coefficients(spec.alpha.alphas, p**top, p, top)[: p**level]
    w = ring.teichmuller(int(spec.ctx.mul(_c_alpha_code(spec), int(x_code))))
    num = _teich_power_sum(coeffs, w, p**f - 1)
    # sigma acts on the integer coefficients trivially and on w by w -> w^p
    den = _teich_power_sum(coeffs[: p ** (level - 1)], w**p, p**f - 1)
    return num / den


def unit_root(spec: FamilySpec, lam: int, m: int = DEFAULT_PADIC_PRECISION) -> UnitRootResult:
    """The unit root of X_lambda modulo p^m, or None when F_{1,1}(lambda^-alpha) = 0 in F_q.

    f(t) is taken from truncation levels m and m+1, which must agree mod p^m.
    """
    al = spec.alpha
    if any(a % spec.p == 0 for a in al.alphas + (al.alpha_total,)):
        raise AssumptionViolation("p divides some alpha")
    ctx = spec.ctx
    lam = int(lam)
    if lam == 0:
        raise AssumptionViolation("lambda must be nonzero")
    x_code = int(ctx.inv(ctx.power(lam, al.alpha_total)))
    h = F11_mod_p(spec, x_code)
    if h == 0:
        return UnitRootResult(None, None, 0, m)
    f_m = _f_at(spec, x_code, m, top=m + 1)
    f_next = _f_at(spec, x_code, m + 1)
    if f_m.mod_pk(m) != f_next.mod_pk(m):
        raise StabilizationError("truncation ratios disagree modulo p^m")
    ring = padic_ring(spec.p, spec.f, m)
    fval = ring.elem(f_next.coeffs)
    value = ring.one()
    for i in range(spec.f):
        value = value * fval.frobenius(i)
    return UnitRootResult(value, fval, h, m)


# --- formal group logarithm ----------------------------------------------------------


def fgl_log_coefficient(spec: FamilySpec, Lam: PadicElem, mdeg: int) -> tuple[PadicElem, PadicElem]:
    """Coefficient of ``tau^{m+1}/(m+1)`` two ways: (multinomial sum, terminating hypergeometric form).

    ``c~_i`` are Teichmuller lifts and ``C~ = alpha^alpha prod c~_i^{alpha_i} / alpha_i^{alpha_i}``.
    """
    ring = Lam.ring
    al = spec.alpha
    alphas = al.alphas
    a_tot = al.alpha_total
    ct = [ring.teichmuller(c) for c in spec.c]
    mL = -Lam
    # (a) multinomial sum
    lhs = ring.zero()
    k = 0
    while k * a_tot <= mdeg:
        coef = math.factorial(mdeg) // (
            math.prod(math.factorial(k * ai) for ai in alphas) * math.factorial(mdeg - k * a_tot)
        )
        term = ring.const(coef)
        for c, ai in zip(ct, alphas):
            term = term * c ** (k * ai)
        lhs = lhs + term * mL ** (mdeg - k * a_tot)
        k += 1
    # (b) hypergeometric form (-Lam)^m * sum_k poch(upper)/poch(lower)/k!-style * (C~ Lam^-alpha)^k
    Ct = ring.const(Fraction(a_tot**a_tot, math.prod(ai**ai for ai in alphas)))
    for c, ai in zip(ct, alphas):
        Ct = Ct * c**ai
    z = Ct * Lam ** (-a_tot)
    rhs = ring.zero()
    coef = Fraction(1)
    zk = ring.one()
    for k in range(mdeg // a_tot + 2):
        rhs = rhs + ring.const(coef) * zk
        # ratio of consecutive coefficients of the hypergeometric sum
        num = Fraction(1)
        for b in range(a_tot):
            num *= Fraction(-mdeg + b, a_tot) + k
        den = Fraction(1)
        for ai in alphas:
            for b in range(1, ai + 1):
                den *= Fraction(b, ai) + k
        coef = coef * num / den
        zk = zk * z
    rhs = rhs * mL**mdeg
    return lhs, rhs


def height_one_test(a1, p: int | None = None) -> bool:
    """True iff the coefficient a_1 of the split logarithm is a p-adic unit."""
    if isinstance(a1, PadicElem):
        return a1.is_unit()
    return int(a1) % p != 0


def unit_root_count(P_coeffs, p: int) -> int:
    """Number of p-adic unit reciprocal roots of an integer polynomial with P(0) = 1."""
    nz = [i for i, c in enumerate(P_coeffs) if i > 0 and int(c) % p]
    return max(nz) if nz else 0


def unit_root_of_polynomial(P_coeffs, p: int, m: int) -> list[int]:
    """Unit reciprocal roots of P in Z/p^m, Hensel-lifted from simple roots mod p."""
    d = len(P_coeffs) - 1
    rev = [int(c) for c in P_coeffs]  # reciprocal roots are roots of sum c_i x^{d-i}
    pm = p**m

    def ev(x, mod):
        acc = 0
        for c in rev:
            acc = (acc * x + c) % mod
        return acc

    def dev(x, mod):
        acc = 0
        for i, c in enumerate(rev[:-1]):
            acc = (acc * x + (d - i) * c) % mod
        return acc

    roots = []
    for x0 in range(1, p):
        if ev(x0, p) == 0 and dev(x0, p) % p:
            x = x0
            for _ in range(m.bit_length() + 2):
                x = (x - ev(x, pm) * pow(dev(x, pm), -1, pm)) % pm
            roots.append(x)
    return roots
