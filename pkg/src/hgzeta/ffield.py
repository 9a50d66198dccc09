"""Finite fields F_{q^r} as F_p[x]/(h) with full exp/log tables.

An element is an integer code ``sum d_i p^i`` standing for the residue
``sum d_i x^i``; code order is the canonical element order.  Contexts are
immutable and cached, so the same ``(p, f, r)`` always yields the same
modulus, generator and tables.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import CapExceeded, NotPrime

DEFAULT_CAP = 2**24

__all__ = [
    "FieldCtx",
    "build_field",
    "is_prime",
    "prime_factors",
    "trace_norm",
    "DEFAULT_CAP",
]


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for d in (2, 3, 5, 7, 11, 13):
        if n % d == 0:
            return n == d
    return all(n % d for d in range(17, math.isqrt(n) + 1, 2))


def prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# --- dense polynomial helpers over F_p, coefficient lists low degree first ---

def _trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a, h, p):
    a = list(a)
    dh = len(h) - 1
    inv = pow(h[-1], -1, p)
    for k in range(len(a) - 1, dh - 1, -1):
        c = a[k] * inv % p
        if c:
            for i in range(dh + 1):
                a[k - dh + i] = (a[k - dh + i] - c * h[i]) % p
    return _trim(a[:dh] if len(a) > dh else a)


def _pmulmod(a, b, h, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _pmod(out, h, p)


def _ppowmod(a, e, h, p):
    result, base = [1], _pmod(a, h, p)
    while e:
        if e & 1:
            result = _pmulmod(result, base, h, p)
        base = _pmulmod(base, base, h, p)
        e >>= 1
    return result


def _pgcd(a, b, p):
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def _is_irreducible(h, p):
    """Rabin's test."""
    m = len(h) - 1
    x = [0, 1]
    if _ppowmod(x, p**m, h, p) != _pmod(x, h, p):
        return False
    for ell in prime_factors(m):
        t = _ppowmod(x, p ** (m // ell), h, p)
        diff = list(t) + [0] * max(0, 2 - len(t))
        diff[1] = (diff[1] - 1) % p
        if len(_pgcd(h, _trim(diff), p)) != 1:
            return False
    return True


def _lowest_irreducible(p, m):
    if m == 1:
        return (0, 1)
    for code in range(p**m):
        low = [(code // p**i) % p for i in range(m)]
        if low[0] == 0:
            continue
        h = low + [1]
        if _is_irreducible(h, p):
            return tuple(h)
    raise AssertionError("no irreducible polynomial found")


def _code_to_poly(code, p, m):
    return _trim([(code // p**i) % p for i in range(m)])


def _poly_to_code(poly, p):
    return sum(int(c) * p**i for i, c in enumerate(poly))


@dataclass(frozen=True, eq=False)
class FieldCtx:
    """The field F_{q^r}, q = p^f, with its canonical tables.

    ``exp[k]`` is the code of ``gen**k``; ``log[x]`` inverts it (``log[0] = -1``);
    ``abs_trace[x]`` is the trace down to F_p; ``embed[a]`` maps a code of the
    base field F_q to its code here.
    """

    p: int
    f: int
    r: int
    modulus: tuple
    gen: int
    exp: np.ndarray = field(repr=False)
    log: np.ndarray = field(repr=False)
    abs_trace: np.ndarray = field(repr=False)
    embed: np.ndarray = field(repr=False)

    @property
    def degree(self) -> int:
        return self.f * self.r

    @property
    def q(self) -> int:
        return self.p**self.f

    @property
    def Q(self) -> int:
        return self.p**self.degree

    @property
    def order(self) -> int:
        """Order of the multiplicative group, q^r - 1."""
        return self.Q - 1

    @property
    def lift_factor(self) -> int:
        """(q^r - 1)/(q - 1): multiply a level-1 log by this to get the level-r log."""
        return (self.Q - 1) // (self.q - 1)

    # vectorised arithmetic on codes

    def digits(self, x):
        x = np.asarray(x, dtype=np.int64)
        return np.stack([(x // self.p**i) % self.p for i in range(self.degree)], axis=-1)

    def from_digits(self, d):
        w = self.p ** np.arange(self.degree, dtype=np.int64)
        return (np.asarray(d, dtype=np.int64) % self.p) @ w

    def add(self, a, b):
        if self.degree == 1:
            return (np.asarray(a, dtype=np.int64) + b) % self.p
        return self.from_digits(self.digits(a) + self.digits(b))

    def neg(self, a):
        if self.degree == 1:
            return (-np.asarray(a, dtype=np.int64)) % self.p
        return self.from_digits(-self.digits(a))

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        la, lb = self.log[a], self.log[b]
        out = self.exp[(la + lb) % self.order]
        return np.where((a == 0) | (b == 0), 0, out)

    def power(self, a, e: int):
        a = np.asarray(a, dtype=np.int64)
        out = self.exp[(self.log[a] * (e % self.order)) % self.order]
        if e == 0:
            return np.ones_like(a)
        return np.where(a == 0, 0, out)

    def inv(self, a):
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise ZeroDivisionError("inverse of zero")
        return self.exp[(-self.log[a]) % self.order]

    def element(self, value: int) -> int:
        """Code of an integer viewed in the prime field."""
        return int(value) % self.p

    def from_base(self, a) -> np.ndarray | int:
        """Code here of a base-field (F_q) element."""
        out = self.embed[np.asarray(a, dtype=np.int64)]
        return int(out) if np.ndim(out) == 0 else out

    def dlog(self, x) -> int:
        x = int(x)
        if x == 0:
            raise ZeroDivisionError("log of zero")
        return int(self.log[x])

    def base_dlog_lifted(self, a: int) -> int:
        """Level-r log of a base-field code, computed without the embedding."""
        base = build_field(self.p, self.f, 1)
        return base.dlog(a) * self.lift_factor

    def norm_to_base(self, x):
        """Norm down to F_q, returned as a base-field code."""
        base = build_field(self.p, self.f, 1)
        x = np.asarray(x, dtype=np.int64)
        out = base.exp[self.log[x] % base.order]
        out = np.where(x == 0, 0, out)
        return int(out) if out.ndim == 0 else out

    def trace_to_base(self, x):
        """Trace down to F_q (sum of q-power conjugates), as a base-field code."""
        x = np.asarray(x, dtype=np.int64)
        acc = np.zeros_like(x)
        for k in range(self.r):
            acc = self.add(acc, self.power(x, self.q**k))
        back = _inverse_embedding(self)
        out = back[acc]
        return int(out) if out.ndim == 0 else out

    def __repr__(self):
        return f"FieldCtx(p={self.p}, f={self.f}, r={self.r}, modulus={self.modulus}, gen={self.gen})"


@lru_cache(maxsize=None)
def _inverse_embedding(ctx: FieldCtx) -> np.ndarray:
    back = np.full(ctx.Q, -1, dtype=np.int64)
    back[ctx.embed] = np.arange(len(ctx.embed))
    return back


def _power_table(p, h, g_poly, N):
    """Codes of g^0 .. g^(N-1), stepping blockwise with the F_p-linear map 'multiply by g'."""
    m = len(h) - 1
    if m == 1:
        g = g_poly[0] if g_poly else 0
        out = np.empty(N, dtype=np.int64)
        acc = 1
        for k in range(N):
            out[k] = acc
            acc = acc * g % p
        return out
    # matrix of multiplication by g in the monomial basis
    Mg = np.zeros((m, m), dtype=np.int64)
    for j in range(m):
        col = _pmulmod([0] * j + [1], g_poly, h, p)
        for i, c in enumerate(col):
            Mg[i, j] = c
    block = max(1, math.isqrt(N))
    first = np.zeros((m, block), dtype=np.int64)
    v = np.zeros(m, dtype=np.int64)
    v[0] = 1
    for k in range(block):
        first[:, k] = v
        v = Mg @ v % p
    # v now holds g^block
    step = np.zeros((m, m), dtype=np.int64)
    for j in range(m):
        e = np.zeros(m, dtype=np.int64)
        e[j] = 1
        for _ in range(block):
            e = Mg @ e % p
        step[:, j] = e
    weights = p ** np.arange(m, dtype=np.int64)
    out = np.empty(((N + block - 1) // block) * block, dtype=np.int64)
    cur = first
    for b in range(0, len(out), block):
        out[b : b + block] = weights @ cur
        cur = step @ cur % p
    return out[:N]


def _primitive_code(p, h, N):
    m = len(h) - 1
    factors = prime_factors(N)
    for code in range(1, p**m):
        g = _code_to_poly(code, p, m)
        if N == 1 or all(_ppowmod(g, N // ell, h, p) != [1] for ell in factors):
            if m == 1 and N == 1:
                return 1
            return code
    raise AssertionError("no primitive element")


@lru_cache(maxsize=None)
def build_field(p: int, f: int = 1, r: int = 1, cap: int = DEFAULT_CAP) -> FieldCtx:
    """Field with ``p**(f*r)`` elements whose generator has norm equal to the F_q generator."""
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if f < 1 or r < 1:
        raise ValueError("extension degrees must be positive")
    m = f * r
    Q = p**m
    if Q > cap:
        raise CapExceeded(f"field of size {Q} exceeds table cap {cap}")
    N = Q - 1
    h = _lowest_irreducible(p, m)
    g0 = _primitive_code(p, h, N)
    exp0 = _power_table(p, list(h), _code_to_poly(g0, p, m), N)
    log0 = np.full(Q, -1, dtype=np.int64)
    log0[exp0] = np.arange(N, dtype=np.int64)

    if r == 1:
        embed = np.arange(Q, dtype=np.int64)
        gen, exp, log = g0, exp0, log0
    else:
        base = build_field(p, f, 1, cap)
        embed = _embedding(p, f, m, h, base, exp0, log0)
        q = p**f
        lift = N // (q - 1)
        target = int(log0[embed[base.gen]])
        L = log0[1:]
        gcd_ok = np.gcd(L, N) == 1
        norm_ok = (L * lift) % N == target % N
        cand = np.nonzero(gcd_ok & norm_ok)[0]
        gen = int(cand[0]) + 1
        lg = int(log0[gen])
        exp = exp0[(np.arange(N, dtype=np.int64) * lg) % N]
        log = np.full(Q, -1, dtype=np.int64)
        log[exp] = np.arange(N, dtype=np.int64)

    # absolute trace is F_p-linear: tabulate it on the monomial basis
    basis_tr = []
    for i in range(m):
        acc = [0]
        xi = [0] * i + [1]
        conj = xi
        for _ in range(m):
            acc = _trim([(a + b) % p for a, b in _zip_longest(acc, conj)])
            conj = _ppowmod(conj, p, list(h), p)
        basis_tr.append(acc[0] if acc else 0)
    codes = np.arange(Q, dtype=np.int64)
    digs = np.stack([(codes // p**i) % p for i in range(m)], axis=-1)
    abs_trace = (digs @ np.array(basis_tr, dtype=np.int64)) % p

    for arr in (exp, log, abs_trace, embed):
        arr.setflags(write=False)
    return FieldCtx(
        p=p, f=f, r=r, modulus=h, gen=gen, exp=exp, log=log, abs_trace=abs_trace, embed=embed
    )


def _zip_longest(a, b):
    n = max(len(a), len(b))
    return zip(list(a) + [0] * (n - len(a)), list(b) + [0] * (n - len(b)))


def _embedding(p, f, m, h, base, exp0, log0):
    """Codes in F_{p^m} of the elements of the base field F_{p^f}."""
    q = p**f
    if f == 1:
        return np.arange(q, dtype=np.int64)
    N = p**m - 1
    step = N // (q - 1)
    hb = list(base.modulus)
    # a root of the base modulus inside the subfield of order q
    root = None
    for k in range(q - 1):
        cand = _code_to_poly(int(exp0[k * step]), p, m)
        acc = []
        for c in reversed(hb):  # Horner
            acc = _pmulmod(acc, cand, list(h), p) if acc else []
            acc = _trim([(a + b) % p for a, b in _zip_longest(acc, [c])])
        if not acc:
            root = cand
            break
    assert root is not None
    out = np.zeros(q, dtype=np.int64)
    powers = [[1]]
    for _ in range(1, f):
        powers.append(_pmulmod(powers[-1], root, list(h), p))
    for a in range(q):
        acc = []
        for i in range(f):
            c = (a // p**i) % p
            if c:
                acc = _trim([(x + c * y) % p for x, y in _zip_longest(acc, powers[i])])
        out[a] = _poly_to_code(acc, p)
    return out


def trace_norm(ctx: FieldCtx, x):
    """``(Tr_{F_{q^r}/F_p}(x), Norm_{F_{q^r}/F_q}(x))``; the norm comes back as a base-field code."""
    x = np.asarray(x, dtype=np.int64)
    tr = ctx.abs_trace[x]
    nm = ctx.norm_to_base(x)
    if tr.ndim == 0:
        return int(tr), int(nm)
    return tr, nm
