from __future__ import annotations

import numpy as np
import pytest

from hgzeta.errors import CapExceeded, NotPrime
from hgzeta.ffield import build_field, is_prime, prime_factors, trace_norm

LEVELS = [(7, 1, 1), (7, 1, 2), (5, 2, 1), (5, 2, 2), (2, 3, 2), (3, 1, 4), (13, 1, 3)]


def test_primes():
    assert [n for n in range(20) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19]
    assert prime_factors(72) == [2, 3]


@pytest.mark.parametrize("p,f,r", LEVELS)
def test_log_exp_tables(p, f, r):
    ctx = build_field(p, f, r)
    N = ctx.order
    assert ctx.Q == p ** (f * r)
    assert len(set(ctx.exp.tolist())) == N
    assert ctx.log[0] == -1
    assert (ctx.log[ctx.exp] == np.arange(N)).all()
    assert ctx.power(ctx.gen, N) == 1


@pytest.mark.parametrize("p,f,r", LEVELS)
def test_field_axioms_sample(p, f, r):
    ctx = build_field(p, f, r)
    rng = np.random.default_rng(1)
    a, b, c = (rng.integers(0, ctx.Q, 200) for _ in range(3))
    assert (ctx.mul(a, ctx.add(b, c)) == ctx.add(ctx.mul(a, b), ctx.mul(a, c))).all()
    assert (ctx.add(a, ctx.neg(a)) == 0).all()
    nz = a[a != 0]
    assert (ctx.mul(nz, ctx.inv(nz)) == 1).all()


@pytest.mark.parametrize("p,f,r", [lv for lv in LEVELS if lv[2] > 1])
def test_tower_compatibility(p, f, r):
    ctx = build_field(p, f, r)
    base = build_field(p, f, 1)
    assert ctx.norm_to_base(ctx.gen) == base.gen
    xs = np.arange(1, base.Q)
    emb = ctx.from_base(xs)
    # the embedding is multiplicative and additive
    assert (ctx.mul(emb, emb) == ctx.from_base(base.mul(xs, xs))).all()
    assert (ctx.add(emb, emb) == ctx.from_base(base.add(xs, xs))).all()
    # discrete logs of base elements scale by (Q-1)/(q-1)
    assert all(ctx.dlog(ctx.from_base(int(x))) == ctx.lift_factor * base.dlog(int(x)) for x in xs)
    for x in (1, 2, ctx.gen, ctx.Q - 1):
        t, nm = trace_norm(ctx, x)
        assert 0 <= t < base.Q and 0 <= nm < base.Q


def test_prime_field_codes_are_residues():
    ctx = build_field(7)
    assert ctx.mul(3, 5) == 1
    assert ctx.add(4, 5) == 2
    assert ctx.element(-1) == 6


def test_errors():
    with pytest.raises(NotPrime):
        build_field(9)
    with pytest.raises(CapExceeded):
        build_field(73, 1, 5)
