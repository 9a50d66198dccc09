from __future__ import annotations

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from hgzeta import intlin
from hgzeta.chargauss import CharacterIndex, eval_char
from hgzeta.ffield import build_field
from hgzeta.padic import padic_ring

FIELDS = [(7, 1, 1), (5, 2, 1), (2, 3, 2), (13, 1, 2)]

small_matrix = st.integers(1, 4).flatmap(
    lambda r: st.integers(1, 4).flatmap(
        lambda c: st.lists(st.lists(st.integers(-6, 6), min_size=c, max_size=c), min_size=r, max_size=r)
    )
)


@settings(max_examples=60, deadline=None)
@given(small_matrix)
def test_snf_invariants(M):
    res = intlin.smith_normal_form(M)
    assert intlin.matmul(intlin.matmul(res.U, M), res.V) == res.D
    nz = res.nonzero
    assert all(d > 0 for d in nz)
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    assert round(abs(np.linalg.det(np.array(res.U, dtype=float)))) == 1
    assert round(abs(np.linalg.det(np.array(res.V, dtype=float)))) == 1


@settings(max_examples=40, deadline=None)
@given(small_matrix, st.sampled_from([4, 6, 12]))
def test_kernel_mod_solutions(M, N):
    K = intlin.kernel_mod(M, N)
    A = np.array(M, dtype=np.int64)
    assert not ((A @ K.T) % N).any()
    assert len({tuple(r) for r in K.tolist()}) == len(K)


@settings(max_examples=80, deadline=None)
@given(st.sampled_from(FIELDS), st.data())
def test_field_ring_laws(level, data):
    ctx = build_field(*level)
    a, b, c = (data.draw(st.integers(0, ctx.Q - 1)) for _ in range(3))
    assert ctx.mul(a, ctx.add(b, c)) == ctx.add(ctx.mul(a, b), ctx.mul(a, c))
    assert ctx.mul(a, b) == ctx.mul(b, a)
    if a:
        assert ctx.mul(a, ctx.inv(a)) == 1
        assert ctx.dlog(ctx.power(a, 5)) == (5 * ctx.dlog(a)) % ctx.order


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 11), st.integers(1, 12), st.integers(1, 12))
def test_characters_multiplicative(k, x, y):
    ctx = build_field(13)
    chi = CharacterIndex(k, ctx)
    assert abs(eval_char(chi, int(ctx.mul(x, y))) - eval_char(chi, x) * eval_char(chi, y)) < 1e-60


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 5**4 - 1), min_size=6, max_size=6))
def test_padic_ring_laws(vals):
    R = padic_ring(5, 2, 4)
    a, b, c = R.elem(vals[0:2]), R.elem(vals[2:4]), R.elem(vals[4:6])
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)
    assert (a + b).frobenius() == a.frobenius() + b.frobenius()
    assert (a * b).frobenius() == a.frobenius() * b.frobenius()
    if a.is_unit():
        assert a * a.inverse() == 1
