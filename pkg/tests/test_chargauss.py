from __future__ import annotations

import gmpy2
import pytest

from hgzeta.chargauss import (
    CharacterIndex,
    abs_value,
    char_values,
    dh_lift_check,
    dh_multiplication,
    eval_char,
    gauss_sum,
    gauss_sum_direct,
    gauss_table,
    get_precision,
    phi,
    roots_of_unity,
    set_precision,
)
from hgzeta.errors import LevelMismatch
from hgzeta.ffield import build_field

TOL = gmpy2.mpfr(10) ** -60


def test_roots_of_unity_exact_axes():
    W = roots_of_unity(12)
    assert W[0] == 1 and W[3] == gmpy2.mpc(0, 1) and W[6] == -1
    assert abs(W[1] ** 12 - 1) < TOL


def test_character_algebra():
    ctx = build_field(13)
    chi = CharacterIndex(5, ctx)
    assert (chi * chi.conj()).trivial
    assert (chi**12).trivial
    assert chi.order == 12
    assert phi(ctx, 4).order == 4
    for x in range(1, 13):
        for y in range(1, 13):
            lhs = eval_char(chi, int(ctx.mul(x, y)))
            assert abs(lhs - eval_char(chi, x) * eval_char(chi, y)) < TOL
    assert eval_char(chi, 0) == 0
    vals = char_values(chi, range(1, 13))
    assert abs(sum(vals)) < TOL


def test_level_mismatch():
    a = CharacterIndex(1, build_field(7))
    b = CharacterIndex(1, build_field(7, 1, 2))
    with pytest.raises(LevelMismatch):
        a * b


@pytest.mark.parametrize("p,f,r", [(5, 1, 1), (5, 2, 1), (7, 1, 2), (2, 3, 1), (3, 2, 2)])
def test_table_matches_direct(p, f, r):
    ctx = build_field(p, f, r)
    G = gauss_table(ctx)
    for k in range(0, ctx.order, max(1, ctx.order // 17)):
        assert abs(G[k] - gauss_sum_direct(CharacterIndex(k, ctx))) < TOL
    assert abs(G[0] + 1) < TOL
    for k in range(1, ctx.order, max(1, ctx.order // 11)):
        assert abs(abs_value(G[k]) ** 2 - ctx.Q) < TOL


@pytest.mark.parametrize("q", [5, 7, 13])
def test_davenport_hasse_lift(q):
    ctx = build_field(q)
    for k in range(ctx.order):
        for r in (2, 3):
            a, b = dh_lift_check(CharacterIndex(k, ctx), r)
            assert abs(a - b) < TOL


@pytest.mark.parametrize("q,beta", [(7, 2), (7, 3), (13, 4), (13, 6)])
def test_davenport_hasse_product(q, beta):
    ctx = build_field(q)
    for k in range(ctx.order):
        lhs, rhs = dh_multiplication(CharacterIndex(k, ctx), beta)
        assert abs(lhs - rhs) < TOL


def test_precision_switch():
    old = get_precision()
    try:
        set_precision(128)
        g = gauss_sum(CharacterIndex(1, build_field(11)))
        assert g.real.precision == 128
    finally:
        set_precision(old)
    with pytest.raises(ValueError):
        set_precision(10)
