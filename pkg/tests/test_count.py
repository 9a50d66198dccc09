from __future__ import annotations

import pytest

from hgzeta.count import (
    brute_count,
    brute_count_poly,
    delsarte_full_count,
    delsarte_torus_count,
    round_with_gap,
)
from hgzeta.errors import BudgetExceeded, RoundingGapError
from hgzeta.family import dwork, yu_yui
from hgzeta.ffield import build_field


@pytest.mark.parametrize("p,f", [(7, 1), (5, 2), (13, 1)])
def test_conic_has_q_plus_one_points(p, f):
    ctx = build_field(p, f)
    rep = brute_count_poly(ctx, 3, [(2, 0, 0), (0, 2, 0), (0, 0, 2)], [1, 1, 1])
    assert rep.total == ctx.Q + 1


def test_fermat_cubic_torus_delsarte():
    ctx = build_field(7)
    monos = [(3, 0, 0), (0, 3, 0), (0, 0, 3)]
    full = brute_count_poly(ctx, 3, monos, [1, 1, 1])
    R = [list(col) for col in zip(*monos)]
    affine = delsarte_torus_count(ctx, R, [1, 1, 1])
    assert affine == full.per_torus[(0, 1, 2)] * (ctx.Q - 1)


@pytest.mark.parametrize("lam", range(1, 7))
@pytest.mark.parametrize("r", [1, 2])
def test_brute_equals_delsarte_per_stratum(lam, r):
    s = dwork(2, 7)
    a = brute_count(s, lam, r)
    b = delsarte_full_count(s, lam, r)
    assert a.per_torus == b.per_torus
    assert a.total == b.total and b.method == "delsarte"
    assert a.zero_part + a.star_part == a.total


def test_yu_yui_level_one():
    s = yu_yui(73)
    assert delsarte_full_count(s, 2, 1).total == brute_count(s, 2, 1).total == 5740


def test_budget():
    with pytest.raises(BudgetExceeded):
        brute_count(dwork(3, 13), 1, 2, budget=1000)


def test_round_with_gap():
    assert round_with_gap(3.0000000000001) == 3
    with pytest.raises(RoundingGapError):
        round_with_gap(2.5)
    with pytest.raises(RoundingGapError):
        round_with_gap(complex(2, 0.1))
