from __future__ import annotations

import gmpy2
import mpmath
import pytest

from hgzeta.count import brute_count
from hgzeta.errors import AssumptionViolation, DegreeUndetermined, UnclassifiableRoot
from hgzeta.family import dwork, yu_yui
from hgzeta.zetafac import (
    P_from_counts,
    ZetaPoly,
    build_pieces,
    classify_weights,
    compute_u,
    compute_u_direct,
    fit_recurrence,
    gamma_direct,
    gamma_value,
    predicted_count,
    recurrence_roots,
    series_from_counts,
    zeta_series,
)

TOL = gmpy2.mpfr(10) ** -50


def test_pieces_dwork():
    pieces = build_pieces(dwork(2, 7), 1)
    assert len(pieces) == 3
    assert pieces[0].s == (0, 0, 0)
    assert [pc.arity for pc in pieces] == [2, 0, 0]
    assert pieces[0].reduced.upper == (2, 4)


def test_build_pieces_rejects():
    with pytest.raises(AssumptionViolation):
        build_pieces(dwork(2, 7), 3)
    with pytest.raises(AssumptionViolation):
        build_pieces(dwork(2, 7), 0)


@pytest.mark.parametrize("spec,lam", [(dwork(2, 7), 2), (dwork(3, 13), 2), (yu_yui(73), 3)])
def test_gamma_lifting(spec, lam):
    for pc in build_pieces(spec, lam)[:4]:
        assert abs(gamma_value(pc, 1)) > 0
        assert abs(gamma_value(pc, 2) - gamma_direct(pc, 2)) < TOL * abs(gamma_value(pc, 2))


@pytest.mark.parametrize("spec", [dwork(3, 5, c=(1, 1, 1, 2)), yu_yui(73)])
def test_u_lifting(spec):
    u = compute_u(spec)
    for r in (1, 2):
        assert abs(u.value(r) - compute_u_direct(spec, r)) < TOL * max(1, abs(u.value(r)))


def test_u_requires_divisor_condition():
    with pytest.raises(AssumptionViolation):
        compute_u(yu_yui(29))


@pytest.mark.parametrize("lam", [1, 2, 4])
def test_predicted_count_plane_cubics(lam):
    s = dwork(2, 7)
    pieces = build_pieces(s, lam)
    u = compute_u(s)
    for r in (1, 2):
        assert predicted_count(pieces, u, r) == brute_count(s, lam, r).total


def test_series_projective_line():
    # #P^1(F_{q^r}) = q^r + 1; zeta = 1/((1-T)(1-qT)), so exp(-sum) gives (1-T)(1-qT)
    z = series_from_counts([7**r + 1 for r in range(1, 5)])
    assert [int(gmpy2.rint(c.real)) for c in z] == [1, -8, 7, 0, 0]


def test_zeta_series_and_degree_check():
    vals = [2**r + 3**r for r in range(1, 7)]
    P = zeta_series(vals)
    assert P.degree == 2
    assert P.integer_coeffs() == (1, -5, 6)
    roots = sorted(abs(x) for x in P.reciprocal_roots())
    assert abs(roots[0] - 2) < 1e-40 and abs(roots[1] - 3) < 1e-40
    with pytest.raises(DegreeUndetermined):
        zeta_series(vals[:3])


def test_fit_recurrence():
    vals = [5 * 2**r - 3**r for r in range(1, 9)]
    rec = fit_recurrence(vals)
    assert len(rec) == 3
    roots = sorted(abs(x) for x in recurrence_roots(rec))
    assert abs(roots[0] - 2) < 1e-40 and abs(roots[1] - 3) < 1e-40
    assert fit_recurrence([1, 2, 4, 9, 16, 40, 7]) is None


def test_classify_weights():
    P = ZetaPoly(tuple(gmpy2.mpc(c) for c in (1, 1, 7)), 2)
    assert classify_weights(P, 7) == {1: 2}
    with pytest.raises(UnclassifiableRoot):
        classify_weights(ZetaPoly(tuple(gmpy2.mpc(c) for c in (1, -3)), 1), 7)


def test_P_from_counts_elliptic():
    s = dwork(2, 7)
    counts = [brute_count(s, 1, r).total for r in (1, 2, 3)]
    z = P_from_counts(counts, 2, 7)
    assert [int(gmpy2.rint(c.real)) for c in z] == [1, 1, 7, 0]
