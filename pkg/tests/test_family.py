from __future__ import annotations

import pytest

from hgzeta.errors import AssumptionViolation, InvalidFamilyError, NotNormalizable
from hgzeta.family import (
    FamilySpec,
    assumption_report,
    check_assumption,
    compute_C,
    dwork,
    normalize,
    smoothness_scan,
    yu_yui,
)


def test_validation():
    with pytest.raises(InvalidFamilyError):
        FamilySpec(((3, 0), (0, 3)), (1, 1), 7)
    with pytest.raises(InvalidFamilyError):
        FamilySpec(((3, 0, 0), (0, 3, 0), (0, 0, 2)), (1, 1, 1), 7)
    with pytest.raises(InvalidFamilyError):
        FamilySpec(((3, 0, 1), (0, 3, 1), (0, 0, 1)), (1, 1, 1), 7)
    with pytest.raises(InvalidFamilyError):
        dwork(2, 7, c=(1, 0, 1))


def test_properties():
    s = dwork(2, 7)
    assert s.n == 2 and s.q == 7 and s.alpha.alphas == (1, 1, 1)
    assert compute_C(s) == 27 % 7
    assert s.with_lambda(3).lam == 3
    assert s.columns()[0] == (3, 0, 0)
    assert yu_yui(73).C == (2**14 * 3**6) % 73


def test_normalize():
    A = ((0, 4, 1, 0), (0, 0, 3, 0), (4, 0, 0, 0), (0, 0, 0, 4))
    spec = FamilySpec(A, (1, 2, 3, 4), 73)
    norm, perm = normalize(spec)
    assert norm.A[0][0] == 4 and norm.A[1][1] == 3
    assert norm.c == tuple(spec.c[i] for i in perm)
    # no monomial is a pure power of T3, so no ordering has the normal shape
    bad = FamilySpec(((3, 0, 2), (0, 3, 1), (0, 0, 0)), (1, 1, 1), 7)
    with pytest.raises(NotNormalizable):
        normalize(bad)


def test_assumptions():
    check_assumption(dwork(2, 7))
    with pytest.raises(AssumptionViolation):
        check_assumption(dwork(2, 3))
    assert assumption_report(dwork(2, 7)).ok
    rep = assumption_report(yu_yui(13))
    assert not rep.ok and rep.asm2 and not rep.asm1
    assert assumption_report(yu_yui(73)).ok


def test_smoothness_scan_dwork():
    s = dwork(2, 7)
    for lam in range(1, 7):
        v = smoothness_scan(s, lam, r_bound=2)
        assert v.singular == (pow(lam, 3, 7) == 6)
        assert v.torus_degenerate == v.singular
    v = smoothness_scan(s, 1, r_bound=3, budget=10**4)
    assert not v.singular and v.scanned_up_to == 2 and v.note
