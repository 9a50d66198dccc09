from __future__ import annotations

import math
from fractions import Fraction

import pytest

from hgzeta.errors import AssumptionViolation, PrecisionLoss
from hgzeta.family import dwork, yu_yui
from hgzeta.padic import (
    F11_mod_p,
    F_coefficient_pochhammer,
    F_coefficients,
    eval_F_trunc,
    fgl_log_coefficient,
    height_one_test,
    padic_ring,
    unit_root,
    unit_root_count,
    unit_root_of_polynomial,
)


def test_ring_arithmetic_prime_field():
    R = padic_ring(7, 1, 4)
    a = R.const(10)
    assert (a * a.inverse()) == 1
    assert R.const(Fraction(1, 3)) * 3 == 1
    assert R.const(14).valuation() == 1
    with pytest.raises(ZeroDivisionError):
        R.const(7).inverse()
    with pytest.raises(PrecisionLoss):
        R.const(Fraction(1, 7))


@pytest.mark.parametrize("p,f", [(5, 2), (2, 3), (3, 2), (7, 1)])
def test_frobenius_and_teichmuller(p, f):
    R = padic_ring(p, f, 4)
    x = R.elem([0, 1] if f > 1 else [3])
    # sigma^f is the identity and sigma lifts x -> x^p
    assert x.frobenius(f) == x
    assert x.frobenius().mod_pk(1) == (x**p).mod_pk(1)
    # sigma is a ring map
    y = R.elem([1, 2] if f > 1 else [5])
    assert (x * y).frobenius() == x.frobenius() * y.frobenius()
    q = p**f
    for code in (1, 2, q - 1):
        w = R.teichmuller(code)
        assert w**q == w
        assert w.reduce() == code
        assert w.frobenius() == w**p


def test_F_coefficients_match_pochhammer_and_factorials():
    for alphas in ((1, 1, 1), (2, 4, 3, 3)):
        a = sum(alphas)
        co = F_coefficients(alphas, 12, 73, 6)
        for k in range(12):
            fact = math.factorial(a * k) // math.prod(math.factorial(ai * k) for ai in alphas)
            assert co[k] == fact % 73**6
            poch = F_coefficient_pochhammer(alphas, k)
            assert poch.denominator == 1 and poch.numerator == fact


def test_F_coefficients_tracks_valuation():
    co = F_coefficients((1, 1, 1), 60, 7, 3)
    for k in range(60):
        fact = math.factorial(3 * k) // math.factorial(k) ** 3
        assert co[k] == fact % 7**3


def test_eval_F_trunc():
    s = dwork(2, 7)
    R = padic_ring(7, 1, 4)
    assert eval_F_trunc(s, R.zero(), 2, m=4) == 1
    # the folded evaluation at a Teichmuller point equals plain Horner evaluation
    t = R.teichmuller(5)
    assert eval_F_trunc(s, 5, 2, m=4) == eval_F_trunc(s, t, 2, m=4)
    # the mod p truncation is the Hasse polynomial
    assert F11_mod_p(s, 5) == eval_F_trunc(s, 5, 1, m=1).coeffs[0]


def test_fgl_small_cases():
    s = dwork(2, 7)
    R = padic_ring(7, 1, 6)
    Lam = R.const(3)
    a, b = fgl_log_coefficient(s, Lam, 0)
    assert a == b == 1
    a, b = fgl_log_coefficient(s, Lam, 1)
    assert a == b == -3
    # m = 3: coefficient of (T1 T2 T3)^3 in (T1^3 + T2^3 + T3^3 - Lam T1 T2 T3)^3
    a, b = fgl_log_coefficient(s, Lam, 3)
    assert a == b == (-27 + 6) % 7**6
    for m in range(30):
        a, b = fgl_log_coefficient(yu_yui(73), padic_ring(73, 1, 3).const(5), m)
        assert a == b


def test_height_one():
    assert height_one_test(1, 7)
    assert not height_one_test(7, 7)
    R = padic_ring(7, 1, 3)
    assert height_one_test(R.const(3)) and not height_one_test(R.const(14))


@pytest.mark.parametrize("lam", [1, 2, 4])
def test_unit_root_plane_cubic(lam):
    s = dwork(2, 7)
    res = unit_root(s, lam, 4)
    assert res.ordinary and res.value.is_unit()
    g = res.value.coeffs[0]
    assert (g * g + g + 7) % 7**4 == 0
    assert unit_root_of_polynomial([1, 1, 7], 7, 4) == [g]
    # the formal group coefficient a_1 decides the same thing
    a1, _ = fgl_log_coefficient(s, padic_ring(7, 1, 4).teichmuller(lam), 6)
    assert height_one_test(a1) == res.ordinary


def test_unit_root_supersingular_q25():
    s = dwork(2, 5, f=2)
    sup = [lam for lam in range(1, 25) if unit_root(s, lam, 2).value is None]
    assert sup
    for lam in sup:
        a1, _ = fgl_log_coefficient(s, padic_ring(5, 2, 2).teichmuller(lam), 4)
        assert not height_one_test(a1)


def test_unit_root_errors():
    with pytest.raises(AssumptionViolation):
        unit_root(dwork(2, 7), 0, 3)
    with pytest.raises(AssumptionViolation):
        unit_root(dwork(2, 3), 1, 3)


def test_unit_root_count():
    assert unit_root_count([1, 1, 7], 7) == 1
    assert unit_root_count([1, 0, 7], 7) == 0
    assert unit_root_count([1, 7, 49], 7) == 0
    assert unit_root_count([1, 2, 3, 7], 7) == 2
