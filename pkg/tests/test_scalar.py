from fractions import Fraction

import pytest

from affsurf.errors import DivisionByZero, ScalarParseError, TowerDepthExceeded
from affsurf.scalar import S, Scalar, arith, is_zero, omega, sqrt


def test_rational_add():
    assert arith("add", S(Fraction(1, 2)), S(Fraction(1, 3))) == S(Fraction(5, 6))


def test_sqrt2_squared():
    r = sqrt(S(2))
    assert arith("mul", r, r) == S(2)


def test_omega_cubed():
    w = omega()
    assert w == (S(-1) + sqrt(S(-3))) / 2
    assert arith("mul", w, w * w) == S(1)


def test_sqrt_in_field_and_adjoined():
    assert sqrt(S(4)) == S(2)
    r = sqrt(S(-3))
    assert r * r == S(-3)


def test_is_zero_examples():
    r = sqrt(S(2))
    assert is_zero(r - r)
    assert is_zero((1 + r) * (1 - r) + 1)
    assert not is_zero(S(Fraction(1, 10 ** 6)))


def test_division_by_zero():
    with pytest.raises(DivisionByZero):
        S(1) / S(0)


def test_principal_root_sign():
    # approx image of the formal root has Re > 0, or Im > 0 on the imaginary axis
    assert sqrt(S(2)).to_complex().real > 0
    assert sqrt(S(-1)).to_complex().imag > 0


def test_text_round_trip():
    v = (S(1) + 2 * sqrt(S(2))) * sqrt(S(3)) + S(Fraction(-3, 7))
    assert Scalar(str(v)) == v
    z = Scalar("0.5+0.25i@128")
    assert not z.is_exact and z.prec == 128
    assert Scalar(str(z)).approx == z.approx


def test_parse_error():
    with pytest.raises(ScalarParseError):
        Scalar("1 +* 2")


def test_tower_depth_bound():
    v = S(0)
    with pytest.raises(TowerDepthExceeded):
        for p in (2, 3, 5, 7, 11):
            v = v + sqrt(S(p))


def test_mixed_mode_coerces_to_approx():
    v = sqrt(S(2)) + Scalar("1.0+0.0i@256")
    assert not v.is_exact
    assert abs(v.to_complex() - (2 ** 0.5 + 1)) < 1e-12


def test_exact_to_approx_agrees():
    v = (sqrt(S(2)) + sqrt(S(3))) / (1 + sqrt(S(5)))
    a = v.to_approx(256)
    b = (Scalar("2.0+0.0i@256").sqrt() + Scalar("3.0+0.0i@256").sqrt()) / (
        1 + Scalar("5.0+0.0i@256").sqrt())
    assert abs(a.approx - b.approx) <= abs(b.approx) * 2.0 ** -(256 - 10)


def test_cbrt():
    assert S(27).cbrt() == S(3)
    assert S(Fraction(-8, 27)).cbrt() == S(Fraction(-2, 3))
