from fractions import Fraction

import pytest

from affsurf.errors import ExprSyntaxError, NotAnalyticAtOrigin, PoleAtOrigin, UnknownFunction
from affsurf.expr import expand, parse, surface_from_expr, to_text
from affsurf.scalar import S
from affsurf.series import Series2, polynomial


def test_parse_examples():
    assert to_text(parse("x*y + x^3/6")) == to_text(parse("x * y+x ^ 3 / 6"))
    parse("2 - 2*sqrt(1 - x*y)")


def test_syntax_error_position():
    with pytest.raises(ExprSyntaxError) as exc:
        parse("x*y*")
    assert exc.value.position == 5


def test_unknown_function():
    with pytest.raises(UnknownFunction):
        parse("log(1+x)")


def test_expand_n9():
    F = expand(parse("2-2*sqrt(1-x*y)"), 6)
    assert F == polynomial(6, {(1, 1): 1, (2, 2): Fraction(1, 4), (3, 3): Fraction(1, 8)})


def test_expand_n7():
    F = expand(parse("(1+y)*sqrt(2)*tan(x/sqrt(2)) - x"), 6)
    want = polynomial(6, {(1, 1): 1, (3, 0): Fraction(1, 6), (3, 1): Fraction(1, 6),
                          (5, 0): Fraction(1, 30), (5, 1): Fraction(1, 30)})
    assert F == want


def test_expand_quadric():
    assert expand(parse("x*y"), 8) == polynomial(8, {(1, 1): 1})


def test_print_parse_round_trip():
    for text in ["(1+y)*sqrt(2)*tan(x/sqrt(2)) - x", "exp(x) - 1 - sin(y)*cos(x)",
                 "x*y/(1 - x)^2", "-(x-y)^3 + 2/3*x"]:
        a = parse(text)
        assert expand(parse(to_text(a)), 6) == expand(a, 6)


def test_sqrt_series_squares_back():
    g = "(x*y + 3*x^2 - y^3/2)"
    s = expand(parse(f"sqrt(1+{g})"), 7)
    assert s * s == expand(parse(f"1+{g}"), 7)


def test_derivative_spot_check():
    F = expand(parse("x^3*y + 2*x*y^2 - x^4/5"), 6)
    dF = expand(parse("3*x^2*y + 2*y^2 - 4*x^3/5"), 5)
    assert F.partial("x") == dF


def test_domain_errors():
    with pytest.raises(PoleAtOrigin):
        expand(parse("1/x"), 4)
    with pytest.raises(NotAnalyticAtOrigin):
        expand(parse("sqrt(x)"), 4)


def test_sqrt_constant_adjoins_root():
    F = expand(parse("sqrt(2+x)"), 3)
    assert F.coeff(0, 0) == S(2).sqrt()
    assert F.coeff(1, 0) == 1 / (2 * S(2).sqrt())


def test_surface_from_expr_drops_constant():
    S0 = surface_from_expr("1 + x*y", 4)
    assert S0.series.coeff(0, 0).is_zero()
