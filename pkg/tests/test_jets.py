import random
from fractions import Fraction

import pytest
import sympy as sp

from affsurf.errors import NotDependent
from affsurf.expr import surface_from_expr
from affsurf.jets import (RADICAL, JetPolynomial, SubjetSolver, compatibility_obstructions,
                          evaluate_on_surface, general_compatibility, relation_03, relation_40,
                          total_derivative, u)
from affsurf.scalar import S
from affsurf.series import Series2

u22, u31, u32 = u(2, 2), u(3, 1), u(3, 2)


def test_total_derivative_examples():
    assert total_derivative(JetPolynomial(u(0, 3)), "x") == JetPolynomial(u(1, 3))
    assert total_derivative(JetPolynomial(u22 ** 2), "y") == JetPolynomial(2 * u22 * u(2, 3))


def test_total_derivative_of_radical():
    d = total_derivative(JetPolynomial.radical(), "x")
    want = (u(1, 1) * u(2, 1) - u(3, 0) * u(0, 2) / 2 - u(2, 0) * u(1, 2) / 2) / RADICAL
    assert d == JetPolynomial(want)
    # squaring check: (D r)^2 B = (D B / 2)^2
    B = u(1, 1) ** 2 - u(2, 0) * u(0, 2)
    dB = total_derivative(JetPolynomial(B), "x")
    assert (d * d * B - dB * dB / 4).is_zero()


def test_total_derivatives_commute_spot():
    P = JetPolynomial(u(2, 1) * RADICAL / (u(2, 0) + 3) + u(0, 3) ** 2)
    a = total_derivative(total_derivative(P, "x"), "y")
    b = total_derivative(total_derivative(P, "y"), "x")
    assert (a - b).is_zero()


def _random_surface(rng, N=7):
    vals = {(1, 1): S(1), (2, 0): S(Fraction(rng.randint(-3, 3), 2)),
            (0, 2): S(Fraction(rng.randint(-3, 3), 3))}
    for d in range(3, N + 1):
        for j in range(d + 1):
            vals[(j, d - j)] = S(Fraction(rng.randint(-4, 4), rng.randint(1, 3)))
    return Series2.from_factorial(N, vals)


def test_evaluation_commutes_with_total_derivative():
    rng = random.Random(20)
    for _ in range(5):
        F = _random_surface(rng, 8)
        P = JetPolynomial(u(2, 1) * u(1, 1) - u(0, 3) * RADICAL + u(3, 0) ** 2 / 2)
        for d in "xy":
            lhs = evaluate_on_surface(total_derivative(P, d), F)
            rhs = evaluate_on_surface(P, F).partial(d)
            N = min(lhs.order, rhs.order)
            assert lhs.truncate(N) == rhs.truncate(N)


def test_base_relations_hold_on_models():
    # I03 and I40 vanish identically on N7, so both solved relations hold there
    F = surface_from_expr("(1+y)*sqrt(2)*tan(x/sqrt(2))-x", 8).series
    assert evaluate_on_surface(relation_03() - JetPolynomial.coordinate(0, 3), F).is_zero()
    assert evaluate_on_surface(relation_40() - JetPolynomial.coordinate(4, 0), F).is_zero()
    C = surface_from_expr("x*y+x^3/6", 8).series
    assert evaluate_on_surface(relation_03() - JetPolynomial.coordinate(0, 3), C).is_zero()


def test_relation_03_fails_off_the_subjet():
    F = surface_from_expr("x*y+x^3/6+y^3/6", 6).series
    assert not evaluate_on_surface(relation_03() - JetPolynomial.coordinate(0, 3), F).is_zero()


def test_cross_section_values():
    sol = SubjetSolver("B2.2", cross_section=True)
    assert sp.expand(sol.solve_dependent(3, 3).expr - sp.Rational(9, 2) * u22 ** 2) == 0
    A, _ = sol.chains(7)
    assert sp.expand(A[(4, 3)].as_expr() - 15 * u32 * u22) == 0
    assert sol.solve_dependent(0, 3).subs({(2, 2): 0, (3, 1): 0, (3, 2): 0}).is_zero()


def test_not_dependent():
    with pytest.raises(NotDependent):
        SubjetSolver("B2.1").solve_dependent(2, 1)


def test_obstruction_table():
    obs = {name: (a, b) for name, a, b in compatibility_obstructions(9)}
    assert obs["u4,3"] == (15 * u32 * u22, 12 * u32 * u22)
    a, b = obs["u5,3"]
    assert (a.subs(u22, 0), b.subs(u22, 0)) == (15 * u32 ** 2, 12 * u32 ** 2)
    a, b = obs["u6,3"]
    assert (a.subs(u32, 0), b.subs(u32, 0)) == (sp.Rational(945, 4) * u22 ** 3, 225 * u22 ** 3)


def test_general_compatibility_forces_vanishing():
    base = {(1, 1): 1, (3, 0): 1}
    rep = general_compatibility({**base, (2, 2): 1, (3, 2): 1}, 7)
    assert [r["consistent"] for r in rep] == [True] * 4 + [False]
    rep = general_compatibility({**base, (2, 2): 1}, 9)
    assert rep[-1]["order"] == 9 and not rep[-1]["consistent"]
    assert all(r["consistent"] for r in rep[:-1])
    rep = general_compatibility({**base, (3, 1): 1}, 9)
    assert all(r["consistent"] for r in rep)
