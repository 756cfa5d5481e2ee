import itertools
import random
from fractions import Fraction

import pytest
import sympy as sp

from affsurf.errors import InconsistentSystem, UnsupportedBranch
from affsurf.expr import surface_from_expr
from affsurf.homogeneity import B1_EQUATIONS, B21_EQUATIONS, model_surface
from affsurf.recurrence import (b21_reduction, conjugation_closed, eliminate_homogeneous,
                                fit_derivative_mix, inv, invariant_derivative_probe,
                                normalize_condition, series_to_table, solve_next_order, table,
                                table_to_series)
from affsurf.scalar import S

I40, I31, I22, I13, I04 = (inv(4 - k, k) for k in range(5))
I50, I41, I32 = inv(5, 0), inv(4, 1), inv(3, 2)


def test_table_shapes():
    b1 = table("B1")
    assert len(b1.equations) == 10
    b21 = table("B2.1")
    assert sum(1 for e in b21.equations if sum(e.target) == 4) == 4
    assert sum(1 for e in b21.equations if sum(e.target) == 5) == 6
    with pytest.raises(UnsupportedBranch):
        table("B3.1")


def test_table_first_line_and_commutators():
    e = table("B1").equation("x", 4, 0)
    assert sp.expand(e.rhs - (-8 * I13 * I40 - 160 * I40 ** 2 - 144 * I31 + I50)) == 0
    c1, c2 = table("B1").commutator
    assert sp.expand(c1 - (sp.Rational(2, 3) * I31 + sp.Rational(4, 3) * I04)) == 0
    assert sp.expand(c2 - (-sp.Rational(4, 3) * I40 - sp.Rational(2, 3) * I13)) == 0
    c1, c2 = table("B2.1").commutator
    assert sp.expand(c1 - (-I31 - 2 * I22 + I41)) == 0
    assert sp.expand(c2 - (8 * I31 + 3 - 2 * I50)) == 0


def test_conjugation_symmetry():
    assert conjugation_closed(table("B1"))
    assert not conjugation_closed(table("B2.1"))


def test_e1_from_the_i41_pair():
    t = table("B1")
    a, b = t.equation("y", 4, 0).rhs, t.equation("x", 3, 1).rhs
    x = sp.solve(a, I41)[0]
    e1 = normalize_condition(b.subs(I41, x))
    assert e1 == normalize_condition(B1_EQUATIONS["E1"])


def _rank(polys):
    syms = sorted(set().union(*(p.free_symbols for p in polys)), key=str)
    mons = sorted({m for p in polys for m in sp.Poly(p, *syms).monoms()})
    rows = [[sp.Poly(p, *syms).coeff_monomial(m) for m in mons] for p in polys]
    return sp.Matrix(rows).rank()


def test_b1_elimination_matches_reference_conditions():
    derived = eliminate_homogeneous(table("B1"))
    reference = list(B1_EQUATIONS.values())
    assert len(derived) == 4
    assert _rank(derived) == _rank(reference) == _rank(derived + reference) == 4
    assert not any(e.has(I50) or e.has(inv(0, 5)) for e in derived)


def test_elimination_order_independent():
    t = table("B1")
    ref = eliminate_homogeneous(t)
    for perm in itertools.permutations(t.eliminate):
        got = eliminate_homogeneous(t, elim_order=perm)
        assert _rank(got) == _rank(ref) == _rank(got + ref)


def test_b21_order4_run_gives_the_four_conditions():
    got = set(eliminate_homogeneous(table("B2.1"), order=4))
    want = {normalize_condition(B21_EQUATIONS[k]) for k in ("E41", "E42", "E43", "E44")}
    assert got == want


def test_solve_next_order_n4():
    for a in (Fraction(1), Fraction(2), Fraction(-3, 5)):
        vals = {(4, 0): a, (3, 1): 0, (2, 2): Fraction(9, 2), (1, 3): 0, (0, 4): Fraction(81, 16) / a}
        sol = solve_next_order(table("B1"), vals)
        assert sol[(5, 0)] == 160 * sp.Rational(a.numerator, a.denominator) ** 2


def test_solve_next_order_b21_i41():
    t = table("B2.1")
    rng = random.Random(4)
    for _ in range(10):
        a, b, c, d, e = (Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(5))
        vals = {(3, 1): a, (2, 2): b, (5, 0): c}
        want41 = -8 * a * a + 2 * c * a + d + Fraction(7, 2) * b - 2 * a
        # pick the remaining derivatives consistently
        sub = {I31: a, I22: b, I50: c, I41: want41}
        i32 = sp.solve(t.equation("y", 3, 1).rhs.subs(sub) - e, I32)[0]
        sub[I32] = i32
        derivs = {("x", (3, 1)): d, ("y", (3, 1)): e,
                  ("x", (2, 2)): t.equation("x", 2, 2).rhs.subs(sub),
                  ("y", (2, 2)): t.equation("y", 2, 2).rhs.subs(sub)}
        sol = solve_next_order(t, vals, derivs, order=4)
        assert sol[(4, 1)] == sp.Rational(want41.numerator, want41.denominator)


def test_solve_next_order_detects_inconsistency():
    rng = random.Random(5)
    for _ in range(5):
        vals = {(4 - k, k): Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for k in range(5)}
        with pytest.raises(InconsistentSystem):
            solve_next_order(table("B1"), vals)


def test_b21_reduction_pieces():
    red = b21_reduction()
    assert sp.expand(red["sol5"][I41] - sp.solve(B21_EQUATIONS["E41"], I41)[0]) == 0
    assert sp.expand(red["F53"] - B21_EQUATIONS["F53"]) == 0


def test_table_scaling_round_trip():
    vals = {(4, 0): S(1), (3, 1): S(2), (2, 2): S(3), (1, 3): S(4), (0, 4): S(5), (5, 0): S(7)}
    t = series_to_table("B1", vals)
    assert t[(4, 0)] == S(Fraction(36, 24)) and t[(2, 2)] == S(27) and t[(5, 0)] == S(7 * 216)
    assert table_to_series("B1", t) == vals
    assert series_to_table("B2.1", vals) == vals


def test_probe_vanishes_on_homogeneous_models():
    N9 = surface_from_expr("2-2*sqrt(1-x*y)", 8)
    with pytest.raises(UnsupportedBranch):
        invariant_derivative_probe(N9, (4, 0), "x")
    for key in ((2, 2), (3, 3), (4, 4)):
        for d in "xy":
            assert invariant_derivative_probe(N9, key, d, h=Fraction(1, 20)).is_zero()
    N1 = model_surface("N1", (Fraction(1), Fraction(0)), 7)
    for key in ((4, 0), (3, 1), (2, 2), (1, 3), (0, 4)):
        for d in "xy":
            assert invariant_derivative_probe(N1, key, d).is_zero()


def test_probe_on_a_non_homogeneous_surface():
    F = surface_from_expr("x*y+x^3/6+y^3/6+x^5*y/120", 7)
    assert not all(invariant_derivative_probe(F, k, d).is_zero()
                   for k in ((4, 0), (3, 1), (2, 2)) for d in "xy")
    fit = fit_derivative_mix(F)
    assert fit.branch == "B1"
    assert fit.mix == ((S(36), S(0)), (S(0), S(144)))
    assert not fit.consistent
