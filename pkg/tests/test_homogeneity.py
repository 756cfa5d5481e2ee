import random
from fractions import Fraction

import pytest
import sympy as sp

from affsurf.errors import AmbiguousMatch, NoMatch, UnsupportedBranch
from affsurf.expr import surface_from_expr
from affsurf.homogeneity import (B1_EQUATIONS, F1, FAMILIES, I04, I13, I22, I31, I40,
                                 b1_slice_points, check_moduli, enumerate_families, equations,
                                 family_identity, in_family_union, is_homogeneous, match_model,
                                 match_tuple)
from affsurf.normalform import classify
from affsurf.scalar import S, omega

E1, E2, E3, E4 = (B1_EQUATIONS[k] for k in ("E1", "E2", "E3", "E4"))
R = sp.Rational


def test_check_moduli_examples():
    assert check_moduli("B1", (2, -6, 0, -4, 3)).ok
    assert check_moduli("B1", (1, 0, Fraction(9, 2), 0, Fraction(81, 16))).ok
    r = check_moduli("B1", (1, 1, 1, 1, 1))
    assert not r.ok
    assert r.residuals["E1"] == 0 and r.residuals["E3"] == 28


def test_check_moduli_with_scalars():
    w = omega()
    # the N1 tuple rotated by the cube root of unity stays a solution
    t = (S(1) * w, S(-6) * w ** 2, S(0), S(-2) * w, S(3) * w ** 2)
    assert check_moduli("B1", t).ok


def test_family_identities():
    for f in FAMILIES:
        if f.branch in ("B1", "B2.1"):
            assert all(v == 0 for v in family_identity(f).values()), f.id


def test_f1_on_b1_families():
    for f in enumerate_families("B1"):
        syms, tup = f.symbolic()
        subs = dict(zip((I40, I31, I22, I13, I04), map(sp.sympify, tup)))
        assert sp.simplify(F1.xreplace(subs)) == 0


def test_enumerate_families():
    assert [f.id for f in enumerate_families("B1")] == ["N1", "N2", "N3", "N4"]
    assert [f.id for f in enumerate_families("B2.1")] == ["N5", "N6"]
    assert enumerate_families("B2.2.2")[0].closed_form == "x*y+x^3/6"
    assert enumerate_families("B3.2")[0].closed_form == "x*y"
    with pytest.raises(UnsupportedBranch):
        enumerate_families("B9")
    with pytest.raises(UnsupportedBranch):
        equations("B3.1")


def test_match_tuple():
    m = match_tuple("B1", (1, -6, 0, -2, 3))
    assert m.family.id == "N1" and m.params == {"a": S(1), "b": S(3)}
    with pytest.raises(AmbiguousMatch) as exc:
        match_tuple("B1", (0, -9, -9, -9, 0))
    assert sorted(x.family.id for x in exc.value.matches) == ["N2", "N3"]
    with pytest.raises(NoMatch):
        match_tuple("B1", (1, 1, 1, 1, 1))
    m = match_tuple("B1", (2, 0, Fraction(9, 2), 0, Fraction(81, 32)))
    assert m.family.id == "N4" and m.params == {"a": S(2)}


def test_match_model_closed_forms():
    nf = classify(surface_from_expr("2-2*sqrt(1-x*y)", 8))
    assert match_model(nf).family.id == "N9"
    nf = classify(surface_from_expr("x*y", 6))
    assert match_model(nf).family.id == "N10"


def test_is_homogeneous():
    v = is_homogeneous(surface_from_expr("x*y+x^3/6", 7), samples=2)
    assert v.passed and v.match.family.id == "N8"
    v = is_homogeneous(surface_from_expr("(1+y)*sqrt(2)*tan(x/sqrt(2))-x", 7), samples=2)
    assert v.passed and v.branch == "B2.2.1" and v.match.family.id == "N7"
    v = is_homogeneous(surface_from_expr("x*y+x^3/6+y^3/6+x^4/24", 6), samples=2)
    assert not v.passed and v.branch == "B1"
    # the order-4 block (1,0,0,0,0) reads 36/24 = 3/2 in the table scaling
    assert v.moduli.residuals["E1"] == 0 and v.moduli.residuals["E3"] == 27
    assert "E3" in v.witness


# re-executed case analysis of the B1 system

def test_sol22_and_f_equations():
    sol22 = sp.solve(E1, I22)[0]
    assert sp.expand(sol22 - (R(8, 9) * I04 * I40 - R(1, 9) * I13 * I31 + R(2, 9) * I31 * I40)) == 0
    assert sp.expand(E2.subs(I22, sol22) - 2 * F1) == 0
    F2 = (4 * I04 * I31 - R(8, 9) * I04 * I13 * I40 + R(1, 9) * I13 ** 2 * I31
          + R(2, 9) * I13 * I31 * I40 - R(32, 9) * I04 * I40 ** 2 - R(8, 9) * I31 * I40 ** 2
          + 2 * I31 ** 2 + 9 * I13 + 18 * I40)
    F3 = (R(32, 9) * I04 ** 2 * I40 - R(4, 9) * I04 * I13 * I31 + R(16, 9) * I04 * I31 * I40
          - 2 * I13 ** 2 - 4 * I13 * I40 - R(1, 9) * I13 * I31 ** 2 + R(2, 9) * I31 ** 2 * I40
          - 18 * I04 - 9 * I31)
    assert sp.expand(E3.subs(I22, sol22) - F2) == 0
    assert sp.expand(E4.subs(I22, sol22) - F3) == 0


def test_g_and_h_equations():
    sol22 = sp.solve(E1, I22)[0]
    sub = {I22: sol22.subs(I31, I04 * I13 / I40), I31: I04 * I13 / I40}
    pre = (2 * I40 + I13) / (9 * I40 ** 2)
    H1 = I04 * I13 ** 2 * I40 - 16 * I04 * I40 ** 3 + 18 * I04 ** 2 * I13 + 81 * I40 ** 2
    H2 = I04 ** 2 * I13 ** 2 - 16 * I04 ** 2 * I40 ** 2 + 18 * I13 * I40 ** 2 + 81 * I40 * I04
    assert sp.simplify(E3.subs(sub) - pre * H1) == 0
    # E4 reduces to the negative of pre * H2; only its zero set matters
    assert sp.simplify(E4.subs(sub) + pre * H2) == 0
    assert sp.expand(I04 * H1 - I40 * H2 - 18 * I13 * (I04 ** 3 - I40 ** 3)) == 0
    # I04 = I40: the common equation factors with +9 +4 I40 in the second factor
    common = sp.expand(H1.subs(I04, I40))
    assert sp.expand(common - I40 ** 2 * (I13 + 9 - 4 * I40) * (I13 + 9 + 4 * I40)) == 0


def test_case_two_equations():
    sol22 = sp.solve(E1, I22)[0]
    F2 = sp.expand(E3.subs(I22, sol22))
    F3 = sp.expand(E4.subs(I22, sol22))
    a = F2.subs({I40: 0, I13: 0})
    b = F3.subs({I40: 0, I13: 0})
    assert sp.expand(a - 2 * (2 * I04 + I31) * I31) == 0
    assert sp.expand(b + 9 * (2 * I04 + I31)) == 0
    H1p, H2p = F2.subs({I40: 0, I04: 0}), F3.subs({I40: 0, I04: 0})
    assert sp.expand(I31 * H1p + I13 * H2p - 2 * (I31 ** 3 - I13 ** 3)) == 0
    t = sp.Symbol("t")
    assert sp.factor(H1p.subs({I31: t, I13: t})) == t * (t + 9) ** 2 / 9


def test_slices_lie_in_the_family_union():
    rng = random.Random(11)
    for _ in range(4):
        a = R(rng.randint(1, 9), rng.randint(1, 5))
        b = R(rng.randint(-9, 9), rng.randint(1, 5))
        for pt in b1_slice_points(a, b):
            assert in_family_union(pt), pt
    # the distinguished slices
    assert in_family_union((0, -9, -9, -9, 0)) == ["N2", "N3"]
    assert "N4" in in_family_union((2, 0, R(9, 2), 0, R(81, 32)))
