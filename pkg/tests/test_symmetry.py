from fractions import Fraction

import pytest

from affsurf.errors import DegenerateFrame, UnsupportedBranch
from affsurf.expr import surface_from_expr
from affsurf.homogeneity import BY_ID, moduli_tuple
from affsurf.normalform import classify
from affsurf.scalar import S
from affsurf.symmetry import (STRUCTURE, AffineVectorField, bracket_closure_residual,
                              frame_fields, lie_bracket, orbit_surface, structure_check,
                              tangency_defect)

F = AffineVectorField.from_components


def test_b1_field_at_zero_invariants():
    e1, e2 = frame_fields("B1", (0, 0, 0, 0, 0))
    assert e1 == F(((1, 0, 0, Fraction(1, 4)), (0, Fraction(-1, 2), 0, 0), (0, 0, 1, 0)))
    assert e1.to_text() == "(1/4*u + 1) dx + (-1/2*x) dy + (y) du"


def test_fixed_model_fields():
    assert frame_fields("N10")[2] == F(((1, 0, 0, 0), (0, 0, 0, 0), (0, 0, 1, 0)))
    assert frame_fields("N8")[2] == F(((0, 1, 0, 0), (0, 0, 2, 0), (0, 0, 0, 3)))
    assert frame_fields("B2.2.2") == frame_fields("N8")
    with pytest.raises(UnsupportedBranch):
        frame_fields("B9")


def test_tangency_examples():
    v = F(((1, 0, 0, 0), (0, 0, 0, 0), (0, 0, 1, 0)))
    assert tangency_defect(v, surface_from_expr("x*y", 6).series).is_zero()
    cay = surface_from_expr("x*y+x^3/6", 8).series
    assert tangency_defect(frame_fields("N8")[0], cay).is_zero()
    n9 = surface_from_expr("2-2*sqrt(1-x*y)", 8).series
    assert tangency_defect(frame_fields("N9")[1], n9).is_zero()
    assert not tangency_defect(frame_fields("N9")[1], cay).is_zero()


@pytest.mark.parametrize("model,expr", [
    ("N7", "(1+y)*sqrt(2)*tan(x/sqrt(2))-x"), ("N8", "x*y+x^3/6"),
    ("N9", "2-2*sqrt(1-x*y)"), ("N10", "x*y")])
def test_fixed_models_tangent_and_structure(model, expr):
    ser = surface_from_expr(expr, 8).series
    for e in frame_fields(model):
        assert tangency_defect(e, ser).is_zero(), e
    assert all(structure_check(model).values())


def test_brackets():
    e1, e2, e3 = frame_fields("N8")
    assert lie_bracket(e1, e3) == e1
    n1, n2, n3 = frame_fields("N9")
    assert lie_bracket(n2, n3) == n1.scaled(-2)
    assert lie_bracket(e1, e1).is_zero()
    assert set(STRUCTURE) == {"N7", "N8", "N9", "N10"}


def test_bracket_closure():
    assert bracket_closure_residual("B1", (2, 0, Fraction(9, 2), 0, Fraction(81, 32))).is_zero()
    assert not bracket_closure_residual("B1", (1, 1, 1, 1, 1)).is_zero()
    t = BY_ID["N5"].tuple_at(Fraction(1))
    assert t[2] == Fraction(11, 2)
    assert bracket_closure_residual("B2.1", t).is_zero()


def test_orbit_of_cayley_and_n9():
    got = orbit_surface(*frame_fields("N8")[:2], 8)
    assert got == surface_from_expr("x*y+x^3/6", 8).series
    got = orbit_surface(*frame_fields("N9")[1:], 8)
    assert got == surface_from_expr("2-2*sqrt(1-x*y)", 8).series


def test_orbit_round_trip_n1():
    fam = BY_ID["N1"]
    t = fam.tuple_at(Fraction(1), Fraction(0))
    nf = classify(orbit_surface(*frame_fields("B1", t), 7))
    assert nf.branch == "B1"
    assert moduli_tuple(nf) == tuple(S(v) for v in t)


def test_degenerate_frame():
    e1, e2 = frame_fields("N9")[:2]
    with pytest.raises(DegenerateFrame):
        orbit_surface(e1, e1, 6)
