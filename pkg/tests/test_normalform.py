import random
from fractions import Fraction

import pytest

from affsurf.errors import DegenerateHessian, UndecidableAtOrder
from affsurf.expr import surface_from_expr
from affsurf.homogeneity import canonical_b1_tuple, moduli_tuple
from affsurf.normalform import (TERMINALS, canonicalize_discrete, classify, discrete_orbit,
                                invariantize_at, prenormalize, transform_roundtrip)
from affsurf.regraph import linear_regraph, scale_regraph
from affsurf.scalar import S, omega
from affsurf.series import SurfaceGraph, polynomial


def test_prenormal_input_unchanged():
    F = polynomial(5, {(1, 1): 1, (3, 0): Fraction(1, 6), (0, 3): Fraction(1, 6)})
    assert prenormalize(F) == F


def test_quadratic_normalization():
    F = polynomial(5, {(2, 0): 1, (0, 2): -1})  # F20 = 2, F02 = -2
    assert prenormalize(F) == polynomial(5, {(1, 1): 1})


def test_sum_of_squares_needs_sqrt_minus_one():
    F = polynomial(4, {(2, 0): 1, (0, 2): 1})
    assert prenormalize(F) == polynomial(4, {(1, 1): 1})


def test_degenerate_hessian():
    with pytest.raises(DegenerateHessian):
        classify(surface_from_expr("x^2", 8))


def test_bad_position_retry():
    # F20 + 2 F11 + F02 = 0: the generic shear is used instead
    F = polynomial(5, {(2, 0): Fraction(1, 2), (1, 1): -1, (3, 0): 1})
    nf = classify(F)
    assert nf.branch in TERMINALS


def test_classify_n9():
    nf = classify(surface_from_expr("2-2*sqrt(1-x*y)", 8))
    assert nf.branch == "B3.1"
    assert nf.series.truncate(4) == polynomial(4, {(1, 1): 1, (2, 2): Fraction(1, 4)})


def test_classify_quadric():
    nf = classify(surface_from_expr("x*y", 8))
    assert nf.branch == "B3.2" and nf.series == polynomial(8, {(1, 1): 1})
    assert nf.decidedToOrder == 8


def test_b1_reads_tail():
    tail = {(4, 0): 2, (3, 1): -1, (2, 2): 5, (1, 3): Fraction(1, 3), (0, 4): 7}
    vals = {(1, 1): 1, (3, 0): Fraction(1, 6), (0, 3): Fraction(1, 6)}
    vals.update({k: Fraction(v) / (24 if k in ((4, 0), (0, 4)) else 6 if k != (2, 2) else 4)
                 for k, v in tail.items()})
    nf = classify(polynomial(6, vals))
    assert nf.branch == "B1"
    for k, v in tail.items():
        assert nf.I(*k) == S(Fraction(v))


def test_b1_shape():
    F = polynomial(6, {(1, 1): 1, (3, 0): 2, (0, 3): -1, (2, 1): 3, (4, 0): 1, (2, 3): 2})
    nf = classify(F)
    assert nf.branch == "B1"
    assert [nf.I(3, 0), nf.I(0, 3), nf.I(2, 1), nf.I(1, 2)] == [S(1), S(1), S(0), S(0)]


def test_b21_shape():
    nf = classify(surface_from_expr("x*y + x^3/6 + x^4/24 + x^3*y/5 + x^5/7", 8))
    assert nf.branch == "B2.1"
    assert (nf.I(3, 0), nf.I(4, 0), nf.I(0, 3)) == (S(1), S(1), S(0))


def test_undecidable_at_low_order():
    with pytest.raises(UndecidableAtOrder):
        classify(surface_from_expr("x*y", 3))


def test_all_terminals_reached():
    exprs = {"B1": "x*y+x^3/6+y^3/6", "B2.1": "x*y+x^3/6+x^4/24",
             "B2.2.1": "(1+y)*sqrt(2)*tan(x/sqrt(2))-x", "B2.2.2": "x*y+x^3/6",
             "B3.1": "2-2*sqrt(1-x*y)", "B3.2": "x*y"}
    for branch, e in exprs.items():
        assert classify(surface_from_expr(e, 8)).branch == branch


def test_transform_roundtrip():
    for e in ["x*y+x^3/6+y^3/6+x^4/5", "x^2-y^2+x^3+x*y^2/3+y^4", "2-2*sqrt(1-x*y)"]:
        S0 = surface_from_expr(e, 6)
        assert transform_roundtrip(S0, classify(S0))


def test_invariantize_quadric_far_point():
    S0 = surface_from_expr("x*y", 8)
    nf = invariantize_at(S0, (3, 5))
    assert nf.branch == "B3.2" and nf.series == polynomial(8, {(1, 1): 1})


def test_invariantize_n9_point():
    S0 = surface_from_expr("2-2*sqrt(1-x*y)", 8)
    a = classify(S0)
    b = invariantize_at(S0, (Fraction(1, 10), Fraction(1, 10)))
    assert b.branch == a.branch and b.series == a.series


def test_invariantize_non_homogeneous():
    S0 = surface_from_expr("x*y+x^3/6+y^3/6+x^5*y/120", 8)
    a = classify(S0)
    b = invariantize_at(S0, (Fraction(1, 10), 0))
    assert a.I(4, 0) != b.I(4, 0) or a.I(3, 1) != b.I(3, 1) or a.series != b.series


def test_canonicalize_symmetric_and_idempotent():
    F = polynomial(6, {(1, 1): 1, (3, 0): Fraction(1, 6), (0, 3): Fraction(1, 6),
                       (4, 0): Fraction(1, 12), (0, 4): Fraction(1, 12),
                       (3, 1): Fraction(1, 3), (1, 3): Fraction(1, 3)})
    nf = classify(F)
    assert nf.series.swap() == nf.series
    c = canonicalize_discrete(nf)
    assert canonicalize_discrete(c).series == c.series


def test_g0_relates_omega_multiple():
    # I04 = w I40 is carried by G0 onto a representative with I04 = I40
    w = omega()
    F = polynomial(5, {(1, 1): 1, (3, 0): Fraction(1, 6), (0, 3): Fraction(1, 6),
                       (4, 0): S(Fraction(2, 24)), (0, 4): 2 * w / 24})
    assert any(img.F(4, 0) == img.F(0, 4) for img in discrete_orbit(F))
    assert all(img.F(3, 0) == img.F(0, 3) == S(1) for img in discrete_orbit(F))


def test_equivalence_soundness():
    rng = random.Random(11)
    for _ in range(20):
        vals = {(1, 1): 1, (3, 0): Fraction(rng.randint(1, 4)), (0, 3): Fraction(rng.randint(1, 4))}
        for d in (4, 5):
            for j in range(d + 1):
                vals[(j, d - j)] = Fraction(rng.randint(-3, 3), rng.randint(1, 3))
        F = polynomial(5, vals)
        a = classify(F, 5)
        M = ((1, rng.randint(-2, 2)), (0, rng.randint(1, 3)))
        G = linear_regraph(F, M)
        G = scale_regraph(G, S(2), S(3), S(rng.randint(1, 4)))
        b = classify(G, 5)
        assert a.branch == b.branch == "B1"
        assert canonical_b1_tuple(moduli_tuple(a)) == canonical_b1_tuple(moduli_tuple(b))


def test_order_monotonicity():
    S8 = surface_from_expr("x*y+x^3/6+x^4/24+x^3*y/5", 8)
    a, b = classify(S8, 6), classify(S8, 8)
    assert a.branch == b.branch and a.path == b.path
    for k, v in a.invariants.items():
        assert b.invariants[k] == v


def test_approx_mode_branch():
    nf = classify(surface_from_expr("x*y+x^3/6+y^3/6", 6), mode="approx")
    assert nf.branch == "B1" and nf.mode == "approx"
