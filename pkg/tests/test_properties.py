"""Randomized property suites; the active hypothesis profile runs 1000 examples each."""

from fractions import Fraction

import sympy as sp
from hypothesis import assume, given
from hypothesis import strategies as st

from affsurf.jets import JetPolynomial, total_derivative, u
from affsurf.recurrence import conjugate, table
from affsurf.scalar import Scalar
from affsurf.series import Series2, invert_map
from affsurf.symmetry import AffineVectorField, lie_bracket

fracs = st.fractions(min_value=-4, max_value=4, max_denominator=4)
ROOTS = (Scalar(2).sqrt(), Scalar(3).sqrt())
I_UNIT = Scalar(-1).sqrt()


@st.composite
def scalars(draw):
    v = Scalar(draw(fracs))
    for r in ROOTS:
        v = v + Scalar(draw(fracs)) * r
    if draw(st.booleans()):
        v = v * I_UNIT
    return v


@given(scalars(), scalars(), scalars())
def test_scalar_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a and a + b == b + a
    assert a * (b + c) == a * b + a * c
    assert (a - b) + b == a
    if not a.is_zero():
        assert a * a.inverse() == Scalar(1)
        assert (b / a) * a == b
    assert Scalar(str(a)) == a


N = 4
KEYS = [(j, d - j) for d in range(1, N + 1) for j in range(d + 1)]
coef = st.fractions(min_value=-5, max_value=5, max_denominator=4)


def series_from(vals):
    return Series2(N, {k: Scalar(v) for k, v in zip(KEYS, vals)})


series = st.lists(coef, min_size=len(KEYS), max_size=len(KEYS)).map(series_from)


@given(series, series, series)
def test_series_substitution_round_trip(F, X, Y):
    det = X.coeff(1, 0) * Y.coeff(0, 1) - X.coeff(0, 1) * Y.coeff(1, 0)
    assume(not det.is_zero())
    P, Q = invert_map(X, Y)
    assert X.substitute(P, Q) == Series2.var(N, "x")
    assert Y.substitute(P, Q) == Series2.var(N, "y")
    assert F.substitute(X, Y).substitute(P, Q) == F


COORDS = [u(j, d - j) for d in range(2, 5) for j in range(d + 1)]
monomial = st.tuples(st.fractions(min_value=-5, max_value=5, max_denominator=3),
                     st.lists(st.sampled_from(COORDS), min_size=1, max_size=3))


@given(st.lists(monomial, min_size=1, max_size=3), st.booleans())
def test_total_derivatives_commute(terms, radical):
    expr = sum(sp.Rational(c.numerator, c.denominator) * sp.Mul(*m) for c, m in terms)
    if radical:
        expr = expr * JetPolynomial.radical().expr
    P = JetPolynomial(expr)
    a = total_derivative(total_derivative(P, "x"), "y")
    b = total_derivative(total_derivative(P, "y"), "x")
    assert (a - b).is_zero()


small = st.integers(-4, 4)
fields = st.tuples(st.lists(st.lists(small, min_size=3, max_size=3), min_size=3, max_size=3),
                   st.lists(small, min_size=3, max_size=3)).map(lambda p: AffineVectorField(*p))


@given(fields, fields, fields)
def test_jacobi_identity(a, b, c):
    j = (lie_bracket(a, lie_bracket(b, c)) + lie_bracket(b, lie_bracket(c, a))
         + lie_bracket(c, lie_bracket(a, b)))
    assert j.is_zero()
    assert (lie_bracket(a, b) + lie_bracket(b, a)).is_zero()


B1 = table("B1")
SYMS = sorted({s for e in B1.equations for s in e.rhs.free_symbols}, key=str)


@given(st.sampled_from(B1.equations),
       st.lists(st.fractions(min_value=-20, max_value=20, max_denominator=5),
                min_size=len(SYMS), max_size=len(SYMS)))
def test_b1_table_conjugation_symmetry(e, vals):
    j, k = e.target
    other = B1.equation("y" if e.direction == "x" else "x", k, j)
    point = {s: sp.Rational(v.numerator, v.denominator) for s, v in zip(SYMS, vals)}
    swapped = {conjugate(s): v for s, v in point.items()}
    assert e.rhs.xreplace(point) == other.rhs.xreplace(swapped)
