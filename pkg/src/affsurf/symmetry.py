"""Affine vector fields on (x, y, u)-space: brackets, tangency and orbits.

A field is v(p) = A p + b with p = (x, y, u); its components are the
coefficients of d/dx, d/dy, d/du.  Entries may be Scalars, Fractions or sympy
expressions, so the same code checks numeric samples and symbolic identities.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial

from .errors import DegenerateFrame, UnsupportedBranch
from .recurrence import table_to_series
from .scalar import Scalar
from .series import Series2, _iszero, invert_map

H = Fraction(1, 2)
T = Fraction(1, 3)


def _c(v):
    return Fraction(v) if isinstance(v, int) else v


def _zero(v) -> bool:
    if isinstance(v, (int, Fraction)):
        return v == 0
    if isinstance(v, Scalar):
        return v.is_zero()
    import sympy as sp
    return sp.expand(v) == 0


class AffineVectorField:
    """v = sum_i (b_i + sum_j A_ij p_j) d/dp_i with p = (x, y, u)."""

    __slots__ = ("A", "b", "name")

    def __init__(self, A, b, name: str = ""):
        self.A = tuple(tuple(_c(v) for v in row) for row in A)
        self.b = tuple(_c(v) for v in b)
        self.name = name

    @classmethod
    def from_components(cls, comps, name: str = ""):
        """From three (const, x, y, u) coefficient tuples."""
        A = [row[1:] for row in comps]
        b = [row[0] for row in comps]
        return cls(A, b, name)

    def components(self):
        return tuple((self.b[i],) + self.A[i] for i in range(3))

    def __add__(self, o):
        return AffineVectorField([[a + c for a, c in zip(r, s)] for r, s in zip(self.A, o.A)],
                                 [a + c for a, c in zip(self.b, o.b)])

    def __sub__(self, o):
        return self + o.scaled(-1)

    def scaled(self, k):
        k = _c(k)
        return AffineVectorField([[a * k for a in r] for r in self.A], [a * k for a in self.b])

    __rmul__ = scaled

    def is_zero(self) -> bool:
        return all(_zero(v) for r in self.A for v in r) and all(_zero(v) for v in self.b)

    def __eq__(self, o):
        return isinstance(o, AffineVectorField) and (self - o).is_zero()

    def __hash__(self):
        return 0

    def at_origin(self):
        return self.b

    def to_text(self) -> str:
        """Compact form such as ``(u - 2) dx - 2*y du``; zero components omitted."""
        names = ("x", "y", "u")
        parts = []
        for i in range(3):
            terms = [str(self.A[i][j]) + "*" + names[j] if str(self.A[i][j]) not in ("1", "-1")
                     else ("-" if str(self.A[i][j]) == "-1" else "") + names[j]
                     for j in range(3) if not _zero(self.A[i][j])]
            if not _zero(self.b[i]):
                terms.append(str(self.b[i]))
            if terms:
                parts.append(f"({' + '.join(terms)}) d{names[i]}".replace("+ -", "- "))
        return " + ".join(parts) or "0"

    def __repr__(self):
        return f"{self.name or 'field'}: {self.to_text()}"

    def apply_series(self, X, Y, U):
        """Components evaluated at series (X, Y, U)."""
        out = []
        for i in range(3):
            s = X * self.A[i][0] + Y * self.A[i][1] + U * self.A[i][2]
            out.append(s + self.b[i])
        return out


def lie_bracket(v: AffineVectorField, w: AffineVectorField) -> AffineVectorField:
    """[v, w] = v(w) - w(v); for affine fields (BA - AB) p + (B a - A b)."""
    A, a, B, b = v.A, v.b, w.A, w.b
    r3 = range(3)
    M = [[sum((B[i][k] * A[k][j] - A[i][k] * B[k][j] for k in r3), Fraction(0)) for j in r3]
         for i in r3]
    c = [sum((B[i][k] * a[k] - A[i][k] * b[k] for k in r3), Fraction(0)) for i in r3]
    return AffineVectorField(M, c)


def tangency_defect(v: AffineVectorField, F: Series2) -> Series2:
    """c(x, y, F) - a(x, y, F) F_x - b(x, y, F) F_y, exact through order N - 1."""
    N = F.order - 1
    x = Series2.var(N, "x", F.zero)
    y = Series2.var(N, "y", F.zero)
    Fn = F.truncate(N)
    a, b, c = v.apply_series(x, y, Fn)
    return c - a * F.partial("x") - b * F.partial("y")


# ---------------------------------------------------------------------------
# reference frames

def _field(dx, dy, du, name):
    return AffineVectorField.from_components((dx, dy, du), name)


def _tuple_dict(branch, values, convention="table"):
    if not isinstance(values, dict):
        if branch == "B1":
            keys = [(4, 0), (3, 1), (2, 2), (1, 3), (0, 4)]
        else:
            keys = [(3, 1), (2, 2), (5, 0), (4, 1), (3, 2)]
        values = dict(zip(keys, values))
    if convention == "table":
        values = table_to_series(branch, values)
    elif convention != "series":
        raise ValueError(f"unknown convention {convention!r}")
    return values


def frame_fields(branch: str, values=None, convention: str = "table"):
    """The reference symmetry fields.

    B1 and B2.1 take invariant values, as a dict {(j, k): value} or a tuple
    (I40, I31, I22, I13, I04) resp. (I31, I22, I50, I41, I32); the fixed models
    are addressed by branch or by model name (N7 ... N10).  The reference B1
    fields are written in the normal-form coefficients; B1 values given in
    the table scaling (``convention="table"``, the default, as for the model
    families) are converted first.
    """
    if branch == "B1":
        I = _tuple_dict(branch, values, convention)
        I40, I31, I22, I13, I04 = (_c(I[(4, 0)]), _c(I[(3, 1)]), _c(I[(2, 2)]),
                                  _c(I[(1, 3)]), _c(I[(0, 4)]))
        e1 = _field((1, -T * I13 - 2 * T * I40, 0, -H * I22 + Fraction(1, 4)),
                    (0, -H, -2 * T * I13 - T * I40, -H * I31),
                    (0, 0, 1, -I13 - I40), "e1")
        e2 = _field((0, -2 * T * I31 - T * I04, -H, -H * I13),
                    (1, 0, -T * I31 - 2 * T * I04, -H * I22 + Fraction(1, 4)),
                    (0, 1, 0, -I04 - I31), "e2")
        return [e1, e2]
    if branch == "B2.1":
        I = _tuple_dict(branch, values, convention)
        I31, I22, I50, I41 = _c(I[(3, 1)]), _c(I[(2, 2)]), _c(I[(5, 0)]), _c(I[(4, 1)])
        e1 = _field((1, 1 - I50 + 4 * I31, 0, -H * I22),
                    (0, -H, 3 - 2 * I50 + 8 * I31, -H * I31),
                    (0, 0, 1, 4 - 3 * I50 + 12 * I31), "e1")
        e2 = _field((0, I31 - I41 + 2 * I22, 0, 0),
                    (1, 0, 3 * I31 + 4 * I22 - 2 * I41, -H * I22),
                    (0, 1, 0, 4 * I31 + 6 * I22 - 3 * I41), "e2")
        return [e1, e2]
    model = {"B2.2.1": "N7", "B2.2.2": "N8", "B3.1": "N9", "B3.2": "N10"}.get(branch, branch)
    if model == "N7":
        return [_field((1, 0, 0, 0), (0, -H, 0, -H), (0, 0, 1, 0), "e1"),
                _field((0, 0, 0, 0), (1, 0, 1, 0), (0, 1, 0, 1), "e2")]
    if model == "N8":
        return [_field((1, 0, 0, 0), (0, -H, 0, 0), (0, 0, 1, 0), "e1"),
                _field((0, 0, 0, 0), (1, 0, 0, 0), (0, 1, 0, 0), "e2"),
                _field((0, 1, 0, 0), (0, 0, 2, 0), (0, 0, 0, 3), "e3")]
    if model == "N9":
        return [_field((0, -1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 0), "e1"),
                _field((-2, 0, 0, 1), (0, 0, 0, 0), (0, 0, -2, 0), "e2"),
                _field((0, 0, 0, 0), (-2, 0, 0, 1), (0, -2, 0, 0), "e3")]
    if model == "N10":
        return [_field((0, -1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 0), "e1"),
                _field((0, 1, 0, 0), (0, 0, 0, 0), (0, 0, 0, 1), "e2"),
                _field((1, 0, 0, 0), (0, 0, 0, 0), (0, 0, 1, 0), "e3"),
                _field((0, 0, 0, 0), (1, 0, 0, 0), (0, 1, 0, 0), "e4")]
    raise UnsupportedBranch(f"no reference frame for {branch!r}")


# reference structure constants: (i, j) -> {k: coefficient} for [e_i, e_j] = sum c_k e_k
STRUCTURE = {
    "N7": {(1, 2): {}},
    "N8": {(1, 3): {1: 1}, (2, 3): {2: 2}},
    "N9": {(1, 2): {2: 1}, (1, 3): {3: -1}, (2, 3): {1: -2}},
    "N10": {(1, 3): {3: 1}, (1, 4): {4: -1}, (2, 3): {3: -1}},
}


def structure_check(model: str) -> dict:
    """For each reference bracket, whether the computed bracket matches."""
    es = frame_fields(model)
    out = {}
    for (i, j), comb in STRUCTURE[model].items():
        lhs = lie_bracket(es[i - 1], es[j - 1])
        rhs = AffineVectorField([[0] * 3] * 3, [0] * 3)
        for k, c in comb.items():
            rhs = rhs + es[k - 1].scaled(c)
        out[(i, j)] = lhs == rhs
    return out


def bracket_coefficients(branch: str, values, convention: str = "table"):
    """The tabulated (c1, c2) with [e1, e2] = c1 e1 + c2 e2."""
    I = _tuple_dict(branch, values, convention)
    if branch == "B1":
        return (-2 * T * _c(I[(3, 1)]) - T * _c(I[(0, 4)]),
                T * _c(I[(4, 0)]) + 2 * T * _c(I[(1, 3)]))
    if branch == "B2.1":
        return (_c(I[(3, 1)]) - _c(I[(4, 1)]) + 2 * _c(I[(2, 2)]),
                -3 + 2 * _c(I[(5, 0)]) - 8 * _c(I[(3, 1)]))
    raise UnsupportedBranch(f"no tabulated bracket for {branch!r}")


def bracket_closure_residual(branch: str, values, convention: str = "table") -> AffineVectorField:
    """[e1, e2] - (c1 e1 + c2 e2) with the reference fields and tabulated coefficients."""
    e1, e2 = frame_fields(branch, values, convention)
    c1, c2 = bracket_coefficients(branch, values, convention)
    return lie_bracket(e1, e2) - (e1.scaled(c1) + e2.scaled(c2))


# ---------------------------------------------------------------------------
# orbits

def _flow(v: AffineVectorField, start, N: int, which: str, zero):
    """Formal flow exp(t v) applied to the series point ``start``; t is x or y."""
    t = Series2.var(N, which, zero)
    # d/dt p = A p + b; p(t) = sum t^n/n! (A^n p0 + A^(n-1) b)
    term = list(start)
    acc = list(start)
    tp = Series2.constant(N, 1, zero)
    for n in range(1, N + 1):
        nxt = []
        for i in range(3):
            s = term[0] * v.A[i][0] + term[1] * v.A[i][1] + term[2] * v.A[i][2]
            if n == 1:
                s = s + v.b[i]
            nxt.append(s)
        term = nxt
        tp = tp * t
        coef = Fraction(1, factorial(n))
        acc = [acc[i] + term[i] * tp * coef for i in range(3)]
    return acc


def _scal(v):
    if isinstance(v, Scalar):
        return v
    return Scalar(v)


def orbit_surface(e1: AffineVectorField, e2: AffineVectorField, N: int) -> Series2:
    """u = F(x, y) for the orbit of the origin under the flows of e1 and e2.

    The point exp(t1 e1) exp(t2 e2) . 0 is expanded as a series in (t1, t2)
    (flow of e2 first); then (x, y) is inverted to express u in x, y.
    """
    conv = lambda f: AffineVectorField([[_scal(a) for a in r] for r in f.A], [_scal(a) for a in f.b])
    e1, e2 = conv(e1), conv(e2)
    zero = Scalar(0)
    origin = [Series2(N, None, zero) for _ in range(3)]
    p2 = _flow(e2, origin, N, "y", zero)
    X, Y, U = _flow(e1, p2, N, "x", zero)
    det = X.coeff(1, 0) * Y.coeff(0, 1) - X.coeff(0, 1) * Y.coeff(1, 0)
    if _iszero(det):
        raise DegenerateFrame("projections of the fields to (x, y) are dependent at the origin")
    P, Q = invert_map(X, Y)
    return U.substitute(P, Q)
