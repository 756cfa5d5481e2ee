"""Truncated bivariate power series and graphed surfaces.

A ``Series2`` of order N keeps the plain coefficients c[j,k] of x^j y^k for
j + k <= N.  ``F(j, k)`` returns the factorial-convention coefficient
c[j,k] * j! * k!, i.e. the partial derivative at the origin.

Coefficients are any ring elements supporting + - * with each other and with
ints, plus ``is_zero``; ``Scalar`` is the usual choice but a ``Series2`` can
itself serve as coefficient ring (a series whose coefficients are series in a
displacement parameter).
"""

from __future__ import annotations

import json
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

from .errors import ConstantTermNonzero, OrderMismatch, SeriesFormatError, SingularMatrix
from .scalar import ZERO, Scalar


@lru_cache(maxsize=None)
def _layout(N: int):
    """Bidegrees in storage order, grouped by total degree."""
    return tuple((d - k, k) for d in range(N + 1) for k in range(d + 1))


def _pos(j: int, k: int) -> int:
    d = j + k
    return d * (d + 1) // 2 + k


def _level(x) -> int:
    return x.level if isinstance(x, Series2) else 0


def _iszero(x) -> bool:
    if isinstance(x, int):
        return x == 0
    return x.is_zero()


def _binom_frac(alpha: Fraction, n: int) -> Fraction:
    """Binomial coefficient C(alpha, n)."""
    r = Fraction(1)
    for i in range(n):
        r *= (alpha - i) / (i + 1)
    return r


def _binom_half(n: int) -> Fraction:
    """Binomial coefficient C(1/2, n)."""
    return _binom_frac(Fraction(1, 2), n)


def _as_coeff(q, zero):
    """Turn an int/Fraction into a coefficient of the same ring as ``zero``."""
    if isinstance(q, Fraction):
        if isinstance(zero, Scalar):
            return Scalar(q)
        return zero + Scalar(q)
    return zero + q


class Series2:
    """Truncated power series in x, y of total order N."""

    __slots__ = ("order", "c", "zero", "level")

    def __init__(self, order: int, coeffs=None, zero=ZERO):
        self.order = order
        self.zero = zero
        self.level = 1 + _level(zero)
        n = len(_layout(order))
        if coeffs is None:
            self.c = [zero] * n
        elif isinstance(coeffs, dict):
            c = [zero] * n
            for (j, k), v in coeffs.items():
                if j < 0 or k < 0:
                    raise SeriesFormatError(f"negative bidegree {(j, k)}")
                if j + k <= order:
                    c[_pos(j, k)] = v if not isinstance(v, (int, Fraction)) else _as_coeff(v, zero)
            self.c = c
        else:
            if len(coeffs) != n:
                raise SeriesFormatError("coefficient list has the wrong length")
            self.c = list(coeffs)

    # -- construction -------------------------------------------------------
    @classmethod
    def from_factorial(cls, order: int, values: dict, zero=ZERO) -> "Series2":
        """Build from factorial-convention values F_{j,k}."""
        out = {}
        for (j, k), v in values.items():
            v = v if not isinstance(v, (int, Fraction)) else _as_coeff(v, zero)
            out[(j, k)] = v * Fraction(1, factorial(j) * factorial(k))
        return cls(order, out, zero)

    @classmethod
    def constant(cls, order: int, value, zero=ZERO) -> "Series2":
        s = cls(order, None, zero)
        s.c[0] = zero + value
        return s

    @classmethod
    def var(cls, order: int, which: str, zero=ZERO) -> "Series2":
        s = cls(order, None, zero)
        if order >= 1:
            s.c[_pos(1, 0) if which == "x" else _pos(0, 1)] = zero + 1
        return s

    def _new(self, c):
        s = object.__new__(Series2)
        s.order, s.zero, s.level, s.c = self.order, self.zero, self.level, c
        return s

    # -- access -------------------------------------------------------------
    def coeff(self, j: int, k: int):
        if j < 0 or k < 0 or j + k > self.order:
            return self.zero
        return self.c[_pos(j, k)]

    def F(self, j: int, k: int):
        """Factorial-convention coefficient F_{j,k} = c_{j,k} j! k!."""
        return self.coeff(j, k) * (factorial(j) * factorial(k))

    def items(self):
        """Nonzero (j, k, c) triples in storage order."""
        for (j, k), v in zip(_layout(self.order), self.c):
            if not _iszero(v):
                yield j, k, v

    def homogeneous_part(self, d: int) -> dict:
        return {(d - k, k): self.coeff(d - k, k) for k in range(d + 1)}

    def truncate(self, order: int) -> "Series2":
        if order >= self.order:
            if order == self.order:
                return self
            return Series2(order, {(j, k): v for j, k, v in self.items()}, self.zero)
        n = len(_layout(order))
        s = self._new(self.c[:n])
        s.order = order
        return s

    def valuation(self) -> int:
        for (j, k), v in zip(_layout(self.order), self.c):
            if not _iszero(v):
                return j + k
        return self.order + 1

    def is_zero(self) -> bool:
        return all(_iszero(v) for v in self.c)

    def constant_term(self):
        return self.c[0]

    def copy(self) -> "Series2":
        return self._new(list(self.c))

    def map_coeffs(self, fn, zero=None) -> "Series2":
        z = self.zero if zero is None else zero
        return Series2(self.order, [fn(v) for v in self.c], z)

    # -- ring operations ----------------------------------------------------
    def _check(self, other: "Series2"):
        if other.order != self.order:
            raise OrderMismatch(f"orders {self.order} and {other.order} differ")

    def _lift_other(self, other):
        """Return ('series', s) or ('coeff', c) for the operand."""
        if isinstance(other, Series2):
            if other.level == self.level:
                self._check(other)
                return "series", other
            if other.level < self.level:
                return "coeff", other
            return None, None
        return "coeff", other

    def __add__(self, other):
        kind, o = self._lift_other(other)
        if kind == "series":
            return self._new([a + b for a, b in zip(self.c, o.c)])
        if kind == "coeff":
            c = list(self.c)
            c[0] = c[0] + o
            return self._new(c)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return self._new([-a for a in self.c])

    def __sub__(self, other):
        kind, o = self._lift_other(other)
        if kind == "series":
            return self._new([a - b for a, b in zip(self.c, o.c)])
        if kind == "coeff":
            c = list(self.c)
            c[0] = c[0] - o
            return self._new(c)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        kind, o = self._lift_other(other)
        if kind == "coeff":
            if isinstance(o, Fraction) and isinstance(self.zero, Scalar):
                o = Scalar(o)
            return self._new([a * o for a in self.c])
        if kind != "series":
            return NotImplemented
        N = self.order
        lay = _layout(N)
        a_nz = [(j, k, v) for (j, k), v in zip(lay, self.c) if not _iszero(v)]
        b_nz = [(j, k, v) for (j, k), v in zip(lay, o.c) if not _iszero(v)]
        out = [None] * len(lay)
        for j1, k1, v1 in a_nz:
            room = N - j1 - k1
            for j2, k2, v2 in b_nz:
                if j2 + k2 > room:
                    break
                p = _pos(j1 + j2, k1 + k2)
                t = v1 * v2
                out[p] = t if out[p] is None else out[p] + t
        z = self.zero
        return self._new([z if v is None else v for v in out])

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = Series2.constant(self.order, 1, self.zero)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __truediv__(self, other):
        if isinstance(other, Series2) and other.level == self.level:
            return self * other.inverse()
        if isinstance(other, int):
            other = Fraction(1, other)
            return self * other
        if isinstance(other, Fraction):
            return self * (1 / other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __eq__(self, other):
        if isinstance(other, Series2):
            if other.order != self.order:
                return False
            return (self - other).is_zero()
        if isinstance(other, (int, Fraction, Scalar)):
            return (self - other).is_zero()
        return NotImplemented

    def __hash__(self):
        return hash((self.order, self.level))

    def compose_univariate(self, coeffs) -> "Series2":
        """sum_n coeffs[n] * self**n; self must have zero constant term."""
        if not _iszero(self.c[0]):
            raise ConstantTermNonzero("argument of a univariate series needs zero constant term")
        n = min(len(coeffs) - 1, self.order)
        acc = Series2(self.order, None, self.zero)
        for i in range(n, -1, -1):
            acc = acc * self
            a = coeffs[i]
            if isinstance(a, Fraction) and isinstance(self.zero, Scalar):
                a = Scalar(a)
            acc = acc + a
        return acc

    def inverse(self) -> "Series2":
        c0 = self.c[0]
        inv0 = c0.inverse() if not isinstance(c0, int) else Fraction(1, c0)
        h = (self - c0) * inv0
        geo = [Fraction((-1) ** n) for n in range(self.order + 1)]
        return h.compose_univariate(geo) * inv0

    def sqrt(self) -> "Series2":
        """Principal square root: sqrt(c0) * (1 + h)^(1/2)."""
        c0 = self.c[0]
        if _iszero(c0):
            if self.is_zero():
                return self
            raise ConstantTermNonzero("square root of a series with zero constant term")
        r0 = c0.sqrt()
        h = (self - c0) * c0.inverse()
        return h.compose_univariate([_binom_half(n) for n in range(self.order + 1)]) * r0

    def cbrt(self) -> "Series2":
        """Cube root cbrt(c0) * (1 + h)^(1/3), with the principal root of c0."""
        c0 = self.c[0]
        if _iszero(c0):
            raise ConstantTermNonzero("cube root of a series with zero constant term")
        r0 = c0.cbrt()
        h = (self - c0) * c0.inverse()
        third = Fraction(1, 3)
        return h.compose_univariate([_binom_frac(third, n) for n in range(self.order + 1)]) * r0

    # -- calculus and composition ------------------------------------------
    def partial(self, direction: str) -> "Series2":
        """Formal partial derivative; the order drops by one."""
        N = self.order - 1
        if N < 0:
            return Series2(0, None, self.zero)
        out = {}
        for j, k, v in self.items():
            if direction == "x" and j > 0 and j + k - 1 <= N:
                out[(j - 1, k)] = v * j
            elif direction == "y" and k > 0 and j + k - 1 <= N:
                out[(j, k - 1)] = v * k
        return Series2(N, out, self.zero)

    def substitute(self, X: "Series2", Y: "Series2") -> "Series2":
        """F(X(x,y), Y(x,y)) truncated at the order of X and Y."""
        if not _iszero(X.c[0]) or not _iszero(Y.c[0]):
            raise ConstantTermNonzero("substituted series must vanish at the origin")
        if X.order != Y.order:
            raise OrderMismatch("X and Y must have the same order")
        M = X.order
        n = min(self.order, M)
        ypow = [Series2.constant(M, 1, X.zero)]
        for _ in range(n):
            ypow.append(ypow[-1] * Y)
        acc = Series2(M, None, X.zero)
        for j in range(n, -1, -1):
            acc = acc * X
            for k in range(n - j + 1):
                v = self.coeff(j, k)
                if not _iszero(v):
                    acc = acc + ypow[k] * v
        return acc

    def evaluate(self, x0, y0):
        """Sum of the retained terms at a point (exact for polynomials)."""
        total = self.zero
        for j, k, v in self.items():
            total = total + v * (x0 ** j) * (y0 ** k)
        return total

    def taylor_shift(self, x0, y0) -> "Series2":
        """F(x + x0, y + y0) - F(x0, y0), using the retained terms only."""
        N = self.order
        xp = [1]
        yp = [1]
        for _ in range(N):
            xp.append(xp[-1] * x0)
            yp.append(yp[-1] * y0)
        out = {}
        for j, k, v in self.items():
            for a in range(j + 1):
                ca = v * (comb(j, a) * xp[j - a])
                for b in range(k + 1):
                    if a + b == 0:
                        continue
                    t = ca * (comb(k, b) * yp[k - b])
                    out[(a, b)] = out[(a, b)] + t if (a, b) in out else t
        return Series2(N, out, self.zero)

    def swap(self) -> "Series2":
        return Series2(self.order, {(k, j): v for j, k, v in self.items()}, self.zero)

    # -- text -----------------------------------------------------------------
    def __repr__(self):
        terms = []
        for j, k, v in self.items():
            mono = "*".join(p for p in (
                "" if j == 0 else ("x" if j == 1 else f"x^{j}"),
                "" if k == 0 else ("y" if k == 1 else f"y^{k}")) if p)
            terms.append(f"({v})" + (f"*{mono}" if mono else ""))
        return f"Series2[{self.order}](" + (" + ".join(terms) or "0") + ")"

    def to_records(self, convention: str = "plain") -> list:
        recs = []
        for j, k, v in self.items():
            val = v if convention == "plain" else v * (factorial(j) * factorial(k))
            recs.append([j, k, str(val)])
        return recs

    def to_json(self, convention: str = "plain") -> dict:
        return {"order": self.order, "convention": convention,
                "coefficients": self.to_records(convention)}

    @classmethod
    def from_json(cls, data: dict) -> "Series2":
        try:
            order = int(data["order"])
            conv = data.get("convention", "plain")
            recs = data["coefficients"]
        except (KeyError, TypeError, ValueError) as exc:
            raise SeriesFormatError(f"bad series record: {exc}") from exc
        if conv not in ("plain", "factorial"):
            raise SeriesFormatError(f"unknown convention {conv!r}")
        vals = {}
        for rec in recs:
            if len(rec) != 3:
                raise SeriesFormatError(f"bad coefficient record {rec!r}")
            j, k, txt = int(rec[0]), int(rec[1]), rec[2]
            vals[(j, k)] = Scalar(str(txt))
        if conv == "factorial":
            return cls.from_factorial(order, vals)
        return cls(order, vals)


def series_arith(op: str, F: Series2, G: Series2) -> Series2:
    if F.order != G.order:
        raise OrderMismatch(f"orders {F.order} and {G.order} differ")
    if op == "add":
        return F + G
    if op == "sub":
        return F - G
    if op == "mul":
        return F * G
    raise ValueError(f"unknown op {op!r}")


def polynomial(order: int, terms: dict) -> Series2:
    """Series from plain coefficients given as {(j,k): int|Fraction|Scalar|str}."""
    vals = {}
    for key, v in terms.items():
        vals[key] = Scalar(v) if isinstance(v, str) else (Scalar(v) if not isinstance(v, Scalar) else v)
    return Series2(order, vals)


def invert_map(X: Series2, Y: Series2):
    """Compositional inverse of (x, y) -> (X, Y); both without constant term.

    Returns (P, Q) with X(P, Q) = x and Y(P, Q) = y through the common order.
    """
    N = X.order
    a, b = X.coeff(1, 0), X.coeff(0, 1)
    c, d = Y.coeff(1, 0), Y.coeff(0, 1)
    det = a * d - b * c
    if _iszero(det):
        raise SingularMatrix("linear part of the map is singular")
    idet = det.inverse() if not isinstance(det, int) else Fraction(1, det)
    ia, ib, ic, id_ = d * idet, -b * idet, -c * idet, a * idet
    xs = Series2.var(N, "x", X.zero)
    ys = Series2.var(N, "y", X.zero)
    # nonlinear parts
    Xn = X - (xs * a + ys * b)
    Yn = Y - (xs * c + ys * d)
    P = xs * ia + ys * ib
    Q = xs * ic + ys * id_
    for _ in range(N):
        rx = xs - Xn.substitute(P, Q)
        ry = ys - Yn.substitute(P, Q)
        P = rx * ia + ry * ib
        Q = rx * ic + ry * id_
    return P, Q


def displaced_jet(F: Series2, m: int) -> Series2:
    """The m-jet of F re-centred at a symbolic displacement (s, t).

    Returns a Series2 of order m in (x, y) whose coefficients are Series2 in
    (s, t) of order N - m, where N is the order of F.  Each coefficient is then
    exact: the degree-(j+k) coefficient of the shift depends on terms of F of
    degree up to j + k + (N - m) <= N.
    """
    N = F.order
    M = N - m
    if M < 0:
        raise OrderMismatch(f"order {N} below requested jet order {m}")
    zero_in = Series2(M, None, F.zero)
    out = {}
    for a in range(m + 1):
        for b in range(m + 1 - a):
            if a + b == 0:
                continue
            # d^a_x d^b_y F / (a! b!) as a series in (s, t)
            cs = {}
            for j, k, v in F.items():
                if j < a or k < b or (j - a) + (k - b) > M:
                    continue
                cs[(j - a, k - b)] = v * (comb(j, a) * comb(k, b))
            out[(a, b)] = Series2(M, cs, F.zero)
    return Series2(m, out, zero_in)


# ---------------------------------------------------------------------------

class SurfaceGraph:
    """Surface u = F(x, y) near a basepoint, with F(0, 0) = 0.

    ``expr`` optionally carries a closed form (an expression tree) so that
    re-centring can re-expand exactly instead of shifting a truncation.
    ``polynomial`` marks series that are the whole function, so shifting
    them loses nothing.
    """

    __slots__ = ("series", "basepoint", "expr", "polynomial")

    def __init__(self, series: Series2, basepoint=None, expr=None, polynomial=None):
        if not _iszero(series.c[0]):
            series = series - series.c[0]
        self.series = series
        self.basepoint = tuple(basepoint) if basepoint is not None else (ZERO, ZERO, ZERO)
        self.expr = expr
        if polynomial is None:
            polynomial = False
        self.polynomial = polynomial

    @property
    def order(self) -> int:
        return self.series.order

    def shifted(self, x0, y0) -> "SurfaceGraph":
        """The same surface graphed around the point above (x0, y0)."""
        from .expr import expand_shifted  # local import, expr depends on series

        bx, by, bu = self.basepoint
        if self.expr is not None:
            ser, u0 = expand_shifted(self.expr, self.order, x0, y0)
            return SurfaceGraph(ser, (bx + x0, by + y0, bu + u0), self.expr, False)
        u0 = self.series.evaluate(x0, y0)
        ser = self.series.taylor_shift(x0, y0)
        return SurfaceGraph(ser, (bx + x0, by + y0, bu + u0), None, self.polynomial)

    def exact_shift(self) -> bool:
        """Whether shifting reproduces exact coefficients."""
        return self.expr is not None or self.polynomial

    def to_json(self) -> dict:
        d = self.series.to_json()
        d["basepoint"] = [str(v) for v in self.basepoint]
        return d

    @classmethod
    def from_json(cls, data: dict) -> "SurfaceGraph":
        ser = Series2.from_json(data)
        bp = data.get("basepoint")
        basepoint = tuple(Scalar(str(v)) for v in bp) if bp else None
        return cls(ser, basepoint, None, bool(data.get("polynomial", False)))


def load_surface(path: str) -> SurfaceGraph:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SeriesFormatError(f"{path}: {exc}") from exc
    return SurfaceGraph.from_json(data)
