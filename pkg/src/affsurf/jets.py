"""Jet-coordinate polynomials, total derivatives and dependent coordinates.

Jet coordinates u_{j,k} stand for the partial derivatives of u = F(x, y).
Expressions are sympy rational functions in the symbols ``u{j}_{k}`` with one
adjoined radical ``r`` = sqrt(u11^2 - u20 u02); ``r^2`` is always reduced.

The dependent-coordinate machinery has two routes:

* symbolic: repeated total derivatives of a base relation, substituting
  earlier dependents (fine through the first few orders);
* series: at a numeric or cross-section base jet, the relation
  u_{a,b}(x, y) = R(jet of F at (x, y)) is expanded as a power series and
  read off order by order.  This is what the compatibility sequence uses.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import factorial

import sympy as sp
from sympy import QQ
from sympy.polys.rings import ring

from .errors import DenominatorZero, NotDependent, NotInField
from .scalar import Scalar
from .series import Series2

RADICAL = sp.Symbol("r")


@lru_cache(maxsize=None)
def u(j: int, k: int) -> sp.Symbol:
    """The jet coordinate u_{j,k} as a sympy symbol."""
    return sp.Symbol(f"u{j}_{k}")


def coord_of(sym: sp.Symbol):
    """(j, k) for a jet-coordinate symbol, None for anything else."""
    name = sym.name
    if not name.startswith("u") or "_" not in name:
        return None
    j, k = name[1:].split("_")
    return int(j), int(k)


def _hess():
    return u(1, 1) ** 2 - u(2, 0) * u(0, 2)


def _reduce_radical(e):
    """Replace r^2 by the Hessian expression in a polynomial."""
    e = sp.expand(e)
    if not e.has(RADICAL):
        return e
    p = sp.Poly(e, RADICAL)
    B = _hess()
    out = 0
    for (n,), cf in p.terms():
        out += cf * B ** (n // 2) * RADICAL ** (n % 2)
    return sp.expand(out)


class JetPolynomial:
    """A rational function in jet coordinates and the radical r."""

    __slots__ = ("expr", "_numden")

    def __init__(self, expr):
        self.expr = sp.sympify(expr)
        self._numden = None

    @classmethod
    def coordinate(cls, j: int, k: int) -> "JetPolynomial":
        return cls(u(j, k))

    @classmethod
    def radical(cls) -> "JetPolynomial":
        return cls(RADICAL)

    def coords(self):
        return sorted(c for c in map(coord_of, self.expr.free_symbols) if c is not None)

    def order(self) -> int:
        return max((j + k for j, k in self.coords()), default=0)

    def numden(self):
        """(numerator, denominator) with r^2 reduced in both."""
        if self._numden is None:
            n, d = _ring_numden(self.expr, max(_expr_order(self.expr), 2))
            self._numden = (n.as_expr(), d.as_expr())
        return self._numden

    def simplified(self) -> "JetPolynomial":
        n, d = self.numden()
        return JetPolynomial(sp.cancel(n / d))

    def _wrap(self, other):
        return other.expr if isinstance(other, JetPolynomial) else sp.sympify(other)

    def __add__(self, o):
        return JetPolynomial(self.expr + self._wrap(o))

    __radd__ = __add__

    def __sub__(self, o):
        return JetPolynomial(self.expr - self._wrap(o))

    def __rsub__(self, o):
        return JetPolynomial(self._wrap(o) - self.expr)

    def __mul__(self, o):
        return JetPolynomial(self.expr * self._wrap(o))

    __rmul__ = __mul__

    def __truediv__(self, o):
        return JetPolynomial(self.expr / self._wrap(o))

    def __neg__(self):
        return JetPolynomial(-self.expr)

    def __pow__(self, n: int):
        return JetPolynomial(self.expr ** n)

    def subs(self, mapping: dict) -> "JetPolynomial":
        """Substitute coordinates; keys are (j, k) pairs, values JetPolynomials or numbers."""
        m = {u(*key): (v.expr if isinstance(v, JetPolynomial) else sp.sympify(v))
             for key, v in mapping.items()}
        return JetPolynomial(self.expr.xreplace(m))

    def is_zero(self) -> bool:
        n, _ = self.numden()
        return n == 0

    def __eq__(self, other):
        if not isinstance(other, JetPolynomial):
            other = JetPolynomial(other)
        return (self - other).is_zero()

    def __hash__(self):
        return hash(self.expr)

    def __repr__(self):
        return f"JetPolynomial({self.expr})"

    def __str__(self):
        return str(self.expr)

    # -- evaluation ---------------------------------------------------------
    def evaluate_in(self, value_of, radical, one):
        """Evaluate in any ring: ``value_of(j, k)`` gives coordinates, ``radical`` is r."""
        num, den = self.numden()
        n = _eval_poly(num, value_of, radical, one)
        d = _eval_poly(den, value_of, radical, one)
        return n * _inverse(d)

    def evaluate(self, values: dict) -> Scalar:
        """Value at a numeric jet {(j, k): number}; r is the principal root."""
        vals = {key: v if isinstance(v, Scalar) else Scalar(v) for key, v in values.items()}

        def value_of(j, k):
            return vals.get((j, k), Scalar(0))

        rad = None
        if self.expr.has(RADICAL):
            B = value_of(1, 1) ** 2 - value_of(2, 0) * value_of(0, 2)
            if B.is_zero():
                raise DenominatorZero("radicand u11^2 - u20 u02 vanishes")
            rad = B.sqrt()
        return self.evaluate_in(value_of, rad, Scalar(1))


def _inverse(d):
    if isinstance(d, Series2):
        if _is_zero(d.constant_term()):
            raise DenominatorZero("denominator vanishes at the basepoint")
        return d.inverse()
    if _is_zero(d):
        raise DenominatorZero("denominator vanishes")
    return d.inverse()


def _is_zero(v):
    return v == 0 if isinstance(v, int) else v.is_zero()


def _eval_poly(expr, value_of, radical, one):
    """Evaluate a polynomial in coordinates and r with cached powers."""
    syms = sorted(expr.free_symbols, key=lambda s: s.name)
    if not syms:
        return one * _frac(expr)
    p = sp.Poly(expr, *syms)
    base = []
    for s in syms:
        if s == RADICAL:
            if radical is None:
                raise DenominatorZero("radical requested but unavailable")
            base.append(radical)
        else:
            base.append(value_of(*coord_of(s)))
    powers = [{0: one, 1: b} for b in base]

    def pw(i, e):
        cache = powers[i]
        if e not in cache:
            cache[e] = pw(i, e - 1) * base[i]
        return cache[e]

    acc = None
    for mon, cf in p.terms():
        term = None
        for i, e in enumerate(mon):
            if e:
                term = pw(i, e) if term is None else term * pw(i, e)
        c = _frac(cf)
        term = one * c if term is None else term * c
        acc = term if acc is None else acc + term
    return acc if acc is not None else one * 0


def _frac(c) -> Fraction:
    c = sp.Rational(c)
    return Fraction(int(c.p), int(c.q))


# ---------------------------------------------------------------------------
# total derivatives

@lru_cache(maxsize=None)
def _radical_derivative(direction: str):
    """D r = D(B) / (2 r) with B = u11^2 - u20 u02."""
    dB = _slow_total_derivative(_hess(), direction)
    return dB / (2 * RADICAL)


@lru_cache(maxsize=None)
def _jet_ring(K: int):
    """Sparse polynomial ring over Q in u_{j,k} (j + k <= K) and r."""
    syms = [u(j, d - j) for d in range(K + 1) for j in range(d, -1, -1)] + [RADICAL]
    R, *gens = ring(syms, QQ)
    index = {s: i for i, s in enumerate(syms)}
    B = gens[index[u(1, 1)]] ** 2 - gens[index[u(2, 0)]] * gens[index[u(0, 2)]]
    return R, gens, syms, index, B


def _ring_reduce(p, K):
    """r^2 -> B in a ring element."""
    R, gens, syms, index, B = _jet_ring(K)
    ri = len(syms) - 1
    if all(m[ri] < 2 for m in p.monoms()):
        return p
    out = R.zero
    r = gens[ri]
    for m, c in p.terms():
        e = m[ri]
        mono = list(m)
        mono[ri] = e % 2
        out += R({tuple(mono): c}) * B ** (e // 2)
    return out


def _ring_numden(expr, K):
    n, d = sp.fraction(sp.together(expr))
    R = _jet_ring(K)[0]
    return _ring_reduce(R(n), K), _ring_reduce(R(d), K)


def _expr_order(expr) -> int:
    return max((j + k for j, k in filter(None, map(coord_of, expr.free_symbols))), default=0)


def total_derivative(P: JetPolynomial, direction: str) -> JetPolynomial:
    """D_x or D_y: sum of dP/du_{j,k} * u_{j+1,k} (or u_{j,k+1}), chain rule on r.

    Computed on numerator and denominator in a sparse polynomial ring; with
    D r = D(B) r / (2 B) the result is again a quotient of polynomials.
    """
    if direction not in ("x", "y"):
        raise ValueError("direction must be 'x' or 'y'")
    K = max(_expr_order(P.expr), 2) + 1
    R, gens, syms, index, B = _jet_ring(K)
    ri = len(syms) - 1
    r = gens[ri]
    nxt = {}
    for i, s in enumerate(syms[:-1]):
        j, k = coord_of(s)
        if j + k < K:
            nxt[i] = gens[index[u(j + 1, k) if direction == "x" else u(j, k + 1)]]

    def plain(q):
        present = {i for m in q.monoms() for i, e in enumerate(m) if e and i != ri}
        out = R.zero
        for i in present:
            out += q.diff(gens[i]) * nxt[i]
        return out

    dB = plain(B)

    def D2B(q):
        # 2 B D(q)
        return 2 * B * plain(q) + q.diff(r) * dB * r

    n, d = _ring_numden(P.expr, K)
    if d.is_ground and all(m[ri] == 0 for m in n.monoms()):
        return JetPolynomial(plain(n).as_expr() / d.as_expr())
    num = _ring_reduce(D2B(n) * d - n * D2B(d), K)
    if not num:
        return JetPolynomial(0)
    den = _ring_reduce(2 * B * d * d, K)
    num, den = num.cancel(den)
    return JetPolynomial(num.as_expr() / den.as_expr())


def _slow_total_derivative(e, direction):
    out = 0
    for s in e.free_symbols:
        if s == RADICAL:
            out += sp.diff(e, s) * _radical_derivative(direction)
            continue
        c = coord_of(s)
        if c is None:
            continue
        j, k = c
        nxt = u(j + 1, k) if direction == "x" else u(j, k + 1)
        out += sp.diff(e, s) * nxt
    return out


def _partials(F: Series2, m: int) -> dict:
    """All partial derivatives of order <= m of F, each truncated to order N - m."""
    N = F.order - m
    out = {}
    for a in range(m + 1):
        for b in range(m + 1 - a):
            G = F
            for _ in range(a):
                G = G.partial("x")
            for _ in range(b):
                G = G.partial("y")
            out[(a, b)] = G.truncate(N)
    return out


def evaluate_on_surface(P: JetPolynomial, F: Series2) -> Series2:
    """P on the prolonged graph of F: a series of order N - order(P)."""
    m = P.order()
    if P.expr.has(RADICAL):
        m = max(m, 2)
    if m > F.order:
        raise ValueError(f"series order {F.order} below jet order {m}")
    parts = _partials(F, m)
    one = Series2.constant(F.order - m, 1, F.zero)
    rad = None
    if P.expr.has(RADICAL):
        B = parts[(1, 1)] * parts[(1, 1)] - parts[(2, 0)] * parts[(0, 2)]
        if _is_zero(B.constant_term()):
            raise DenominatorZero("radicand vanishes at the basepoint")
        rad = B.sqrt()

    def value_of(j, k):
        return parts.get((j, k), one * 0)

    return P.evaluate_in(value_of, rad, one)


# ---------------------------------------------------------------------------
# base relations

def relation_03() -> JetPolynomial:
    """u03 = R03: the solved form of I03 = 0 on 3-jets."""
    u20, u11, u02 = u(2, 0), u(1, 1), u(0, 2)
    u30, u21, u12 = u(3, 0), u(2, 1), u(1, 2)
    r = RADICAL
    braces = (6 * u02 * u11 ** 2 * u12 - 3 * u02 ** 2 * u12 * u20 + 9 * u02 * u11 * u12 * u20
              + 9 * u02 * u12 * u20 ** 2 + 3 * u11 * u12 * u20 ** 2
              + 6 * u02 * u11 * u12 * r + 9 * u02 * u12 * u20 * r - 3 * u12 * u20 ** 2 * r
              - 3 * u02 ** 2 * u11 * u21 - 9 * u02 ** 2 * u20 * u21 - 9 * u02 * u11 * u20 * u21
              - 6 * u11 ** 2 * u20 * u21 + 3 * u02 * u20 ** 2 * u21
              - 3 * u02 ** 2 * r * u21 + 9 * u02 * u20 * r * u21 + 6 * u11 * u20 * r * u21
              + u02 ** 3 * u30 + 3 * u02 ** 2 * u11 * u30 + 6 * u02 * u11 ** 2 * u30
              + 4 * u11 ** 3 * u30 - 3 * u02 ** 2 * u20 * u30 - 3 * u02 * u11 * u20 * u30
              - 3 * u02 ** 2 * r * u30 - 6 * u02 * u11 * r * u30 - 4 * u11 ** 2 * r * u30
              + u02 * u20 * r * u30)
    return JetPolynomial(braces / (u11 + u20 + r) ** 3)


@lru_cache(maxsize=None)
def _relation_40_expr():
    """Derive u40 = R40 from the pipeline on a generic 4-jet.

    The first loop maps the quadratic part to xy by the linear map M with
    det M = r; after it, the branch-B2 element gives G40 -> (G40 - 2 G21 G30)/G30
    (G21 is then killed by the second loop).  G40 is linear in u40, so the
    vanishing is solved directly.  The normalizing factor sqrt(2A) only enters
    through even powers and is reduced away.
    """
    x, y, s = sp.symbols("x y s")
    u20, u11, u02 = u(2, 0), u(1, 1), u(0, 2)
    r = RADICAL
    A = u20 + 2 * u11 + u02
    a, b = (u20 + u11 + r) / s, (u11 + u02 - r) / s
    c, d = (u20 + u11 - r) / s, (u11 + u02 + r) / s
    X, Y = (d * x - b * y) / r, (-c * x + a * y) / r

    def part(m):
        return sp.Poly(sp.expand(sum(u(m - i, i) * X ** (m - i) * Y ** i
                                     / (factorial(m - i) * factorial(i)) for i in range(m + 1))), x, y)

    P3, P4 = part(3), part(4)
    G30 = P3.coeff_monomial(x ** 3) * 6
    G21 = P3.coeff_monomial(x ** 2 * y) * 2
    G40 = P4.coeff_monomial(x ** 4) * 24
    lead = sp.diff(G40, u(4, 0))
    rest = sp.expand(G40 - lead * u(4, 0))
    sol = sp.together((2 * G21 * G30 - rest) / lead)
    num, den = sp.fraction(sol)

    def red(e):
        p = sp.Poly(sp.expand(e), r, s)
        B = u11 ** 2 - u20 * u02
        out = 0
        for (er, es), cf in p.terms():
            if es % 2:
                raise AssertionError("odd power of sqrt(2A) survived")
            out += cf * B ** (er // 2) * r ** (er % 2) * (2 * A) ** (es // 2)
        return sp.expand(out)

    return red(num) / red(den)


def relation_40() -> JetPolynomial:
    """u40 = R40: the vanishing of I40 in branch B2, derived from the pipeline."""
    return JetPolynomial(_relation_40_expr())


# ---------------------------------------------------------------------------
# subjets

CROSS_SECTION = {(0, 0): 0, (1, 0): 0, (0, 1): 0, (2, 0): 0, (1, 1): 1, (0, 2): 0,
                 (3, 0): 1, (2, 1): 0, (1, 2): 0}
CROSS_FREE = ((2, 2), (3, 1), (3, 2))


class _Poly:
    """Polynomial coefficient ring Q[u22, u31, u32] for series arithmetic."""

    __slots__ = ("p",)
    ring, *gens = sp.ring("u22 u31 u32", sp.QQ)

    def __init__(self, p):
        self.p = p

    @classmethod
    def of(cls, v):
        if isinstance(v, _Poly):
            return v
        if isinstance(v, Fraction):
            return cls(cls.ring(sp.Rational(v.numerator, v.denominator)))
        return cls(cls.ring(v))

    def _o(self, o):
        if isinstance(o, _Poly):
            return o.p
        if isinstance(o, Fraction):
            return self.ring.domain.convert(sp.Rational(o.numerator, o.denominator))
        if isinstance(o, int):
            return o
        return NotImplemented

    def __add__(self, o):
        o = self._o(o)
        return NotImplemented if o is NotImplemented else _Poly(self.p + o)

    __radd__ = __add__

    def __sub__(self, o):
        o = self._o(o)
        return NotImplemented if o is NotImplemented else _Poly(self.p - o)

    def __rsub__(self, o):
        o = self._o(o)
        return NotImplemented if o is NotImplemented else _Poly(o - self.p)

    def __mul__(self, o):
        o = self._o(o)
        return NotImplemented if o is NotImplemented else _Poly(self.p * o)

    __rmul__ = __mul__

    def __neg__(self):
        return _Poly(-self.p)

    def is_zero(self):
        return not self.p

    def _const(self):
        if not self.p.is_ground:
            raise NotInField("only constant coefficients can be inverted")
        c = self.p.LC if self.p else 0
        return Fraction(int(c.numerator), int(c.denominator))

    def inverse(self):
        c = self._const()
        if c == 0:
            raise DenominatorZero("zero constant")
        return _Poly.of(1 / c)

    def sqrt(self):
        c = self._const()
        n, d = c.numerator, c.denominator
        rn, rd = sp.integer_nthroot(n, 2), sp.integer_nthroot(d, 2)
        if n < 0 or not (rn[1] and rd[1]):
            raise NotInField("constant is not a rational square")
        return _Poly.of(Fraction(rn[0], rd[0]))

    def as_expr(self):
        syms = [u(2, 2), u(3, 1), u(3, 2)]
        return self.ring.to_domain().to_sympy(self.p).xreplace(
            dict(zip(sp.symbols("u22 u31 u32"), syms)))

    def __repr__(self):
        return str(self.p)


class SubjetSolver:
    """Dependent jet coordinates of the subjet I03 = 0 (and I40 = 0 in B2.2).

    ``branch`` is "B2.1" (only u03 = R03) or "B2.2" (also u40 = R40).  With
    ``cross_section=True`` the solver works at the normalized base jet
    u11 = u30 = 1 (other coordinates of order <= 3 vanish) with u22, u31, u32
    free; dependent values are polynomials in those.
    """

    def __init__(self, branch: str = "B2.1", cross_section: bool = False):
        if branch not in ("B2.1", "B2.2"):
            raise ValueError("branch must be B2.1 or B2.2")
        if cross_section and branch != "B2.2":
            raise ValueError("the cross-section route is for B2.2, where u_{j>=4,k} are dependent")
        self.branch = branch
        self.cross_section = cross_section
        self.base = {(0, 3): relation_03()}
        if branch == "B2.2":
            self.base[(4, 0)] = relation_40()
        self._memo = {}
        self._chains = None

    def is_dependent(self, j: int, k: int) -> bool:
        if j < 0 or k < 0 or j + k < 3:
            return False
        return k >= 3 or (self.branch == "B2.2" and j >= 4)

    def _source(self, j, k):
        """Base relation and derivative counts reaching u_{j,k} (I03 chain first)."""
        if k >= 3:
            return (0, 3), j, k - 3
        return (4, 0), j - 4, k

    def solve_dependent(self, j: int, k: int) -> JetPolynomial:
        if not self.is_dependent(j, k):
            raise NotDependent(f"u{j},{k} is not a dependent coordinate in {self.branch}")
        if self.cross_section:
            A, B = self.chains(j + k)
            val = A.get((j, k), B.get((j, k)))
            return JetPolynomial(val.as_expr())
        key = (j, k)
        if key in self._memo:
            return self._memo[key]
        (a, b), dx, dy = self._source(j, k)
        if dx == 0 and dy == 0:
            out = self.base[(a, b)]
        else:
            # differentiate the relation one step below, then remove dependents
            if dy > 0:
                prev, direction = (j, k - 1), "y"
            else:
                prev, direction = (j - 1, k), "x"
            out = total_derivative(self.solve_dependent(*prev), direction)
            out = self._substitute_dependents(out)
        self._memo[key] = out
        return out

    def _substitute_dependents(self, P: JetPolynomial) -> JetPolynomial:
        while True:
            deps = [c for c in P.coords() if self.is_dependent(*c)]
            if not deps:
                return P
            P = P.subs({c: self.solve_dependent(*c) for c in deps})

    # -- series route at the cross-section -----------------------------------
    def chains(self, maxOrder: int):
        """Values of dependents up to total degree ``maxOrder`` from each chain.

        Returns (I03-chain values, I40-chain values) as dicts of polynomials in
        u22, u31, u32.  Each chain reuses its own values for coordinates it
        shares with the other chain and the other chain's values for the rest.
        """
        if self._chains is not None and self._chains[0] >= maxOrder:
            return self._chains[1], self._chains[2]
        solA, solB = _cross_section_chains(maxOrder, self.branch == "B2.2")
        self._chains = (maxOrder, solA, solB)
        return solA, solB


def _cross_base(j, k):
    if (j, k) in CROSS_SECTION:
        return _Poly.of(CROSS_SECTION[(j, k)])
    if (j, k) in CROSS_FREE:
        return _Poly(_Poly.gens[CROSS_FREE.index((j, k))])
    return None


def _cross_series(n, own, other, own_region):
    """Series of order n at the cross-section; unsolved degree-n coordinates are 0."""
    zero = _Poly.of(0)
    vals = {}
    for d in range(n + 1):
        for k in range(d + 1):
            j = d - k
            v = _cross_base(j, k)
            if v is None:
                src = own if own_region(j, k) else other
                v = src.get((j, k))
                if v is None:
                    v = own.get((j, k), other.get((j, k)))
            if v is not None and not v.is_zero():
                vals[(j, k)] = v * Fraction(1, factorial(j) * factorial(k))
    return Series2(n, vals, zero)


def _read_chain(R: JetPolynomial, F: Series2, a: int, b: int, n: int, out: dict):
    """u_{a+j,b+k} for j + k = n - a - b from u_{a,b}(x, y) = R(jet at (x, y))."""
    ser = evaluate_on_surface(R, F)
    m = n - a - b
    for k in range(m + 1):
        j = m - k
        out[(a + j, b + k)] = ser.coeff(j, k) * (factorial(j) * factorial(k))


def _cross_section_chains(maxOrder: int, with40: bool):
    R03 = relation_03()
    R40 = relation_40() if with40 else None
    solA, solB = {}, {}

    def inA(j, k):
        return k >= 3

    def inB(j, k):
        return j >= 4

    for n in range(3, maxOrder + 1):
        FA = _cross_series(n, solA, solB, inA)
        _read_chain(R03, FA, 0, 3, n, solA)
        if with40 and n >= 4:
            FB = _cross_series(n, solB, solA, inB)
            _read_chain(R40, FB, 4, 0, n, solB)
    return solA, solB


def compatibility_obstructions(maxOrder: int = 9):
    """(relation, I03-chain value, I40-chain value) for doubly determined coordinates.

    Values are sympy expressions in u22, u31, u32 at the cross-section; the
    obstruction is their difference.
    """
    solA, solB = _cross_section_chains(maxOrder, True)
    out = []
    for n in range(7, maxOrder + 1):
        for k in range(3, n - 3):
            j = n - k
            left, right = solA[(j, k)].as_expr(), solB[(j, k)].as_expr()
            out.append((f"u{j},{k}", sp.expand(left), sp.expand(right)))
    return out


def cross_section_check_decoupled(R: JetPolynomial, top: tuple) -> bool:
    """Whether R has zero partials in all top-order coordinates other than ``top``.

    The series route reads each dependent directly off its coefficient, which
    needs the other coordinates of the same total degree to drop out at the
    cross-section.
    """
    base = {u(*key): v for key, v in CROSS_SECTION.items()}
    base[RADICAL] = 1
    num, den = R.numden()
    d0 = den.xreplace(base)
    if d0 == 0:
        raise DenominatorZero("relation is singular at the cross-section")
    m = sum(top)
    for kk in range(m + 1):
        c = (m - kk, kk)
        if c == top:
            continue
        dn, dd = sp.diff(num, u(*c)), sp.diff(den, u(*c))
        if sp.expand((dn * den - num * dd).xreplace(base)) != 0:
            return False
    return True



def general_compatibility(values: dict, maxOrder: int, branch: str = "B2.2") -> list:
    """Degree-by-degree consistency of the subjet equations at a numeric jet.

    ``values`` gives the independent coordinates {(j, k): rational} (missing
    ones are 0); dependent ones are solved.  At each degree n the equations
    u_{a,b}(x, y) = R(jet at (x, y)) read at order n - a - b are linear in the
    degree-n dependents; no cross-section is used.  Returns one record per
    degree with the counts, the rank test and the solved values.  Solving stops
    after the first inconsistent degree.
    """
    rels = [((0, 3), relation_03())]
    if branch == "B2.2":
        rels.append(((4, 0), relation_40()))
    dep = SubjetSolver.__new__(SubjetSolver)
    dep.branch = branch
    known = {key: Fraction(v) for key, v in values.items()}
    report = []
    for n in range(3, maxOrder + 1):
        unknowns = [(n - k, k) for k in range(n + 1) if dep.is_dependent(n - k, k)]

        def residual(assign):
            vals = {key: Scalar(v) for key, v in known.items() if sum(key) <= n}
            for key in unknowns:
                vals[key] = Scalar(assign.get(key, 0))
            F = Series2.from_factorial(n, vals)
            res = []
            for (a, b), R in rels:
                m = n - a - b
                if m < 0:
                    continue
                ser = evaluate_on_surface(R, F)
                for k in range(m + 1):
                    j = m - k
                    v = vals[(a + j, b + k)] - ser.coeff(j, k) * (factorial(j) * factorial(k))
                    if not v.is_rational():
                        raise NotInField("general check needs a rational radical")
                    res.append(sp.Rational(*_pair(v.as_fraction())))
            return res

        r0 = residual({})
        cols = []
        for key in unknowns:
            r1 = residual({key: 1})
            cols.append([p - q for p, q in zip(r1, r0)])
        M = sp.Matrix(len(r0), len(unknowns), lambda i, c: cols[c][i])
        rhs = sp.Matrix([-v for v in r0])
        rank = M.rank()
        aug = M.row_join(rhs).rank()
        rec = {"order": n, "equations": len(r0), "unknowns": len(unknowns),
               "rank": rank, "consistent": rank == aug, "values": {}}
        report.append(rec)
        if rank != aug:
            break
        sol, params = M.gauss_jordan_solve(rhs)
        if params.shape[0]:
            raise NotDependent("dependent coordinates are not determined at this jet")
        for key, v in zip(unknowns, sol):
            known[key] = Fraction(int(v.p), int(v.q))
            rec["values"][key] = known[key]
    return report


def _pair(f: Fraction):
    return f.numerator, f.denominator
