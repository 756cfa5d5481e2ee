"""Exact scalars over Q and towers of quadratic extensions, with an
approximate complex fallback.

An exact value lives in a tower K_t = Q(g_1, ..., g_t) where g_i**2 = d_i and
d_i is an element of K_{i-1}.  Elements of K_t are stored as nested pairs:
an ``mpq`` at level 0 and ``(a, b)`` meaning ``a + b*g_t`` at level t.

Generators carry a fixed numerical image (the principal square root of the
image of their radicand) which is used only to pick signs of in-field roots
and to embed one tower into another; the arithmetic itself is exact.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from itertools import product

import gmpy2
import mpmath
from gmpy2 import mpq

from .errors import DivisionByZero, NotInField, ScalarParseError, TowerDepthExceeded

MAX_DEPTH = 4
DEFAULT_PREC = 256
_NUM_PREC = 320  # working precision for sign decisions on exact values


def _eps_bits(prec: int) -> int:
    # 256 bits of mantissa -> zero threshold 2^-200
    return prec * 25 // 32


@lru_cache(maxsize=None)
def _ctx(prec: int) -> mpmath.MPContext:
    ctx = mpmath.MPContext()
    ctx.prec = prec
    return ctx


# ---------------------------------------------------------------------------
# nested values

def _zero(t):
    return mpq(0) if t == 0 else (_zero(t - 1), _zero(t - 1))


def _lift(x, frm, to):
    while frm < to:
        x = (x, _zero(frm))
        frm += 1
    return x


def _is_zero(x):
    if isinstance(x, tuple):
        return _is_zero(x[0]) and _is_zero(x[1])
    return x == 0


def _add(x, y):
    if isinstance(x, tuple):
        return (_add(x[0], y[0]), _add(x[1], y[1]))
    return x + y


def _sub(x, y):
    if isinstance(x, tuple):
        return (_sub(x[0], y[0]), _sub(x[1], y[1]))
    return x - y


def _neg(x):
    if isinstance(x, tuple):
        return (_neg(x[0]), _neg(x[1]))
    return -x


def _scale(x, q):
    """Multiply a nested value by a rational."""
    if isinstance(x, tuple):
        return (_scale(x[0], q), _scale(x[1], q))
    return x * q


def _mul(x, y, tower, t):
    if t == 0:
        return x * y
    a, b = x
    c, e = y
    d = tower[t - 1]
    ac = _mul(a, c, tower, t - 1)
    be = _mul(b, e, tower, t - 1)
    # Karatsuba-style cross term
    cross = _sub(_sub(_mul(_add(a, b), _add(c, e), tower, t - 1), ac), be)
    return (_add(ac, _mul(be, d, tower, t - 1)), cross)


def _inv(x, tower, t):
    if t == 0:
        if x == 0:
            raise DivisionByZero("division by zero")
        return 1 / x
    a, b = x
    d = tower[t - 1]
    den = _sub(_mul(a, a, tower, t - 1), _mul(_mul(b, b, tower, t - 1), d, tower, t - 1))
    iden = _inv(den, tower, t - 1)
    return (_mul(a, iden, tower, t - 1), _neg(_mul(b, iden, tower, t - 1)))


def _is_lifted_rational(x):
    while isinstance(x, tuple):
        if not _is_zero(x[1]):
            return None
        x = x[0]
    return x


def _strip(tower, x):
    while tower and _is_zero(x[1]):
        x = x[0]
        tower = tower[:-1]
    return tower, x


# ---------------------------------------------------------------------------
# numerics of towers

def _principal(ctx, z):
    """Principal square root with the Re > 0, else Im > 0 convention."""
    r = ctx.sqrt(z)
    tol = ctx.mpf(2) ** (-(ctx.prec * 3 // 4)) * (abs(r) + 1)
    if abs(r.real) <= tol:
        r = ctx.mpc(0, abs(r.imag))
    elif r.real < 0:
        r = -r
    return r


def _num_value(x, gens, ctx, t):
    if t == 0:
        return ctx.mpf(int(x.numerator)) / int(x.denominator)
    return _num_value(x[0], gens, ctx, t - 1) + _num_value(x[1], gens, ctx, t - 1) * gens[t - 1]


@lru_cache(maxsize=4096)
def _gens(tower, prec):
    ctx = _ctx(prec)
    gens = []
    for i, d in enumerate(tower):
        gens.append(_principal(ctx, ctx.mpc(_num_value(d, gens, ctx, i))))
    return tuple(gens)


def _numeric(tower, x, prec=_NUM_PREC):
    ctx = _ctx(prec)
    return ctx.mpc(_num_value(x, _gens(tower, prec), ctx, len(tower)))


def _sign_fix(tower, r):
    """Negate an exact root r if its numerical image is not principal."""
    z = _numeric(tower, r)
    ctx = _ctx(_NUM_PREC)
    tol = ctx.mpf(2) ** (-200) * (abs(z) + 1)
    if z.real > tol or (abs(z.real) <= tol and z.imag > 0):
        return r
    return _neg(r)


# ---------------------------------------------------------------------------
# square roots inside a fixed tower

def _rat_sqrt(q):
    if q < 0:
        return None
    n, d = int(q.numerator), int(q.denominator)
    if gmpy2.is_square(n) and gmpy2.is_square(d):
        return mpq(int(gmpy2.isqrt(n)), int(gmpy2.isqrt(d)))
    return None


def _sqrt_in(x, tower, t):
    """Return y in K_t with y*y == x, or None."""
    if t == 0:
        return _rat_sqrt(x)
    a, b = x
    d = tower[t - 1]
    if _is_zero(b):
        r = _sqrt_in(a, tower, t - 1)
        if r is not None:
            return (r, _zero(t - 1))
        r = _sqrt_in(_mul(a, _inv(d, tower, t - 1), tower, t - 1), tower, t - 1)
        if r is not None:
            return (_zero(t - 1), r)
        return None
    norm = _sub(_mul(a, a, tower, t - 1), _mul(_mul(b, b, tower, t - 1), d, tower, t - 1))
    n = _sqrt_in(norm, tower, t - 1)
    if n is None:
        return None
    half = mpq(1, 2)
    for s in (n, _neg(n)):
        alpha = _sqrt_in(_scale(_add(a, s), half), tower, t - 1)
        if alpha is not None and not _is_zero(alpha):
            beta = _mul(_scale(b, half), _inv(alpha, tower, t - 1), tower, t - 1)
            return (alpha, beta)
    return None


def _squarefree_split(n: int):
    """Write n = c^2 * r with r free of small square factors."""
    c = 1
    if gmpy2.is_square(abs(n)):
        r = 1 if n > 0 else -1
        return int(gmpy2.isqrt(abs(n))), r
    r = n
    p = 2
    while p * p <= abs(r) and p < 2000:
        while r % (p * p) == 0:
            r //= p * p
            c *= p
        p += 1 if p == 2 else 2
    if abs(r) > 1 and gmpy2.is_square(abs(r)):
        c *= int(gmpy2.isqrt(abs(r)))
        r = 1 if r > 0 else -1
    return c, r


# ---------------------------------------------------------------------------
# tower merging

def _embed(v, i, imgs, tower):
    """Image in ``tower`` of a level-i value of another tower with generator images imgs."""
    t = len(tower)
    if i == 0:
        return _lift(v, 0, t)
    a = _embed(v[0], i - 1, imgs, tower)
    b = _embed(v[1], i - 1, imgs, tower)
    return _add(a, _mul(b, imgs[i - 1], tower, t))


@lru_cache(maxsize=4096)
def _merge(t1, t2):
    """Return (tower, images of t2's generators) with tower extending t1."""
    tower = t1
    imgs = []
    gens2 = _gens(t2, _NUM_PREC)
    for i, d in enumerate(t2):
        dimg = _embed(d, i, imgs, tower)
        r = _sqrt_in(dimg, tower, len(tower))
        if r is not None:
            z = _numeric(tower, r)
            if abs(z - gens2[i]) > abs(z + gens2[i]):
                r = _neg(r)
            imgs.append(r)
            continue
        if len(tower) >= MAX_DEPTH:
            raise TowerDepthExceeded(f"tower depth would exceed {MAX_DEPTH}")
        t = len(tower)
        tower = tower + (dimg,)
        imgs = [_lift(g, t, t + 1) for g in imgs]
        imgs.append((_zero(t), _lift(mpq(1), 0, t)))
    return tower, tuple(imgs)


def _unify(x: "Scalar", y: "Scalar"):
    if x.tower == y.tower:
        return x.tower, x.val, y.val
    if y.tower[: len(x.tower)] == x.tower:
        return y.tower, _lift(x.val, len(x.tower), len(y.tower)), y.val
    if x.tower[: len(y.tower)] == y.tower:
        return x.tower, x.val, _lift(y.val, len(y.tower), len(x.tower))
    tower, imgs = _merge(x.tower, y.tower)
    xv = _lift(x.val, len(x.tower), len(tower))
    yv = _embed(y.val, len(y.tower), imgs, tower)
    return tower, xv, yv


# ---------------------------------------------------------------------------
# the public type

class Scalar:
    """Field element: exact (rational or tower) or approximate complex.

    >>> Scalar(2).sqrt() * Scalar(2).sqrt() == 2
    True
    """

    __slots__ = ("tower", "val", "approx", "prec")

    def __init__(self, value=0):
        self.approx = None
        self.prec = 0
        self.tower = ()
        if isinstance(value, Scalar):
            self.tower, self.val = value.tower, value.val
            self.approx, self.prec = value.approx, value.prec
        elif isinstance(value, (int, Fraction)) or type(value).__name__ == "mpq":
            self.val = mpq(value)
        elif isinstance(value, str):
            s = Scalar.parse(value)
            self.tower, self.val, self.approx, self.prec = s.tower, s.val, s.approx, s.prec
        else:
            raise TypeError(f"cannot make a Scalar from {type(value).__name__}")

    # construction helpers
    @classmethod
    def _exact(cls, tower, val):
        tower, val = _strip(tower, val)
        s = object.__new__(cls)
        s.tower, s.val, s.approx, s.prec = tower, val, None, 0
        return s

    @classmethod
    def from_complex(cls, z, prec: int = DEFAULT_PREC):
        ctx = _ctx(prec)
        s = object.__new__(cls)
        s.tower, s.val = (), None
        s.approx, s.prec = ctx.mpc(z), prec
        return s

    @property
    def mode(self) -> str:
        return "exact" if self.approx is None else "approx"

    @property
    def is_exact(self) -> bool:
        return self.approx is None

    def is_rational(self) -> bool:
        return self.approx is None and not self.tower

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("not a rational scalar")
        return Fraction(int(self.val.numerator), int(self.val.denominator))

    def to_approx(self, prec: int = DEFAULT_PREC) -> "Scalar":
        if self.approx is not None:
            if self.prec == prec:
                return self
            return Scalar.from_complex(self.approx, prec)
        return Scalar.from_complex(_numeric(self.tower, self.val, prec + 32), prec)

    def to_complex(self) -> complex:
        z = self.approx if self.approx is not None else _numeric(self.tower, self.val, 64)
        return complex(z)

    # arithmetic
    @staticmethod
    def _coerce(other):
        if isinstance(other, Scalar):
            return other
        if isinstance(other, (int, Fraction)) or type(other).__name__ == "mpq":
            return Scalar._exact((), mpq(other))
        return NotImplemented

    def _approx_pair(self, other):
        prec = max(self.prec, other.prec)
        return self.to_approx(prec).approx, other.to_approx(prec).approx, prec

    def __add__(self, other):
        other = Scalar._coerce(other)
        if other is NotImplemented:
            return other
        if self.approx is None and other.approx is None:
            if not self.tower and not other.tower:
                return Scalar._exact((), self.val + other.val)
            tower, a, b = _unify(self, other)
            return Scalar._exact(tower, _add(a, b))
        a, b, prec = self._approx_pair(other)
        return Scalar.from_complex(a + b, prec)

    __radd__ = __add__

    def __neg__(self):
        if self.approx is None:
            return Scalar._exact(self.tower, _neg(self.val))
        return Scalar.from_complex(-self.approx, self.prec)

    def __pos__(self):
        return self

    def __sub__(self, other):
        other = Scalar._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = Scalar._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = Scalar._coerce(other)
        if other is NotImplemented:
            return other
        if self.approx is None and other.approx is None:
            if not self.tower and not other.tower:
                return Scalar._exact((), self.val * other.val)
            if not other.tower:
                return Scalar._exact(self.tower, _scale(self.val, other.val))
            if not self.tower:
                return Scalar._exact(other.tower, _scale(other.val, self.val))
            tower, a, b = _unify(self, other)
            return Scalar._exact(tower, _mul(a, b, tower, len(tower)))
        a, b, prec = self._approx_pair(other)
        return Scalar.from_complex(a * b, prec)

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        if self.is_zero():
            raise DivisionByZero("division by zero")
        if self.approx is None:
            return Scalar._exact(self.tower, _inv(self.val, self.tower, len(self.tower)))
        return Scalar.from_complex(1 / self.approx, self.prec)

    def __truediv__(self, other):
        other = Scalar._coerce(other)
        if other is NotImplemented:
            return other
        if self.approx is None and other.approx is None and not other.tower:
            if other.val == 0:
                raise DivisionByZero("division by zero")
            return Scalar._exact(self.tower, _scale(self.val, 1 / other.val))
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = Scalar._coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError("only integer powers")
        if n < 0:
            return self.inverse() ** (-n)
        result, base = Scalar(1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # predicates
    def is_zero(self) -> bool:
        if self.approx is None:
            return _is_zero(self.val)
        return abs(self.approx) < mpmath.mpf(2) ** (-_eps_bits(self.prec))

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        other = Scalar._coerce(other)
        if other is NotImplemented:
            return False
        return (self - other).is_zero()

    def __ne__(self, other):
        return not self.__eq__(other)

    def __hash__(self):
        if self.is_rational():
            return hash(self.as_fraction())
        return hash("affsurf.Scalar.irrational")

    # roots
    def sqrt(self) -> "Scalar":
        """Square root; the in-field root or a newly adjoined generator.

        The returned root always has the principal sign (Re > 0, or Im > 0
        when Re = 0), so sqrt is a deterministic function of its argument.
        """
        if self.approx is not None:
            return Scalar.from_complex(_principal(_ctx(self.prec), self.approx), self.prec)
        t = len(self.tower)
        if _is_zero(self.val):
            return self
        r = _sqrt_in(self.val, self.tower, t)
        if r is not None:
            return Scalar._exact(self.tower, _sign_fix(self.tower, r))
        q = _is_lifted_rational(self.val)
        if q is not None:
            # c^2 * rad with rad a small integer radicand
            n = int(q.numerator) * int(q.denominator)
            c, rad = _squarefree_split(n)
            coef = mpq(c, int(q.denominator))
            dval = _lift(mpq(rad), 0, t)
        else:
            coef, dval = mpq(1), self.val
        if t >= MAX_DEPTH:
            raise TowerDepthExceeded(f"tower depth would exceed {MAX_DEPTH}")
        tower = self.tower + (dval,)
        g = (_zero(t), _lift(coef, 0, t))
        return Scalar._exact(tower, g)

    def cbrt(self) -> "Scalar":
        """Some cube root in the current field (real when one exists).

        Raises NotInField when the exact field does not contain a cube root;
        callers are expected to fall back to approximate mode.
        """
        if self.approx is not None:
            ctx = _ctx(self.prec)
            return Scalar.from_complex(ctx.cbrt(self.approx), self.prec)
        if _is_zero(self.val):
            return self
        if not self.tower:
            q = self.val
            sgn = -1 if q < 0 else 1
            n, d = abs(int(q.numerator)), int(q.denominator)
            rn, en = gmpy2.iroot(n, 3)
            rd, ed = gmpy2.iroot(d, 3)
            if en and ed:
                return Scalar._exact((), mpq(sgn * int(rn), int(rd)))
            raise NotInField("rational without rational cube root")
        root = _tower_cbrt(self.tower, self.val)
        if root is None:
            raise NotInField("no cube root in the current tower")
        return Scalar._exact(self.tower, root)

    # text encoding
    def encode(self) -> str:
        if self.approx is not None:
            digits = int(self.prec * 0.30103) + 2
            ctx = _ctx(self.prec)
            re_ = ctx.nstr(self.approx.real, digits, strip_zeros=False, min_fixed=-10**9, max_fixed=10**9)
            im_ = ctx.nstr(self.approx.imag, digits, strip_zeros=False, min_fixed=-10**9, max_fixed=10**9)
            if not im_.startswith("-"):
                im_ = "+" + im_
            return f"{re_}{im_}i@{self.prec}"
        return _encode_nested(self.tower, self.val, len(self.tower))

    def __str__(self):
        return self.encode()

    def __repr__(self):
        return f"Scalar({self.encode()!r})"

    def sort_key(self):
        """Key for the fixed total order used to pick canonical representatives."""
        if self.approx is not None:
            return (1, float(self.approx.real), float(self.approx.imag), "")
        return (0, 0.0, 0.0, self.encode())

    _APPROX_RE = re.compile(r"^\s*([-+]?[0-9.eE+-]+?)([-+][0-9.eE+-]+)i@(\d+)\s*$")

    @classmethod
    def parse(cls, text: str) -> "Scalar":
        text = text.strip()
        m = cls._APPROX_RE.match(text)
        if m:
            prec = int(m.group(3))
            ctx = _ctx(prec)
            return cls.from_complex(ctx.mpc(ctx.mpf(m.group(1)), ctx.mpf(m.group(2))), prec)
        p = _ScalarParser(text)
        s = p.term()
        p.skip()
        if p.i != len(text):
            raise ScalarParseError(f"unexpected text at position {p.i + 1}: {text!r}")
        return s


def _fmt_q(q) -> str:
    if q.denominator == 1:
        return str(int(q.numerator))
    return f"{int(q.numerator)}/{int(q.denominator)}"


def _encode_nested(tower, x, t) -> str:
    if t == 0:
        return _fmt_q(x)
    a, b = x
    if _is_zero(b):
        return _encode_nested(tower, a, t - 1)
    return (f"({_encode_nested(tower, a, t - 1)} + {_encode_nested(tower, b, t - 1)}"
            f"*sqrt({_encode_nested(tower, tower[t - 1], t - 1)}))")


class _ScalarParser:
    _NUM = re.compile(r"-?\d+(/\d+)?")

    def __init__(self, text):
        self.text = text
        self.i = 0

    def skip(self):
        while self.i < len(self.text) and self.text[self.i].isspace():
            self.i += 1

    def expect(self, tok):
        self.skip()
        if not self.text.startswith(tok, self.i):
            raise ScalarParseError(f"expected {tok!r} at position {self.i + 1}: {self.text!r}")
        self.i += len(tok)

    def term(self) -> Scalar:
        self.skip()
        if self.text.startswith("(", self.i):
            self.i += 1
            a = self.term()
            self.expect("+")
            b = self.term()
            self.expect("*sqrt(")
            d = self.term()
            self.expect(")")
            self.expect(")")
            return a + b * d.sqrt()
        m = self._NUM.match(self.text, self.i)
        if not m:
            raise ScalarParseError(f"bad scalar at position {self.i + 1}: {self.text!r}")
        self.i = m.end()
        return Scalar._exact((), mpq(m.group(0)))


# ---------------------------------------------------------------------------
# cube roots inside a tower, by enumerating conjugate embeddings

def _embeddings(tower, prec):
    """Numerical images of the generators under every sign choice."""
    ctx = _ctx(prec)
    out = []
    for signs in product((1, -1), repeat=len(tower)):
        gens = []
        for i, d in enumerate(tower):
            gens.append(signs[i] * _principal(ctx, ctx.mpc(_num_value(d, gens, ctx, i))))
        out.append(gens)
    return out


def _coords(x, t):
    if t == 0:
        return [x]
    return _coords(x[0], t - 1) + _coords(x[1], t - 1)


def _from_coords(c, t):
    if t == 0:
        return c[0]
    h = len(c) // 2
    return (_from_coords(c[:h], t - 1), _from_coords(c[h:], t - 1))


def _basis_values(gens, ctx):
    vals = [ctx.mpc(1)]
    for g in gens:
        vals = vals + [v * g for v in vals]
    return vals


def _tower_cbrt(tower, x):
    t = len(tower)
    if t > 3:
        return None
    prec = _NUM_PREC
    ctx = _ctx(prec)
    embs = _embeddings(tower, prec)
    basis = [_basis_values(g, ctx) for g in embs]
    mat = ctx.matrix([[v for v in row] for row in basis])
    images = [_num_value(x, g, ctx, t) for g in embs]
    roots = [ctx.cbrt(z) for z in images]
    w = ctx.exp(2j * ctx.pi / 3)
    for choice in product(range(3), repeat=len(embs)):
        rhs = ctx.matrix([roots[i] * w ** c for i, c in enumerate(choice)])
        try:
            sol = ctx.lu_solve(mat, rhs)
        except ZeroDivisionError:
            return None
        coords = []
        ok = True
        for v in sol:
            if abs(ctx.im(v)) > ctx.mpf(2) ** -100:
                ok = False
                break
            f = Fraction(ctx.nstr(ctx.re(v), 80, min_fixed=-10**9, max_fixed=10**9)).limit_denominator(10**25)
            coords.append(mpq(f.numerator, f.denominator))
        if not ok:
            continue
        y = _from_coords(coords, t)
        if _is_zero(_sub(_mul(_mul(y, y, tower, t), y, tower, t), x)):
            return y
    return None


# ---------------------------------------------------------------------------
# convenience

def S(value) -> Scalar:
    """Shorthand constructor."""
    return value if isinstance(value, Scalar) else Scalar(value)


ZERO = Scalar(0)
ONE = Scalar(1)


def omega() -> Scalar:
    """The primitive cube root of unity (-1 + sqrt(-3))/2."""
    return (Scalar(-1) + Scalar(-3).sqrt()) / 2


def is_zero(s) -> bool:
    return S(s).is_zero()


def sqrt(s) -> Scalar:
    return S(s).sqrt()


def arith(op: str, a, b) -> Scalar:
    a, b = S(a), S(b)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown op {op!r}")
