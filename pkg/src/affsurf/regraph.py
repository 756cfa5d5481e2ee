"""Affine maps of C^3 and re-graphing of their images.

A map (x, y, u) -> A (x, y, u) + b sends the graph u = F(x, y) to a new
graph u' = G(x', y') as long as the induced map on (x, y) stays invertible at
the origin.  Translations only move the basepoint, so every regraph here is
taken around the image of the origin.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import NotPrenormalized, SingularMatrix
from .scalar import Scalar
from .series import Series2, _iszero, invert_map


class AffineMap3:
    """x -> M x + t on C^3, with a tag naming the kind of map."""

    __slots__ = ("matrix", "translation", "tag")

    TAGS = ("linear-in-xy", "g1", "g2", "scale", "translation", "swap", "general")

    def __init__(self, matrix, translation=(0, 0, 0), tag="general"):
        self.matrix = tuple(tuple(row) for row in matrix)
        self.translation = tuple(translation)
        self.tag = tag

    @classmethod
    def identity(cls):
        return cls(((1, 0, 0), (0, 1, 0), (0, 0, 1)), (0, 0, 0), "linear-in-xy")

    @classmethod
    def linear_xy(cls, a, b, c, d):
        return cls(((a, b, 0), (c, d, 0), (0, 0, 1)), (0, 0, 0), "linear-in-xy")

    @classmethod
    def g1(cls, mu, lam, k, l):
        return cls(((mu, 0, k), (0, lam, l), (0, 0, mu * lam)), (0, 0, 0), "g1")

    @classmethod
    def scale(cls, mu, lam, nu):
        return cls(((mu, 0, 0), (0, lam, 0), (0, 0, nu)), (0, 0, 0), "scale")

    @classmethod
    def swap(cls):
        return cls(((0, 1, 0), (1, 0, 0), (0, 0, 1)), (0, 0, 0), "swap")

    @classmethod
    def translation_by(cls, v):
        return cls(((1, 0, 0), (0, 1, 0), (0, 0, 1)), tuple(v), "translation")

    def determinant(self):
        m = self.matrix
        return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))

    def then(self, other: "AffineMap3") -> "AffineMap3":
        """The composite 'apply self, then other'."""
        a, b = other.matrix, self.matrix
        m = [[sum((a[i][r] * b[r][j] for r in range(3)), 0) for j in range(3)] for i in range(3)]
        t = [sum((a[i][r] * self.translation[r] for r in range(3)), 0) + other.translation[i]
             for i in range(3)]
        return AffineMap3(m, t, "general")

    def apply(self, p):
        m = self.matrix
        return tuple(sum((m[i][j] * p[j] for j in range(3)), 0) + self.translation[i] for i in range(3))

    def to_json(self) -> dict:
        return {"tag": self.tag,
                "matrix": [[str(v) for v in row] for row in self.matrix],
                "translation": [str(v) for v in self.translation]}

    def __repr__(self):
        return f"AffineMap3({self.tag}, {self.matrix}, {self.translation})"


def _recip(v):
    return Fraction(1, v) if isinstance(v, int) else 1 / v


def _vars(F: Series2):
    return Series2.var(F.order, "x", F.zero), Series2.var(F.order, "y", F.zero)


def linear_regraph(F: Series2, M) -> Series2:
    """G with G(M p) = F(p) for the 2x2 matrix M = ((a, b), (c, d))."""
    (a, b), (c, d) = ((Scalar(v) if isinstance(v, (int, Fraction)) else v for v in row)
                      for row in M)
    det = a * d - b * c
    if _iszero(det):
        raise SingularMatrix("linear map is singular")
    idet = _recip(det)
    x, y = _vars(F)
    # M^{-1} = idet * ((d, -b), (-c, a))
    P = x * (d * idet) + y * (-b * idet)
    Q = x * (-c * idet) + y * (a * idet)
    return F.substitute(P, Q)


def affine_regraph(F: Series2, A: AffineMap3) -> Series2:
    """Graph of the image of u = F(x, y) under A, around the image of the origin."""
    m = A.matrix
    x, y = _vars(F)
    X = x * m[0][0] + y * m[0][1] + F * m[0][2]
    Y = x * m[1][0] + y * m[1][1] + F * m[1][2]
    U = x * m[2][0] + y * m[2][1] + F * m[2][2]
    P, Q = invert_map(X, Y)
    return U.substitute(P, Q)


def _check_prenormal(F: Series2):
    one = F.coeff(1, 1) - 1
    if not (_iszero(F.coeff(2, 0)) and _iszero(F.coeff(0, 2)) and _iszero(one)):
        raise NotPrenormalized("quadratic part is not xy")


def g1_regraph(F: Series2, mu, lam, k, l) -> Series2:
    """Solve G(mu x + k F, lam y + l F) = mu lam F for G.

    The map (x, y) -> (mu x + k F, lam y + l F) has invertible linear part and
    is inverted as a formal series; G is then mu lam F at the preimage.
    """
    _check_prenormal(F)
    if _iszero(mu) or _iszero(lam):
        raise SingularMatrix("mu and lambda must be nonzero")
    x, y = _vars(F)
    X = x * mu + F * k
    Y = y * lam + F * l
    P, Q = invert_map(X, Y)
    return F.substitute(P, Q) * (mu * lam)


def swap_regraph(F: Series2) -> Series2:
    return F.swap()


def scale_regraph(F: Series2, mu, lam, nu) -> Series2:
    """Image under (x, y, u) -> (mu x, lam y, nu u): c'_{jk} = nu mu^-j lam^-k c_{jk}."""
    imu, ilam = _recip(mu), _recip(lam)
    out = {}
    mp = [nu]
    for _ in range(F.order):
        mp.append(mp[-1] * imu)
    lp = [1]
    for _ in range(F.order):
        lp.append(lp[-1] * ilam)
    for j, k, v in F.items():
        out[(j, k)] = v * mp[j] * lp[k]
    return Series2(F.order, out, F.zero)


def fundamental_residual(G: Series2, F: Series2, mu, lam, k, l) -> Series2:
    """G(mu x + k F, lam y + l F) - mu lam F, which vanishes for g1 outputs."""
    x, y = _vars(F)
    return G.substitute(x * mu + F * k, y * lam + F * l) - F * (mu * lam)
