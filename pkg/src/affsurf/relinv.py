"""Closed-form relative invariants and their consistency checks.

Formulas are kept in their reference form, signs included.  Where a reference sign
disagrees with the normalization pipeline, the disagreement is reported by
the check functions (``SIGN_I30``, ``pick_factorization_check``) rather than
patched in the formula.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DenominatorZero
from .normalform import prenormalize_series
from .regraph import g1_regraph
from .scalar import Scalar
from .series import Series2, SurfaceGraph

# pipeline G30 = SIGN_I30 * rel_I30 (principal square roots, first-loop map
# equal to the identity on u = xy)
SIGN_I30 = -1
# pipeline G30*G03 = SIGN_PICK * (-P / (8 B^3)), B = F11^2 - F20 F02
SIGN_PICK = -1


def _jet(src):
    """Factorial-convention accessor from a Series2, SurfaceGraph or dict."""
    if isinstance(src, SurfaceGraph):
        src = src.series
    if isinstance(src, Series2):
        return src.F
    if callable(src):
        return src
    vals = {key: v if isinstance(v, Scalar) else Scalar(v) for key, v in src.items()}
    return lambda j, k: vals.get((j, k), Scalar(0))


def pick_numerator(src) -> Scalar:
    """The 13-term Pick numerator P in second and third derivatives."""
    F = _jet(src)
    xx, xy, yy = F(2, 0), F(1, 1), F(0, 2)
    xxx, xxy, xyy, yyy = F(3, 0), F(2, 1), F(1, 2), F(0, 3)
    return (6 * yyy * xy * xyy * xx ** 2 - 9 * yy * xyy ** 2 * xx ** 2 - yyy ** 2 * xx ** 3
            - 12 * yyy * xy ** 2 * xx * xxy + 18 * yy * xy * xyy * xx * xxy
            + 6 * yy * yyy * xx ** 2 * xxy - 9 * yy ** 2 * xx * xxy ** 2 + 8 * yyy * xy ** 3 * xxx
            - 12 * yy * xy ** 2 * xyy * xxx - 6 * yy * yyy * xy * xx * xxx
            + 6 * yy ** 2 * xyy * xx * xxx + 6 * yy ** 2 * xy * xxy * xxx - yy ** 3 * xxx ** 2)


def rel_I30(src) -> Scalar:
    """The closed form of the relative invariant I30 on a 3-jet."""
    F = _jet(src)
    F20, F11, F02 = F(2, 0), F(1, 1), F(0, 2)
    F30, F21, F12, F03 = F(3, 0), F(2, 1), F(1, 2), F(0, 3)
    A = F20 + 2 * F11 + F02
    B = F11 ** 2 - F20 * F02
    if A.is_zero() or B.is_zero():
        raise DenominatorZero("F20 + 2F11 + F02 and F11^2 - F20 F02 must be nonzero")
    r = B.sqrt()
    num = (-4 * F03 * F11 ** 3 + 6 * F02 * F11 ** 2 * F12 + 3 * F02 * F03 * F11 * F20
           - 6 * F03 * F11 ** 2 * F20 - 3 * F02 ** 2 * F12 * F20 + 9 * F02 * F11 * F12 * F20
           + 3 * F02 * F03 * F20 ** 2 - 3 * F03 * F11 * F20 ** 2 + 9 * F02 * F12 * F20 ** 2
           + 3 * F11 * F12 * F20 ** 2 - F03 * F20 ** 3 + 4 * F03 * F11 ** 2 * r
           - 6 * F02 * F11 * F12 * r - F02 * F03 * F20 * r + 6 * F03 * F11 * F20 * r
           - 9 * F02 * F12 * F20 * r + 3 * F03 * F20 ** 2 * r + 3 * F12 * F20 ** 2 * r
           - 3 * F02 ** 2 * F11 * F21 - 9 * F02 ** 2 * F20 * F21 - 9 * F02 * F11 * F20 * F21
           - 6 * F11 ** 2 * F20 * F21 + 3 * F02 * F20 ** 2 * F21
           + 3 * F02 ** 2 * r * F21 - 9 * F02 * F20 * r * F21 - 6 * F11 * F20 * r * F21
           + F02 ** 3 * F30 + 3 * F02 ** 2 * F11 * F30 + 6 * F02 * F11 ** 2 * F30
           + 4 * F11 ** 3 * F30 - 3 * F02 ** 2 * F20 * F30 - 3 * F02 * F11 * F20 * F30
           + 3 * F02 ** 2 * r * F30 + 6 * F02 * F11 * r * F30 + 4 * F11 ** 2 * r * F30
           - F02 * F20 * r * F30)
    den = 2 * Scalar(2).sqrt() * A * A.sqrt() * B * r
    return -num / den


def pipeline_G3(src):
    """(G30, G03) of the prenormal form reached by the two loops."""
    F = src.series if isinstance(src, SurfaceGraph) else src
    P, _ = prenormalize_series(F.truncate(3) if F.order > 3 else F)
    return P.F(3, 0), P.F(0, 3)


def order4_G_block(src) -> dict:
    """G03 and the order-4 coefficients after the B2 group element, reference formulas."""
    F = _jet(src)
    F30, F21, F12, F03 = F(3, 0), F(2, 1), F(1, 2), F(0, 3)
    F40, F31, F22, F13, F04 = F(4, 0), F(3, 1), F(2, 2), F(1, 3), F(0, 4)
    if F30.is_zero():
        raise DenominatorZero("F30 must be nonzero")
    return {
        (0, 3): F03 * F30 ** 2,
        (4, 0): -(2 * F21 * F30 - F40) / F30,
        (3, 1): (-3 * F21 ** 2 - 4 * F12 * F30 + 2 * F31) / 2,
        (2, 2): -3 * F12 * F21 * F30 + F22 * F30,
        (1, 3): (-3 * F12 ** 2 * F30 ** 2 + 2 * F13 * F30 ** 2 - 4 * F03 * F21 * F30 ** 2) / 2,
        (0, 4): F04 * F30 ** 3 - 2 * F03 * F12 * F30 ** 3,
    }


def order4_G_block_pipeline(F: Series2) -> dict:
    """Same block, read off g1_regraph with the B2 group element."""
    F30, F21, F12 = F.F(3, 0), F.F(2, 1), F.F(1, 2)
    G = g1_regraph(F, Scalar(1), 1 / F30, F12 / 2, F21 / (2 * F30))
    return {key: G.F(*key) for key in ((0, 3), (4, 0), (3, 1), (2, 2), (1, 3), (0, 4))}


@dataclass
class PickCheck:
    lhs: Scalar
    rhs: Scalar
    signFlag: str  # "same", "opposite", "both" (both zero) or "mismatch"


def pick_factorization_check(src) -> PickCheck:
    """Compare pipeline G30*G03 with the closed form -P / (8 B^3)."""
    ser = src.series if isinstance(src, SurfaceGraph) else src
    if not isinstance(ser, Series2):
        ser = Series2.from_factorial(3, {k: (v if isinstance(v, Scalar) else Scalar(v))
                                         for k, v in src.items() if sum(k) <= 3})
    F = ser.F
    B = F(1, 1) ** 2 - F(2, 0) * F(0, 2)
    if B.is_zero():
        raise DenominatorZero("Hessian F11^2 - F20 F02 vanishes")
    g30, g03 = pipeline_G3(ser)
    lhs = g30 * g03
    rhs = -pick_numerator(F) / (8 * B ** 3)
    if lhs.is_zero() and rhs.is_zero():
        flag = "both"
    elif lhs == rhs:
        flag = "same"
    elif lhs == -rhs:
        flag = "opposite"
    else:
        flag = "mismatch"
    return PickCheck(lhs, rhs, flag)


def weight_law_G1(F: Series2, mu, lam, k, l):
    """Ratios (G30'/G30, G03'/G03) under a G1 element, expected lam/mu^2 and mu/lam^2."""
    G = g1_regraph(F, mu, lam, k, l)
    return G.F(3, 0) / F.F(3, 0), G.F(0, 3) / F.F(0, 3)
