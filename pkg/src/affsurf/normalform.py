"""Normalization pipeline and branch classifier.

Stages, each an affine re-graph:

1. quadratic part -> xy by a linear map of (x, y) (after a shear when the
   target formulas would divide by zero);
2. a G1 element killing G21 and G12, leaving xy + G30 x^3/6 + G03 y^3/6 + O(4);
3. branch-specific scalings fixing the leading surviving coefficient to 1.

Every stage works over any coefficient ring with sqrt/inverse/is_zero, which
is how "identically zero" decisions are made: the same pipeline is run on the
jet at a symbolic nearby point (s, t), with coefficients that are series in
(s, t), and the relevant coefficient is tested as a series.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction

from .errors import (BadPosition, DegenerateHessian, NonGenericPoint, NotExactlyEvaluable,
                     NotInField, TowerDepthExceeded, UndecidableAtOrder)
from .regraph import AffineMap3, affine_regraph, g1_regraph, linear_regraph, scale_regraph
from .scalar import DEFAULT_PREC, Scalar, omega
from .series import Series2, SurfaceGraph, _iszero, displaced_jet

TERMINALS = ("B1", "B2.1", "B2.2.1", "B2.2.2", "B3.1", "B3.2")

STABILIZERS = {
    "B1": "discrete G0+swap",
    "B2.1": "none",
    "B2.2.1": "none (up to mu -> -mu)",
    "B2.2.2": "1-param mu",
    "B3.1": "1-param mu",
    "B3.2": "2-param (mu,lambda)",
}


@dataclass
class NormalForm:
    branch: str
    series: Series2
    invariants: dict
    decidedToOrder: int
    transform: list = field(default_factory=list)
    residualStabilizer: str = ""
    path: list = field(default_factory=list)
    mode: str = "exact"
    basepoint: tuple = ()

    def I(self, j: int, k: int):
        return self.series.F(j, k)

    def tuple4(self):
        """The order-4 invariants (I40, I31, I22, I13, I04)."""
        return tuple(self.series.F(4 - k, k) for k in range(5))

    def composed_transform(self) -> AffineMap3:
        m = AffineMap3.identity()
        for a in self.transform:
            m = m.then(a)
        return m

    def to_json(self) -> dict:
        return {
            "branch": self.branch,
            "path": self.path,
            "invariants": {f"{j},{k}": str(v) for (j, k), v in sorted(
                self.invariants.items(), key=lambda kv: (sum(kv[0]), -kv[0][0]))},
            "decidedToOrder": self.decidedToOrder,
            "transformChain": [a.to_json() for a in self.transform],
            "stabilizer": self.residualStabilizer,
            "mode": self.mode,
        }


# ---------------------------------------------------------------------------
# pipeline stages (ring-generic)

def _hessian(F):
    return F.F(1, 1) * F.F(1, 1) - F.F(2, 0) * F.F(0, 2)


def first_loop(F: Series2, chain=None, shear=None):
    """Send the quadratic part to xy.  Returns (G, shear used)."""
    p, q = F.coeff(1, 0), F.coeff(0, 1)
    if not (_iszero(p) and _iszero(q)):
        # tilt u so that the tangent plane is u = 0
        F = F.copy()
        F.c[1], F.c[2] = F.zero, F.zero
        if chain is not None:
            chain.append(AffineMap3(((1, 0, 0), (0, 1, 0), (-p, -q, 1)), (0, 0, 0), "linear-in-xy"))
    B = _hessian(F)
    if _iszero(B):
        raise DegenerateHessian("Hessian rank < 2 at the basepoint (parabolic point)")
    F20, F11, F02 = F.F(2, 0), F.F(1, 1), F.F(0, 2)
    A = F20 + 2 * F11 + F02
    if shear is None:
        shear = 0
        if _iszero(A):
            for c in (1, 2, 3):
                if not _iszero(F20 + 2 * c * F11 + c * c * F02 + 2 * F11 + 2 * c * F02 + F02):
                    shear = c
                    break
            else:
                raise BadPosition("no shear clears the first-loop denominator")
    if shear:
        # F(x, y + c x) is the graph after (x, y, u) -> (x, y - c x, u)
        F = linear_regraph(F, ((1, 0), (-shear, 1)))
        if chain is not None:
            chain.append(AffineMap3.linear_xy(1, 0, -shear, 1))
        F20, F11, F02 = F.F(2, 0), F.F(1, 1), F.F(0, 2)
        A = F20 + 2 * F11 + F02
        B = _hessian(F)
    rB = B.sqrt()
    inv = 1 / (2 * A).sqrt()
    a = (F20 + F11 + rB) * inv
    b = (F11 + F02 - rB) * inv
    c = (F20 + F11 - rB) * inv
    d = (F11 + F02 + rB) * inv
    G = linear_regraph(F, ((a, b), (c, d)))
    # the quadratic part is xy by construction; pin it to remove rounding in approx mode
    G.c[3], G.c[4], G.c[5] = G.zero, G.zero + 1, G.zero
    if chain is not None:
        chain.append(AffineMap3.linear_xy(a, b, c, d))
    return G, shear


def second_loop(G: Series2, chain=None) -> Series2:
    """Kill G21 and G12 with the G1 element mu = lam = 1, l = G21/2, k = G12/2."""
    k = G.F(1, 2) * Fraction(1, 2)
    l = G.F(2, 1) * Fraction(1, 2)
    H = g1_regraph(G, 1, 1, k, l)
    H.c[_p(2, 1)], H.c[_p(1, 2)] = H.zero, H.zero
    if chain is not None:
        chain.append(AffineMap3.g1(1, 1, k, l))
    return H


def _p(j, k):
    d = j + k
    return d * (d + 1) // 2 + k


def prenormalize_series(F: Series2, chain=None, shear=None):
    G, shear = first_loop(F, chain, shear)
    return second_loop(G, chain), shear


def _scale(F, mu, lam, nu, chain):
    if chain is not None:
        chain.append(AffineMap3.scale(mu, lam, nu))
    return scale_regraph(F, mu, lam, nu)


def prenormalize(S) -> Series2:
    """Prenormal series xy + G30 x^3/6 + G03 y^3/6 + O(4) of a surface or series."""
    F = S.series if isinstance(S, SurfaceGraph) else S
    return prenormalize_series(F)[0]


# ---------------------------------------------------------------------------
# identically-zero decisions

class _Decider:
    """Tests relative invariants for identical vanishing near the basepoint."""

    def __init__(self, F: Series2, shear: int):
        self.F = F
        self.shear = shear
        self.N = F.order
        self.checked = []
        self._pre = {}

    def prenormal(self, m: int):
        if m not in self._pre:
            D = displaced_jet(self.F, m)
            self._pre[m] = prenormalize_series(D, None, self.shear)[0]
        return self._pre[m]

    def identically_zero(self, value, m: int, reader, name: str) -> bool:
        if not _iszero(value):
            return False
        if self.N - m <= 0:
            raise UndecidableAtOrder(
                f"{name} vanishes at the point; deciding whether it vanishes identically "
                f"needs order >= {m + 1}, got {self.N}")
        ser = reader(self.prenormal(m))
        if not ser.is_zero():
            raise NonGenericPoint(f"{name} vanishes at the point but not identically nearby")
        self.checked.append(name)
        return True


def _read(j, k, swap=False, b2=False):
    def reader(P):
        if swap:
            P = P.swap()
        if b2:
            g30 = P.F(3, 0)
            P = scale_regraph(P, 1, 1 / g30, 1 / g30)
        return P.F(j, k)
    return reader


# ---------------------------------------------------------------------------
# classification

def _classify_series(F: Series2, N: int, mode: str) -> NormalForm:
    F = F.truncate(N) if F.order > N else F
    N = F.order
    chain = []
    P, shear = prenormalize_series(F, chain)
    dec = _Decider(F, shear)
    path = ["root"]
    g30, g03 = P.F(3, 0), P.F(0, 3)
    z30 = dec.identically_zero(g30, 3, _read(3, 0), "G30")
    z03 = dec.identically_zero(g03, 3, _read(0, 3), "G03")

    if not z30 and not z03:
        # mu^3 = G30^2 G03, lam = mu^2 / G30
        mu = (g30 * g30 * g03).cbrt()
        lam = mu * mu / g30
        out = _scale(P, mu, lam, mu * lam, chain)
        return _finish("B1", out, N, chain, path + ["G30!=0!=G03"], mode)

    if z30 and z03:
        path.append("G30==0==G03")
        g22 = P.F(2, 2)
        if N < 4:
            raise UndecidableAtOrder("branch B3 needs order >= 4")
        if dec.identically_zero(g22, 4, _read(2, 2), "G22"):
            return _finish("B3.2", P, N, chain, path + ["G22==0"], mode)
        out = _scale(P, 1, g22, g22, chain)
        return _finish("B3.1", out, N, chain, path + ["G22!=0"], mode)

    swap = False
    if z30:
        swap = True
        P = P.swap()
        chain.append(AffineMap3.swap())
        g30 = P.F(3, 0)
    path.append("G30!=0==G03")
    P = _scale(P, 1, 1 / g30, 1 / g30, chain)
    if N < 4:
        raise UndecidableAtOrder("branch B2 needs order >= 4")
    g40 = P.F(4, 0)
    if not dec.identically_zero(g40, 4, _read(4, 0, swap, True), "G40"):
        mu = g40
        out = _scale(P, mu, mu * mu, mu * mu * mu, chain)
        return _finish("B2.1", out, N, chain, path + ["G40!=0"], mode)
    path.append("G40==0")
    g31 = P.F(3, 1)
    if not dec.identically_zero(g31, 4, _read(3, 1, swap, True), "G31"):
        mu = g31.sqrt()
        out = _scale(P, mu, mu * mu, mu * mu * mu, chain)
        return _finish("B2.2.1", out, N, chain, path + ["G31!=0"], mode)
    return _finish("B2.2.2", P, N, chain, path + ["G31==0"], mode)


def _finish(branch, series, N, chain, path, mode) -> NormalForm:
    inv = {(j, k): series.F(j, k) for j, k, _ in series.items() if 4 <= j + k <= N}
    for d in range(4, N + 1):
        for k in range(d + 1):
            inv.setdefault((d - k, k), series.F(d - k, k))
    return NormalForm(branch, series, inv, N, chain, STABILIZERS[branch], path, mode)


_FALLBACK = (NotInField, NotExactlyEvaluable, TowerDepthExceeded)


def _to_approx(F: Series2, prec: int) -> Series2:
    return F.map_coeffs(lambda v: v.to_approx(prec), Scalar(0).to_approx(prec))


def classify(S, N: int | None = None, mode: str = "auto", prec: int = DEFAULT_PREC) -> NormalForm:
    """Walk the branch tree and return the normal form.

    ``mode`` is "exact", "approx", or "auto" (exact, falling back to approx
    when a needed root or constant is not exactly representable).
    """
    surf = S if isinstance(S, SurfaceGraph) else SurfaceGraph(S)
    N = surf.order if N is None else min(N, surf.order)
    F = surf.series
    if mode == "approx":
        nf = _classify_series(_to_approx(F, prec), N, "approx")
    else:
        try:
            nf = _classify_series(F, N, "exact")
        except _FALLBACK:
            if mode == "exact":
                raise
            nf = _classify_series(_to_approx(F, prec), N, "approx")
    nf.basepoint = surf.basepoint
    if any(not v.is_exact for v in surf.basepoint):
        nf.mode = "approx"
    nf.transform = [AffineMap3.translation_by([-v for v in surf.basepoint])] + nf.transform
    return nf


def invariantize_at(S: SurfaceGraph, p, N: int | None = None, mode: str = "auto",
                    prec: int = DEFAULT_PREC) -> NormalForm:
    """Classify the surface re-centred at the point above p = (x0, y0)."""
    x0, y0 = (v if isinstance(v, Scalar) else Scalar(v) for v in p)
    try:
        if mode == "approx":
            raise NotExactlyEvaluable("approx requested")
        shifted = S.shifted(x0, y0)
    except NotExactlyEvaluable:
        if S.expr is None:
            raise
        from .expr import expand_shifted
        ser, u0 = expand_shifted(S.expr, S.order, x0, y0, mode="approx", prec=prec)
        bx, by, bu = S.basepoint
        shifted = SurfaceGraph(ser, (bx + x0, by + y0, bu + u0), S.expr, False)
        mode = "approx"
    nf = classify(shifted, N, mode, prec)
    if not S.exact_shift():
        # shifting a truncation drops the tail; record it in the report
        nf.path = nf.path + ["truncated-shift"]
    return nf


# ---------------------------------------------------------------------------
# discrete residual group of branch B1

def g0_action(series: Series2, j: int, swap: bool) -> Series2:
    """x -> w^j x, y -> w^-j y (then optionally x <-> y), with u fixed."""
    w = omega()
    pw = [Scalar(1), w, w * w]
    out = {}
    for a, b, v in series.items():
        e = (-j * (a - b)) % 3
        out[(a, b)] = v * pw[e] if e else v
    s = Series2(series.order, out, series.zero)
    return s.swap() if swap else s


def _key(series: Series2):
    keys = []
    for d in range(4, series.order + 1):
        for k in range(d + 1):
            keys.append(series.F(d - k, k).sort_key())
    return keys


def canonicalize_discrete(nf: NormalForm) -> NormalForm:
    """Representative of the swap x G0 orbit, minimal in the fixed scalar order."""
    if nf.branch != "B1":
        return nf
    best = None
    for swap in (False, True):
        for j in range(3):
            cand = g0_action(nf.series, j, swap)
            key = _key(cand)
            if best is None or key < best[0]:
                best = (key, cand, j, swap)
    _, ser, j, swap = best
    w = omega()
    wj = [Scalar(1), w, w * w][j]
    extra = [AffineMap3.scale(wj, 1 / wj, 1)]
    if swap:
        extra.append(AffineMap3.swap())
    out = replace(nf, series=ser, transform=nf.transform + extra)
    out.invariants = {(a, b): ser.F(a, b) for (a, b) in nf.invariants}
    return out


def discrete_orbit(series: Series2):
    """All six images of a B1 normal form under swap x G0."""
    return [g0_action(series, j, swap) for swap in (False, True) for j in range(3)]


def transform_roundtrip(S, nf: NormalForm) -> bool:
    """Whether the recorded transform maps the input onto the normal form."""
    F = S.series if isinstance(S, SurfaceGraph) else S
    F = F.truncate(nf.series.order)
    m = AffineMap3.identity()
    for a in nf.transform:
        if a.tag != "translation":
            m = m.then(a)
    if nf.mode == "approx":
        F = _to_approx(F, DEFAULT_PREC)
    return (affine_regraph(F, m) - nf.series).is_zero()
