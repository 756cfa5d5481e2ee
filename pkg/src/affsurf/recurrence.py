"""Recurrence tables for invariant derivatives and homogeneous elimination.

Tables are plain text, one equation per line, ``Dx I40 = <polynomial>``;
invariants are named ``I{j}{k}``.  For a homogeneous surface every left side
vanishes, and eliminating the next-order invariants leaves polynomial
conditions on the generators.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial

import sympy as sp

from .errors import InconsistentSystem, UnsupportedBranch

B1_TABLE = """
Dx I40 = -8*I13*I40 - 160*I40**2 - 144*I31 + I50
Dy I40 = -32*I04*I40 - 40*I31*I40 - 48*I22 + I41 + 216
Dx I31 = -4*I13*I31 - 32*I31*I40 - 84*I22 + I41 + 216
Dy I31 = -16*I04*I31 - 8*I31**2 - 72*I13 - 72*I40 + I32
Dx I22 = -4*I13*I22 - 16*I22*I40 - 36*I13 + I32
Dy I22 = -16*I04*I22 - 4*I22*I31 - 36*I31 + I23
Dx I13 = -8*I13**2 - 16*I13*I40 - 72*I04 - 72*I31 + I23
Dy I13 = -32*I04*I13 - 4*I13*I31 - 84*I22 + I14 + 216
Dx I04 = -40*I04*I13 - 32*I04*I40 - 48*I22 + I14 + 216
Dy I04 = -160*I04**2 - 8*I04*I31 - 144*I13 + I05
[Dx, Dy] = (2/3*I31 + 4/3*I04) Dx + (-4/3*I40 - 2/3*I13) Dy
"""

B21_TABLE = """
Dx I31 = I41 + 8*I31**2 - 7/2*I22 + 2*I31 - 2*I50*I31
Dy I31 = 4*I31*I22 + 2*I31**2 - 2*I41*I31 + I32
Dx I22 = 12*I31*I22 - 3*I50*I22 + 4*I22 + I32
Dy I22 = 6*I22**2 + 4*I31*I22 - 3*I41*I22
Dx I50 = I60 + 8*I50*I31 - 5/2*I41 + I50 - 5/2*I31 - 5*I22 - 2*I50**2
Dy I50 = I51 + I50*I31 + 4*I50*I22 - 5/2*I22 - 2*I50*I41
Dx I41 = I51 + 12*I31*I41 - 2*I32 + 3*I41 - 4*I31**2 - 5/2*I22 - 3*I50*I41
Dy I41 = -4*I22*I31 + 6*I22*I41 + 3*I31*I41 - 3*I41**2 + I42
Dx I32 = I42 + 16*I31*I32 + 5*I32 - 17/2*I31*I22 - 4*I50*I32
Dy I32 = 8*I22*I32 + 5*I31*I32 - 4*I32*I41
[Dx, Dy] = (-I31 - 2*I22 + I41) Dx + (8*I31 + 3 - 2*I50) Dy
"""


def inv(j: int, k: int) -> sp.Symbol:
    """The invariant I_{j,k} as a sympy symbol."""
    return sp.Symbol(f"I{j}{k}")


def _is_inv(sym) -> bool:
    return len(sym.name) == 3 and sym.name[0] == "I" and sym.name[1:].isdigit()


def inv_index(sym: sp.Symbol):
    n = sym.name
    return int(n[1]), int(n[2])


@dataclass
class Recurrence:
    direction: str          # "x" or "y"
    target: tuple           # (j, k) of the differentiated invariant
    rhs: sp.Expr

    def __str__(self):
        return f"D{self.direction} I{self.target[0]}{self.target[1]} = {self.rhs}"


@dataclass
class RecurrenceTable:
    branch: str
    equations: list
    commutator: tuple       # (c1, c2) with [Dx, Dy] = c1 Dx + c2 Dy
    generators: tuple       # invariants treated as known inputs
    unknowns: tuple         # next-order invariants to solve or eliminate
    eliminate: tuple = field(default_factory=tuple)
    retained: tuple = ()    # next-order invariants kept as moduli coordinates

    def equation(self, direction: str, j: int, k: int) -> Recurrence:
        for e in self.equations:
            if e.direction == direction and e.target == (j, k):
                return e
        raise KeyError((direction, j, k))


def _parse(text: str):
    eqs, comm = [], None
    for line in text.strip().splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("[Dx, Dy]"):
            rhs = line.split("=", 1)[1]
            c1, rest = rhs.split(") Dx", 1)
            c2 = rest.strip().lstrip("+").strip()
            c2 = c2[: c2.rindex(") Dy")]
            comm = (sp.sympify(c1.strip().lstrip("(")), sp.sympify(c2.strip().lstrip("(")))
            continue
        lhs, rhs = line.split("=", 1)
        d, name = lhs.split()
        eqs.append(Recurrence(d[1], (int(name[1]), int(name[2])), sp.sympify(rhs)))
    return eqs, comm


@lru_cache(maxsize=None)
def table(branch: str) -> RecurrenceTable:
    """The recurrence table of branch B1 or B2.1."""
    if branch == "B1":
        eqs, comm = _parse(B1_TABLE)
        gens = tuple(inv(4 - k, k) for k in range(5))
        unk = tuple(inv(5 - k, k) for k in range(6))
        return RecurrenceTable("B1", eqs, comm, gens, unk,
                               (inv(4, 1), inv(3, 2), inv(2, 3), inv(1, 4)))
    if branch == "B2.1":
        eqs, comm = _parse(B21_TABLE)
        gens = (inv(3, 1), inv(2, 2), inv(5, 0))
        unk = (inv(4, 1), inv(3, 2), inv(6, 0), inv(5, 1), inv(4, 2))
        return RecurrenceTable("B2.1", eqs, comm, gens, unk, (), (inv(4, 1), inv(3, 2)))
    raise UnsupportedBranch(f"no recurrence table for branch {branch!r}")


# The B1 table, its homogeneity conditions and the B1 family tuples are
# written in a different scaling from the normal-form series coefficients
# F_{j,k} (and from the reference B1 frame fields, which use F_{j,k}).  Matching
# orbit surfaces of the closing frames against the table fixes the factors:
#   order 4: I_table = 36 F_{j,k} / (j! k!)    (x, y rescaled by 6)
#   order 5: I_table = 216 F_{j,k}
# B2.1 needs no conversion.
_B1_SCALE = {(j, 4 - j): Fraction(36, factorial(j) * factorial(4 - j)) for j in range(5)}
_B1_SCALE.update({(j, 5 - j): Fraction(216) for j in range(6)})


def series_to_table(branch: str, values: dict) -> dict:
    """Normal-form coefficients F_{j,k} -> the invariants used by the table."""
    if branch != "B1":
        return dict(values)
    out = {}
    for key, v in values.items():
        if key not in _B1_SCALE:
            raise UnsupportedBranch(f"no table scaling for I{key[0]}{key[1]}")
        out[key] = v * _B1_SCALE[key]
    return out


def table_to_series(branch: str, values: dict) -> dict:
    """Inverse of series_to_table."""
    if branch != "B1":
        return dict(values)
    out = {}
    for key, v in values.items():
        if key not in _B1_SCALE:
            raise UnsupportedBranch(f"no table scaling for I{key[0]}{key[1]}")
        s = _B1_SCALE[key]
        out[key] = v * Fraction(s.denominator, s.numerator)
    return out


def order4_part(t: RecurrenceTable) -> list:
    """Equations differentiating order-4 invariants."""
    return [e for e in t.equations if sum(e.target) == 4]


def normalize_condition(p) -> sp.Expr:
    """Primitive integer form with positive leading coefficient (grevlex order)."""
    p = sp.expand(p)
    if p == 0:
        return p
    syms = sorted(p.free_symbols, key=lambda s: s.name)
    P = sp.Poly(p, *syms)
    _, P = P.clear_denoms()
    P = P.primitive()[1]
    if P.LC(order="grevlex") < 0:
        P = -P
    return P.as_expr()


def eliminate_homogeneous(t: RecurrenceTable, order=None, elim_order=None) -> list:
    """Set all left sides to 0 and eliminate next-order invariants.

    Each invariant in ``elim_order`` (default: the table's own order) that
    occurs in exactly two of the remaining equations is solved from one and
    substituted into the other.  Equations still containing a next-order
    invariant afterwards only determine it and are dropped.
    """
    eqs = [e.rhs for e in (t.equations if order is None else
                           [e for e in t.equations if sum(e.target) == order])]
    elim = t.eliminate if elim_order is None else tuple(elim_order)
    for x in elim:
        where = [i for i, e in enumerate(eqs) if e.has(x)]
        if len(where) != 2:
            continue
        i, k = where
        sol = sp.solve(eqs[i], x)
        if len(sol) != 1:
            continue
        eqs[k] = sp.expand(eqs[k].subs(x, sol[0]))
        eqs.pop(i)
    nxt = (set(t.unknowns) | {inv(5 - k, k) for k in range(6)}) - set(t.retained) - set(t.generators)
    out = [normalize_condition(e) for e in eqs if not (e.free_symbols & nxt)]
    return sorted(out, key=sp.default_sort_key)


def solve_next_order(t: RecurrenceTable, values: dict, derivs: dict | None = None,
                     order=None) -> dict:
    """Solve the table for next-order invariants given invariants and D-values.

    ``values`` maps (j, k) -> number for known invariants; ``derivs`` maps
    (direction, (j, k)) -> number (missing ones are 0, as for homogeneous
    surfaces).  Returns the solved values; a second determination that
    disagrees raises InconsistentSystem.
    """
    derivs = derivs or {}
    known = {inv(*key): sp.Rational(Fraction(v)) if not isinstance(v, sp.Basic) else v
             for key, v in values.items()}
    eqs = t.equations if order is None else [e for e in t.equations if sum(e.target) == order]
    pending = []
    for e in eqs:
        d = derivs.get((e.direction, e.target), 0)
        d = sp.Rational(Fraction(d)) if not isinstance(d, sp.Basic) else d
        pending.append((str(e), e.rhs - d))
    solved = {}
    progress = True
    while pending and progress:
        progress = False
        rest = []
        for name, expr in pending:
            expr = sp.expand(expr.xreplace(known))
            free = [s for s in expr.free_symbols if _is_inv(s)]
            if not free:
                if expr != 0:
                    raise InconsistentSystem(f"{name}: residual {expr}")
                progress = True
                continue
            if len(free) == 1 and sp.degree(expr, free[0]) == 1:
                x = free[0]
                val = sp.solve(expr, x)[0]
                known[x] = val
                solved[inv_index(x)] = val
                progress = True
                continue
            rest.append((name, expr))
        pending = rest
    if pending:
        missing = sorted({str(s) for _, e in pending for s in e.free_symbols if _is_inv(s)})
        raise InconsistentSystem(f"underdetermined; missing values for {', '.join(missing)}")
    return solved


def conjugate(expr):
    """Swap I_{j,k} <-> I_{k,j}."""
    syms = [s for s in expr.free_symbols if s.name.startswith("I")]
    return expr.xreplace({s: inv(*reversed(inv_index(s))) for s in syms})


def conjugation_closed(t: RecurrenceTable) -> bool:
    """Whether x <-> y maps every equation of the table onto another one."""
    for e in t.equations:
        d = "y" if e.direction == "x" else "x"
        j, k = e.target
        try:
            other = t.equation(d, k, j)
        except KeyError:
            return False
        if sp.expand(conjugate(e.rhs) - other.rhs) != 0:
            return False
    return True


# ---------------------------------------------------------------------------
# B2.1 reduction (the order-4 and order-5 systems)

def b21_reduction() -> dict:
    """Solve the homogeneous B2.1 systems step by step.

    Returns the intermediate solutions and reduced conditions keyed by name:
    sol5 (I41, I32 from the first two order-4 equations), F41/F42, sol6
    (I60, I51, I42 from three order-5 equations) and F51/F52/F53.
    """
    t = table("B2.1")
    E = {(e.direction, e.target): e.rhs for e in t.equations}
    I31, I22, I50, I41, I32 = inv(3, 1), inv(2, 2), inv(5, 0), inv(4, 1), inv(3, 2)
    I60, I51, I42 = inv(6, 0), inv(5, 1), inv(4, 2)
    s41 = sp.solve(E[("x", (3, 1))], I41)[0]
    s32 = sp.solve(E[("y", (3, 1))].subs(I41, s41), I32)[0]
    sol5 = {I41: sp.expand(s41), I32: sp.expand(s32)}
    F41 = sp.expand(E[("x", (2, 2))].subs(sol5))
    F42 = sp.factor(E[("y", (2, 2))].subs(sol5))
    sub = lambda e: sp.expand(e.subs(sol5))
    s60 = sp.solve(sub(E[("x", (5, 0))]), I60)[0]
    s51 = sp.solve(sub(E[("y", (5, 0))]), I51)[0]
    s42 = sp.solve(sub(E[("x", (3, 2))]), I42)[0]
    sol6 = {I60: sp.expand(s60), I51: sp.expand(s51), I42: sp.expand(s42)}
    full = lambda e: sp.expand(e.subs(sol5).subs(sol6))
    return {
        "sol5": sol5, "F41": F41, "F42": F42, "sol6": sol6,
        "F51": full(E[("x", (4, 1))]), "F52": full(E[("y", (4, 1))]),
        "F53": sp.factor(full(E[("y", (3, 2))])),
    }


# ---------------------------------------------------------------------------
# invariant derivatives measured on a surface

def _displaced_normal(G, branch: str, m: int):
    """Normal form of the surface G re-centred at a symbolic point (s, t).

    G is a normal form at the origin; the result is a Series2 of order m in
    (x, y) whose coefficients are series in the displacement (s, t), so the
    (s, t)-linear terms are exact first derivatives of the invariants.
    """
    from .normalform import prenormalize_series
    from .regraph import scale_regraph
    from .series import displaced_jet

    _, shear = prenormalize_series(G)
    P, _ = prenormalize_series(displaced_jet(G, m), None, shear)
    if branch == "B1":
        g30, g03 = P.F(3, 0), P.F(0, 3)
        mu = (g30 * g30 * g03).cbrt()
        lam = mu * mu / g30
        return scale_regraph(P, mu, lam, mu * lam)
    if branch == "B2.1":
        g30 = P.F(3, 0)
        P = scale_regraph(P, 1, 1 / g30, 1 / g30)
        mu = P.F(4, 0)
        return scale_regraph(P, mu, mu * mu, mu * mu * mu)
    raise UnsupportedBranch(f"no invariant derivatives for branch {branch!r}")


def _scale_of(branch, key, convention):
    if convention == "series" or branch != "B1":
        return Fraction(1)
    return _B1_SCALE[key]


def invariant_derivative_probe(S, which, direction: str, h=None, N: int | None = None,
                               convention: str = "series"):
    """Partial derivative of the invariant I_which along the normalized x' or y'.

    With ``h`` None the derivative is exact (displacement carried as a series
    through the pipeline); otherwise a central difference with step h on the
    re-centred normal form.  ``convention="table"`` rescales B1 values to the
    table's invariants.  Other branches only support the difference quotient,
    taken along the surface's own coordinates.
    """
    from .normalform import classify
    from .series import SurfaceGraph

    nf = classify(S, N)
    if nf.branch not in ("B1", "B2.1"):
        if h is None:
            raise UnsupportedBranch(f"exact probe needs branch B1 or B2.1, got {nf.branch}")
        # no displacement scaling here: difference along the surface's own x, y
        step = (h, 0) if direction == "x" else (0, h)
        plus = classify(S.shifted(*step), N).series.F(*which)
        minus = classify(S.shifted(-step[0], -step[1]), N).series.F(*which)
        return (plus - minus) / (2 * h)
    G = nf.series
    m = sum(which)
    if G.order <= m:
        raise InconsistentSystem(f"order {G.order} too low for derivatives of I{which[0]}{which[1]}")
    scale = _scale_of(nf.branch, tuple(which), convention)
    if h is None:
        val = _displaced_normal(G, nf.branch, m).F(*which)
        d = val.coeff(1, 0) if direction == "x" else val.coeff(0, 1)
        return d * scale
    step = (h, 0) if direction == "x" else (0, h)
    graph = SurfaceGraph(G, None, None, True)
    plus = classify(graph.shifted(*step), G.order).series.F(*which)
    minus = classify(graph.shifted(-step[0], -step[1]), G.order).series.F(*which)
    return (plus - minus) / (2 * h) * scale


@dataclass
class DerivativeMix:
    branch: str
    mix: tuple          # ((m_xx, m_xy), (m_yx, m_yy)): D_d = m_xd d/dx' + m_yd d/dy'
    residuals: dict     # (direction, (j, k)) -> table value minus fitted value
    probes: dict        # (j, k) -> (d/dx', d/dy')
    table_values: dict  # (direction, (j, k)) -> right side of the table

    @property
    def consistent(self) -> bool:
        return all(v == 0 for v in self.residuals.values())


def fit_derivative_mix(S, N: int | None = None) -> DerivativeMix:
    """Fit the table's D_x, D_y as a constant mix of d/dx', d/dy' at the origin.

    Every order-4 invariant gives one equation per direction; the mix is
    solved from the first pair of invariants with independent gradients and
    the remaining equations are reported as residuals.
    """
    from .normalform import classify
    from .scalar import Scalar

    nf = classify(S, N)
    t = table(nf.branch)
    G = nf.series
    keys = [e.target for e in t.equations if sum(e.target) == 4 and e.direction == "x"]
    top = max(sum(e.target) for e in t.equations if sum(e.target) == 4) + 1
    lifted = {m: _displaced_normal(G, nf.branch, m) for m in {sum(k) for k in keys}}
    probes = {}
    for key in keys:
        val = lifted[sum(key)].F(*key) * _scale_of(nf.branch, key, "table")
        probes[key] = (val.coeff(1, 0), val.coeff(0, 1))
    known = {(j, d - j): G.F(j, d - j) for d in range(4, top + 1) for j in range(d + 1)}
    known = series_to_table(nf.branch, known)
    subs = {inv(*k): v for k, v in known.items()}
    rhs = {}
    for e in t.equations:
        if e.target in probes:
            rhs[(e.direction, e.target)] = _eval_scalar(e.rhs, subs)
    pair = None
    for i, a in enumerate(keys):
        for b in keys[i + 1:]:
            det = probes[a][0] * probes[b][1] - probes[a][1] * probes[b][0]
            if not det.is_zero():
                pair = (a, b, det)
                break
        if pair:
            break
    if pair is None:
        raise InconsistentSystem("probe gradients are dependent; the mix is not determined")
    a, b, det = pair
    mix = []
    for d in ("x", "y"):
        ta, tb = rhs[(d, a)], rhs[(d, b)]
        mx = (ta * probes[b][1] - tb * probes[a][1]) / det
        my = (probes[a][0] * tb - probes[b][0] * ta) / det
        mix.append((mx, my))
    res = {}
    for (d, key), tv in rhs.items():
        mx, my = mix[0 if d == "x" else 1]
        res[(d, key)] = tv - (probes[key][0] * mx + probes[key][1] * my)
    M = ((mix[0][0], mix[1][0]), (mix[0][1], mix[1][1]))
    return DerivativeMix(nf.branch, M, res, probes, rhs)


def _eval_scalar(expr, subs):
    """Polynomial with rational coefficients at Scalar values."""
    from .scalar import Scalar

    syms = sorted(expr.free_symbols, key=lambda s: s.name)
    P = sp.Poly(expr, *syms) if syms else None
    if P is None:
        c = sp.Rational(expr)
        return Scalar(Fraction(int(c.p), int(c.q)))
    total = Scalar(0)
    for mon, c in P.terms():
        term = Scalar(Fraction(int(c.p), int(c.q)))
        for s, e in zip(syms, mon):
            if e:
                term = term * subs[s] ** e
        total = total + term
    return total
