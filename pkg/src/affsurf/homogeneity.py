"""Moduli equations of homogeneous models, the model families N1 ... N10, and
model matching.

B1 tuples are (I40, I31, I22, I13, I04) and B2.1 tuples (I31, I22, I50, I41,
I32).  B1 tuples here are in the scaling of the recurrence table (see
``recurrence.series_to_table``); ``moduli_tuple`` converts a normal form.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import sympy as sp

from .errors import AmbiguousMatch, NoMatch, UnsupportedBranch
from .normalform import NormalForm, classify, invariantize_at
from .recurrence import inv, series_to_table
from .scalar import Scalar, _ctx, omega
from .series import SurfaceGraph

B1_KEYS = ((4, 0), (3, 1), (2, 2), (1, 3), (0, 4))
B21_KEYS = ((3, 1), (2, 2), (5, 0), (4, 1), (3, 2))

_I = {key: inv(*key) for key in B1_KEYS + B21_KEYS}
I40, I31, I22, I13, I04 = (_I[k] for k in B1_KEYS)
I50, I41, I32 = _I[(5, 0)], _I[(4, 1)], _I[(3, 2)]
R = sp.Rational

# homogeneity conditions of the B1 and B2.1 moduli systems
B1_EQUATIONS = {
    "E1": 8 * I04 * I40 - I13 * I31 + 2 * I31 * I40 - 9 * I22,
    "E2": 2 * I04 * I13 + 8 * I04 * I40 - I13 * I31 - 9 * I22,
    "E3": 4 * I04 * I31 - I13 * I22 - 4 * I22 * I40 + 2 * I31 ** 2 + 9 * I13 + 18 * I40,
    "E4": 4 * I04 * I22 - 2 * I13 ** 2 - 4 * I13 * I40 + I22 * I31 - 18 * I04 - 9 * I31,
}
B21_EQUATIONS = {
    "E41": I41 + 8 * I31 ** 2 - R(7, 2) * I22 + 2 * I31 - 2 * I50 * I31,
    "E42": 4 * I31 * I22 + 2 * I31 ** 2 - 2 * I41 * I31 + I32,
    "E43": 12 * I31 * I22 - 3 * I50 * I22 + 4 * I22 + I32,
    "E44": 6 * I22 ** 2 + 4 * I31 * I22 - 3 * I41 * I22,
    "F51": (24 * I31 ** 2 * I50 - 2 * I50 ** 2 * I31 - R(15, 2) * I22 * I50 + 7 * I50 * I31
            + R(21, 2) * I22 - 64 * I31 ** 3 + 36 * I22 * I31 - 40 * I31 ** 2 - 6 * I31),
    "F52": (30 * I22 * I31 + 72 * I22 * I31 ** 2 - 18 * I22 * I50 * I31 - R(63, 4) * I22 ** 2
            + 56 * I31 ** 3 - 14 * I31 ** 2 * I50 + 12 * I31 ** 2 + 64 * I31 ** 4
            - 32 * I31 ** 3 * I50 + 4 * I50 ** 2 * I31 ** 2),
    "F53": -I31 * (-16 * I31 ** 2 + 4 * I31 * I50 + 3 * I22 - 6 * I31)
    * (-32 * I31 ** 2 + 8 * I31 * I50 + 6 * I22 - 13 * I31),
}
# (F1) follows from E1, E2 on every B1 family
F1 = I13 * I04 - I40 * I31


def equations(branch: str) -> dict:
    if branch == "B1":
        return dict(B1_EQUATIONS)
    if branch == "B2.1":
        return dict(B21_EQUATIONS)
    raise UnsupportedBranch(f"no moduli equations for {branch!r}")


def _keys(branch):
    return B1_KEYS if branch == "B1" else B21_KEYS


def _as_dict(branch, values):
    if isinstance(values, dict):
        return values
    return dict(zip(_keys(branch), values))


def _eval(expr, subs: dict):
    """Evaluate a polynomial at Scalar / Fraction / sympy values."""
    if all(not isinstance(v, Scalar) for v in subs.values()):
        return sp.expand(expr.xreplace({k: sp.sympify(v) if not isinstance(v, Fraction)
                                        else sp.Rational(v.numerator, v.denominator)
                                        for k, v in subs.items()}))
    P = sp.Poly(expr, *subs.keys())
    total = Scalar(0)
    syms = list(subs.keys())
    for mon, c in P.terms():
        term = Scalar(Fraction(int(c.p), int(c.q)))
        for s, e in zip(syms, mon):
            if e:
                term = term * subs[s] ** e
        total = total + term
    return total


def _is_zero(v) -> bool:
    if isinstance(v, Scalar):
        if v.is_exact:
            return v.is_zero()
        return abs(v.to_complex()) < 1e-25
    return sp.expand(v) == 0


@dataclass
class ModuliCheck:
    branch: str
    residuals: dict
    ok: bool

    def to_json(self):
        return {"branch": self.branch, "ok": self.ok,
                "residuals": {k: str(v) for k, v in self.residuals.items()}}


def check_moduli(branch: str, values) -> ModuliCheck:
    """Residuals of the homogeneity equations at an invariant tuple."""
    vals = _as_dict(branch, values)
    subs = {_I[k]: vals[k] for k in _keys(branch)}
    res = {name: _eval(e, subs) for name, e in equations(branch).items()}
    return ModuliCheck(branch, res, all(_is_zero(v) for v in res.values()))


# ---------------------------------------------------------------------------
# families

@dataclass
class ModelFamily:
    id: str
    branch: str
    params: tuple
    domains: dict
    assign: Callable | None = None      # params -> tuple in the branch's key order
    closed_form: str | None = None
    note: str = ""
    fixed_params: dict = field(default_factory=dict)

    def tuple_at(self, *args):
        return self.assign(*args)

    def symbolic(self):
        syms = sp.symbols(" ".join(self.params)) if self.params else ()
        if len(self.params) == 1:
            syms = (syms,)
        return syms, self.assign(*syms)


def _n5(t):
    return (t, 0, (8 * t + 3) * Fraction(1, 2), t, 0)


def _n6(c):
    return (0, 0, c, 0, 0)


FAMILIES = [
    ModelFamily("N1", "B1", ("a", "b"), {"a": "C", "b": "C"},
                lambda a, b: (a, -2 * b, 0, -2 * a, b),
                note="a = 0 covers the I40 = 0 subcase"),
    ModelFamily("N2", "B1", ("b",), {"b": "C"},
                lambda b: (b, -4 * b - 9, -Fraction(16, 9) * b * b - 10 * b - 9, -4 * b - 9, b),
                note="coincides with N3 at b = 0"),
    ModelFamily("N3", "B1", ("b",), {"b": "C"},
                lambda b: (b, 4 * b - 9, 6 * b - 9, 4 * b - 9, b),
                note="coincides with N2 at b = 0"),
    ModelFamily("N4", "B1", ("a",), {"a": "C*"},
                lambda a: (a, 0, Fraction(9, 2), 0, Fraction(81, 16) / a)),
    ModelFamily("N5", "B2.1", ("I31",), {"I31": "C"}, _n5,
                note="I22 = 0, 8 I31 - 2 I50 + 3 = 0; I41, I32 from the order-4 solution"),
    ModelFamily("N6", "B2.1", ("I50",), {"I50": "C"}, _n6,
                note="I22 = I31 = 0; I50 is carried as a recorded parameter"),
    ModelFamily("N7", "B2.2.1", (), {}, closed_form="(1+y)*sqrt(2)*tan(x/sqrt(2))-x",
                note="automatically homogeneous"),
    ModelFamily("N8", "B2.2.2", (), {}, closed_form="x*y+x^3/6", note="Cayley surface"),
    ModelFamily("N9", "B3.1", (), {}, closed_form="2-2*sqrt(1-x*y)"),
    ModelFamily("N10", "B3.2", (), {}, closed_form="x*y", note="basic quadric"),
]

BY_ID = {f.id: f for f in FAMILIES}


def enumerate_families(branch: str) -> list:
    out = [f for f in FAMILIES if f.branch == branch]
    if not out:
        raise UnsupportedBranch(f"no homogeneous models recorded for {branch!r}")
    return out


def family_identity(f: ModelFamily) -> dict:
    """Residuals of the branch equations on the symbolic family (all 0 expected)."""
    syms, tup = f.symbolic()
    subs = {_I[k]: sp.sympify(v) for k, v in zip(_keys(f.branch), tup)}
    return {name: sp.simplify(e.xreplace(subs)) for name, e in equations(f.branch).items()}


# ---------------------------------------------------------------------------
# matching

def _S(v):
    return v if isinstance(v, Scalar) else Scalar(v)


def b1_images(t):
    """The six images of a B1 tuple under x <-> y and x -> w x, y -> w^-1 y."""
    t = [_S(v) for v in t]
    w = omega()
    pw = [Scalar(1), w, w * w]
    out = []
    for swap in (False, True):
        for j in range(3):
            img = []
            for (a, b), v in zip(B1_KEYS, t):
                img.append(v * pw[(j * (a - b)) % 3])
            if swap:
                img = img[::-1]
            out.append(tuple(img))
    return out


def canonical_b1_tuple(t):
    """Representative of the swap x G0 orbit, minimal in the scalar order."""
    return min(b1_images(t), key=lambda img: [v.sort_key() for v in img])


def _invert(f: ModelFamily, t):
    """Parameter values with f(params) == t, or None."""
    t = tuple(_S(v) for v in t)
    if f.id == "N1":
        params = (t[0], t[4])
    elif f.id in ("N2", "N3"):
        params = (t[0],)
    elif f.id == "N4":
        if t[0].is_zero():
            return None
        params = (t[0],)
    elif f.id == "N5":
        params = (t[0],)
    elif f.id == "N6":
        params = (t[2],)
    else:
        return None
    img = tuple(_S(v) for v in f.assign(*params))
    if all(_is_zero(a - b) for a, b in zip(img, t)):
        return params
    return None


def _distance(f, t):
    t = tuple(_S(v) for v in t)
    guess = {"N1": (t[0], t[4]), "N6": (t[2],)}.get(f.id, (t[0],))
    if f.id == "N4" and t[0].is_zero():
        return float("inf")
    img = tuple(_S(v) for v in f.assign(*guess))
    return max(abs((a - b).to_complex()) for a, b in zip(img, t))


@dataclass
class Match:
    family: ModelFamily
    params: dict

    def to_json(self):
        return {"model": self.family.id, "branch": self.family.branch,
                "params": {k: str(v) for k, v in self.params.items()}}


def moduli_tuple(nf: NormalForm):
    """The tuple checked by check_moduli, in the scaling of the branch table."""
    if nf.branch == "B1":
        vals = series_to_table("B1", {k: nf.series.F(*k) for k in B1_KEYS})
        return tuple(vals[k] for k in B1_KEYS)
    if nf.branch == "B2.1":
        return tuple(nf.series.F(*k) for k in B21_KEYS)
    raise UnsupportedBranch(f"branch {nf.branch} has no invariant tuple")


def match_tuple(branch: str, t) -> Match:
    """Match an invariant tuple against the families of its branch."""
    fams = enumerate_families(branch)
    # the tuple as given first, so parameters are reported for it when it matches
    images = [tuple(_S(v) for v in t)]
    if branch == "B1":
        images += sorted(b1_images(t)[1:], key=lambda img: [v.sort_key() for v in img])
    found = {}
    for img in images:
        for f in fams:
            if f.id in found:
                continue
            p = _invert(f, img)
            if p is not None:
                found[f.id] = Match(f, dict(zip(f.params, p)))
    if not found:
        canon = images[0]
        near = {f.id: _distance(f, canon) for f in fams}
        raise NoMatch(f"no {branch} family matches; nearest residuals {near}")
    if len(found) > 1:
        raise AmbiguousMatch(list(found.values()))
    return next(iter(found.values()))


def match_model(nf: NormalForm) -> Match:
    if nf.branch in ("B1", "B2.1"):
        return match_tuple(nf.branch, moduli_tuple(nf))
    fam = enumerate_families(nf.branch)[0]
    return Match(fam, {})


# ---------------------------------------------------------------------------
# homogeneity test

@dataclass
class Verdict:
    passed: bool
    branch: str
    match: Match | None = None
    witness: str = ""
    moduli: ModuliCheck | None = None
    samples: list = field(default_factory=list)

    def to_json(self):
        return {"verdict": "Pass" if self.passed else "Fail", "branch": self.branch,
                "match": self.match.to_json() if self.match else None,
                "witness": self.witness,
                "moduli": self.moduli.to_json() if self.moduli else None,
                "samples": self.samples}


def _close(a: Scalar, b: Scalar, rel_bits: int = 100) -> bool:
    """Exact equality, or relative agreement to 2^-rel_bits in approx mode."""
    if a.is_exact and b.is_exact:
        return a == b
    prec = max(a.prec, b.prec)
    za, zb = a.to_approx(prec).approx, b.to_approx(prec).approx
    ctx = _ctx(prec)
    scale = max(abs(za), abs(zb), 1)
    return abs(za - zb) <= scale * ctx.ldexp(1, -rel_bits)


def invariant_signature(nf: NormalForm, order: int | None = None):
    """Canonical comparison data: branch and invariants through ``order``."""
    N = nf.decidedToOrder if order is None else order
    if nf.branch == "B1":
        imgs = []
        from .normalform import discrete_orbit
        for s in discrete_orbit(nf.series):
            imgs.append([s.F(j, d - j) for d in range(4, N + 1) for j in range(d, -1, -1)])
        # compare as a set of images: pick the numerically smallest
        return nf.branch, imgs
    vals = [v for (j, k), v in sorted(nf.invariants.items()) if j + k <= N]
    return nf.branch, [vals]


def same_signature(a, b) -> bool:
    if a[0] != b[0]:
        return False
    ref = a[1][0]
    for img in b[1]:
        if len(img) == len(ref) and all(_close(x, y) for x, y in zip(ref, img)):
            return True
    return False


def is_homogeneous(S: SurfaceGraph, N: int | None = None, samples: int = 5,
                   radius=Fraction(1, 10), seed: int = 0, compare_order: int | None = None) -> Verdict:
    """Necessary-condition homogeneity test at the basepoint and nearby points."""
    nf = classify(S, N)
    moduli = None
    if nf.branch in ("B1", "B2.1"):
        moduli = check_moduli(nf.branch, moduli_tuple(nf))
        if not moduli.ok:
            bad = [k for k, v in moduli.residuals.items() if not _is_zero(v)]
            return Verdict(False, nf.branch, None,
                           f"moduli equations {', '.join(bad)} fail at the basepoint", moduli)
    order = compare_order if compare_order is not None else nf.decidedToOrder
    ref = invariant_signature(nf, order)
    rng = random.Random(seed)
    records = []
    for _ in range(samples):
        p = tuple(Fraction(rng.randint(-1000, 1000), 1000) * radius for _ in range(2))
        other = invariantize_at(S, p, N)
        ok = same_signature(ref, invariant_signature(other, order))
        records.append({"point": [str(v) for v in p], "branch": other.branch, "same": ok})
        if not ok:
            return Verdict(False, nf.branch, None,
                           f"invariants at {records[-1]['point']} differ from the basepoint",
                           moduli, records)
    try:
        m = match_model(nf)
    except (NoMatch, AmbiguousMatch) as exc:
        return Verdict(True, nf.branch, None, f"model: {exc}", moduli, records)
    return Verdict(True, nf.branch, m, "", moduli, records)


# ---------------------------------------------------------------------------
# completeness of the B1 case analysis on slices

def b1_slice_points(a, b) -> list:
    """All solutions of E1..E4 with I40 = a, I04 = b (exact, sympy values)."""
    subs = {I40: sp.sympify(a), I04: sp.sympify(b)}
    eqs = [sp.expand(e.xreplace(subs)) for e in B1_EQUATIONS.values()]
    sols = sp.solve(eqs, [I31, I22, I13], dict=True)
    return [(subs[I40], s[I31], s[I22], s[I13], subs[I04]) for s in sols]


def in_family_union(t) -> list:
    """Families (with the swap x G0 image) containing the sympy tuple t."""
    w = (-1 + sp.sqrt(-3)) / 2
    hits = []
    for swap in (False, True):
        for j in range(3):
            img = [sp.nsimplify(v) * w ** ((j * (a - b)) % 3) for (a, b), v in zip(B1_KEYS, t)]
            if swap:
                img = img[::-1]
            img = [sp.expand(v) for v in img]
            for f in enumerate_families("B1"):
                guess = (img[0], img[4]) if f.id == "N1" else (img[0],)
                if f.id == "N4" and img[0] == 0:
                    continue
                val = f.assign(*guess)
                if all(sp.simplify(sp.sympify(x) - y) == 0 for x, y in zip(val, img)):
                    hits.append(f.id)
    return sorted(set(hits))


# ---------------------------------------------------------------------------
# model surfaces

def model_surface(model: str, params=(), order: int = 8) -> SurfaceGraph:
    """The surface of a model: closed form when known, else the orbit of its frame."""
    from .expr import surface_from_expr
    from .symmetry import frame_fields, orbit_surface

    try:
        fam = BY_ID[model]
    except KeyError:
        raise UnsupportedBranch(f"unknown model {model!r}") from None
    if fam.closed_form is not None:
        return surface_from_expr(fam.closed_form, order)
    if len(params) != len(fam.params):
        raise ValueError(f"{model} takes parameters {fam.params}")
    ser = orbit_surface(*frame_fields(fam.branch, fam.tuple_at(*params)), order)
    return SurfaceGraph(ser)
