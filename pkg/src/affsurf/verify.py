"""Acceptance suite: ten end-to-end checks over the whole pipeline.

Each check returns a ``CriterionResult``; ``run_suite`` runs a selection and
the CLI ``verify`` command prints them.  All randomness is seeded.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

import sympy as sp

from .errors import AmbiguousMatch
from .homogeneity import (B1_EQUATIONS, B1_KEYS, B21_KEYS, BY_ID, FAMILIES, _close,
                          canonical_b1_tuple, check_moduli, family_identity, invariant_signature,
                          model_surface, moduli_tuple, same_signature)
from .jets import JetPolynomial, SubjetSolver, compatibility_obstructions, total_derivative, u
from .normalform import classify, invariantize_at
from .recurrence import conjugate, eliminate_homogeneous, inv, table
from .relinv import SIGN_I30, SIGN_PICK, pick_factorization_check, pipeline_G3, rel_I30
from .scalar import Scalar
from .series import Series2, SurfaceGraph, invert_map
from .symmetry import (STRUCTURE, AffineVectorField, bracket_closure_residual, frame_fields,
                       lie_bracket, orbit_surface, structure_check, tangency_defect)

ORDER = 8

# branch of every model
EXPECTED_BRANCH = {f.id: f.branch for f in FAMILIES}

# parameter samples
SAMPLES = {"N1": [(1, 2), (Fraction(-3, 2), Fraction(1, 3))], "N2": [(1,), (Fraction(2, 5),)],
           "N3": [(1,), (-2,)], "N4": [(1,), (Fraction(-4, 3),)],
           "N5": [(1,), (Fraction(-1, 4),)], "N6": [(1,), (Fraction(5, 2),)]}


@dataclass
class CriterionResult:
    number: int
    name: str
    ok: bool
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        return f"criterion {self.number:2d} {'PASS' if self.ok else 'FAIL'}  {self.name}"

    def to_json(self):
        return {"criterion": self.number, "name": self.name, "ok": self.ok,
                "detail": self.detail, "seconds": round(self.seconds, 2)}


def _tuple_str(t):
    return [str(v) for v in t]


# ---------------------------------------------------------------------------
# 1. ten-model classification

def ten_models() -> tuple[bool, dict]:
    detail, ok = {}, True
    for f in FAMILIES:
        params = SAMPLES.get(f.id, [()])[0]
        S = model_surface(f.id, params, ORDER)
        nf = classify(S, ORDER)
        rec = {"branch": nf.branch, "expected": f.branch}
        good = nf.branch == f.branch
        if f.branch == "B1":
            got, want = canonical_b1_tuple(moduli_tuple(nf)), canonical_b1_tuple(f.tuple_at(*params))
            good = good and all(a == b for a, b in zip(got, want))
            rec["tuple"] = _tuple_str(moduli_tuple(nf))
        elif f.branch == "B2.1":
            got = moduli_tuple(nf)
            good = good and all(a == Scalar(b) for a, b in zip(got, f.tuple_at(*params)))
            rec["tuple"] = _tuple_str(got)
        else:
            # closed form against the orbit of the reference symmetry fields
            es = frame_fields(f.id)
            orb = None
            for i in range(len(es)):
                for j in range(i + 1, len(es)):
                    try:
                        orb = orbit_surface(es[i], es[j], ORDER)
                    except Exception:
                        continue
                    if orb.truncate(2) == S.series.truncate(2):
                        break
                    orb = None
                if orb is not None:
                    break
            other = classify(SurfaceGraph(orb), ORDER) if orb is not None else None
            good = good and other is not None and other.branch == nf.branch and all(
                _close(nf.invariants[k], other.invariants[k]) for k in nf.invariants
                if sum(k) <= ORDER)
            rec["invariants_match_orbit"] = other is not None
        rec["ok"] = good
        ok = ok and good
        detail[f.id] = rec
    return ok, detail


# ---------------------------------------------------------------------------
# 2. elimination identity

def _coeff_rows(polys, syms):
    rows, monos = [], set()
    ps = [sp.Poly(p, *syms) for p in polys]
    for p in ps:
        monos |= set(p.monoms())
    monos = sorted(monos)
    for p in ps:
        d = dict(p.terms())
        rows.append([d.get(m, 0) for m in monos])
    return sp.Matrix(rows)


def elimination_identity() -> tuple[bool, dict]:
    derived = eliminate_homogeneous(table("B1"))
    reference = list(B1_EQUATIONS.values())
    syms = sorted(set().union(*(e.free_symbols for e in derived + reference)), key=str)
    free5 = {inv(5, 0), inv(0, 5)} & set().union(*(e.free_symbols for e in derived))
    deg = max(sp.Poly(e, *syms).total_degree() for e in derived)
    rd = _coeff_rows(derived, syms).rank()
    rp = _coeff_rows(reference, syms).rank()
    ru = _coeff_rows(derived + reference, syms).rank()
    ok = len(derived) == 4 and rd == rp == ru == 4 and deg <= 2 and not free5
    return ok, {"conditions": [str(e) for e in derived], "rank": [rd, rp, ru],
                "degree": deg, "I50_I05_free": not free5}


# ---------------------------------------------------------------------------
# 3. family identities

def family_identities() -> tuple[bool, dict]:
    detail, ok = {}, True
    for f in FAMILIES:
        if f.branch not in ("B1", "B2.1"):
            continue
        res = family_identity(f)
        good = all(v == 0 for v in res.values())
        detail[f.id] = {k: str(v) for k, v in res.items()}
        ok = ok and good
    return ok, detail


# ---------------------------------------------------------------------------
# 4. compatibility numbers

def compatibility_numbers() -> tuple[bool, dict]:
    u22, u31, u32 = u(2, 2), u(3, 1), u(3, 2)
    solA, _ = SubjetSolver("B2.2", cross_section=True).chains(6)
    obs = {name: (sp.expand(a), sp.expand(b)) for name, a, b in compatibility_obstructions(9)}
    checks = {
        "u33": sp.expand(solA[(3, 3)].as_expr() - sp.Rational(9, 2) * u22 ** 2) == 0,
        "u43": obs["u4,3"] == (15 * u32 * u22, 12 * u32 * u22),
        "u53_at_u22=0": (obs["u5,3"][0].subs(u22, 0), obs["u5,3"][1].subs(u22, 0))
        == (15 * u32 ** 2, 12 * u32 ** 2),
        "u53_u22_u31": (obs["u5,3"][0].coeff(u31).coeff(u22, 2),
                        obs["u5,3"][1].coeff(u31).coeff(u22, 2))
        == (sp.Rational(135, 2), 75),
        "u63_at_u32=0": (obs["u6,3"][0].subs(u32, 0), obs["u6,3"][1].subs(u32, 0))
        == (sp.Rational(945, 4) * u22 ** 3, 225 * u22 ** 3),
    }
    # the forcing argument: each obstruction leaves only u32 = u22 = 0
    d43 = sp.factor(obs["u4,3"][0] - obs["u4,3"][1])
    d53 = sp.factor((obs["u5,3"][0] - obs["u5,3"][1]).subs(u22, 0))
    d63 = sp.factor((obs["u6,3"][0] - obs["u6,3"][1]).subs(u32, 0))
    checks["forcing"] = (d43 == 3 * u22 * u32 and sp.solve(d53, u32) == [0]
                         and sp.solve(d63, u22) == [0])
    return all(checks.values()), {"checks": checks,
                                  "obstructions": {k: [str(a), str(b)] for k, (a, b) in obs.items()}}


# ---------------------------------------------------------------------------
# 5. symmetry verification

def symmetry_verification() -> tuple[bool, dict]:
    detail, ok = {}, True
    for f in FAMILIES:
        for params in SAMPLES.get(f.id, [()]):
            S = model_surface(f.id, params, ORDER)
            fields = frame_fields(f.branch, f.tuple_at(*params)) if params else frame_fields(f.id)
            defects = [tangency_defect(v, S.series).is_zero() for v in fields]
            rec = {"tangent": defects}
            good = all(defects)
            if f.id in STRUCTURE:
                sc = structure_check(f.id)
                rec["structure"] = {f"[e{i},e{j}]": v for (i, j), v in sc.items()}
                good = good and all(sc.values())
            else:
                closed = bracket_closure_residual(f.branch, f.tuple_at(*params)).is_zero()
                rec["bracket_closes"] = closed
                good = good and closed
            rec["ok"] = good
            ok = ok and good
            detail[f"{f.id}{list(params) if params else ''}"] = rec
    return ok, detail


# ---------------------------------------------------------------------------
# 6. bracket iff-condition

def _random_frac(rng, lo=-9, hi=9, den=6):
    return Fraction(rng.randint(lo * den, hi * den), rng.randint(1, den))


def _on_variety_points(rng, branch, count):
    fams = [f for f in FAMILIES if f.branch == branch]
    pts = []
    for i in range(count):
        f = fams[i % len(fams)]
        while True:
            params = [_random_frac(rng) for _ in f.params]
            if f.id == "N4" and params[0] == 0:
                continue
            break
        pts.append((f.id, tuple(f.tuple_at(*params))))
    return pts


def bracket_iff(seed: int = 6) -> tuple[bool, dict]:
    rng = random.Random(seed)
    detail, ok = {}, True
    for branch in ("B1", "B2.1"):
        on = _on_variety_points(rng, branch, 5)
        off = []
        while len(off) < 5:
            t = tuple(_random_frac(rng) for _ in range(5))
            if not check_moduli(branch, t).ok:
                off.append(t)
        on_zero = [bracket_closure_residual(branch, t).is_zero() for _, t in on]
        off_nonzero = [not bracket_closure_residual(branch, t).is_zero() for t in off]
        moduli_on = [check_moduli(branch, t).ok for _, t in on]
        good = all(on_zero) and all(off_nonzero) and all(moduli_on)
        ok = ok and good
        detail[branch] = {"on": [[fid, _tuple_str(t)] for fid, t in on], "on_zero": on_zero,
                          "off": [_tuple_str(t) for t in off], "off_nonzero": off_nonzero}
    return ok, detail


# ---------------------------------------------------------------------------
# 7. Pick consistency

def random_rank2_jet(rng) -> Series2:
    while True:
        vals = {(j, d - j): Fraction(rng.randint(-6, 6), rng.randint(1, 3))
                for d in (2, 3) for j in range(d + 1)}
        B = vals[(1, 1)] ** 2 - vals[(2, 0)] * vals[(0, 2)]
        A = vals[(2, 0)] + 2 * vals[(1, 1)] + vals[(0, 2)]
        if B != 0 and A != 0:
            return Series2.from_factorial(3, {k: Scalar(v) for k, v in vals.items()})


def pick_consistency(seed: int = 7, count: int = 20) -> tuple[bool, dict]:
    rng = random.Random(seed)
    flags, pick_ok, i30_ok = [], [], []
    for _ in range(count):
        F = random_rank2_jet(rng)
        chk = pick_factorization_check(F)
        flags.append(chk.signFlag)
        pick_ok.append(chk.lhs == SIGN_PICK * chk.rhs)
    for _ in range(count):
        F = random_rank2_jet(rng)
        g30, _ = pipeline_G3(F)
        i30_ok.append(g30 == SIGN_I30 * rel_I30(F))
    ok = all(pick_ok) and all(i30_ok) and len(set(flags) - {"both"}) <= 1
    return ok, {"pick_sign_constant": SIGN_PICK, "I30_sign_constant": SIGN_I30,
                "flags": flags, "pick_ok": sum(pick_ok), "I30_ok": sum(i30_ok)}


# ---------------------------------------------------------------------------
# 8. orbit round trips

def orbit_round_trips() -> tuple[bool, dict]:
    detail, ok = {}, True
    for fid in ("N1", "N4", "N8", "N9"):
        f = BY_ID[fid]
        params = SAMPLES.get(fid, [()])[0]
        if params:
            ser = orbit_surface(*frame_fields(f.branch, f.tuple_at(*params)), ORDER)
            nf = classify(SurfaceGraph(ser), ORDER)
            got = canonical_b1_tuple(moduli_tuple(nf))
            want = canonical_b1_tuple(f.tuple_at(*params))
            good = nf.branch == f.branch and all(a == b for a, b in zip(got, want))
            detail[fid] = {"branch": nf.branch, "tuple": _tuple_str(got), "ok": good}
        else:
            es = frame_fields(fid)
            pair = {"N8": (0, 1), "N9": (1, 2)}[fid]
            ser = orbit_surface(es[pair[0]], es[pair[1]], ORDER)
            ref = classify(model_surface(fid, (), ORDER), ORDER)
            nf = classify(SurfaceGraph(ser), ORDER)
            good = nf.branch == ref.branch and all(
                nf.invariants.get(k) == v for k, v in ref.invariants.items())
            detail[fid] = {"branch": nf.branch, "series_matches_closed_form":
                           ser == model_surface(fid, (), ORDER).series, "ok": good}
        ok = ok and good
    return ok, detail


# ---------------------------------------------------------------------------
# 9. homogeneous constancy

def homogeneous_constancy(seed: int = 9, count: int = 5) -> tuple[bool, dict]:
    rng = random.Random(seed)
    detail, ok = {}, True
    for fid in ("N9", "N7"):
        S = model_surface(fid, (), ORDER)
        ref = classify(S, ORDER)
        sig = invariant_signature(ref)
        recs = []
        for _ in range(count):
            p = tuple(Fraction(rng.randint(-100, 100), 1000) for _ in range(2))
            nf = invariantize_at(S, p, ORDER)
            same = same_signature(sig, invariant_signature(nf, ref.decidedToOrder))
            recs.append({"point": [str(v) for v in p], "mode": nf.mode, "same": same})
            ok = ok and same
        detail[fid] = recs
    return ok, detail


# ---------------------------------------------------------------------------
# 10. property suites

def _rand_scalar(rng):
    roots = [Scalar(2).sqrt(), Scalar(3).sqrt()]
    v = Scalar(_random_frac(rng, -4, 4, 4))
    for r in roots:
        v = v + Scalar(_random_frac(rng, -4, 4, 4)) * r
    if rng.random() < 0.3:
        v = v * Scalar(-1).sqrt()
    return v


def prop_scalar_field(rng) -> bool:
    a, b, c = _rand_scalar(rng), _rand_scalar(rng), _rand_scalar(rng)
    ok = (a + b) + c == a + (b + c) and a * (b + c) == a * b + a * c
    ok = ok and a * b == b * a and (a - b) + b == a and (a * b) * c == a * (b * c)
    if not a.is_zero():
        ok = ok and a * a.inverse() == Scalar(1) and (b / a) * a == b
    return ok


def _rand_series(rng, N, low=1):
    vals = {(j, d - j): Scalar(Fraction(rng.randint(-5, 5), rng.randint(1, 4)))
            for d in range(low, N + 1) for j in range(d + 1)}
    return Series2(N, vals)


def prop_series_roundtrip(rng) -> bool:
    N = 5
    F = _rand_series(rng, N)
    while True:
        X, Y = _rand_series(rng, N), _rand_series(rng, N)
        det = X.coeff(1, 0) * Y.coeff(0, 1) - X.coeff(0, 1) * Y.coeff(1, 0)
        if not det.is_zero():
            break
    P, Q = invert_map(X, Y)
    x, y = Series2.var(N, "x"), Series2.var(N, "y")
    return F.substitute(X, Y).substitute(P, Q) == F and X.substitute(P, Q) == x \
        and Y.substitute(P, Q) == y


def _rand_jetpoly(rng):
    coords = [u(j, d - j) for d in range(2, 5) for j in range(d + 1)]
    expr = 0
    for _ in range(rng.randint(1, 3)):
        term = sp.Rational(rng.randint(-5, 5), rng.randint(1, 3))
        for _ in range(rng.randint(1, 3)):
            term *= rng.choice(coords)
        expr += term
    if rng.random() < 0.3:
        expr = expr * JetPolynomial.radical().expr
    return JetPolynomial(expr)


def prop_total_derivative(rng) -> bool:
    P = _rand_jetpoly(rng)
    a = total_derivative(total_derivative(P, "x"), "y")
    b = total_derivative(total_derivative(P, "y"), "x")
    return (a - b).is_zero()


def _rand_field(rng):
    return AffineVectorField([[rng.randint(-4, 4) for _ in range(3)] for _ in range(3)],
                             [rng.randint(-4, 4) for _ in range(3)])


def prop_jacobi(rng) -> bool:
    a, b, c = _rand_field(rng), _rand_field(rng), _rand_field(rng)
    j = lie_bracket(a, lie_bracket(b, c)) + lie_bracket(b, lie_bracket(c, a)) \
        + lie_bracket(c, lie_bracket(a, b))
    return j.is_zero()


_B1 = table("B1")


def prop_conjugation(rng) -> bool:
    """Evaluated at a random point, Dx I_jk matches Dy I_kj at the swapped point."""
    e = rng.choice(_B1.equations)
    j, k = e.target
    other = _B1.equation("y" if e.direction == "x" else "x", k, j)
    syms = e.rhs.free_symbols | conjugate(other.rhs).free_symbols
    point = {s: sp.Rational(rng.randint(-20, 20), rng.randint(1, 5)) for s in syms}
    swapped = {conjugate(s): v for s, v in point.items()}
    return e.rhs.xreplace(point) == other.rhs.xreplace(swapped)


PROPERTIES = {
    "scalar field axioms": prop_scalar_field,
    "series substitution round trip": prop_series_roundtrip,
    "total derivatives commute": prop_total_derivative,
    "Jacobi identity": prop_jacobi,
    "B1 table conjugation symmetry": prop_conjugation,
}


def property_suites(seed: int = 10, cases: int = 1000) -> tuple[bool, dict]:
    detail = {}
    for name, prop in PROPERTIES.items():
        rng = random.Random(f"{seed}:{name}")
        fails = sum(1 for _ in range(cases) if not prop(rng))
        detail[name] = {"cases": cases, "failures": fails}
    return all(d["failures"] == 0 for d in detail.values()), detail


# ---------------------------------------------------------------------------

CRITERIA = {
    1: ("ten-model classification", ten_models),
    2: ("elimination identity", elimination_identity),
    3: ("family identities", family_identities),
    4: ("compatibility numbers", compatibility_numbers),
    5: ("symmetry verification", symmetry_verification),
    6: ("bracket iff-condition", bracket_iff),
    7: ("Pick consistency", pick_consistency),
    8: ("orbit round trips", orbit_round_trips),
    9: ("homogeneous constancy", homogeneous_constancy),
    10: ("property suites", property_suites),
}


def run_criterion(n: int) -> CriterionResult:
    name, fn = CRITERIA[n]
    t0 = time.perf_counter()
    try:
        ok, detail = fn()
    except AmbiguousMatch as exc:  # reported, never swallowed as a pass
        ok, detail = False, {"error": str(exc)}
    return CriterionResult(n, name, ok, detail, time.perf_counter() - t0)


def run_suite(which="all") -> list:
    nums = sorted(CRITERIA) if which == "all" else [int(x) for x in str(which).split(",")]
    return [run_criterion(n) for n in nums]
