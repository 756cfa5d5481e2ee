"""Command-line front end: ``affsurf <command> [flags]``, JSON reports on stdout.

Exit codes: 0 success, 1 failed verification, 2 domain error, 3 undecidable
at the requested order.  The environment variable ``AFFSURF_PREC`` sets the
default working precision (bits) of approximate mode.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction

import sympy as sp

from .errors import AffSurfError, AmbiguousMatch, DomainError, NoMatch, UndecidableAtOrder
from .scalar import DEFAULT_PREC, Scalar

SCHEMA = 1

COMMANDS = ("classify", "invariants", "moduli", "match", "symmetries", "orbit", "compat",
            "recur", "verify")


def _prec() -> int:
    try:
        return int(os.environ.get("AFFSURF_PREC", DEFAULT_PREC))
    except ValueError:
        return DEFAULT_PREC


def _text(v):
    """JSON-friendly value: scalars in their textual encoding."""
    if isinstance(v, (Scalar, Fraction, sp.Basic)):
        return str(v)
    if isinstance(v, dict):
        return {(k if isinstance(k, str) else ",".join(map(str, k)) if isinstance(k, tuple)
                 else str(k)): _text(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_text(x) for x in v]
    return v


def _load(args):
    from .expr import surface_from_expr
    from .series import load_surface

    if args.expr is not None:
        return surface_from_expr(args.expr, args.order, args.mode, _prec()), {"expr": args.expr}
    if args.infile is not None:
        S = load_surface(args.infile)
        return S, {"file": args.infile}
    raise DomainError("no input: give --in <file> or --expr <text>")


def _params(args, model):
    from .homogeneity import BY_ID

    fam = BY_ID.get(model)
    if fam is None:
        raise DomainError(f"unknown model {model!r}")
    vals = []
    for name in fam.params:
        raw = getattr(args, name, None) if name in ("a", "b") else args.param
        if raw is None:
            raise DomainError(f"{model} needs --{name if name in ('a', 'b') else 'param'}")
        vals.append(Fraction(raw))
    return fam, tuple(vals)


# ---------------------------------------------------------------------------
# commands

def cmd_classify(args):
    from .normalform import classify

    S, desc = _load(args)
    nf = classify(S, args.order, "auto" if args.mode == "exact" else "approx", _prec())
    return {"input": desc, **nf.to_json()}


def cmd_invariants(args):
    from .relinv import order4_G_block, pick_factorization_check, pick_numerator, rel_I30

    S, desc = _load(args)
    F = S.series
    out = {"input": desc, "pick_numerator": str(pick_numerator(F))}
    try:
        out["rel_I30"] = str(rel_I30(F))
    except DomainError as exc:
        out["rel_I30"] = None
        out["rel_I30_error"] = str(exc)
    try:
        out["order4_block"] = _text(order4_G_block(F))
    except DomainError as exc:
        out["order4_block"] = None
        out["order4_block_error"] = str(exc)
    chk = pick_factorization_check(F)
    out["pick_check"] = {"pipeline": str(chk.lhs), "closed_form": str(chk.rhs), "sign": chk.signFlag}
    return out


def cmd_moduli(args):
    from .homogeneity import check_moduli, enumerate_families, equations, moduli_tuple
    from .normalform import classify

    if args.list or (args.infile is None and args.expr is None):
        branch = args.branch or "B1"
        fams = enumerate_families(branch)
        return {"branch": branch, "equations": _text(equations(branch)),
                "families": [{"model": f.id, "params": list(f.params),
                              "tuple": _text(f.symbolic()[1]), "note": f.note} for f in fams]}
    S, desc = _load(args)
    nf = classify(S, args.order)
    t = moduli_tuple(nf)
    return {"input": desc, "branch": nf.branch, "tuple": _text(t),
            "check": check_moduli(nf.branch, t).to_json()}


def cmd_match(args):
    from .homogeneity import is_homogeneous

    S, desc = _load(args)
    v = is_homogeneous(S, args.order)
    return {"input": desc, **v.to_json()}


def cmd_symmetries(args):
    from .homogeneity import BY_ID, model_surface
    from .symmetry import (STRUCTURE, bracket_closure_residual, frame_fields, lie_bracket,
                           structure_check, tangency_defect)

    fam, params = _params(args, args.model)
    if params:
        fields = frame_fields(fam.branch, fam.tuple_at(*params))
    else:
        fields = frame_fields(fam.id)
    S = model_surface(fam.id, params, args.order)
    out = {"model": fam.id, "branch": fam.branch, "params": _text(params),
           "fields": [repr(v) for v in fields],
           "tangent": {v.name: tangency_defect(v, S.series).is_zero() for v in fields},
           "brackets": {f"[{a.name},{b.name}]": repr(lie_bracket(a, b))
                        for i, a in enumerate(fields) for b in fields[i + 1:]}}
    if fam.id in STRUCTURE:
        out["structure"] = {f"[e{i},e{j}]": ok for (i, j), ok in structure_check(fam.id).items()}
    else:
        out["bracket_closes"] = bracket_closure_residual(fam.branch, fam.tuple_at(*params)).is_zero()
    return out


def cmd_orbit(args):
    from .homogeneity import model_surface

    fam, params = _params(args, args.model)
    S = model_surface(fam.id, params, args.order)
    return {"model": fam.id, "params": _text(params), **S.series.to_json()}


def cmd_compat(args):
    from .jets import compatibility_obstructions

    rows = compatibility_obstructions(args.max_order)
    return {"obstructions": [{"coordinate": name, "I03_chain": str(a), "I40_chain": str(b),
                              "difference": str(sp.factor(a - b))} for name, a, b in rows]}


def cmd_recur(args):
    from .recurrence import conjugation_closed, eliminate_homogeneous, table

    t = table(args.branch or "B1")
    out = {"branch": t.branch, "equations": [str(e) for e in t.equations],
           "commutator": [str(c) for c in t.commutator],
           "conjugation_closed": conjugation_closed(t)}
    if args.eliminate:
        out["conditions"] = [str(c) for c in eliminate_homogeneous(t)]
    return out


def cmd_verify(args):
    from .verify import run_suite

    results = run_suite(args.suite)
    return {"suite": args.suite, "ok": all(r.ok for r in results),
            "criteria": [_text(r.to_json()) for r in results]}


HANDLERS = {name: globals()[f"cmd_{name}"] for name in COMMANDS}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="affsurf", description="Affine normal forms of surfaces.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--in", dest="infile", help="surface coefficient file (JSON)")
    p.add_argument("--expr", help="closed-form expression in x, y")
    p.add_argument("--order", type=int, default=8)
    p.add_argument("--mode", choices=("exact", "approx"), default="exact")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--model", default="N9")
    p.add_argument("--a")
    p.add_argument("--b")
    p.add_argument("--param", help="parameter of N5 (I31) or N6 (I50)")
    p.add_argument("--branch")
    p.add_argument("--eliminate", action="store_true")
    p.add_argument("--list", action="store_true")
    p.add_argument("--suite", default="all")
    p.add_argument("--max-order", type=int, default=9)
    p.add_argument("--timing", action="store_true", help="add wall-clock time to the report")
    return p


def _emit(report: dict, fmt: str):
    if fmt == "json":
        print(json.dumps(report, indent=2, sort_keys=True, default=str))
        return
    if "criteria" in report:
        for c in report["criteria"]:
            print(f"criterion {c['criterion']:2d} {'PASS' if c['ok'] else 'FAIL'}  {c['name']}")
        return
    for k, v in report.items():
        print(f"{k}: {v if not isinstance(v, (dict, list)) else json.dumps(v, default=str)}")


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    t0 = time.perf_counter()
    try:
        report = HANDLERS[args.command](args)
    except UndecidableAtOrder as exc:
        _emit({"schema": SCHEMA, "error": type(exc).__name__, "message": str(exc)}, args.format)
        return 3
    except (DomainError, AffSurfError) as exc:
        _emit({"schema": SCHEMA, "error": type(exc).__name__, "message": str(exc)}, args.format)
        return 2
    report = {"schema": SCHEMA, "command": args.command, **report}
    if args.timing:
        report["seconds"] = round(time.perf_counter() - t0, 3)
    _emit(report, args.format)
    if args.command == "verify" and not report["ok"]:
        return 1
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
