"""Command-line entry point: ``hessbasis <command> ...``.

Exit codes: 0 on success (including degenerate verdicts), 1 on domain errors
or failed self-checks, 2 on usage errors.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import asdict, dataclass, field
from typing import Callable

from . import __version__
from .exact_arith import scalar_to_json
from .hessian_basis import (CandidateSet, certify, certify_many, classical_T, default_basis,
                            dihedral_basis, enumerate_candidate_sets)
from .invariants import (NotRegular, basic_invariants, certify_regular, default_regular_vector, minimal_weight,
                         parse_point)
from .molien import (SeriesInconsistency, census_ratio, closed_form_ratio, cycle_index_molien, default_truncation,
                     group_series, molien_dihedral_census, product_ratio, ratio_for, ratio_polynomial,
                     reference_ratio)
from .multipoly import SymTensorPoly
from .reflection_groups import (DEFAULT_ELEMENT_BOUND, EXCEPTIONAL, EnumerationError, GroupSpec, GroupTooLarge,
                                ReflectionGroup, classical, dihedral, enumerate_group, exceptional, load_fixtures,
                                parse_spec, weight_orbit)
from .tensor_decompose import NotEquivariant, decompose

REPORT_SCHEMA = "hessbasis.report/1"
DOMAIN_ERRORS = (ValueError, ArithmeticError, GroupTooLarge, EnumerationError, NotRegular, NotEquivariant,
                 SeriesInconsistency, KeyError, OSError)


def _emit(args, payload: dict, text: str):
    if args.json:
        print(json.dumps(payload, indent=1, sort_keys=False))
    else:
        print(text)


def _fixtures(args) -> dict:
    return load_fixtures(args.fixtures)


def _spec(args, fx) -> GroupSpec:
    text = args.group or getattr(args, "type", None)
    if not text:
        raise ValueError("give --group")
    return parse_spec(text, fx)


def _load_group(args, fx) -> ReflectionGroup:
    if getattr(args, "group_file", None):
        with open(args.group_file) as fh:
            return ReflectionGroup.from_json(json.load(fh))
    return ReflectionGroup(_spec(args, fx))


# ---------------------------------------------------------------------------
# group / molien / invariants / regular-check
# ---------------------------------------------------------------------------

def cmd_group(args) -> int:
    fx = _fixtures(args)
    spec = _spec(args, fx)
    g = ReflectionGroup(spec)
    if args.action == "order":
        if spec.order > args.bound:
            note = "not enumerable; product of degrees"
            _emit(args, {"schema": "hessbasis.order/1", "group": spec.name, "order": spec.order, "note": note},
                  f"{spec.order}  ({note})")
            return 0
        enumerate_group(g, args.bound)
        _emit(args, {"schema": "hessbasis.order/1", "group": spec.name, "order": g.order, "note": "enumerated"},
              str(g.order))
        return 0
    enumerate_group(g, args.bound)
    payload = g.to_json(include_census=args.census)
    payload["order"] = g.order
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(payload, fh, indent=1)
    _emit(args, payload, f"{spec.name}: {g.order} elements, conductor {g.conductor}"
          + (f", {len(g.census())} charpoly classes" if args.census else "")
          + (f"; written to {args.out}" if args.out else ""))
    return 0


def cmd_molien(args) -> int:
    fx = _fixtures(args)
    g = _load_group(args, fx)
    spec = g.spec
    character = "trivial" if args.tensor == "invariant" else "sym2"
    N = args.order or default_truncation(spec.degrees)
    if args.method == "census":
        series = group_series(g, character, N)
    elif args.method == "cycle-index":
        if spec.kind not in ("A", "B", "D"):
            raise ValueError("cycle-index route covers types A, B, D only")
        series = cycle_index_molien(spec.kind, spec.param, character, N)
    elif args.method == "dihedral":
        if spec.kind != "I2":
            raise ValueError("dihedral route needs an I2 group")
        series = molien_dihedral_census(spec.param, character, N)
    elif args.method in ("closed-form", "fixture"):
        if not args.ratio or character != "sym2":
            raise ValueError(f"method {args.method} only yields the sym2 ratio; add --ratio")
        series = None
    else:
        raise ValueError(f"unknown method {args.method!r}")
    if args.ratio:
        if character != "sym2":
            raise ValueError("--ratio needs --tensor sym2")
        r = ratio_polynomial(series, spec.degrees, spec.name) if series is not None else ratio_for(spec, args.method)
        _emit(args, {"schema": "hessbasis.ratio/1", "group": spec.name, "method": args.method,
                     "coeffs": r.to_json(), "text": str(r)}, str(r))
        return 0
    coeffs = series.as_rationals()
    _emit(args, {"schema": "hessbasis.series/1", "group": spec.name, "tensor": args.tensor, "order": N,
                 "coeffs": [str(c) for c in coeffs]},
          " ".join(str(c) for c in coeffs))
    return 0


def cmd_invariants(args) -> int:
    fx = _fixtures(args)
    spec = _spec(args, fx)
    invs = basic_invariants(spec)
    rows = []
    for k, inv in enumerate(invs, 1):
        desc = str(inv.poly) if inv.is_explicit else f"sum of lambda^{inv.degree} over an orbit of {len(inv.chern.forms)}"
        rows.append({"index": k, "degree": inv.degree, "explicit": inv.is_explicit, "description": desc})
    if spec.kind in EXCEPTIONAL:
        lam = minimal_weight(spec.cartan)
        extra = {"minimal_weight": [scalar_to_json(x) for x in lam.w]}
    else:
        extra = {}
    text = "\n".join(f"r{r['index']} (deg {r['degree']}): {r['description']}" for r in rows)
    _emit(args, {"schema": "hessbasis.invariants/1", "group": spec.name, "invariants": rows, **extra}, text)
    return 0


def cmd_regular(args) -> int:
    fx = _fixtures(args)
    spec = _spec(args, fx)
    invs = basic_invariants(spec)
    if args.point:
        rv = certify_regular(invs, parse_point(args.point))
    else:
        rv = default_regular_vector(spec, invs, fx)
    verdict = "regular" if rv.certified else "not regular"
    _emit(args, {"schema": "hessbasis.regular/1", "group": spec.name,
                 "point": [scalar_to_json(x) for x in rv.point],
                 "jacobian_det": scalar_to_json(rv.jacobian_det), "certified": rv.certified},
          f"{verdict}: det J = {rv.jacobian_det}")
    return 0


# ---------------------------------------------------------------------------
# basis / decompose
# ---------------------------------------------------------------------------

def _point(args, spec, invs, fx):
    return parse_point(args.point) if args.point else default_regular_vector(spec, invs, fx)


def cmd_basis(args) -> int:
    fx = _fixtures(args)
    g = _load_group(args, fx)
    spec = g.spec
    invs = basic_invariants(spec, g)
    if args.action == "certify":
        cset = CandidateSet.parse(args.set) if args.set else default_basis(spec, fx)
        cert = certify(cset, invs, _point(args, spec, invs, fx), group=spec.name, keep_matrix=args.matrix)
        _emit(args, cert.to_json(include_matrix=args.matrix),
              f"{cert.verdict}: det = {cert.determinant}  [{cert.cset}]")
        return 0
    ratio = reference_ratio(spec, fx)
    singles = args.all_singles if args.all_singles is not None else all(d >= 2 for d in spec.degrees)
    sets = enumerate_candidate_sets(spec.degrees, ratio, singles)
    if args.certify_all and sets:
        certs = certify_many(sets, invs, _point(args, spec, invs, fx), group=spec.name)
        payload = {"schema": "hessbasis.certificates/1", "group": spec.name, "ratio": str(ratio),
                   "count": len(sets), "certified": sum(c.certified for c in certs),
                   "certificates": [c.to_json() for c in certs]}
        text = "\n".join(f"{c.verdict:10s} {c.cset}" for c in certs)
        text += f"\n{payload['certified']}/{len(sets)} certified"
    else:
        payload = {"schema": "hessbasis.candidates/1", "group": spec.name, "ratio": str(ratio),
                   "count": len(sets), "sets": [str(s) for s in sets]}
        text = "\n".join(str(s) for s in sets) + f"\n{len(sets)} candidate sets"
        if not sets:
            text = f"no candidate set matches ratio {ratio}"
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(payload, fh, indent=1)
    _emit(args, payload, text)
    return 0


def cmd_decompose(args) -> int:
    fx = _fixtures(args)
    g = _load_group(args, fx)
    spec = g.spec
    with open(args.tensor) as fh:
        sigma = SymTensorPoly.from_json(json.load(fh))
    invs = basic_invariants(spec, g)
    cset = default_basis(spec, fx) if args.basis == "auto" else CandidateSet.parse(args.basis)
    dec = decompose(sigma, cset, invs, g)
    payload = dec.to_json()
    payload["group"] = spec.name
    text = "\n".join(f"{e}: {a.pretty('y')}" for e, a in zip(dec.cset, dec.coeffs))
    if dec.residual:
        text += "\nresidual: tensor is not in the span of the basis"
    _emit(args, payload, text)
    return 1 if dec.residual else 0


# ---------------------------------------------------------------------------
# selfcheck
# ---------------------------------------------------------------------------

@dataclass
class Check:
    name: str
    status: str
    expected: str
    computed: str
    provenance: str
    seconds: float = 0.0


@dataclass
class RunReport:
    profile: str
    checks: list[Check] = field(default_factory=list)

    @property
    def failed(self) -> list[Check]:
        return [c for c in self.checks if c.status == "fail"]

    def to_json(self, timing: bool = True) -> dict:
        rows = []
        for c in self.checks:
            row = asdict(c)
            if not timing:
                row.pop("seconds")
            rows.append(row)
        return {"schema": REPORT_SCHEMA, "engine": __version__, "profile": self.profile,
                "passed": sum(c.status == "pass" for c in self.checks), "failed": len(self.failed),
                "skipped": sum(c.status == "skipped" for c in self.checks), "checks": rows}


@dataclass
class _Plan:
    name: str
    provenance: str
    expected: str
    compute: Callable[[], str] | None


def _plan_checks(profile: str, fx: dict) -> list[_Plan]:
    full = profile in ("full", "long")
    plans: list[_Plan] = []

    def add(name, prov, expected, fn):
        plans.append(_Plan(name, prov, str(expected), fn))

    for n in range(2, 13):
        add(f"I2:{n} ratio = 1 + t^2 + t^{n - 2}", "derived-oracle", closed_form_ratio("I2", n),
            lambda n=n: str(census_ratio(ReflectionGroup(dihedral(n)))))

    limits = {"A": 6, "B": 4, "D": 4} if full else {"A": 4, "B": 3, "D": 4}
    for kind, top in limits.items():
        for n in range(2 if kind == "D" else 1, top + 1):
            spec = classical(kind, n)

            def routes(spec=spec):
                vals = {ratio_for(spec, m) for m in ("census", "cycle-index", "closed-form")}
                return str(vals.pop()) if len(vals) == 1 else "routes disagree: " + " | ".join(map(str, vals))
            add(f"{spec.name} ratio routes agree", "derived-oracle", closed_form_ratio(kind, n), routes)

    names = ["H3", "F4"] + (["H4", "E6", "E7", "E8"] if full else [])
    for name in names:
        row = fx["exceptional"][name]
        spec_fn = lambda name=name: exceptional(name, fx)  # noqa: E731
        published = reference_ratio(exceptional(name, fx), fx) if name in fx["exceptional"] else None
        if name == "E8":
            add("E8 ratio (census)", "published-table", published, None)
        elif name == "E7" and profile != "long":
            add("E7 ratio (census)", "published-table", published, None)
        else:
            add(f"{name} ratio = {published}", "published-table", published,
                lambda s=spec_fn: str(census_ratio(ReflectionGroup(s()), element_bound=3 * 10**6)))

        def orbit(s=spec_fn):
            spec = s()
            return str(len(weight_orbit(ReflectionGroup(spec), minimal_weight(spec.cartan), bound=spec.order)))
        add(f"{name} orbit size = {row['orbit_size']}", "published-table", row["orbit_size"], orbit)

        def regular(s=spec_fn):
            spec = s()
            return "regular" if default_regular_vector(spec, basic_invariants(spec), fx).certified else "singular"
        add(f"{name} v is regular", "published-table", "regular", regular)

        def count(s=spec_fn):
            spec = s()
            return str(len(enumerate_candidate_sets(spec.degrees, reference_ratio(spec, fx))))
        add(f"{name} candidate count = {row['choices']}", "published-table", row["choices"], count)

        def cert_all(s=spec_fn):
            spec = s()
            sets = enumerate_candidate_sets(spec.degrees, reference_ratio(spec, fx))
            invs = basic_invariants(spec)
            certs = certify_many(sets, invs, default_regular_vector(spec, invs, fx), spec.name)
            return f"{sum(c.certified for c in certs)}/{len(sets)}"
        add(f"{name}: {row['choices']}/{row['choices']} certified", "published-table",
            f"{row['choices']}/{row['choices']}", cert_all)

    top = 8 if full else 4
    for kind in ("A", "B", "D"):
        for n in range(2, top + 1):
            spec = classical(kind, n)
            add(f"{spec.name} classical T certified", "derived-oracle", "certified",
                lambda spec=spec: _certify_with(spec, classical_T(spec.kind, spec.param), fx))
    for n in range(2, 13 if full else 8):
        spec = dihedral(n)
        add(f"{spec.name} dihedral basis certified", "derived-oracle", "certified",
            lambda spec=spec: _certify_with(spec, dihedral_basis(), fx))

    for text in ("signxsign", "I2:3xsign", "A:2xA:2"):
        spec = parse_spec(text, fx)
        add(f"{spec.name} product basis certified", "derived-oracle", "certified",
            lambda spec=spec: _certify_with(spec, default_basis(spec, fx), fx))
        a, b = spec.factors

        def prod_ratio(spec=spec, a=a, b=b):
            return str(census_ratio(ReflectionGroup(spec)))
        add(f"{spec.name} ratio = product identity", "derived-oracle",
            product_ratio(reference_ratio(a, fx), a.degrees, reference_ratio(b, fx), b.degrees), prod_ratio)
    return plans


def _certify_with(spec: GroupSpec, cset: CandidateSet, fx) -> str:
    invs = basic_invariants(spec)
    return certify(cset, invs, default_regular_vector(spec, invs, fx), group=spec.name).verdict


def run_selfcheck(profile: str = "quick", fixtures: dict | None = None, select: str | None = None,
                  progress: Callable[[Check], None] | None = None) -> RunReport:
    fx = fixtures or load_fixtures()
    report = RunReport(profile)
    for plan in _plan_checks(profile, fx):
        if select and select not in plan.name:
            continue
        t0 = time.perf_counter()
        if plan.compute is None:
            check = Check(plan.name, "skipped", plan.expected, "not computed in this profile", plan.provenance)
        else:
            try:
                computed = plan.compute()
            except Exception as exc:  # a broken fixture should fail its check, not abort the run
                computed = f"error: {type(exc).__name__}: {exc}"
            status = "pass" if computed == plan.expected else "fail"
            check = Check(plan.name, status, plan.expected, computed, plan.provenance)
        check.seconds = round(time.perf_counter() - t0, 3)
        report.checks.append(check)
        if progress:
            progress(check)
    return report


def cmd_selfcheck(args) -> int:
    fx = _fixtures(args)

    def show(c: Check):
        if not args.json:
            line = f"{c.status.upper():7s} {c.name}  ({c.seconds:.2f}s)"
            if c.status == "fail":
                line += f"\n        expected {c.expected}, computed {c.computed}"
            print(line, flush=True)

    report = run_selfcheck(args.profile, fx, args.select, show)
    if args.json:
        print(json.dumps(report.to_json(timing=not args.no_timing), indent=1))
    else:
        r = report.to_json()
        print(f"{r['passed']} passed, {r['failed']} failed, {r['skipped']} skipped")
    return 1 if report.failed else 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="machine-readable output")
    common.add_argument("--fixtures", default=argparse.SUPPRESS, help="alternative fixture file")

    p = argparse.ArgumentParser(prog="hessbasis", description="Hessian bases of finite reflection groups")
    p.add_argument("--version", action="version", version=f"hessbasis {__version__}")
    p.add_argument("--json", action="store_true", default=False, help="machine-readable output")
    p.add_argument("--fixtures", default=None, help="alternative fixture file")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("group", parents=[common], help="build a group or report its order")
    g.add_argument("action", choices=["build", "order"])
    g.add_argument("--group")
    g.add_argument("--type", help="alias of --group")
    g.add_argument("--census", action="store_true", help="include the charpoly census")
    g.add_argument("--bound", type=int, default=DEFAULT_ELEMENT_BOUND)
    g.add_argument("--out")
    g.set_defaults(func=cmd_group)

    m = sub.add_parser("molien", parents=[common], help="Molien series or ratio polynomial")
    m.add_argument("--group")
    m.add_argument("--group-file", help="group JSON from `group build`")
    m.add_argument("--tensor", choices=["invariant", "sym2"], default="sym2")
    m.add_argument("--method", choices=["census", "cycle-index", "closed-form", "dihedral", "fixture"],
                   default="census")
    m.add_argument("--order", type=int, help="truncation order")
    m.add_argument("--ratio", action="store_true", help="print the ratio polynomial")
    m.set_defaults(func=cmd_molien)

    i = sub.add_parser("invariants", parents=[common], help="list basic invariants")
    i.add_argument("--group", required=True)
    i.set_defaults(func=cmd_invariants)

    r = sub.add_parser("regular-check", parents=[common], help="Jacobian test at a point")
    r.add_argument("--group", required=True)
    r.add_argument("--point", help="comma-separated rationals; default is the built-in point")
    r.set_defaults(func=cmd_regular)

    b = sub.add_parser("basis", parents=[common], help="enumerate or certify Hessian bases")
    b.add_argument("action", choices=["enumerate", "certify"])
    b.add_argument("--group")
    b.add_argument("--group-file")
    b.add_argument("--set", help='e.g. "r1,r1*r1,r2"; default is the canonical basis')
    b.add_argument("--point")
    b.add_argument("--certify-all", action="store_true")
    b.add_argument("--all-singles", dest="all_singles", action="store_true", default=None)
    b.add_argument("--no-all-singles", dest="all_singles", action="store_false")
    b.add_argument("--matrix", action="store_true", help="include the Hessian matrix in the certificate")
    b.add_argument("--out")
    b.set_defaults(func=cmd_basis)

    d = sub.add_parser("decompose", parents=[common], help="coefficients of a tensor in a Hessian basis")
    d.add_argument("--group")
    d.add_argument("--group-file")
    d.add_argument("--tensor", required=True, help="SymTensorPoly JSON file")
    d.add_argument("--basis", default="auto")
    d.set_defaults(func=cmd_decompose)

    s = sub.add_parser("selfcheck", parents=[common], help="reproduce the reference tables")
    s.add_argument("--profile", choices=["quick", "full", "long"], default="quick")
    s.add_argument("--select", help="only run checks whose name contains this text")
    s.add_argument("--no-timing", action="store_true", help="omit timings from JSON")
    s.set_defaults(func=cmd_selfcheck)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for name in ("group", "group_file", "point", "set"):
        if not hasattr(args, name):
            setattr(args, name, None)
    try:
        return args.func(args)
    except DOMAIN_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
