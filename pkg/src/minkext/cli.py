"""Command-line front end.

``minkext analyze|extension|decompose|summand|morphism|check INPUT [options]``

INPUT is a polyhedron in JSON: ``{"vertices": [["-1/2"], ["1/2"]], "tail_rays": []}``.
A human-readable summary goes to standard output; ``--out PATH`` writes the
full JSON report.  Exit codes: 0 success, 1 failed checks, 2 unreadable input,
3 violated invariant.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import warnings
from fractions import Fraction
from pathlib import Path

from . import __version__
from .etaspace import EtaSpace, NotInTP, eta_table
from .exactcore import fmt_rat, parse_rat, qvec
from .extension import (
    DEFAULT_CAP,
    DEFAULT_VERIFY,
    IncompleteDependencySet,
    TargetNotCocartesian,
    WellDefinednessFailure,
    eta_tilde_Z_relation,
    eta_Z_relation,
    extension_report,
    initial_morphism,
    minimal_dependents,
    sigma_dual_generators,
    upper_generators,
    verify_upper_pair,
)
from .minkowski import (
    NegativeParameterWarning,
    cayley_extension,
    cayley_t_basis,
    dim_V,
    enumerate_lattice_friendly,
    kodaira_spencer,
    psi_summand,
    smooth_in_codim_two,
    summand_cone,
    t1_dimension,
)
from .polyhedron import RationalPolyhedron, minkowski_sum_all
from .semigroup import ExtensionDiagram, NotPointed

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_INVARIANT = 0, 1, 2, 3


class ParseError(Exception):
    pass


class InvariantViolation(Exception):
    pass


def _load_json(path: str):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc


def load_polyhedron(path: str) -> RationalPolyhedron:
    data = _load_json(path)
    if isinstance(data, dict) and "input" in data and "vertices" not in data:
        data = data["input"]
    try:
        return RationalPolyhedron.from_json(data)
    except (ValueError, TypeError, KeyError, ZeroDivisionError) as exc:
        raise ParseError(f"invalid polyhedron: {exc}") from exc


def _seed() -> int | None:
    raw = os.environ.get("MINKEXT_SEED")
    return int(raw) if raw not in (None, "") else None


def _rats(xs) -> list:
    return [fmt_rat(x) for x in xs]


def _write(report: dict, out: str | None) -> None:
    if out:
        Path(out).write_text(json.dumps(report, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")


def _echo(P: RationalPolyhedron) -> dict:
    return P.to_json()


def _build(P: RationalPolyhedron) -> EtaSpace:
    try:
        return EtaSpace(P)
    except AssertionError as exc:
        raise InvariantViolation(str(exc)) from exc


# ---------------------------------------------------------------------------
# commands


def cmd_analyze(args) -> tuple[dict, str, int]:
    P = load_polyhedron(args.input)
    es = _build(P)
    Q = es.P
    T = es.T
    try:
        hb = [list(g) for g in sigma_dual_generators(es)]
    except NotPointed:
        hb = None
    report = {
        "input": _echo(P),
        "bounds": {"cgrid": args.cgrid},
        "normalization_shift": _rats(es.oracle.shift),
        "reference_vertex": es.oracle.reference,
        "vertices": [_rats(v) for v in Q.vertices],
        "edges": [[e.i, e.j] for e in Q.edges],
        "two_faces": [list(c.order) for c in Q.compact_two_faces],
        "edge_data": [
            {"edge": [d.i, d.j], "g": d.g, "short_forward": d.short_forward,
             "short_backward": d.short_backward, "lattice_disjoint": d.lattice_disjoint}
            for d in T.edge_data
        ],
        "sigma_dual_generators": hb,
        "eta_table": eta_table(es, args.cgrid),
        "eta_tilde_table": [
            {"c": list(c), "eta_tilde": es.format(es.eta_tilde(c)), "eta_tilde_Z": es.format(es.eta_tilde_Z(c))}
            for c in es.grid(args.cgrid)
        ],
        "dim_V": dim_V(Q),
        "smooth_in_codim_two": smooth_in_codim_two(Q),
        "tspace": T.to_json(),
        "tlattice": es.L.to_json(),
        "t1_dimension": t1_dimension(es),
    }
    lines = [
        f"vertices: {len(Q.vertices)}  compact edges: {T.r}  compact 2-faces: {len(Q.compact_two_faces)}",
        f"dim V(P) = {report['dim_V']}  dim T(P) = {T.dim}  rank T_Z(P) = {es.L.rank}",
    ]
    for row in report["eta_table"]:
        lines.append(f"  c={row['c']}: eta={row['eta']} eta_Z={row['eta_Z']} v={row['v']}")
    return report, "\n".join(lines), EXIT_OK


def cmd_extension(args) -> tuple[dict, str, int]:
    P = load_polyhedron(args.input)
    es = _build(P)
    deps = minimal_dependents(es, cap=args.cap, verify_degree=args.verify)
    try:
        up = upper_generators(es, deps)
    except IncompleteDependencySet as exc:
        report = {"input": _echo(P), "bounds": {"cap": args.cap, "verify": args.verify},
                  "dependencies": deps.to_json(), "error": str(exc)}
        return report, f"incomplete dependency search: {exc}", EXIT_FAIL
    report = {"input": _echo(P), "bounds": {"cap": args.cap, "verify": args.verify, "bound": args.bound}}
    report.update(extension_report(up, args.bound))
    gens = [es.format(f) for f in up.t_generators]
    ok = report["checks"]["generation"]["passed"] and report["checks"].get("upper_pair", {}).get("passed", True)
    lines = [f"T~ generators ({len(gens)}): " + ", ".join(gens) if gens else "T~ is trivial",
             f"rank T~ = {report['t_tilde_rank']}, ambient rank of S~ = {report['s_tilde_ambient_rank']}"]
    return report, "\n".join(lines), EXIT_OK if ok else EXIT_FAIL


def cmd_decompose(args) -> tuple[dict, str, int]:
    P = load_polyhedron(args.input)
    es = _build(P)
    cat = enumerate_lattice_friendly(es)
    report = {"input": _echo(P)}
    report.update(cat.to_json())
    report["summands"] = [[psi_summand(es, xi).polyhedron.to_json() for xi in dec] for dec in cat.decompositions]
    ok = all(r.lattice_friendly and r.verdicts_agree for r in cat.reports)
    lines = [f"|B| = {len(cat.B)}; {len(cat.nontrivial)} nontrivial lattice friendly decompositions"]
    for dec in cat.nontrivial:
        parts = [psi_summand(es, xi).polyhedron for xi in dec]
        lines.append("  " + " + ".join(str([_rats(v) for v in Q.vertices]) for Q in parts))
    return report, "\n".join(lines), EXIT_OK if ok else EXIT_FAIL


def cmd_summand(args) -> tuple[dict, str, int]:
    P = load_polyhedron(args.input)
    es = _build(P)
    try:
        xi = tuple(parse_rat(x) for x in args.xi.split(","))
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"invalid --xi: {exc}") from exc
    if len(xi) != es.T.n:
        raise ParseError(f"--xi needs {es.T.n} entries ({', '.join(es.T.coordinate_names())})")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", NegativeParameterWarning)
        try:
            res = psi_summand(es, xi, strict=args.strict)
        except NotInTP as exc:
            raise InvariantViolation(f"T(P) membership: {exc}") from exc
    report = {"input": _echo(P)}
    report.update(res.to_json())
    lines = [f"P_xi = conv{[_rats(v) for v in res.polyhedron.vertices]}",
             f"in T_+: {res.in_T_plus}  in T_Z: {res.in_T_Z}"]
    if caught:
        lines.append(f"warning: {caught[0].message}")
    return report, "\n".join(lines), EXIT_OK


def _target_from_json(es: EtaSpace, data: dict):
    if "xi_list" in data:
        xis = [tuple(parse_rat(x) for x in xi) for xi in data["xi_list"]]
        parts = [psi_summand(es, xi).polyhedron for xi in xis]
        return cayley_extension(es, parts), cayley_t_basis(es.P.dim, len(parts))
    if "summands" in data:
        parts = [RationalPolyhedron.from_json(q) for q in data["summands"]]
        return cayley_extension(es, parts), cayley_t_basis(es.P.dim, len(parts))
    return ExtensionDiagram.from_json(data), None


def cmd_morphism(args) -> tuple[dict, str, int]:
    P = load_polyhedron(args.input)
    es = _build(P)
    data = _load_json(args.target)
    try:
        target, basis = _target_from_json(es, data)
    except (ValueError, KeyError, TypeError) as exc:
        raise ParseError(f"invalid target: {exc}") from exc
    up = upper_generators(es, minimal_dependents(es))
    try:
        md = initial_morphism(up, target, bound=args.bound, t_basis=basis)
    except TargetNotCocartesian as exc:
        report = {"input": _echo(P), "error": f"TargetNotCocartesian: {exc}"}
        return report, report["error"], EXIT_FAIL
    except WellDefinednessFailure as exc:
        report = {"input": _echo(P), "error": f"WellDefinednessFailure: {exc}"}
        return report, report["error"], EXIT_FAIL
    report = {"input": _echo(P), "bounds": {"bound": args.bound},
              "t_tilde_generators": [es.format(f) for f in up.t_generators]}
    report.update(md.to_json())
    report["matrix"] = [[fmt_rat(Fraction(x)) if not isinstance(x, int) else x for x in row] for row in md.matrix]
    lines = ["generators: " + ", ".join(report["t_tilde_generators"])]
    lines += ["  " + " ".join(str(x) for x in row) for row in report["matrix"]]
    return report, "\n".join(lines), EXIT_OK


# -- check suites -------------------------------------------------------------


def _suite_eta(es: EtaSpace, bound: int) -> list[dict]:
    grid = es.grid(bound)
    bad_pi = [list(c) for c in grid if es.pi(es.eta_tilde_Z(c)) != es.oracle.eta_Z(c)]
    bad_dual = [list(c) for c in grid if not es.dual_lattice_member(es.eta_tilde_Z(c))]
    bad_iff = [list(c) for c in grid
               if es.dual_lattice_member(es.eta_tilde(c)) != (es.oracle.eta(c).denominator == 1)]
    bad_ind = []
    for i, c1 in enumerate(grid):
        for c2 in grid[i:]:
            if (eta_Z_relation(es, [c1, c2]) == 0) != eta_tilde_Z_relation(es, [c1, c2]).is_zero():
                bad_ind.append([list(c1), list(c2)])
    return [
        {"name": "pi(eta_tilde_Z(c)) = eta_Z(c)", "passed": not bad_pi, "witness": bad_pi[:1]},
        {"name": "eta_tilde_Z(c) in dual lattice", "passed": not bad_dual, "witness": bad_dual[:1]},
        {"name": "eta_tilde(c) in dual lattice iff eta(c) integral", "passed": not bad_iff, "witness": bad_iff[:1]},
        {"name": "independence: eta_Z relation = 0 iff lifted relation = 0", "passed": not bad_ind, "witness": bad_ind[:1]},
    ]


def _suite_paths(es: EtaSpace, bound: int) -> list[dict]:
    P = es.P
    bad = []
    for c in es.grid(bound):
        base = es.eta_tilde_Z(c)
        for v in P.minimizers(c):
            if es.eta_tilde_Z(c, vertex=v) != base:
                bad.append(list(c))
        # an alternative path through a different neighbour, when one exists
        v = P.minimizers(c)[0]
        ref = es.oracle.reference
        for nb in P.neighbors[ref]:
            try:
                alt = [ref] + es.path(nb, v) if nb != v else [ref, v]
            except ValueError:
                continue
            if len(set(alt)) == len(alt) and es.eta_tilde(c, path=alt) != es.eta_tilde(c):
                bad.append(list(c))
    return [{"name": "eta_tilde independent of path and of v(c)", "passed": not bad, "witness": bad[:1]}]


def _suite_tspace(es: EtaSpace, bound: int) -> list[dict]:
    T = es.T
    one = T.oneone
    ortho = all(sum(a * b for a, b in zip(p, bvec)) == 0 for p in T.perp for bvec in T.basis)
    return [
        {"name": "oneone in T_+(P)", "passed": T.in_T_plus(one), "witness": None},
        {"name": "oneone in T_Z(P)", "passed": es.L.contains(one), "witness": None},
        {"name": "T(P) basis orthogonal to constraints", "passed": ortho, "witness": None},
    ]


def _suite_extension(es: EtaSpace, bound: int) -> list[dict]:
    if bound <= 0:
        return [{"name": "upper pair checks", "passed": True, "witness": "vacuous at bound 0"}]
    deps = minimal_dependents(es)
    if not deps.complete:
        return [{"name": "dependency certificate", "passed": False, "witness": list(deps.offending)}]
    up = upper_generators(es, deps)
    try:
        rep = verify_upper_pair(up, min(bound, 3))
    except NotPointed:
        return [{"name": "upper pair checks", "passed": True, "witness": "skipped: σ^∨ not pointed"}]
    return [{"name": f"upper pair: {k}", "passed": rep[k]["passed"], "witness": None}
            for k in ("boundary", "kernel", "C1", "s_in_T")]


def _suite_decompose(es: EtaSpace, bound: int, rng: random.Random | None) -> list[dict]:
    if bound <= 0:
        return [{"name": "decomposition checks", "passed": True, "witness": "vacuous at bound 0"}]
    cat = enumerate_lattice_friendly(es)
    agree = all(r.verdicts_agree and r.lattice_friendly for r in cat.reports)
    B = list(cat.B)
    if rng is not None:
        rng.shuffle(B)
    bad_add = []
    for i, a in enumerate(B):
        for b in B[i:]:
            s = tuple(x + y for x, y in zip(a, b))
            lhs = minkowski_sum_all([psi_summand(es, a).polyhedron, psi_summand(es, b).polyhedron])
            if lhs != psi_summand(es, s).polyhedron:
                bad_add.append([_rats(a), _rats(b)])
    bad_inv = []
    for xi in B:
        Q = psi_summand(es, xi).polyhedron
        if kodaira_spencer(es, Q).as_xi() != xi:
            bad_inv.append(_rats(xi))
    return [
        {"name": "lattice friendly verdicts agree", "passed": agree, "witness": None},
        {"name": "psi additive on B", "passed": not bad_add, "witness": bad_add[:1]},
        {"name": "kappa inverts psi on B", "passed": not bad_inv, "witness": bad_inv[:1]},
    ]


SUITES = ("eta", "paths", "tspace", "extension", "decompose")


def cmd_check(args) -> tuple[dict, str, int]:
    P = load_polyhedron(args.input)
    es = _build(P)
    seed = _seed()
    rng = random.Random(seed) if seed is not None else None
    suites = SUITES if args.suite == "all" else tuple(s.strip() for s in args.suite.split(","))
    unknown = [s for s in suites if s not in SUITES]
    if unknown:
        raise ParseError(f"unknown suite(s): {', '.join(unknown)}")
    ledger = []
    for s in suites:
        if s == "eta":
            items = _suite_eta(es, args.bound)
        elif s == "paths":
            items = _suite_paths(es, args.bound)
        elif s == "tspace":
            items = _suite_tspace(es, args.bound)
        elif s == "extension":
            items = _suite_extension(es, args.bound)
        else:
            items = _suite_decompose(es, args.bound, rng)
        for it in items:
            ledger.append(dict(suite=s, **it))
    ok = all(it["passed"] for it in ledger)
    report = {"input": _echo(P), "bounds": {"bound": args.bound}, "seed": seed, "ledger": ledger, "passed": ok}
    lines = [f"[{'PASS' if it['passed'] else 'FAIL'}] {it['suite']}: {it['name']}" for it in ledger]
    return report, "\n".join(lines), EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="minkext", description="Minkowski summands, η-tables and universal extensions of rational polyhedra.")
    p.add_argument("--version", action="version", version=f"minkext {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("input", help="polyhedron JSON file")
        sp.add_argument("--out", help="write the JSON report here")

    a = sub.add_parser("analyze", help="η tables, edge data, T(P) and T_Z(P)")
    common(a)
    a.add_argument("--cgrid", type=int, default=3)
    a.set_defaults(func=cmd_analyze)

    e = sub.add_parser("extension", help="generators of the universal extension")
    common(e)
    e.add_argument("--cap", type=int, default=DEFAULT_CAP)
    e.add_argument("--verify", type=int, default=DEFAULT_VERIFY)
    e.add_argument("--bound", type=int, default=3)
    e.set_defaults(func=cmd_extension)

    d = sub.add_parser("decompose", help="lattice friendly decompositions")
    common(d)
    d.set_defaults(func=cmd_decompose)

    s = sub.add_parser("summand", help="the summand P_xi")
    common(s)
    s.add_argument("--xi", required=True, help="comma separated (t..., s...) coordinates")
    s.add_argument("--strict", action="store_true", help="reject parameters outside T_+(P)")
    s.set_defaults(func=cmd_summand)

    m = sub.add_parser("morphism", help="the forced morphism into a target extension")
    common(m)
    m.add_argument("--target", required=True, help="diagram JSON, or {\"xi_list\": ...} / {\"summands\": ...}")
    m.add_argument("--bound", type=int, default=4)
    m.set_defaults(func=cmd_morphism)

    c = sub.add_parser("check", help="run invariant suites")
    common(c)
    c.add_argument("--suite", default="all")
    c.add_argument("--bound", type=int, default=6)
    c.set_defaults(func=cmd_check)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report, summary, code = args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except InvariantViolation as exc:
        print(f"invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (NotInTP, AssertionError) as exc:
        print(f"invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    _write(report, args.out)
    print(summary)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
