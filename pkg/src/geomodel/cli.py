"""Command-line front end.

Verbs map one-to-one onto library operations:

  parse        read a rule file, report counts, optionally re-render
  qc-check     quasi-chainedness of every rule and constraint
  chase        materialize a model (JSON dump) or report unsatisfiability
  embed        chase + one-hot geometric model (optionally compacted)
  verify       satisfied-atom set of a geometric dump vs the chase model
  check-rules  exact geometric satisfaction of every rule and constraint
  probe        randomized extension probing
  helly        dimension lower-bound demonstration
  limits       embedding-expressivity decisions (bilinear, composition,
               translation demos)

Exit codes: 0 success / satisfied; 1 a violation or counterexample was found
(the expected outcome for negative results); 2 usage or input error;
3 resource or cap exceeded.  Seeds are always echoed; numeric output is
exact rational unless --float is given.
"""

from __future__ import annotations

import argparse
import json
import sys

from ._rat import rat, rat_str
from .chase import chase, dumps_model, is_model, models_equal_up_to_nulls
from .geometry import (
    compact_one_hot_model,
    dumps_geometry,
    loads_geometry,
    one_hot_model,
    synthesize_witnesses,
)
from .polytope import Point, Polytope, point
from .rule_check import (
    CheckOptions,
    check_ontology_geometric,
    dumps_probe_report,
    helly_break,
    helly_lower_bound_kb,
    probe_extensions,
)
from .rules import ParseError, RuleError, is_weakly_acyclic, parse_program, quasi_chained_offender, render_program
from . import embedding
from .geometry import GeometricInterpretation
from .rules import const

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3


def _load_kb(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_program(fh.read())


def _write_output(text: str, out_path: str | None):
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fmt(q, as_float: bool) -> str:
    return repr(float(q)) if as_float else rat_str(q)


def _point_str(p: Point, as_float: bool) -> str:
    return "(" + ", ".join(_fmt(c, as_float) for c in p.coords) + ")"


def cmd_parse(args) -> int:
    kb = _load_kb(args.file)
    datalog = sum(1 for r in kb.ontology.rules if r.is_datalog)
    info = {
        "rules": len(kb.ontology.rules),
        "datalog_rules": datalog,
        "existential_rules": len(kb.ontology.rules) - datalog,
        "constraints": len(kb.ontology.constraints),
        "facts": len(kb.database),
        "weakly_acyclic": is_weakly_acyclic(kb.ontology),
    }
    if args.json:
        print(json.dumps(info, indent=2, sort_keys=True))
    else:
        for k, v in info.items():
            print(f"{k}: {v}")
        if args.render:
            sys.stdout.write(render_program(kb))
    return EXIT_OK


def cmd_qc_check(args) -> int:
    kb = _load_kb(args.file)
    offender = quasi_chained_offender(kb.ontology)
    if offender is None:
        print("quasi-chained: true")
        return EXIT_OK
    print(f"quasi-chained: false (offending statement: {offender})")
    return EXIT_VIOLATION


def cmd_chase(args) -> int:
    kb = _load_kb(args.file)
    result = chase(kb, max_steps=args.max_steps)
    if result.status == "unsatisfiable":
        print(f"unsatisfiable: {result.violation}")
        return EXIT_VIOLATION
    if result.status == "resource_exceeded":
        print(f"resource exceeded after {result.steps} steps")
        return EXIT_RESOURCE
    _write_output(dumps_model(result.atoms), args.output)
    if args.output:
        print(f"model with {len(result.atoms)} atoms written to {args.output}")
    return EXIT_OK


def cmd_embed(args) -> int:
    kb = _load_kb(args.file)
    result = chase(kb, max_steps=args.max_steps)
    if result.status == "unsatisfiable":
        print(f"unsatisfiable: {result.violation}")
        return EXIT_VIOLATION
    if result.status == "resource_exceeded":
        print(f"resource exceeded after {result.steps} steps")
        return EXIT_RESOURCE
    interp = one_hot_model(result.atoms)
    if args.compact:
        interp = compact_one_hot_model(interp)
    _write_output(dumps_geometry(interp), args.output)
    if args.output:
        print(f"geometric model (m={interp.m}) written to {args.output}")
    return EXIT_OK


def cmd_verify(args) -> int:
    interp = loads_geometry(open(args.model, encoding="utf-8").read())
    kb = _load_kb(args.file)
    result = chase(kb, max_steps=args.max_steps)
    if not result.is_model:
        print(f"chase did not produce a model: {result.status}")
        return EXIT_RESOURCE if result.status == "resource_exceeded" else EXIT_VIOLATION
    sat = interp.satisfied_atoms()
    exact = sat == result.atoms
    renamed = exact or models_equal_up_to_nulls(sat, result.atoms)
    print(f"satisfied-atoms == model: {str(exact).lower()}"
          + ("" if exact else f" (up to null renaming: {str(renamed).lower()})"))
    if exact or renamed:
        ok, why = is_model(sat, kb)
        print(f"satisfied-atom set is a model: {str(ok).lower()}" + (f" ({why})" if why else ""))
        return EXIT_OK if ok else EXIT_VIOLATION
    return EXIT_VIOLATION


def cmd_check_rules(args) -> int:
    interp = loads_geometry(open(args.model, encoding="utf-8").read())
    kb = _load_kb(args.file)
    options = CheckOptions(
        joint_dim_cap=args.joint_dim_cap,
        hrep_dim_cap=args.hrep_dim_cap,
        hrep_vertex_cap=args.hrep_vertex_cap,
    )
    verdicts = check_ontology_geometric(interp, kb, options)
    worst = EXIT_OK
    for stmt, verdict in verdicts:
        line = f"{verdict.status}: {stmt}"
        if verdict.status == "violated":
            line += f"  [witness: {verdict.witness_str()}]"
            worst = max(worst, EXIT_VIOLATION)
        elif verdict.status == "inconclusive":
            line += f"  [{verdict.reason}]"
            worst = max(worst, EXIT_RESOURCE)
        print(line)
    return worst


def cmd_probe(args) -> int:
    interp = loads_geometry(open(args.model, encoding="utf-8").read())
    kb = _load_kb(args.file)
    report = probe_extensions(
        interp, kb, n_points=args.points, trials=args.trials, seed=args.seed
    )
    print(f"seed: {report.seed}")
    print(f"trials: {report.trials} x {report.n_points} points")
    print(f"violations: {len(report.violations)}")
    for rec in report.violations:
        pts = ", ".join(f"{n} -> {_point_str(p, args.float)}" for n, p in rec.points)
        print(f"  trial {rec.index}: {rec.violation}  [{pts}]")
    if args.output:
        _write_output(dumps_probe_report(report), args.output)
        print(f"report written to {args.output}")
    return EXIT_OK if report.all_satisfiable else EXIT_VIOLATION


def _helly_demo_interp(n: int, dim: int) -> GeometricInterpretation:
    """Moment-curve points for the n constants; each region is the hull of
    the other constants' points, so the whole database is satisfied."""
    pts = {}
    for j in range(1, n + 1):
        coords = tuple(rat(j) ** (k + 1) for k in range(dim))
        pts[const(f"a{j}")] = Point(coords)
    regions = {}
    arities = {}
    for i in range(1, n + 1):
        rel = f"A{i}"
        arities[rel] = 1
        members = [p for t, p in pts.items() if t.name != f"a{i}"]
        regions[rel] = Polytope.hull(members, dim)
    return GeometricInterpretation(dim, pts, regions, arities)


def cmd_helly(args) -> int:
    n = args.n
    kb = helly_lower_bound_kb(n)
    dim = args.dim if args.dim is not None else n - 2
    if dim >= n - 1:
        interp = one_hot_model(chase(kb).atoms)
        for _ in range(interp.m - dim):
            interp = compact_one_hot_model(interp)
        verdicts = check_ontology_geometric(interp, kb)
        ok = all(v.is_satisfied for _, v in verdicts)
        print(f"n={n} dim={interp.m}: geometric model "
              + ("satisfies every statement" if ok else "FAILS a statement"))
        return EXIT_OK if ok else EXIT_VIOLATION
    interp = _helly_demo_interp(n, dim)
    result = helly_break(interp, kb)
    print(f"n={n} dim={dim}")
    if not result.found:
        print("no shared point found (regions do not all intersect)")
        return EXIT_OK
    print(f"shared point in every region: {_point_str(result.point, args.float)}")
    print(f"extension by fresh constant {result.fresh_constant}: "
          f"{result.extension_chase.status}")
    if result.breaks_model:
        print(f"certificate: {result.extension_chase.violation}")
        return EXIT_VIOLATION
    return EXIT_OK


def _parse_rational_list(text: str):
    return [rat(x) for x in json.loads(text)]


def _parse_rational_matrix(text: str):
    return [[rat(x) for x in row] for row in json.loads(text)]


def cmd_limits_bilinear(args) -> int:
    m_r = _parse_rational_matrix(args.mr)
    m_s = _parse_rational_matrix(args.ms)
    decision = embedding.bilinear_subsumption(m_r, rat(args.lr), m_s, rat(args.ls))
    if decision.satisfied:
        alpha = "none" if decision.alpha is None else _fmt(decision.alpha, args.float)
        print(f"satisfied (alpha = {alpha}): {decision.reason}")
        return EXIT_OK
    e, f = decision.counterexample
    print(f"counterexample: {decision.reason}")
    print(f"  e = [{', '.join(_fmt(x, args.float) for x in e)}]")
    print(f"  f = [{', '.join(_fmt(x, args.float) for x in f)}]")
    return EXIT_VIOLATION


def cmd_limits_composition(args) -> int:
    vecs = [_parse_rational_list(getattr(args, name)) for name in ("r", "ri", "s", "si", "t", "ti")]
    lams = [rat(getattr(args, name)) for name in ("lr", "lri", "ls", "lsi", "lt", "lti")]
    decision = embedding.simple_composition_counterexample(*vecs, *lams)
    if decision.kind == "counterexample":
        print(f"counterexample (magnitude K = {_fmt(decision.magnitude, args.float)}):")
        for name in sorted(decision.entities):
            vec = decision.entities[name]
            print(f"  {name} = [{', '.join(_fmt(x, args.float) for x in vec)}]")
        return EXIT_VIOLATION
    print(f"trivially satisfied: {decision.kind}")
    return EXIT_OK


def cmd_limits_translation(args) -> int:
    dim = None
    polys = []
    for text in (args.ch, args.cw, args.cm):
        verts = [[rat(x) for x in row] for row in json.loads(text)]
        if dim is None:
            dim = len(verts[0]) if verts else 1
        polys.append(Polytope(dim, [Point(tuple(v)) for v in verts]))
    c_h, c_w, c_m = polys
    try:
        steps = embedding.translation_containment_chain(c_h, c_w, c_m)
    except embedding.PremiseViolatedError as exc:
        print(f"premise violated: {exc}")
        return EXIT_VIOLATION
    print(f"every wife-region vertex lies in the husband region ({len(steps)} checked)")
    for s in steps:
        print(f"  q={_point_str(s.q, args.float)} = p={_point_str(s.p, args.float)}"
              f" + r={_point_str(s.r, args.float)}; q+r={_point_str(s.q_plus_r, args.float)}")
    return EXIT_OK


def cmd_limits_properties(args) -> int:
    triples = {tuple(t) for t in json.loads(args.graph)}
    subset = tuple(args.subset.split(","))
    violations = embedding.translation_graph_properties(triples, subset)
    if not violations:
        print("no violations: the subset passes the translation-model conditions")
        return EXIT_OK
    for v in violations:
        print(f"{v.relation} over {{{', '.join(v.subset)}}}: {v.property_name} ({v.detail})")
    return EXIT_VIOLATION


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="geomodel",
        description="Convex geometric models of existential-rule knowledge bases",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse a rule file and report its shape")
    p.add_argument("file")
    p.add_argument("--json", action="store_true")
    p.add_argument("--render", action="store_true", help="echo the canonical text form")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("qc-check", help="check quasi-chainedness")
    p.add_argument("file")
    p.set_defaults(func=cmd_qc_check)

    p = sub.add_parser("chase", help="materialize a model")
    p.add_argument("file")
    p.add_argument("-o", "--output")
    p.add_argument("--max-steps", type=int, default=100000)
    p.set_defaults(func=cmd_chase)

    p = sub.add_parser("embed", help="chase and build the one-hot geometric model")
    p.add_argument("file")
    p.add_argument("-o", "--output")
    p.add_argument("--max-steps", type=int, default=100000)
    p.add_argument("--compact", action="store_true", help="drop the redundant coordinate")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("verify", help="compare a geometric dump against the chase model")
    p.add_argument("model")
    p.add_argument("file")
    p.add_argument("--max-steps", type=int, default=100000)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("check-rules", help="exact geometric rule checking")
    p.add_argument("model")
    p.add_argument("file")
    p.add_argument("--joint-dim-cap", type=int, default=12)
    p.add_argument("--hrep-dim-cap", type=int, default=10)
    p.add_argument("--hrep-vertex-cap", type=int, default=64)
    p.set_defaults(func=cmd_check_rules)

    p = sub.add_parser("probe", help="randomized extension probing")
    p.add_argument("model")
    p.add_argument("file")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--points", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--float", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("helly", help="dimension lower-bound demonstration")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--float", action="store_true")
    p.set_defaults(func=cmd_helly)

    lim = sub.add_parser("limits", help="embedding expressivity analyses")
    lsub = lim.add_subparsers(dest="limits_command", required=True)

    p = lsub.add_parser("bilinear", help="decide a bilinear subsumption")
    p.add_argument("--mr", required=True, help="body matrix as JSON rows")
    p.add_argument("--lr", required=True, help="body threshold")
    p.add_argument("--ms", required=True, help="head matrix as JSON rows")
    p.add_argument("--ls", required=True, help="head threshold")
    p.add_argument("--float", action="store_true")
    p.set_defaults(func=cmd_limits_bilinear)

    p = lsub.add_parser("composition", help="head/tail split composition counterexample")
    for name in ("r", "ri", "s", "si", "t", "ti"):
        p.add_argument(f"--{name}", required=True, help=f"vector {name} as JSON list")
    for name in ("lr", "lri", "ls", "lsi", "lt", "lti"):
        p.add_argument(f"--{name}", required=True, help=f"threshold {name}")
    p.add_argument("--float", action="store_true")
    p.set_defaults(func=cmd_limits_composition)

    p = lsub.add_parser("translation-demo", help="betweenness containment chain")
    p.add_argument("--ch", required=True, help="husband region vertices as JSON rows")
    p.add_argument("--cw", required=True, help="wife region vertices as JSON rows")
    p.add_argument("--cm", required=True, help="translation region vertices as JSON rows")
    p.add_argument("--float", action="store_true")
    p.set_defaults(func=cmd_limits_translation)

    p = lsub.add_parser("translation-props", help="necessary closure properties on a subset")
    p.add_argument("--graph", required=True, help="triples as JSON list of [h, r, t]")
    p.add_argument("--subset", required=True, help="comma-separated entity names")
    p.set_defaults(func=cmd_limits_properties)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (ParseError, RuleError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
