"""Deciding rule satisfaction for convex geometric interpretations.

A rule body over variables X1..Xv carves a polytope out of R^{v*m}: each body
atom contributes the facet constraints of its relation's region, applied to
the coordinate blocks of its argument variables (constants substitute their
points into the constraints, repeated variables merge blocks).  The body
polytope is the exact satisfaction set of the body, computed by double
description over the stacked constraints.

Since head membership is a convex condition, a rule holds universally over
real points iff it holds at every vertex of the body polytope:

  * negative constraint: satisfied iff the body polytope is empty;
  * datalog head: every body vertex, rearranged into the head's argument
    blocks, must lie in the head relation's region;
  * existential head: the head's satisfaction polytope is projected onto its
    non-existential blocks (vertex projection is exact), and every body
    vertex must land in that projection.

A Violated verdict returns the offending vertex split per variable; witnesses
re-validate by independent membership calls.

`probe_extensions` is the randomized counterpart: sample fresh points, extend
the interpretation, synthesize existential witnesses, and chase the original
ontology on the union of the database with the satisfied atoms.

The module also packages the dimension lower-bound family: a knowledge base
over n constants and n unary relations whose convex geometric models need at
least n-1 dimensions.  In lower dimensions, Helly's theorem makes every
claimed model break: the n regions share a point, and extending by it is
unsatisfiable.  `helly_break` finds such a point by exact LP.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

from ._rat import ONE, ZERO, rat, rat_str
from .chase import ChaseResult, chase
from .geometry import (
    GeometricInterpretation,
    NotQuasiChainedError,
    RoundsExceededError,
    extend_with_points,
    object_sort_key,
    synthesize_witnesses,
)
from .lp import find_nonnegative_solution
from .polytope import CapExceededError, Point, Polytope, concat_points, vertex_enumeration
from .rules import (
    Atom,
    ExistentialRule,
    KnowledgeBase,
    NegativeConstraint,
    Term,
    atom,
    const,
    knowledge_base,
    quasi_chained_offender,
    var,
    vars_of,
)


class MinimumNError(ValueError):
    """The lower-bound family needs at least two relations."""


class PreconditionViolatedError(RuntimeError):
    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


@dataclass(frozen=True)
class CheckOptions:
    """Caps for the exact geometric checks.

    `joint_dim_cap` bounds the joint variable space v*m a body or head
    polytope may live in; `hrep_dim_cap` / `hrep_vertex_cap` guard facet
    enumeration of individual regions.  Above the caps the checker returns
    an inconclusive verdict instead of grinding.
    """

    joint_dim_cap: int = 12
    hrep_dim_cap: int = 10
    hrep_vertex_cap: int = 64


DEFAULT_OPTIONS = CheckOptions()

SATISFIED = "satisfied"
VIOLATED = "violated"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class RuleVerdict:
    status: str
    witness: dict | None = None  # variable -> Point
    reason: str | None = None

    @property
    def is_satisfied(self) -> bool:
        return self.status == SATISFIED

    def witness_str(self) -> str:
        if not self.witness:
            return ""
        items = sorted(self.witness.items(), key=lambda kv: kv[0].name)
        return ", ".join(f"{v.name} -> {p}" for v, p in items)


def _ordered_vars(atoms) -> list:
    seen: dict[Term, None] = {}
    for a in atoms:
        for t in a.args:
            if t.is_var and t not in seen:
                seen[t] = None
    return list(seen.keys())


def atoms_polytope(
    interp: GeometricInterpretation,
    atoms,
    var_order=None,
    options: CheckOptions = DEFAULT_OPTIONS,
) -> tuple[Polytope, list]:
    """Exact satisfaction set of an atom conjunction over its variables.

    Returns (polytope over R^{v*m}, variable order defining the blocks).
    Empty regions or ground atoms failing membership give the empty polytope
    immediately.  Raises CapExceededError beyond the configured caps.
    """
    atoms = list(atoms)
    if var_order is None:
        var_order = _ordered_vars(atoms)
    else:
        var_order = list(var_order)
        missing = set(_ordered_vars(atoms)) - set(var_order)
        if missing:
            raise ValueError(f"variable order misses {sorted(t.name for t in missing)}")
    m = interp.m
    joint_dim = len(var_order) * m
    if joint_dim > options.joint_dim_cap:
        raise CapExceededError(f"joint space dim {joint_dim} exceeds cap {options.joint_dim_cap}")
    block = {v: i * m for i, v in enumerate(var_order)}

    equalities: list = []
    inequalities: list = []
    for a in atoms:
        region = interp.region_of(a.relation, a.arity)
        if region.is_empty:
            return Polytope.empty(joint_dim), var_order
        hrep = region.hrep(options.hrep_dim_cap, options.hrep_vertex_cap)
        for coeffs, rhs, is_eq in [(c, r, True) for c, r in hrep.equalities] + [
            (c, r, False) for c, r in hrep.inequalities
        ]:
            joint = [ZERO] * joint_dim
            shift = rhs
            ground = True
            for pos, t in enumerate(a.args):
                seg = coeffs[pos * m : (pos + 1) * m]
                if t.is_var:
                    ground = False
                    base = block[t]
                    for j, c in enumerate(seg):
                        if c != 0:
                            joint[base + j] += c
                else:
                    pt = interp.point_of(t)
                    for c, x in zip(seg, pt.coords):
                        if c != 0:
                            shift -= c * x
            if ground or all(c == 0 for c in joint):
                holds = shift == 0 if is_eq else shift >= 0
                if not holds:
                    return Polytope.empty(joint_dim), var_order
                continue
            if is_eq:
                equalities.append((tuple(joint), shift))
            else:
                inequalities.append((tuple(joint), shift))
    verts = vertex_enumeration(equalities, inequalities, joint_dim)
    return Polytope(joint_dim, verts), var_order


def body_polytope(
    interp: GeometricInterpretation,
    rule,
    options: CheckOptions = DEFAULT_OPTIONS,
) -> tuple[Polytope, list]:
    """Satisfaction set of a rule or constraint body (see atoms_polytope)."""
    return atoms_polytope(interp, rule.body, None, options)


def _split_vertex(vertex: Point, var_order, m: int) -> dict:
    return {
        v: Point(vertex.coords[i * m : (i + 1) * m]) for i, v in enumerate(var_order)
    }


def _head_point(interp, head_atom: Atom, assignment) -> Point:
    pts = []
    for t in head_atom.args:
        pts.append(assignment[t] if t.is_var else interp.point_of(t))
    return concat_points(pts)


def check_rule_geometric(
    interp: GeometricInterpretation,
    rule,
    options: CheckOptions = DEFAULT_OPTIONS,
) -> RuleVerdict:
    """Exact universal satisfaction check for one rule or constraint.

    Vertex checking suffices: the body polytope is convex and head
    membership is a convex constraint, so satisfaction at the vertices
    extends to every body point.  Returns Inconclusive when the instance
    exceeds the exact-geometry caps.
    """
    try:
        body, var_order = body_polytope(interp, rule, options)
    except CapExceededError as exc:
        return RuleVerdict(INCONCLUSIVE, reason=str(exc))
    m = interp.m
    if body.is_empty:
        return RuleVerdict(SATISFIED, reason="body unsatisfiable")
    if isinstance(rule, NegativeConstraint):
        witness = _split_vertex(body.vertices[0], var_order, m)
        return RuleVerdict(VIOLATED, witness=witness, reason="constraint body nonempty")

    if not rule.evars:
        for vertex in body.vertices:
            assignment = _split_vertex(vertex, var_order, m)
            for h in rule.head:
                region = interp.region_of(h.relation, h.arity)
                if region.is_empty or not region.contains(_head_point(interp, h, assignment)):
                    return RuleVerdict(
                        VIOLATED, witness=assignment, reason=f"head atom {h} missed"
                    )
        return RuleVerdict(SATISFIED)

    # existential head: project its satisfaction polytope onto frontier blocks
    head_vars = _ordered_vars(rule.head)
    frontier = [v for v in head_vars if v not in rule.evars]
    ordered = frontier + [v for v in head_vars if v in rule.evars]
    try:
        head_poly, _ = atoms_polytope(interp, rule.head, ordered, options)
    except CapExceededError as exc:
        return RuleVerdict(INCONCLUSIVE, reason=str(exc))
    if head_poly.is_empty:
        witness = _split_vertex(body.vertices[0], var_order, m)
        return RuleVerdict(VIOLATED, witness=witness, reason="head satisfaction set empty")
    proj_dim = len(frontier) * m
    projected = Polytope(
        proj_dim, [Point(v.coords[:proj_dim]) for v in head_poly.vertices]
    )
    for vertex in body.vertices:
        assignment = _split_vertex(vertex, var_order, m)
        probe = concat_points([assignment[v] for v in frontier]) if frontier else Point(())
        if not projected.contains(probe):
            return RuleVerdict(
                VIOLATED, witness=assignment, reason="no existential witness point"
            )
    return RuleVerdict(SATISFIED)


def verify_violation(interp: GeometricInterpretation, rule, verdict: RuleVerdict) -> bool:
    """Re-validate a Violated verdict with independent membership calls."""
    if verdict.status != VIOLATED or not verdict.witness:
        return False
    assignment = verdict.witness
    for a in rule.body:
        region = interp.region_of(a.relation, a.arity)
        if not region.contains(_head_point(interp, a, assignment)):
            return False
    if isinstance(rule, NegativeConstraint):
        return True
    if not rule.evars:
        for h in rule.head:
            region = interp.region_of(h.relation, h.arity)
            if region.is_empty or not region.contains(_head_point(interp, h, assignment)):
                return True
        return False
    # existential: the projection test is re-run from scratch
    head_vars = _ordered_vars(rule.head)
    frontier = [v for v in head_vars if v not in rule.evars]
    ordered = frontier + [v for v in head_vars if v in rule.evars]
    head_poly, _ = atoms_polytope(interp, rule.head, ordered)
    if head_poly.is_empty:
        return True
    proj_dim = len(frontier) * interp.m
    projected = Polytope(proj_dim, [Point(v.coords[:proj_dim]) for v in head_poly.vertices])
    probe = concat_points([assignment[v] for v in frontier]) if frontier else Point(())
    return not projected.contains(probe)


def check_ontology_geometric(
    interp: GeometricInterpretation,
    kb: KnowledgeBase,
    options: CheckOptions = DEFAULT_OPTIONS,
) -> list:
    """Verdicts for every rule and constraint, in declaration order."""
    out = []
    for r in kb.ontology.rules:
        out.append((r, check_rule_geometric(interp, r, options)))
    for c in kb.ontology.constraints:
        out.append((c, check_rule_geometric(interp, c, options)))
    return out


# ---------------------------------------------------------------------------
# randomized extension probing

@dataclass(frozen=True)
class ProbeTrial:
    index: int
    points: tuple  # (constant name, Point) pairs
    satisfiable: bool
    synthesized_nulls: int
    violation: str | None
    note: str | None = None


@dataclass(frozen=True)
class ProbeReport:
    seed: int
    trials: int
    n_points: int
    records: tuple

    @property
    def violations(self) -> tuple:
        return tuple(r for r in self.records if not r.satisfiable)

    @property
    def all_satisfiable(self) -> bool:
        return all(r.satisfiable for r in self.records)

    def to_json_dict(self) -> dict:
        return {
            "seed": self.seed,
            "trials": self.trials,
            "n_points": self.n_points,
            "records": [
                {
                    "index": r.index,
                    "points": {
                        name: [rat_str(c) for c in p.coords] for name, p in r.points
                    },
                    "satisfiable": r.satisfiable,
                    "synthesized_nulls": r.synthesized_nulls,
                    "violation": r.violation,
                    "note": r.note,
                }
                for r in self.records
            ],
        }


def probe_report_from_json_dict(doc: dict) -> ProbeReport:
    records = []
    for rec in doc["records"]:
        pts = tuple(
            sorted(
                (name, Point(tuple(rat(c) for c in coords)))
                for name, coords in rec["points"].items()
            )
        )
        records.append(
            ProbeTrial(
                rec["index"],
                pts,
                rec["satisfiable"],
                rec["synthesized_nulls"],
                rec["violation"],
                rec.get("note"),
            )
        )
    return ProbeReport(doc["seed"], doc["trials"], doc["n_points"], tuple(records))


def dumps_probe_report(report: ProbeReport) -> str:
    return json.dumps(report.to_json_dict(), indent=2, sort_keys=True) + "\n"


def loads_probe_report(text: str) -> ProbeReport:
    return probe_report_from_json_dict(json.loads(text))


def _sample_point(rng: random.Random, interp: GeometricInterpretation) -> Point:
    """One fresh point: uniform in the entity bounding box, or a convex
    combination of entity points (half equal weights, half random weights).

    The combination sampler hits exact midpoints, which is what exposes
    interpretations that only break at averaged entity positions.
    """
    objs = interp.objects()
    pts = [interp.point_of(o) for o in objs]
    use_combo = bool(pts) and rng.random() < rat(1, 2)
    if use_combo:
        k = min(len(pts), rng.choice((2, 2, 3)))
        chosen = rng.sample(range(len(pts)), k)
        chosen.sort()
        if rng.random() < 0.5:
            weights = [rat(1, k)] * k
        else:
            raw = [rng.randint(1, 4) for _ in range(k)]
            total = sum(raw)
            weights = [rat(r, total) for r in raw]
        coords = [ZERO] * interp.m
        for w, i in zip(weights, chosen):
            for j, c in enumerate(pts[i].coords):
                coords[j] += w * c
        return Point(tuple(coords))
    if pts:
        mins = list(pts[0].coords)
        maxs = list(pts[0].coords)
        for p in pts[1:]:
            for j, c in enumerate(p.coords):
                mins[j] = min(mins[j], c)
                maxs[j] = max(maxs[j], c)
    else:
        mins = [ZERO] * interp.m
        maxs = [ONE] * interp.m
    denom = 16
    coords = []
    for lo, hi in zip(mins, maxs):
        lo_n = int(lo * denom)
        hi_n = int(hi * denom)
        if hi_n <= lo_n:
            hi_n = lo_n + denom
        coords.append(rat(rng.randint(lo_n, hi_n), denom))
    return Point(tuple(coords))


def probe_extensions(
    interp: GeometricInterpretation,
    kb: KnowledgeBase,
    n_points: int = 3,
    trials: int = 20,
    seed: int = 0,
    max_rounds: int = 1000,
) -> ProbeReport:
    """Randomized consistency probing of an interpretation against a KB.

    Per trial: sample `n_points` fresh constants, extend, synthesize
    existential witnesses where applicable, collect the satisfied atoms over
    all objects, and chase the ontology on the database union.  A trial is a
    violation when that chase is unsatisfiable.  Deterministic given the
    seed; trials use independent derived generators.
    """
    has_evars = any(r.evars for r in kb.ontology.rules)
    qc = quasi_chained_offender(kb.ontology) is None
    records = []
    for t in range(trials):
        rng = random.Random(f"{seed}:{t}")
        names = {}
        for i in range(n_points):
            names[f"c{t}_{i}"] = _sample_point(rng, interp)
        extended = extend_with_points(interp, names)
        note = None
        synthesized = 0
        if has_evars and qc and interp.base is not None:
            try:
                grown = synthesize_witnesses(extended, kb, max_rounds)
                synthesized = len(grown.entities) - len(extended.entities)
                extended = grown
            except (RoundsExceededError, NotQuasiChainedError) as exc:
                note = f"witness synthesis incomplete: {exc}"
        sat = extended.satisfied_atoms(include_hidden=True)
        result = chase(knowledge_base(kb.ontology.rules, kb.ontology.constraints,
                                      kb.database | sat))
        violation = None
        if result.status == "unsatisfiable":
            violation = str(result.violation)
        elif result.status == "resource_exceeded":
            note = f"chase resource exceeded at {result.steps} steps"
        records.append(
            ProbeTrial(
                t,
                tuple(sorted((n, p) for n, p in names.items())),
                result.status == "model",
                synthesized,
                violation,
                note,
            )
        )
    return ProbeReport(seed, trials, n_points, tuple(records))


# ---------------------------------------------------------------------------
# the dimension lower-bound family

def helly_lower_bound_kb(n: int) -> KnowledgeBase:
    """n constants, n unary relations, every A_i holding all a_j with j != i,
    and one constraint forbidding membership in all n relations at once.

    Satisfiable (its database is already a model), but no convex geometric
    model exists below dimension n-1.
    """
    if n < 2:
        raise MinimumNError("the lower-bound family needs n >= 2")
    facts = [
        atom(f"A{i}", f"a{j}")
        for i in range(1, n + 1)
        for j in range(1, n + 1)
        if i != j
    ]
    x = var("X")
    constraint = NegativeConstraint(tuple(Atom(f"A{i}", (x,)) for i in range(1, n + 1)))
    return knowledge_base((), (constraint,), facts)


def helly_intersection_point(interp: GeometricInterpretation, relations) -> Point | None:
    """Exact point in the intersection of the given unary regions, or None.

    Joint convex-combination LP: one weight vector per region, all forced to
    express the same point.
    """
    regions = [interp.region_of(rel, 1) for rel in relations]
    if any(r.is_empty for r in regions):
        return None
    m = interp.m
    sizes = [len(r.vertices) for r in regions]
    total = sum(sizes)
    offsets = []
    acc = 0
    for s in sizes:
        offsets.append(acc)
        acc += s
    rows = []
    rhs = []
    for i in range(1, len(regions)):
        for j in range(m):
            row = [ZERO] * total
            for k, v in enumerate(regions[0].vertices):
                row[offsets[0] + k] = v.coords[j]
            for k, v in enumerate(regions[i].vertices):
                row[offsets[i] + k] = row[offsets[i] + k] - v.coords[j]
            rows.append(row)
            rhs.append(ZERO)
    for i, region in enumerate(regions):
        row = [ZERO] * total
        for k in range(sizes[i]):
            row[offsets[i] + k] = ONE
        rows.append(row)
        rhs.append(ONE)
    sol = find_nonnegative_solution(rows, rhs)
    if sol is None:
        return None
    coords = [ZERO] * m
    for k, v in enumerate(regions[0].vertices):
        w = sol[offsets[0] + k]
        if w != 0:
            for j, c in enumerate(v.coords):
                coords[j] += w * c
    return Point(tuple(coords))


@dataclass(frozen=True)
class HellyBreakResult:
    point: Point | None
    extension_chase: ChaseResult | None
    fresh_constant: str | None

    @property
    def found(self) -> bool:
        return self.point is not None

    @property
    def breaks_model(self) -> bool:
        return self.extension_chase is not None and self.extension_chase.status == "unsatisfiable"


def helly_break(interp: GeometricInterpretation, kb: KnowledgeBase) -> HellyBreakResult:
    """Refute a claimed low-dimensional convex model of the lower-bound KB.

    Preconditions: every constant of the KB has a point, every constraint
    relation has a nonempty region, and the interpretation satisfies the
    whole database.  When the n regions share a point (guaranteed by Helly's
    theorem for dimension <= n-2), extending the interpretation by a fresh
    constant at that point makes the knowledge base's constraint fire, and
    the chase certifies unsatisfiability.
    """
    if not kb.ontology.constraints:
        raise PreconditionViolatedError("knowledge base carries no constraint")
    relations = [a.relation for a in kb.ontology.constraints[0].body]
    for t in sorted(kb.constants(), key=object_sort_key):
        if t not in interp.entities:
            raise PreconditionViolatedError(f"constant {t.name} has no point")
    for rel in relations:
        if interp.region_of(rel, 1).is_empty:
            raise PreconditionViolatedError(f"region for {rel} is empty")
    for a in sorted(kb.database, key=Atom.sort_key):
        if not interp.satisfies(a):
            raise PreconditionViolatedError(f"database atom {a} not satisfied")
    p = helly_intersection_point(interp, relations)
    if p is None:
        return HellyBreakResult(None, None, None)
    fresh = "d"
    existing = {t.name for t in interp.entities}
    i = 0
    while fresh in existing:
        i += 1
        fresh = f"d{i}"
    extended = extend_with_points(interp, {fresh: p})
    sat = extended.satisfied_atoms(include_hidden=True)
    result = chase(
        knowledge_base(kb.ontology.rules, kb.ontology.constraints, kb.database | sat)
    )
    return HellyBreakResult(p, result, fresh)
