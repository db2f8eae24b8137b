"""Random knowledge-base generators for the property and acceptance suites.

Bodies are built as chains (each atom shares at most one variable with its
predecessors), so every generated rule and constraint is quasi-chained by
construction; weak acyclicity and satisfiability are enforced by filtering.
Generated instances are kept small enough for the exact geometric checks to
stay fast (the caps below bound the chase model, not the language).
"""

from __future__ import annotations

import random
from itertools import count

from geomodel.chase import chase
from geomodel.rules import (
    Atom,
    ExistentialRule,
    NegativeConstraint,
    Ontology,
    RuleError,
    Term,
    const,
    is_weakly_acyclic,
    knowledge_base,
    var,
)


def random_chained_body(rng: random.Random, rels, consts, fresh, max_atoms=3):
    n = rng.choices(range(1, max_atoms + 1), weights=[40, 45, 15][:max_atoms])[0]
    seen: list[Term] = []
    body = []
    for _ in range(n):
        rel, ar = rng.choice(rels)
        share = bool(seen) and rng.random() < 0.85
        share_pos = rng.randrange(ar) if share else -1
        shared_var = rng.choice(seen) if share else None
        args = []
        for p in range(ar):
            if p == share_pos:
                args.append(shared_var)
            elif rng.random() < 0.25:
                args.append(rng.choice(consts))
            else:
                args.append(var(f"V{next(fresh)}"))
        body.append(Atom(rel, tuple(args)))
        for t in args:
            if t.is_var and t not in seen:
                seen.append(t)
    return body, seen


def random_rule(rng: random.Random, rels, consts, fresh, existential_prob=0.3):
    body, bvars = random_chained_body(rng, rels, consts, fresh)
    rel, ar = rng.choice(rels)
    want_exist = rng.random() < existential_prob
    evars: list[Term] = []
    args = []
    for _ in range(ar):
        roll = rng.random()
        if want_exist and (roll < 0.45 or not bvars):
            z = var(f"Z{next(fresh)}")
            evars.append(z)
            args.append(z)
        elif bvars and roll < 0.92:
            args.append(rng.choice(bvars))
        else:
            args.append(rng.choice(consts))
    try:
        return ExistentialRule(tuple(body), (Atom(rel, tuple(args)),), frozenset(evars))
    except RuleError:
        return None


def random_facts(rng: random.Random, rels, consts, lo=2, hi=7):
    facts = set()
    for _ in range(rng.randint(lo, hi)):
        rel, ar = rng.choice(rels)
        facts.add(Atom(rel, tuple(rng.choice(consts) for _ in range(ar))))
    return facts


def random_signature(rng: random.Random, max_relations=5, max_arity=3):
    n_rel = rng.randint(1, max_relations)
    arity_weights = [50, 42, 8][:max_arity]
    return [
        (f"R{i}", rng.choices(range(1, max_arity + 1), weights=arity_weights)[0])
        for i in range(n_rel)
    ]


def random_datalog_kb(rng: random.Random, max_constants=8, max_relations=5,
                      max_rules=6, with_constraints=True):
    """Random satisfiable-or-not datalog KB (used for chase-oracle tests)."""
    while True:
        rels = random_signature(rng, max_relations)
        n_const = rng.randint(2, max_constants)
        consts = [const(f"c{j}") for j in range(n_const)]
        fresh = count()
        rules = []
        for _ in range(rng.randint(1, max_rules)):
            r = random_rule(rng, rels, consts, fresh, existential_prob=0.0)
            if r is not None:
                rules.append(r)
        constraints = []
        if with_constraints and rng.random() < 0.4:
            body, _ = random_chained_body(rng, rels, consts, fresh, max_atoms=2)
            constraints.append(NegativeConstraint(tuple(body)))
        facts = random_facts(rng, rels, consts)
        try:
            kb = knowledge_base(rules, constraints, facts)
        except RuleError:
            continue
        result = chase(kb, max_steps=4000)
        if result.status == "resource_exceeded":
            continue
        if result.is_model and len(result.atoms) > 60:
            continue
        return kb


def _geometry_cost_ok(kb, model_atoms, max_objects, max_instances, max_chart_dim) -> bool:
    """Keep the exact geometric checks tractable for the generated suite.

    Bounds the chase model's object count, the per-relation instance counts,
    and an upper estimate of the chart dimension a rule's joint polytope can
    reach (sum over body variables of the smallest position-support size).
    """
    objects = {t for a in model_atoms for t in a.args}
    if len(objects) > max_objects:
        return False
    by_rel: dict[str, list] = {}
    for a in model_atoms:
        by_rel.setdefault(a.relation, []).append(a)
    if any(len(v) > max_instances for v in by_rel.values()):
        return False

    def position_support(rel, pos):
        return len({a.args[pos] for a in by_rel.get(rel, ())})

    statements = list(kb.ontology.rules) + list(kb.ontology.constraints)
    for stmt in statements:
        body = stmt.body
        var_cost = {}
        for a in body:
            for pos, t in enumerate(a.args):
                if t.is_var:
                    c = max(0, position_support(a.relation, pos) - 1)
                    var_cost[t] = min(var_cost.get(t, c), c)
        if sum(var_cost.values()) > max_chart_dim:
            return False
    return True


def random_qc_wa_kb(rng: random.Random, max_constants=8, max_relations=5,
                    max_rules=6, existential_prob=0.3, max_objects=9,
                    max_instances=10, max_chart_dim=10):
    """Random satisfiable, weakly-acyclic, quasi-chained KB plus its model.

    Returns (kb, chase model).  Instances whose chase model would make the
    exact geometry expensive are resampled; the language profile (relation,
    constant, rule counts) still spans the full configured ranges.
    """
    while True:
        rels = random_signature(rng, max_relations)
        n_const = rng.randint(2, max_constants)
        consts = [const(f"c{j}") for j in range(n_const)]
        fresh = count()
        rules = []
        target_rules = rng.randint(1, max_rules)
        attempts = 0
        while len(rules) < target_rules and attempts < 60:
            attempts += 1
            r = random_rule(rng, rels, consts, fresh, existential_prob)
            if r is None:
                continue
            try:
                onto = Ontology(tuple(rules + [r]), ())
            except RuleError:
                continue
            if not is_weakly_acyclic(onto):
                continue
            rules.append(r)
        constraints = []
        if rng.random() < 0.35:
            body, _ = random_chained_body(rng, rels, consts, fresh, max_atoms=2)
            try:
                constraints.append(NegativeConstraint(tuple(body)))
            except RuleError:
                pass
        facts = random_facts(rng, rels, consts)
        try:
            kb = knowledge_base(rules, constraints, facts)
        except RuleError:
            continue
        result = chase(kb, max_steps=2000)
        if not result.is_model:
            continue
        if not _geometry_cost_ok(kb, result.atoms, max_objects, max_instances, max_chart_dim):
            continue
        return kb, result.atoms
