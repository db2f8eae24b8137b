"""Model materialization: restricted chase, datalog fixpoint, model checking.

The chase fires rules round by round in (rule index, sorted body match) order,
inventing labelled nulls `_n1, _n2, ...` for existential variables, and only
when no assignment of the existential variables into the current objects
already satisfies the head.  Constraints are checked after every round; the
first violated grounding aborts the run.  Given the fixed ordering the result
is fully deterministic.

`datalog_fixpoint` is the independent bottom-up oracle for datalog programs;
`is_model` is the brute-force satisfaction check both are validated against.

Databases handed to these functions may contain labelled nulls (they behave
as plain objects); parsed inputs never do.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .rules import (
    Atom,
    ExistentialRule,
    KnowledgeBase,
    NegativeConstraint,
    Term,
    const,
    is_weakly_acyclic,
    null,
)


class NotGuaranteedTerminatingError(RuntimeError):
    """The ontology carries no termination certificate (not weakly acyclic)."""


class NotDatalogError(ValueError):
    """The operation only applies to existential-variable-free ontologies."""


@dataclass(frozen=True)
class ConstraintViolation:
    constraint: NegativeConstraint
    assignment: tuple  # sorted (variable, object) pairs

    def __str__(self) -> str:
        binds = ", ".join(f"{v.name}->{o.name}" for v, o in self.assignment)
        return f"constraint [{self.constraint}] violated under {{{binds}}}"


@dataclass(frozen=True)
class ChaseResult:
    status: str  # "model" | "unsatisfiable" | "resource_exceeded"
    atoms: frozenset | None
    violation: ConstraintViolation | None
    steps: int

    @property
    def is_model(self) -> bool:
        return self.status == "model"


def objects_of(atoms) -> tuple:
    """All objects (constants and nulls) in a ground atom set, sorted."""
    out = {t for a in atoms for t in a.args}
    return tuple(sorted(out, key=Term.sort_key))


def _index(atoms) -> dict:
    idx: dict[str, list] = {}
    for a in atoms:
        idx.setdefault(a.relation, []).append(a.args)
    for rel in idx:
        idx[rel].sort(key=lambda args: tuple(t.sort_key() for t in args))
    return idx


def homomorphisms(pattern, index, binding=None):
    """All matches of the atom list into the indexed atom set, depth first.

    Yields variable bindings in a deterministic order (index lists are kept
    sorted).  Constants and nulls in the pattern must match exactly.
    """
    binding = dict(binding or {})

    def walk(i, bound):
        if i == len(pattern):
            yield dict(bound)
            return
        a = pattern[i]
        for args in index.get(a.relation, ()):
            if len(args) != len(a.args):
                continue
            trial = dict(bound)
            ok = True
            for pat_t, got_t in zip(a.args, args):
                if pat_t.is_var:
                    prev = trial.get(pat_t)
                    if prev is None:
                        trial[pat_t] = got_t
                    elif prev != got_t:
                        ok = False
                        break
                elif pat_t != got_t:
                    ok = False
                    break
            if ok:
                yield from walk(i + 1, trial)

    yield from walk(0, binding)


def _sorted_homs(pattern, index):
    homs = list(homomorphisms(pattern, index))
    homs.sort(key=lambda h: tuple(sorted((v.name, t.sort_key()) for v, t in h.items())))
    return homs


def _membership_index(atoms) -> dict:
    idx: dict[str, set] = {}
    for a in atoms:
        idx.setdefault(a.relation, set()).add(a.args)
    return idx


def _head_satisfied(rule: ExistentialRule, binding, member_idx) -> bool:
    if not rule.evars:
        for h in rule.head:
            g = h.substitute(binding)
            if g.args not in member_idx.get(g.relation, ()):
                return False
        return True
    pattern = [h.substitute(binding) for h in rule.head]
    for _ in homomorphisms(pattern, member_idx):
        return True
    return False


def _find_constraint_violation(constraints, index):
    for c in constraints:
        for h in _sorted_homs(c.body, index):
            assignment = tuple(sorted(h.items(), key=lambda kv: kv[0].name))
            return ConstraintViolation(c, assignment)
    return None


def chase(kb: KnowledgeBase, max_steps: int = 100000) -> ChaseResult:
    """Materialize a finite model of the KB, or report unsatisfiability.

    Refuses ontologies without a termination certificate (weak acyclicity;
    datalog programs are trivially certified).  `max_steps` bounds the number
    of rule firings; exceeding it yields a resource_exceeded result.
    """
    ontology = kb.ontology
    if not (ontology.is_datalog or is_weakly_acyclic(ontology)):
        raise NotGuaranteedTerminatingError(
            "ontology is neither datalog nor weakly acyclic; chase may not terminate"
        )
    atoms = set(kb.database)
    member_idx = _membership_index(atoms)
    steps = 0
    null_counter = 1
    violation = _find_constraint_violation(ontology.constraints, _index(atoms))
    if violation is not None:
        return ChaseResult("unsatisfiable", None, violation, steps)
    while True:
        added_any = False
        for rule in ontology.rules:
            # body matches against the snapshot at rule start; the restricted
            # head check sees atoms added earlier in the same round
            snapshot = _index(atoms)
            for binding in _sorted_homs(rule.body, snapshot):
                if _head_satisfied(rule, binding, member_idx):
                    continue
                if steps >= max_steps:
                    return ChaseResult("resource_exceeded", None, None, steps)
                extended = dict(binding)
                for ev in sorted(rule.evars, key=Term.sort_key):
                    extended[ev] = null(f"_n{null_counter}")
                    null_counter += 1
                for h in rule.head:
                    g = h.substitute(extended)
                    atoms.add(g)
                    member_idx.setdefault(g.relation, set()).add(g.args)
                steps += 1
                added_any = True
        if not added_any:
            break
        violation = _find_constraint_violation(ontology.constraints, _index(atoms))
        if violation is not None:
            return ChaseResult("unsatisfiable", None, violation, steps)
    return ChaseResult("model", frozenset(atoms), None, steps)


def datalog_fixpoint(kb: KnowledgeBase) -> ChaseResult:
    """Least model of a datalog KB by naive bottom-up iteration.

    Serves as the independent oracle for the chase on datalog inputs; the two
    must agree exactly (same atom set, or both unsatisfiable).
    """
    ontology = kb.ontology
    if not ontology.is_datalog:
        raise NotDatalogError("fixpoint evaluation requires a datalog ontology")
    atoms = set(kb.database)
    changed = True
    steps = 0
    while changed:
        changed = False
        index = _index(atoms)
        derived = set()
        for rule in ontology.rules:
            for binding in homomorphisms(rule.body, index):
                for h in rule.head:
                    g = h.substitute(binding)
                    if g not in atoms:
                        derived.add(g)
        if derived:
            atoms |= derived
            steps += len(derived)
            changed = True
    index = _index(atoms)
    violation = _find_constraint_violation(ontology.constraints, index)
    if violation is not None:
        return ChaseResult("unsatisfiable", None, violation, steps)
    return ChaseResult("model", frozenset(atoms), None, steps)


def is_model(atoms, kb: KnowledgeBase):
    """Brute-force model check; returns (bool, first violation description).

    An interpretation is a model when it contains the database, every body
    match of every rule extends to a head match (existential variables may
    map to any object of the interpretation), and no constraint body matches.
    """
    atoms = frozenset(atoms)
    missing = kb.database - atoms
    if missing:
        return False, f"database atom {sorted(missing, key=Atom.sort_key)[0]} missing"
    index = _index(atoms)
    for rule in kb.ontology.rules:
        for binding in homomorphisms(rule.body, index):
            if not _head_satisfied(rule, binding, index):
                binds = ", ".join(
                    f"{v.name}->{t.name}" for v, t in sorted(binding.items(), key=lambda kv: kv[0].name)
                )
                return False, f"rule [{rule}] unsatisfied under {{{binds}}}"
    violation = _find_constraint_violation(kb.ontology.constraints, index)
    if violation is not None:
        return False, str(violation)
    return True, None


# ---------------------------------------------------------------------------
# model equality up to null renaming

def models_equal_up_to_nulls(a, b) -> bool:
    """Do two ground atom sets differ only by a bijection between nulls?"""
    a, b = frozenset(a), frozenset(b)
    if len(a) != len(b):
        return False
    nulls_a = sorted({t for at in a for t in at.args if t.is_null}, key=Term.sort_key)
    nulls_b = sorted({t for at in b for t in at.args if t.is_null}, key=Term.sort_key)
    if len(nulls_a) != len(nulls_b):
        return False
    if not nulls_a:
        return a == b

    def profile(atoms, n):
        occ = []
        for at in atoms:
            for i, t in enumerate(at.args):
                if t == n:
                    occ.append((at.relation, i))
        occ.sort()
        return tuple(occ)

    prof_a = {n: profile(a, n) for n in nulls_a}
    prof_b = {n: profile(b, n) for n in nulls_b}
    if sorted(prof_a.values()) != sorted(prof_b.values()):
        return False

    def apply(mapping):
        return frozenset(at.substitute(mapping) for at in a)

    def search(i, mapping, used):
        if i == len(nulls_a):
            return apply(mapping) == b
        src = nulls_a[i]
        for cand in nulls_b:
            if cand in used or prof_b[cand] != prof_a[src]:
                continue
            mapping[src] = cand
            if search(i + 1, mapping, used | {cand}):
                return True
            del mapping[src]
        return False

    return search(0, {}, frozenset())


# ---------------------------------------------------------------------------
# model dumps

def term_from_name(name: str) -> Term:
    return null(name) if name.startswith("_") else const(name)


def model_to_json_dict(atoms) -> dict:
    items = sorted(atoms, key=Atom.sort_key)
    return {"atoms": [{"rel": a.relation, "args": [t.name for t in a.args]} for a in items]}


def model_from_json_dict(doc: dict) -> frozenset:
    atoms = set()
    for rec in doc["atoms"]:
        atoms.add(Atom(rec["rel"], tuple(term_from_name(n) for n in rec["args"])))
    return frozenset(atoms)


def dumps_model(atoms) -> str:
    return json.dumps(model_to_json_dict(atoms), indent=2, sort_keys=True) + "\n"


def loads_model(text: str) -> frozenset:
    return model_from_json_dict(json.loads(text))
