"""Existential-rule knowledge bases: syntax, text format, structural checks.

A knowledge base pairs an ontology (existential rules plus negative
constraints) with a database of ground facts.  Rule heads are stored as
nonempty atom conjunctions; `normalize_single_head` rewrites them into the
single-head normal form with auxiliary relations when a caller needs it.

The text format, one `.`-terminated statement per line:

    Wife(anna).
    Wife(X), Married(X,Y) -> Husband(Y).
    Wife(Y) -> exists X. Husband(X), Married(X,Y).
    Husband(X), Wife(X) -> false.

`%` starts a comment.  Constants match [a-z][A-Za-z0-9_]*, variables
[A-Z][A-Za-z0-9_]*, relations [A-Za-z][A-Za-z0-9_]* (resolved by functor
position).  Labelled nulls cannot be written in source; they are created only
by the chase or by geometric witness synthesis.

All values are immutable; every function here is pure.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import count


CONST = "const"
NULL = "null"
VAR = "var"

AUX_PREFIX = "__aux"

_KIND_ORDER = {CONST: 0, NULL: 1, VAR: 2}
_NULL_NAME = re.compile(r"^_([A-Za-z]*)(\d+)$")


class RuleError(ValueError):
    """Base class for knowledge-base construction errors."""


class ParseError(RuleError):
    def __init__(self, line: int, col: int, message: str):
        super().__init__(f"line {line}, col {col}: {message}")
        self.line = line
        self.col = col
        self.message = message


class ArityMismatchError(RuleError):
    def __init__(self, relation: str, seen: int, expected: int):
        super().__init__(f"relation {relation} used with arity {seen}, expected {expected}")
        self.relation = relation
        self.seen = seen
        self.expected = expected


class HeadVariableError(RuleError):
    """A head variable is neither bound in the body nor existentially quantified."""


class BodyTooLargeError(RuleError):
    def __init__(self, n: int, cap: int):
        super().__init__(f"body with {n} atoms exceeds ordering-search cap {cap}")
        self.n = n
        self.cap = cap


@dataclass(frozen=True, order=False)
class Term:
    kind: str
    name: str

    def sort_key(self):
        if self.kind == NULL:
            m = _NULL_NAME.match(self.name)
            if m:
                return (_KIND_ORDER[NULL], m.group(1), int(m.group(2)), self.name)
        return (_KIND_ORDER[self.kind], "", 0, self.name)

    def __str__(self) -> str:
        return self.name

    @property
    def is_var(self) -> bool:
        return self.kind == VAR

    @property
    def is_const(self) -> bool:
        return self.kind == CONST

    @property
    def is_null(self) -> bool:
        return self.kind == NULL


def const(name: str) -> Term:
    return Term(CONST, name)


def var(name: str) -> Term:
    return Term(VAR, name)


def null(name: str) -> Term:
    return Term(NULL, name)


@dataclass(frozen=True)
class Atom:
    relation: str
    args: tuple

    @property
    def arity(self) -> int:
        return len(self.args)

    def variables(self) -> frozenset:
        return frozenset(t for t in self.args if t.is_var)

    @property
    def is_ground(self) -> bool:
        return all(not t.is_var for t in self.args)

    def substitute(self, mapping) -> "Atom":
        return Atom(self.relation, tuple(mapping.get(t, t) for t in self.args))

    def sort_key(self):
        return (self.relation, tuple(t.sort_key() for t in self.args))

    def __str__(self) -> str:
        return f"{self.relation}({', '.join(str(t) for t in self.args)})"


def atom(relation: str, *args) -> Atom:
    terms = []
    for a in args:
        if isinstance(a, Term):
            terms.append(a)
        elif isinstance(a, str) and a[:1].isupper():
            terms.append(var(a))
        else:
            terms.append(const(str(a)))
    return Atom(relation, tuple(terms))


def vars_of(atoms) -> frozenset:
    out: set = set()
    for a in atoms:
        out.update(a.variables())
    return frozenset(out)


def _check_no_nulls(atoms, what: str):
    for a in atoms:
        for t in a.args:
            if t.is_null:
                raise RuleError(f"labelled null {t.name} not allowed in {what}")


@dataclass(frozen=True)
class ExistentialRule:
    """body -> exists evars. head, with head a nonempty atom conjunction."""

    body: tuple
    head: tuple
    evars: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if not self.body:
            raise RuleError("rule body must be nonempty")
        if not self.head:
            raise RuleError("rule head must be nonempty")
        _check_no_nulls(self.body + self.head, "a rule")
        body_vars = vars_of(self.body)
        head_vars = vars_of(self.head)
        if self.evars & body_vars:
            clash = ", ".join(sorted(t.name for t in self.evars & body_vars))
            raise RuleError(f"existential variable also occurs in body: {clash}")
        unbound = head_vars - body_vars - self.evars
        if unbound:
            names = ", ".join(sorted(t.name for t in unbound))
            raise HeadVariableError(
                f"head variable(s) {names} neither bound in body nor declared with exists"
            )
        unused = self.evars - head_vars
        if unused:
            names = ", ".join(sorted(t.name for t in unused))
            raise RuleError(f"exists-variable(s) {names} never used in head")

    @property
    def is_datalog(self) -> bool:
        return not self.evars

    @property
    def frontier(self) -> frozenset:
        return vars_of(self.head) - self.evars

    def __str__(self) -> str:
        body = ", ".join(str(a) for a in self.body)
        head = ", ".join(str(a) for a in self.head)
        if self.evars:
            ev = ", ".join(sorted(t.name for t in self.evars))
            return f"{body} -> exists {ev}. {head}"
        return f"{body} -> {head}"


@dataclass(frozen=True)
class NegativeConstraint:
    """body -> false; forbids any grounding of the body."""

    body: tuple

    def __post_init__(self):
        if not self.body:
            raise RuleError("constraint body must be nonempty")
        _check_no_nulls(self.body, "a constraint")

    def __str__(self) -> str:
        return ", ".join(str(a) for a in self.body) + " -> false"


def _collect_arities(table: dict, atoms, where: str):
    for a in atoms:
        seen = table.get(a.relation)
        if seen is None:
            table[a.relation] = a.arity
        elif seen != a.arity:
            raise ArityMismatchError(a.relation, a.arity, seen)


@dataclass(frozen=True)
class Ontology:
    rules: tuple = ()
    constraints: tuple = ()

    def __post_init__(self):
        self.arities()

    def arities(self) -> dict:
        table: dict = {}
        for r in self.rules:
            _collect_arities(table, r.body + r.head, "rule")
        for c in self.constraints:
            _collect_arities(table, c.body, "constraint")
        return table

    @property
    def is_datalog(self) -> bool:
        return all(r.is_datalog for r in self.rules)


@dataclass(frozen=True)
class KnowledgeBase:
    ontology: Ontology
    database: frozenset

    def __post_init__(self):
        for a in self.database:
            if not a.is_ground:
                raise RuleError(f"database atom {a} contains variables")
        self.arities()

    def arities(self) -> dict:
        table = self.ontology.arities()
        _collect_arities(table, self.database, "database")
        return table

    def constants(self) -> frozenset:
        out: set = set()
        for a in self.database:
            out.update(t for t in a.args if t.is_const)
        for r in self.ontology.rules:
            for a in r.body + r.head:
                out.update(t for t in a.args if t.is_const)
        for c in self.ontology.constraints:
            for a in c.body:
                out.update(t for t in a.args if t.is_const)
        return frozenset(out)


def knowledge_base(rules=(), constraints=(), facts=()) -> KnowledgeBase:
    return KnowledgeBase(Ontology(tuple(rules), tuple(constraints)), frozenset(facts))


# ---------------------------------------------------------------------------
# parsing

_TOKEN_SPEC = [
    ("ARROW", r"->"),
    ("LPAREN", r"\("),
    ("RPAREN", r"\)"),
    ("COMMA", r","),
    ("DOT", r"\."),
    ("IDENT", r"[A-Za-z][A-Za-z0-9_]*"),
]
_TOKEN_RE = re.compile("|".join(f"(?P<{n}>{p})" for n, p in _TOKEN_SPEC))


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str):
    toks = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        cut = line.find("%")
        if cut >= 0:
            line = line[:cut]
        pos = 0
        while pos < len(line):
            ch = line[pos]
            if ch.isspace():
                pos += 1
                continue
            m = _TOKEN_RE.match(line, pos)
            if not m:
                raise ParseError(lineno, pos + 1, f"unexpected character {ch!r}")
            toks.append(_Tok(m.lastgroup, m.group(), lineno, pos + 1))
            pos = m.end()
    return toks


class _Parser:
    def __init__(self, tokens):
        self.toks = tokens
        self.i = 0

    def peek(self) -> _Tok | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def _fail(self, message: str):
        tok = self.peek()
        if tok is None:
            last = self.toks[-1] if self.toks else None
            line = last.line if last else 1
            col = last.col + len(last.text) if last else 1
            raise ParseError(line, col, message + " (at end of input)")
        raise ParseError(tok.line, tok.col, message + f" (got {tok.text!r})")

    def expect(self, kind: str) -> _Tok:
        tok = self.peek()
        if tok is None or tok.kind != kind:
            self._fail(f"expected {kind}")
        self.i += 1
        return tok

    def accept(self, kind: str) -> _Tok | None:
        tok = self.peek()
        if tok is not None and tok.kind == kind:
            self.i += 1
            return tok
        return None

    def parse_term(self) -> Term:
        tok = self.expect("IDENT")
        name = tok.text
        if name[0].isupper():
            return var(name)
        return const(name)

    def parse_atom(self) -> Atom:
        tok = self.expect("IDENT")
        rel = tok.text
        if rel in ("false", "exists"):
            raise ParseError(tok.line, tok.col, f"{rel!r} is a reserved word, not a relation")
        self.expect("LPAREN")
        args = [self.parse_term()]
        while self.accept("COMMA"):
            args.append(self.parse_term())
        self.expect("RPAREN")
        return Atom(rel, tuple(args))

    def parse_atom_list(self) -> list:
        atoms = [self.parse_atom()]
        while self.accept("COMMA"):
            atoms.append(self.parse_atom())
        return atoms

    def parse_statement(self):
        body = self.parse_atom_list()
        if self.accept("DOT"):
            return ("facts", body)
        tok = self.peek()
        if tok is None or tok.kind != "ARROW":
            self._fail("expected '->' or '.'")
        self.i += 1
        tok = self.peek()
        if tok is None:
            self._fail("expected rule head")
        if tok.kind == "IDENT" and tok.text == "false":
            self.i += 1
            self.expect("DOT")
            return ("constraint", body)
        evars: list[Term] = []
        if tok.kind == "IDENT" and tok.text == "exists":
            self.i += 1
            ev = self.expect("IDENT")
            if not ev.text[0].isupper():
                raise ParseError(ev.line, ev.col, "exists expects variable names")
            evars.append(var(ev.text))
            while self.accept("COMMA"):
                ev = self.expect("IDENT")
                if not ev.text[0].isupper():
                    raise ParseError(ev.line, ev.col, "exists expects variable names")
                evars.append(var(ev.text))
            self.expect("DOT")
        head = self.parse_atom_list()
        self.expect("DOT")
        return ("rule", body, head, frozenset(evars))


def parse_program(text: str) -> KnowledgeBase:
    """Parse a program in the line format described in the module docstring.

    Facts must be ground; arity clashes and unbound head variables are
    rejected with positioned errors where possible.
    """
    toks = _tokenize(text)
    p = _Parser(toks)
    rules: list[ExistentialRule] = []
    constraints: list[NegativeConstraint] = []
    facts: list[Atom] = []
    while p.peek() is not None:
        start = p.peek()
        stmt = p.parse_statement()
        if stmt[0] == "facts":
            for a in stmt[1]:
                if not a.is_ground:
                    raise ParseError(start.line, start.col, f"fact {a} contains variables")
                facts.append(a)
        elif stmt[0] == "constraint":
            constraints.append(NegativeConstraint(tuple(stmt[1])))
        else:
            _, body, head, evars = stmt
            try:
                rules.append(ExistentialRule(tuple(body), tuple(head), evars))
            except HeadVariableError as exc:
                raise ParseError(start.line, start.col, str(exc)) from exc
    return knowledge_base(rules, constraints, facts)


def render_program(kb: KnowledgeBase) -> str:
    """Text form accepted back by parse_program (round-trips the KB)."""
    lines = []
    for a in sorted(kb.database, key=Atom.sort_key):
        lines.append(f"{a}.")
    for r in kb.ontology.rules:
        lines.append(f"{r}.")
    for c in kb.ontology.constraints:
        lines.append(f"{c}.")
    return "\n".join(lines) + ("\n" if lines else "")


# ---------------------------------------------------------------------------
# single-head normal form

def normalize_single_head(rule: ExistentialRule, fresh_names=None) -> list[ExistentialRule]:
    """Rewrite a multi-atom head into single-head rules.

    Duplicate head atoms are dropped first.  A multi-atom head H1, ..., Hk
    becomes one producer rule `body -> exists evars. aux(vs)` over a fresh
    auxiliary relation carrying every head variable, plus k projection rules
    `aux(vs) -> Hi`.  Logical consequences over the original relations are
    preserved.
    """
    head = tuple(dict.fromkeys(rule.head))
    if len(head) == 1:
        if head == rule.head:
            return [rule]
        return [ExistentialRule(rule.body, head, rule.evars)]
    if fresh_names is None:
        fresh_names = (f"{AUX_PREFIX}{i}" for i in count(1))
    aux_rel = next(fresh_names)
    seen: dict[Term, None] = {}
    for a in head:
        for t in a.args:
            if t.is_var and t not in seen:
                seen[t] = None
    aux_args = tuple(seen.keys())
    producer = ExistentialRule(rule.body, (Atom(aux_rel, aux_args),), rule.evars)
    projections = [ExistentialRule((Atom(aux_rel, aux_args),), (h,)) for h in head]
    return [producer] + projections


def normalize_ontology(ontology: Ontology) -> Ontology:
    fresh = (f"{AUX_PREFIX}{i}" for i in count(1))
    rules: list[ExistentialRule] = []
    for r in ontology.rules:
        rules.extend(normalize_single_head(r, fresh))
    return Ontology(tuple(rules), ontology.constraints)


def is_hidden_relation(name: str) -> bool:
    return name.startswith(AUX_PREFIX)


# ---------------------------------------------------------------------------
# quasi-chainedness

def quasi_chained_order(atoms, cap: int = 8):
    """An ordering of the atoms where each one shares at most one variable
    with the union of its predecessors, or None if no ordering qualifies.

    Body order is semantically irrelevant, so any qualifying order admits the
    rule; the witnessing order is returned for downstream chained evaluation.
    Depth-first search over partial orders; bodies longer than `cap` raise.
    """
    atoms = tuple(atoms)
    n = len(atoms)
    if n > cap:
        raise BodyTooLargeError(n, cap)
    if n <= 1:
        return tuple(range(n))
    atom_vars = [a.variables() for a in atoms]

    def extend(order, used, seen_vars):
        if len(order) == n:
            return order
        for i in range(n):
            if i in used:
                continue
            if len(seen_vars & atom_vars[i]) <= 1:
                res = extend(order + [i], used | {i}, seen_vars | atom_vars[i])
                if res is not None:
                    return res
        return None

    res = extend([], set(), frozenset())
    return tuple(res) if res is not None else None


def is_quasi_chained(rule, cap: int = 8) -> bool:
    """True iff some body ordering satisfies the shared-variable bound."""
    return quasi_chained_order(rule.body, cap) is not None


def quasi_chained_offender(ontology: Ontology, cap: int = 8):
    """First rule or constraint with no qualifying body order, or None."""
    for r in ontology.rules:
        if not is_quasi_chained(r, cap):
            return r
    for c in ontology.constraints:
        if not is_quasi_chained(c, cap):
            return c
    return None


# ---------------------------------------------------------------------------
# weak acyclicity (chase termination certificate)

def is_weakly_acyclic(ontology: Ontology) -> bool:
    """Position-dependency-graph test: no cycle through an existential edge.

    Positions are (relation, index) pairs.  For each rule and each body
    variable x also occurring in the head, every body position of x points to
    every head position of x (normal edge), and to every head position of
    every existential variable (special edge).  The ontology is weakly
    acyclic iff no special edge lies on a directed cycle.
    """
    normal: dict = {}
    special: dict = {}

    def add(graph, u, v):
        graph.setdefault(u, set()).add(v)

    for rule in ontology.rules:
        body_positions: dict[Term, list] = {}
        for a in rule.body:
            for i, t in enumerate(a.args):
                if t.is_var:
                    body_positions.setdefault(t, []).append((a.relation, i))
        head_positions: dict[Term, list] = {}
        for a in rule.head:
            for i, t in enumerate(a.args):
                if t.is_var:
                    head_positions.setdefault(t, []).append((a.relation, i))
        for x, bpos in body_positions.items():
            if x in rule.evars:
                continue
            for u in bpos:
                for v in head_positions.get(x, ()):
                    add(normal, u, v)
                for z in rule.evars:
                    for v in head_positions.get(z, ()):
                        add(special, u, v)

    def reaches(src, dst) -> bool:
        stack = [src]
        seen = {src}
        while stack:
            u = stack.pop()
            if u == dst:
                return True
            for v in normal.get(u, ()):
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
            for v in special.get(u, ()):
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return False

    for u, targets in special.items():
        for v in targets:
            if v == u or reaches(v, u):
                return False
    return True
