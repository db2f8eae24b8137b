"""Geometric interpretations: points for objects, convex regions for relations.

An m-dimensional geometric interpretation maps each object to a point of R^m
and each k-ary relation to a convex polytope in R^{k*m}; a ground atom holds
when the concatenation of its argument points lies in the relation's region.

`one_hot_model` is the constructive heart of the package: given a finite
model, objects are enumerated (constants lexicographically, then nulls by
index), object i becomes the i-th standard basis vector, and every relation
becomes the convex hull of the concatenations of its instance tuples.  The
satisfied-atom set of the result equals the input model exactly, and for
quasi-chained ontologies the construction stays consistent under arbitrary
finite extensions with fresh points; `synthesize_witnesses` realizes the
existential witnesses such extensions demand, placing each fresh null at the
convex combination of base witnesses dictated by the decomposition of the
triggering body tuple.

Interpretations are immutable; extension operations return new values.  The
per-atom satisfaction cache is a private memo (idempotent fills, so safe
under concurrent readers).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import product

from ._rat import ONE, ZERO, rat, rat_str
from .lp import convex_weights
from .chase import (
    _index,
    _membership_index,
    homomorphisms,
    model_from_json_dict,
    model_to_json_dict,
    term_from_name,
)
from .polytope import (
    DimensionMismatchError,
    Point,
    Polytope,
    concat_points,
)
from .rules import (
    Atom,
    KnowledgeBase,
    Term,
    const,
    is_hidden_relation,
    null,
    quasi_chained_order,
)


class UnknownObjectError(KeyError):
    """An atom mentions an object with no point assignment."""


class NameCollisionError(ValueError):
    """A fresh object name is already present in the interpretation."""


class NotOneHotBaseError(RuntimeError):
    """The operation needs an interpretation built by one_hot_model."""


class NotQuasiChainedError(RuntimeError):
    """Witness synthesis requires a quasi-chained ontology."""


class RoundsExceededError(RuntimeError):
    """Witness synthesis hit its round cap before closing all demands.

    The process is not guaranteed to terminate in general, so the cap is
    surfaced as an error rather than silently truncating.
    """


class DecompositionError(RuntimeError):
    """A satisfied body tuple failed to decompose over base instances."""


def concat(points) -> Point:
    """Concatenate points coordinatewise; dimensions add."""
    return concat_points(points)


@dataclass(frozen=True)
class OneHotBase:
    """Provenance of a one-hot construction: the source model and enumeration."""

    model: frozenset
    objects: tuple


def object_sort_key(t: Term):
    return t.sort_key()


class GeometricInterpretation:
    """Immutable mapping of objects to points and relations to regions.

    Relations absent from `regions` are treated as empty regions of the
    appropriate dimension, so queries never fail on unseen relation names.
    """

    __slots__ = ("m", "entities", "regions", "arities", "base", "_sat_cache", "_block_boxes")

    def __init__(self, m: int, entities: dict, regions: dict, arities: dict, base=None):
        self.m = m
        self.entities = dict(entities)
        self.regions = dict(regions)
        self.arities = dict(arities)
        self.base = base
        self._sat_cache: dict = {}
        self._block_boxes: dict = {}

    def objects(self) -> tuple:
        return tuple(sorted(self.entities, key=object_sort_key))

    def point_of(self, obj: Term) -> Point:
        try:
            return self.entities[obj]
        except KeyError:
            raise UnknownObjectError(obj.name) from None

    def region_of(self, relation: str, arity: int | None = None) -> Polytope:
        region = self.regions.get(relation)
        if region is not None:
            return region
        if arity is None:
            arity = self.arities.get(relation)
            if arity is None:
                raise UnknownObjectError(f"relation {relation} has no region and no known arity")
        return Polytope.empty(arity * self.m)

    def satisfies(self, atom: Atom) -> bool:
        """Does the concatenation of the argument points lie in the region?"""
        key = (atom.relation, tuple(t.name for t in atom.args))
        hit = self._sat_cache.get(key)
        if hit is not None:
            return hit
        region = self.region_of(atom.relation, atom.arity)
        pt = concat_points([self.point_of(t) for t in atom.args])
        ans = region.contains(pt)
        self._sat_cache[key] = ans
        return ans

    def _position_candidates(self, relation: str, arity: int, objects):
        """Per-position candidate objects via bounding boxes of vertex blocks.

        A point can only appear at position l of a satisfied tuple if it fits
        the bounding box of the region vertices' l-th coordinate block; this
        prunes the tuple enumeration without affecting exactness.
        """
        region = self.regions.get(relation)
        if region is None or region.is_empty:
            return None
        boxes = self._block_boxes.get(relation)
        if boxes is None:
            m = self.m
            boxes = []
            for l in range(arity):
                lo = list(region.vertices[0].coords[l * m : (l + 1) * m])
                hi = list(lo)
                for v in region.vertices[1:]:
                    blk = v.coords[l * m : (l + 1) * m]
                    for j, c in enumerate(blk):
                        if c < lo[j]:
                            lo[j] = c
                        elif c > hi[j]:
                            hi[j] = c
                boxes.append((lo, hi))
            self._block_boxes[relation] = boxes
        out = []
        for l in range(arity):
            lo, hi = boxes[l]
            cands = [
                o
                for o in objects
                if all(lo[j] <= c <= hi[j] for j, c in enumerate(self.entities[o].coords))
            ]
            if not cands:
                return None
            out.append(cands)
        return out

    def satisfied_atoms(self, objects=None, include_hidden: bool = False) -> frozenset:
        """All ground atoms over the given objects satisfied here.

        Enumerates every relation and argument tuple (with box pruning) and
        keeps the tuples whose concatenated points pass exact membership.
        Auxiliary relations introduced by head normalization are skipped
        unless `include_hidden` is set.
        """
        if objects is None:
            objects = self.objects()
        else:
            objects = tuple(sorted(objects, key=object_sort_key))
        out = set()
        for relation in sorted(self.regions):
            if not include_hidden and is_hidden_relation(relation):
                continue
            arity = self.arities[relation]
            cands = self._position_candidates(relation, arity, objects)
            if cands is None:
                continue
            for combo in product(*cands):
                a = Atom(relation, combo)
                if self.satisfies(a):
                    out.add(a)
        return frozenset(out)

    def with_entities(self, extra: dict) -> "GeometricInterpretation":
        merged = dict(self.entities)
        merged.update(extra)
        return GeometricInterpretation(self.m, merged, self.regions, self.arities, self.base)


def one_hot_model(model_atoms) -> GeometricInterpretation:
    """Geometric interpretation whose satisfied atoms are exactly the model.

    Dimension m is the number of objects; object i sits at basis vector e_i
    and each relation's region is the convex hull of its instance tuples'
    concatenations.  A concatenated one-hot tuple can only be a convex
    combination of instance concatenations that agree with it blockwise, so
    no unintended atom becomes satisfied.
    """
    model = frozenset(model_atoms)
    objects = tuple(sorted({t for a in model for t in a.args}, key=object_sort_key))
    m = len(objects)
    index = {o: i for i, o in enumerate(objects)}
    entities = {
        o: Point(tuple(ONE if j == i else ZERO for j in range(m))) for o, i in index.items()
    }
    by_rel: dict[str, list] = {}
    arities: dict[str, int] = {}
    for a in model:
        arities[a.relation] = a.arity
        by_rel.setdefault(a.relation, []).append(a)
    regions = {}
    for rel, atoms in by_rel.items():
        pts = [concat_points([entities[t] for t in a.args]) for a in atoms]
        regions[rel] = Polytope.hull(pts, arities[rel] * m)
    return GeometricInterpretation(m, entities, regions, arities, OneHotBase(model, objects))


def extend_with_points(interp: GeometricInterpretation, assignment: dict) -> GeometricInterpretation:
    """Add fresh constants at chosen points; regions are left untouched.

    New atoms can only arise through satisfaction of existing regions at the
    new points.  Keys may be Term constants or bare (lowercase) names.
    """
    extra: dict[Term, Point] = {}
    for key, pt in assignment.items():
        term = const(key) if isinstance(key, str) else key
        if term in interp.entities or term in extra:
            raise NameCollisionError(term.name)
        if pt.dim != interp.m:
            raise DimensionMismatchError(f"point dim {pt.dim}, interpretation dim {interp.m}")
        extra[term] = pt
    return interp.with_entities(extra)


# ---------------------------------------------------------------------------
# existential witness synthesis

def _base_homomorphisms(body, model_index):
    """Deterministic list of matches of the body atoms into the base model."""
    homs = list(homomorphisms(list(body), model_index))
    homs.sort(key=lambda h: tuple(sorted((v.name, t.sort_key()) for v, t in h.items())))
    return homs


def _head_witnesses(rule, base_binding, model_index):
    """Objects witnessing the rule head in the base model for one base match."""
    pattern = [h.substitute(base_binding) for h in rule.head]
    for wit in homomorphisms(pattern, model_index):
        return wit
    return None


def synthesize_witnesses(
    interp: GeometricInterpretation, kb: KnowledgeBase, max_rounds: int = 1000
) -> GeometricInterpretation:
    """Extend an interpretation with nulls witnessing existential demands.

    Requires a one-hot base and a quasi-chained ontology.  For every body
    match whose head has no witness among the current objects, the body tuple
    is decomposed as a convex combination of base-model matches (exact LP);
    each existential variable then receives a fresh null `_w<i>` placed at
    the same convex combination of that variable's base witnesses, which puts
    the instantiated head inside the head relation's region by convexity.

    Fresh nulls can trigger further demands, so the process iterates; it is
    not guaranteed to terminate in general and raises RoundsExceededError at
    the cap rather than truncating silently.
    """
    if interp.base is None:
        raise NotOneHotBaseError("witness synthesis needs a one-hot construction as base")
    existential = [r for r in kb.ontology.rules if r.evars]
    if not existential:
        return interp
    for rule in kb.ontology.rules:
        if quasi_chained_order(rule.body) is None:
            raise NotQuasiChainedError(f"rule body admits no chained order: {rule}")

    model_index = _index(interp.base.model)
    current = interp
    witness_counter = 1
    for _ in range(max_rounds):
        sat = current.satisfied_atoms(include_hidden=True)
        sat_enum_index = _index(sat)
        sat_member_index = _membership_index(sat)
        demands = []
        seen_heads = set()
        for ri, rule in enumerate(existential):
            for binding in _base_homomorphisms(rule.body, sat_enum_index):
                pattern = tuple(h.substitute(binding) for h in rule.head)
                if any(True for _ in homomorphisms(list(pattern), sat_member_index)):
                    continue
                key = (ri, pattern)
                if key in seen_heads:
                    continue
                seen_heads.add(key)
                demands.append((rule, binding))
        if not demands:
            return current
        added: dict[Term, Point] = {}
        for rule, binding in demands:
            body_vars = sorted({t for a in rule.body for t in a.args if t.is_var},
                               key=object_sort_key)
            target = concat_points([current.point_of(binding[v]) for v in body_vars])
            base_homs = _base_homomorphisms(rule.body, model_index)
            if not base_homs:
                raise DecompositionError(f"no base matches for body of: {rule}")
            gens = [
                concat_points([current.point_of(h[v]) for v in body_vars]).coords
                for h in base_homs
            ]
            if body_vars:
                weights = convex_weights(target.coords, gens)
            else:
                weights = [ONE] + [ZERO] * (len(base_homs) - 1)
            if weights is None:
                raise DecompositionError(
                    f"satisfied body tuple not in the hull of base matches: {rule}"
                )
            per_instance_witnesses = []
            for h in base_homs:
                wit = _head_witnesses(rule, h, model_index)
                if wit is None:
                    raise DecompositionError(f"base model does not satisfy rule: {rule}")
                per_instance_witnesses.append(wit)
            for ev in sorted(rule.evars, key=object_sort_key):
                coords = [ZERO] * current.m
                for w, wit in zip(weights, per_instance_witnesses):
                    if w == 0:
                        continue
                    for j, c in enumerate(current.point_of(wit[ev]).coords):
                        coords[j] += w * c
                added[null(f"_w{witness_counter}")] = Point(tuple(coords))
                witness_counter += 1
        current = current.with_entities(added)
    raise RoundsExceededError(f"witness synthesis still has open demands after {max_rounds} rounds")


# ---------------------------------------------------------------------------
# dimension compaction for one-hot models

def compact_one_hot_model(interp: GeometricInterpretation) -> GeometricInterpretation:
    """Drop the last coordinate of a one-hot construction (dimension m-1).

    All one-hot points lie on the hyperplane of coordinate sum 1, where
    forgetting the last coordinate is an affine bijection; regions are
    rebuilt as hulls of the mapped instance tuples, so the satisfied-atom
    set is unchanged.  Only applicable to unextended one-hot constructions.
    """
    base = interp.base
    if base is None:
        raise NotOneHotBaseError("compaction applies to one-hot constructions")
    if set(interp.entities) != set(base.objects):
        raise NotOneHotBaseError("compaction applies before any extension")
    if interp.m == 0:
        return GeometricInterpretation(0, dict(interp.entities), {}, dict(interp.arities), None)
    m2 = interp.m - 1
    entities = {o: Point(p.coords[:m2]) for o, p in interp.entities.items()}
    by_rel: dict[str, list] = {}
    for a in base.model:
        by_rel.setdefault(a.relation, []).append(a)
    regions = {}
    for rel, atoms in by_rel.items():
        pts = [concat_points([entities[t] for t in a.args]) for a in atoms]
        regions[rel] = Polytope.hull(pts, interp.arities[rel] * m2)
    return GeometricInterpretation(m2, entities, regions, dict(interp.arities), None)


# ---------------------------------------------------------------------------
# indicator-table extended interpretations

class ExtendedGeometricInterpretation:
    """Convex regions over a per-relation transform instead of raw tuples.

    Here every transform is a finite lookup table: it sends a concatenated
    tuple to 1 exactly when the source model contains a matching atom, and to
    0 otherwise, while every region is the single point {1}.  The result
    satisfies precisely the source model and generalizes to nothing: fresh
    points satisfy an atom only by landing exactly on a recorded tuple.
    """

    __slots__ = ("m", "entities", "tables", "arities", "region")

    def __init__(self, m: int, entities: dict, tables: dict, arities: dict):
        self.m = m
        self.entities = dict(entities)
        self.tables = {rel: frozenset(rows) for rel, rows in tables.items()}
        self.arities = dict(arities)
        self.region = Polytope.hull([Point((ONE,))], 1)

    def objects(self) -> tuple:
        return tuple(sorted(self.entities, key=object_sort_key))

    def point_of(self, obj: Term) -> Point:
        try:
            return self.entities[obj]
        except KeyError:
            raise UnknownObjectError(obj.name) from None

    def transform(self, relation: str, pt: Point) -> Point:
        table = self.tables.get(relation, frozenset())
        return Point((ONE,)) if pt.coords in table else Point((ZERO,))

    def satisfies(self, atom: Atom) -> bool:
        pt = concat_points([self.point_of(t) for t in atom.args])
        return self.region.contains(self.transform(atom.relation, pt))

    def satisfied_atoms(self, objects=None) -> frozenset:
        if objects is None:
            objects = self.objects()
        out = set()
        for rel, arity in self.arities.items():
            for combo in product(objects, repeat=arity):
                a = Atom(rel, tuple(combo))
                if self.satisfies(a):
                    out.add(a)
        return frozenset(out)

    def with_entities(self, extra: dict) -> "ExtendedGeometricInterpretation":
        for term in extra:
            if term in self.entities:
                raise NameCollisionError(term.name)
        merged = dict(self.entities)
        merged.update(extra)
        return ExtendedGeometricInterpretation(self.m, merged, self.tables, self.arities)


def indicator_extended_model(model_atoms) -> ExtendedGeometricInterpretation:
    """Extended interpretation satisfying exactly the given finite model.

    Entity points are distinct integers on the line; each relation's lookup
    table records its instance tuples.  This always exists but cannot induce
    any knowledge beyond its input.
    """
    model = frozenset(model_atoms)
    objects = tuple(sorted({t for a in model for t in a.args}, key=object_sort_key))
    entities = {o: Point((rat(i),)) for i, o in enumerate(objects)}
    tables: dict[str, set] = {}
    arities: dict[str, int] = {}
    for a in model:
        arities[a.relation] = a.arity
        pt = concat_points([entities[t] for t in a.args])
        tables.setdefault(a.relation, set()).add(pt.coords)
    return ExtendedGeometricInterpretation(1, entities, tables, arities)


# ---------------------------------------------------------------------------
# dumps

def geometry_to_json_dict(interp: GeometricInterpretation) -> dict:
    doc = {
        "m": interp.m,
        "entities": {
            o.name: [rat_str(c) for c in p.coords] for o, p in interp.entities.items()
        },
        "relations": {
            rel: {
                "arity": interp.arities[rel],
                "vertices": [[rat_str(c) for c in v.coords] for v in region.vertices],
            }
            for rel, region in interp.regions.items()
        },
    }
    if interp.base is not None:
        doc["one_hot_base"] = {
            "model": model_to_json_dict(interp.base.model)["atoms"],
            "objects": [o.name for o in interp.base.objects],
        }
    return doc


def geometry_from_json_dict(doc: dict) -> GeometricInterpretation:
    m = int(doc["m"])
    entities = {
        term_from_name(name): Point(tuple(rat(c) for c in coords))
        for name, coords in doc["entities"].items()
    }
    regions = {}
    arities = {}
    for rel, rec in doc["relations"].items():
        arities[rel] = int(rec["arity"])
        verts = [Point(tuple(rat(c) for c in row)) for row in rec["vertices"]]
        regions[rel] = Polytope(arities[rel] * m, verts)
    base = None
    if "one_hot_base" in doc:
        rec = doc["one_hot_base"]
        base = OneHotBase(
            model_from_json_dict({"atoms": rec["model"]}),
            tuple(term_from_name(n) for n in rec["objects"]),
        )
    return GeometricInterpretation(m, entities, regions, arities, base)


def dumps_geometry(interp: GeometricInterpretation) -> str:
    return json.dumps(geometry_to_json_dict(interp), indent=2, sort_keys=True) + "\n"


def loads_geometry(text: str) -> GeometricInterpretation:
    return geometry_from_json_dict(json.loads(text))
