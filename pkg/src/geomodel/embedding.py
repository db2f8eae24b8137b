"""Scoring-function relation representations and their hard limits.

Covers the standard knowledge-graph embedding families seen as regions:

  * translation models (plain, or with head/tail projection matrices):
    score is the Euclidean distance d(M_h e + r, M_t f);
  * bilinear models: score is -e^T M f, with diagonal M for the
    componentwise-product variant and a 2x2-block real form for the
    complex-vector variant;
  * the head/tail split variant that scores a pair with a forward vector r
    and an inverse vector ri.

A triple is accepted when its score is at most the relation threshold, so a
binary relation's region is { e + f -concatenation : score <= threshold }.
Scores are exact rationals except for translation distances (the square root
is only taken for display; membership compares squared distances exactly).

The negative results are mechanized constructively:

  * a subsumption between two bilinear relations forces the matrices to be
    proportional; `bilinear_subsumption` decides the full threshold rule and
    otherwise returns an exact counterexample pair (e, f);
  * chains of bilinear subsumptions into one relation linearly order the
    premise relations; `bilinear_hierarchy` emits the two implication chains
    split by effective threshold sign;
  * translation regions collapse subsumption cycles: `translation_containment_chain`
    mechanizes the betweenness argument showing the two marriage-rule
    containments force the wife region inside the husband region;
  * the head/tail split model cannot satisfy a nontrivial composition rule:
    `simple_composition_counterexample` builds explicit entity vectors with
    the sign-vector construction and a doubled magnitude K.

Floating point appears only in the sampling falsification harness; every
verdict witness is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._rat import ONE, ZERO, rat
from .polytope import DimensionMismatchError, Point, Polytope


class UnknownEntityError(KeyError):
    pass


class NotAllSatisfiedError(ValueError):
    """Hierarchy layout requires every premise pair to be satisfied."""


class PremiseViolatedError(RuntimeError):
    def __init__(self, which: str, detail: str):
        super().__init__(f"{which}: {detail}")
        self.which = which
        self.detail = detail


def _vec(values) -> tuple:
    return tuple(rat(v) for v in values)


def _mat(rows) -> tuple:
    return tuple(tuple(rat(v) for v in row) for row in rows)


def triple_product(a, b, c):
    """Componentwise product sum: sum_i a_i b_i c_i."""
    acc = ZERO
    for x, y, z in zip(a, b, c):
        acc += x * y * z
    return acc


def bilinear_value(e, m_rows, f):
    acc = ZERO
    for ei, row in zip(e, m_rows):
        if ei == 0:
            continue
        acc += ei * sum((rj * fj for rj, fj in zip(row, f)), ZERO)
    return acc


def mat_vec(m_rows, x):
    return tuple(sum((a * b for a, b in zip(row, x)), ZERO) for row in m_rows)


# ---------------------------------------------------------------------------
# relation representations

@dataclass(frozen=True)
class TranslationRelation:
    """Relation as a translation vector, optionally behind projections."""

    r: tuple
    threshold: object
    head_map: tuple | None = None
    tail_map: tuple | None = None

    @classmethod
    def plain(cls, r, threshold):
        return cls(_vec(r), rat(threshold))

    @classmethod
    def projected(cls, r, threshold, head_map, tail_map):
        return cls(_vec(r), rat(threshold), _mat(head_map), _mat(tail_map))

    def _shift(self, e, f):
        eh = mat_vec(self.head_map, e) if self.head_map else tuple(e)
        ft = mat_vec(self.tail_map, f) if self.tail_map else tuple(f)
        if len(eh) != len(self.r) or len(ft) != len(self.r):
            raise DimensionMismatchError("entity/relation dimension mismatch")
        return tuple(a + r - b for a, r, b in zip(eh, self.r, ft))

    def squared_distance(self, e, f):
        return sum((d * d for d in self._shift(e, f)), ZERO)


@dataclass(frozen=True)
class BilinearRelation:
    """Relation as a square matrix; score is -e^T M f."""

    matrix: tuple
    threshold: object

    @classmethod
    def of(cls, matrix, threshold):
        m = _mat(matrix)
        n = len(m)
        if any(len(row) != n for row in m):
            raise DimensionMismatchError("bilinear matrix must be square")
        return cls(m, rat(threshold))


def distmult_relation(r, threshold) -> BilinearRelation:
    """Diagonal bilinear relation (componentwise product scoring)."""
    r = _vec(r)
    n = len(r)
    rows = tuple(tuple(r[i] if i == j else ZERO for j in range(n)) for i in range(n))
    return BilinearRelation(rows, rat(threshold))


def complex_relation(re_r, im_r, threshold) -> BilinearRelation:
    """Real 2n-dimensional block form of complex-vector scoring.

    Entities embed as re(e) + im(e) concatenations; the block matrix
    [[diag(re r), diag(im r)], [-diag(im r), diag(re r)]] reproduces the
    complex scoring function exactly.
    """
    re_r, im_r = _vec(re_r), _vec(im_r)
    n = len(re_r)
    if len(im_r) != n:
        raise DimensionMismatchError("real and imaginary parts differ in length")
    rows = []
    for i in range(n):
        rows.append(
            tuple(re_r[i] if j == i else ZERO for j in range(n))
            + tuple(im_r[i] if j == i else ZERO for j in range(n))
        )
    for i in range(n):
        rows.append(
            tuple(-im_r[i] if j == i else ZERO for j in range(n))
            + tuple(re_r[i] if j == i else ZERO for j in range(n))
        )
    return BilinearRelation(tuple(rows), rat(threshold))


@dataclass(frozen=True)
class SimplERelation:
    """Head/tail split relation: forward vector r and inverse vector ri.

    A pair (e, f) is accepted when both the forward score on (e_head,
    f_tail) and the inverse score on (f_head, e_tail) pass their thresholds.
    """

    r: tuple
    ri: tuple
    threshold: object
    threshold_inv: object

    @classmethod
    def of(cls, r, ri, threshold, threshold_inv):
        r, ri = _vec(r), _vec(ri)
        if len(r) != len(ri):
            raise DimensionMismatchError("forward and inverse vectors differ in length")
        return cls(r, ri, rat(threshold), rat(threshold_inv))


def score(relation, e, f):
    """Plausibility score, lower is better.

    Translation relations return the (float) Euclidean distance; all others
    return exact rationals.  For the split representation, entities are
    (head, tail) vector pairs and the forward score is reported.
    """
    if isinstance(relation, TranslationRelation):
        return math.sqrt(float(relation.squared_distance(_vec(e), _vec(f))))
    if isinstance(relation, BilinearRelation):
        return -bilinear_value(_vec(e), relation.matrix, _vec(f))
    if isinstance(relation, SimplERelation):
        e_head, _ = e
        _, f_tail = f
        return -triple_product(_vec(e_head), relation.r, _vec(f_tail))
    raise TypeError(f"unknown relation representation: {type(relation).__name__}")


def in_region(relation, e, f) -> bool:
    """Exact region membership: score(e, f) <= threshold.

    Translation membership compares squared distances, so it stays exact on
    rational inputs; a negative distance threshold means the empty region.
    """
    if isinstance(relation, TranslationRelation):
        if relation.threshold < 0:
            return False
        return relation.squared_distance(_vec(e), _vec(f)) <= relation.threshold**2
    if isinstance(relation, BilinearRelation):
        return -bilinear_value(_vec(e), relation.matrix, _vec(f)) <= relation.threshold
    if isinstance(relation, SimplERelation):
        e_head, e_tail = e
        f_head, f_tail = f
        fwd = -triple_product(_vec(e_head), relation.r, _vec(f_tail))
        inv = -triple_product(_vec(f_head), relation.ri, _vec(e_tail))
        return fwd <= relation.threshold and inv <= relation.threshold_inv
    raise TypeError(f"unknown relation representation: {type(relation).__name__}")


def separates(entities: dict, relations: dict, positives, negatives):
    """Check the exact-representation property on labeled triples.

    Every positive triple must score within its relation's threshold and
    every negative one strictly outside.  Returns (ok, first failing triple).
    """
    def emb(name):
        try:
            return entities[name]
        except KeyError:
            raise UnknownEntityError(name) from None

    for h, rel_name, t in positives:
        if not in_region(relations[rel_name], emb(h), emb(t)):
            return False, (h, rel_name, t)
    for h, rel_name, t in negatives:
        if in_region(relations[rel_name], emb(h), emb(t)):
            return False, (h, rel_name, t)
    return True, None


# ---------------------------------------------------------------------------
# necessary conditions for translation representability

@dataclass(frozen=True)
class PropertyViolation:
    relation: str
    subset: tuple
    property_name: str
    detail: str


def translation_graph_properties(triples, subset) -> list:
    """Closure properties a translation model forces on every entity subset.

    Over any subset S: (1) a relation reflexive on S must be symmetric and
    transitive on S; (2) if e relates to all of S and f relates to some of
    S, then f relates to all of S.  Returns the violations; an empty list
    means the subset passes these necessary conditions.
    """
    subset = tuple(sorted(set(subset)))
    sset = set(subset)
    by_rel: dict[str, set] = {}
    entities = set()
    for h, r, t in triples:
        by_rel.setdefault(r, set()).add((h, t))
        entities.add(h)
        entities.add(t)
    violations = []
    for rel in sorted(by_rel):
        edges = by_rel[rel]
        reflexive = all((s, s) in edges for s in subset)
        if reflexive and subset:
            for a in subset:
                for b in subset:
                    if (a, b) in edges and (b, a) not in edges:
                        violations.append(
                            PropertyViolation(rel, subset, "reflexive-implies-symmetric",
                                              f"({a},{b}) present, ({b},{a}) missing")
                        )
            for a in subset:
                for b in subset:
                    for c in subset:
                        if (a, b) in edges and (b, c) in edges and (a, c) not in edges:
                            violations.append(
                                PropertyViolation(rel, subset, "reflexive-implies-transitive",
                                                  f"({a},{b}),({b},{c}) present, ({a},{c}) missing")
                            )
        if subset:
            full = [e for e in sorted(entities) if all((e, s) in edges for s in subset)]
            if full:
                for f in sorted(entities):
                    hits = [s for s in subset if (f, s) in edges]
                    if hits and len(hits) < len(subset):
                        violations.append(
                            PropertyViolation(rel, subset, "all-or-nothing-saturation",
                                              f"{f} reaches {len(hits)}/{len(subset)} of subset")
                        )
    return violations


# ---------------------------------------------------------------------------
# bilinear subsumption: proportionality or counterexample

@dataclass(frozen=True)
class BilinearDecision:
    satisfied: bool
    alpha: object | None  # proportionality factor when meaningful
    counterexample: tuple | None  # (e, f) with body held, head missed
    reason: str


def _is_zero_matrix(m_rows) -> bool:
    return all(all(x == 0 for x in row) for row in m_rows)


def _proportionality(m_r, m_s):
    """alpha with M_r == alpha * M_s, or None.  Exact on rationals."""
    alpha = None
    for row_r, row_s in zip(m_r, m_s):
        for a, b in zip(row_r, row_s):
            if b == 0:
                if a != 0:
                    return None
                continue
            ratio = a / b
            if alpha is None:
                alpha = ratio
            elif alpha != ratio:
                return None
    if alpha is None:
        # M_s == 0; proportional only if M_r == 0 as well
        return ZERO if _is_zero_matrix(m_r) else None
    # alpha fixed on the support of M_s; entries where M_s vanishes must too
    for row_r, row_s in zip(m_r, m_s):
        for a, b in zip(row_r, row_s):
            if b == 0 and a != 0:
                return None
    return alpha


def _first_nonzero_entry(m_rows):
    for i, row in enumerate(m_rows):
        for j, x in enumerate(row):
            if x != 0:
                return i, j
    return None


def _pair_through_entry(m_rows, i, j, value, n):
    """(e, f) with e^T M f == value using the single nonzero entry (i, j)."""
    e = tuple(ONE if k == i else ZERO for k in range(n))
    f = tuple(value / m_rows[i][j] if k == j else ZERO for k in range(n))
    return e, f


def _independent_pair_counterexample(m_r, m_s, lam_r, lam_s, n):
    """Find (e, f) hitting (body value, head value) = (x0, y0) exactly.

    First searches f among unit vectors and unit sums for which M_r f and
    M_s f are linearly independent (if any f works, one of these does,
    because each 2x2 minor is a quadratic form in f); then solves for e in
    the span of the two images via the Gram system.  Falls back to the
    shared-rank-one case where both matrices are v g^T and v h^T with
    independent g, h.
    """
    x0 = max(lam_r, ZERO) + ONE
    y0 = lam_s - ONE

    candidates = []
    for i in range(n):
        candidates.append(tuple(ONE if k == i else ZERO for k in range(n)))
    for i in range(n):
        for j in range(i + 1, n):
            candidates.append(tuple(ONE if k in (i, j) else ZERO for k in range(n)))

    for f in candidates:
        u = mat_vec(m_r, f)
        w = mat_vec(m_s, f)
        indep = False
        for a in range(n):
            for b in range(n):
                if u[a] * w[b] - u[b] * w[a] != 0:
                    indep = True
                    break
            if indep:
                break
        if not indep:
            continue
        # e = p*u + q*w with Gram system [uu uw; uw ww] (p, q) = (x0, y0)
        uu = sum((a * a for a in u), ZERO)
        uw = sum((a * b for a, b in zip(u, w)), ZERO)
        ww = sum((b * b for b in w), ZERO)
        det = uu * ww - uw * uw
        p = (x0 * ww - y0 * uw) / det
        q = (y0 * uu - x0 * uw) / det
        e = tuple(p * ua + q * wa for ua, wa in zip(u, w))
        return e, f

    # no independent image pair: both images live on one line v, i.e.
    # M_r = v h^T and M_s = v g^T with h, g non-proportional
    ij = _first_nonzero_entry(m_s)
    i0, j0 = ij
    v = tuple(row[j0] for row in m_s)
    g = tuple(m_s[i0][j] / v[i0] for j in range(n))
    h = tuple(m_r[i0][j] / v[i0] for j in range(n))
    # f solving h.f = x0, g.f = y0 (h and g independent by non-proportionality)
    from .linalg import solve_affine

    sol = solve_affine([list(h), list(g)], [x0, y0])
    if sol is None:
        raise AssertionError("rank-one system unexpectedly inconsistent")
    f = sol[0]
    e = tuple(ONE / v[i0] if k == i0 else ZERO for k in range(n))
    return e, f


def verify_bilinear_counterexample(m_r, lam_r, m_s, lam_s, e, f) -> bool:
    return bilinear_value(e, m_r, f) >= lam_r and bilinear_value(e, m_s, f) < lam_s


def bilinear_subsumption(m_r, lam_r, m_s, lam_s) -> BilinearDecision:
    """Decide whether (e^T M_r f >= lam_r) implies (e^T M_s f >= lam_s) for
    all real e, f; otherwise produce an exact counterexample pair.

    The implication can only hold when M_r is a nonnegative multiple of M_s
    (or one side is trivial): a nonzero bilinear form takes every real
    value, so with M_r = alpha M_s (alpha > 0) the rule reduces to the
    threshold comparison lam_r / alpha >= lam_s.  Every returned
    counterexample is re-verified by direct scoring before this function
    returns.
    """
    m_r, m_s = _mat(m_r), _mat(m_s)
    lam_r, lam_s = rat(lam_r), rat(lam_s)
    n = len(m_r)
    if len(m_s) != n:
        raise DimensionMismatchError("matrices differ in dimension")

    r_zero = _is_zero_matrix(m_r)
    s_zero = _is_zero_matrix(m_s)

    def confirmed(e, f, reason) -> BilinearDecision:
        e = tuple(rat(x) for x in e)
        f = tuple(rat(x) for x in f)
        if not verify_bilinear_counterexample(m_r, lam_r, m_s, lam_s, e, f):
            raise AssertionError("constructed counterexample failed re-verification")
        return BilinearDecision(False, None, (e, f), reason)

    if s_zero and lam_s <= 0:
        # head holds for every pair
        return BilinearDecision(True, ZERO if r_zero else None, None, "head trivially true")
    if r_zero:
        if lam_r > 0:
            return BilinearDecision(True, ZERO, None, "body unsatisfiable")
        # body always true; head must hold at (0, 0) and everywhere
        if s_zero:
            return confirmed([ZERO] * n, [ZERO] * n, "zero scores miss positive head threshold")
        i, j = _first_nonzero_entry(m_s)
        e, f = _pair_through_entry(m_s, i, j, lam_s - ONE, n)
        return confirmed(e, f, "trivial body, head value pushed below threshold")
    if s_zero:
        # head only holds when lam_s <= 0, handled above
        i, j = _first_nonzero_entry(m_r)
        e, f = _pair_through_entry(m_r, i, j, max(lam_r, ZERO) + ONE, n)
        return confirmed(e, f, "head unsatisfiable, body achievable")

    alpha = _proportionality(m_r, m_s)
    if alpha is not None and alpha > 0:
        if lam_r / alpha >= lam_s:
            return BilinearDecision(True, alpha, None, "proportional, thresholds compatible")
        i, j = _first_nonzero_entry(m_s)
        e, f = _pair_through_entry(m_s, i, j, lam_r / alpha, n)
        return confirmed(e, f, "proportional, head threshold stricter")
    if alpha is not None:
        # alpha <= 0 with both matrices nonzero: scores move in opposition
        x = min(lam_r / alpha, lam_s) - ONE
        i, j = _first_nonzero_entry(m_s)
        e, f = _pair_through_entry(m_s, i, j, x, n)
        return confirmed(e, f, "nonpositive proportionality factor")
    e, f = _independent_pair_counterexample(m_r, m_s, lam_r, lam_s, n)
    return confirmed(e, f, "matrices not proportional")


def falsify_bilinear(m_r, lam_r, m_s, lam_s, samples: int = 100000, seed: int = 0):
    """Random search for a pair with body held and head missed (float).

    Returns the first violating (e, f) as float arrays, or None.  Used to
    stress Satisfied decisions; exact verdicts never rely on it.
    """
    n = len(m_r)
    rng = np.random.default_rng(seed)
    mr = np.array([[float(x) for x in row] for row in m_r])
    ms = np.array([[float(x) for x in row] for row in m_s])
    es = rng.normal(size=(samples, n))
    fs = rng.normal(size=(samples, n))
    body = np.einsum("ij,jk,ik->i", es, mr, fs)
    head = np.einsum("ij,jk,ik->i", es, ms, fs)
    bad = (body >= float(lam_r) + 1e-9) & (head < float(lam_s) - 1e-9)
    idx = np.nonzero(bad)[0]
    if idx.size == 0:
        return None
    k = int(idx[0])
    return es[k], fs[k]


def bilinear_hierarchy(premises, m_s, lam_s):
    """Order premise relations (each subsumed by the same target) into two
    implication chains split by the sign of the effective threshold.

    Each premise matrix is a nonnegative multiple alpha of the target, so
    its body is `target score >= lam/alpha`; sorting by that effective
    threshold makes each relation imply the next.  Returns (nonnegative
    chain, negative chain) as index lists; adjacent implications are
    re-verified before returning.
    """
    infos = []
    for idx, (m_r, lam_r) in enumerate(premises):
        decision = bilinear_subsumption(m_r, lam_r, m_s, lam_s)
        if not decision.satisfied:
            raise NotAllSatisfiedError(f"premise {idx} is not subsumed by the target")
        if decision.alpha is not None and decision.alpha > 0:
            eff = rat(lam_r) / decision.alpha
            infos.append((idx, eff))
        else:
            infos.append((idx, None))  # unsatisfiable body implies everything

    def sort_key(item):
        _, eff = item
        return (0,) if eff is None else (1, -eff)

    nonneg = sorted([it for it in infos if it[1] is None or it[1] >= 0], key=sort_key)
    negative = sorted([it for it in infos if it[1] is not None and it[1] < 0], key=sort_key)

    for chain in (nonneg, negative):
        for (i, _), (j, _) in zip(chain, chain[1:]):
            d = bilinear_subsumption(premises[i][0], premises[i][1],
                                     premises[j][0], premises[j][1])
            if not d.satisfied:
                raise AssertionError("chain neighbor fails implication re-check")
    return [i for i, _ in nonneg], [i for i, _ in negative]


# ---------------------------------------------------------------------------
# translation regions collapse subsumption cycles

@dataclass(frozen=True)
class ContainmentStep:
    """Betweenness chain placing one wife-region vertex inside the husband
    region: q = p + r with p in C_H, r in C_M, and q + r back in C_H, so q
    is the midpoint of two husband points."""

    q: Point
    p: Point
    r: Point
    q_plus_r: Point


def translation_containment_chain(c_h: Polytope, c_w: Polytope, c_m: Polytope):
    """Mechanize that the two containments force C_W inside C_H.

    Premises (checked exactly on vertices): the sumset C_W + C_M lies in
    C_H, and C_W lies in the sumset C_H + C_M.  For each vertex q of C_W a
    decomposition q = p + r is recovered by LP; then q + r is in C_H by the
    first premise, q is between p and q + r, and convexity of C_H puts q in
    C_H.  Returns one verified step per vertex of C_W.
    """
    if c_w.is_empty:
        return []
    if c_h.is_empty or c_m.is_empty:
        raise PremiseViolatedError("sumset-into-husband", "empty husband or translation region")
    for wv in c_w.vertices:
        for mv in c_m.vertices:
            if not c_h.contains(wv + mv):
                raise PremiseViolatedError(
                    "sumset-into-husband", f"{wv} + {mv} escapes the husband region"
                )
    steps = []
    for q in c_w.vertices:
        decomposition = _minkowski_decompose(q, c_h, c_m)
        if decomposition is None:
            raise PremiseViolatedError(
                "wife-into-sumset", f"vertex {q} is not a husband + translation sum"
            )
        p, r = decomposition
        q_plus_r = q + r
        if not c_h.contains(q_plus_r):
            raise PremiseViolatedError("sumset-into-husband", f"{q} + {r} escapes")
        mid = Point(tuple((a + b) / 2 for a, b in zip(p.coords, q_plus_r.coords)))
        if mid.coords != q.coords:
            raise AssertionError("betweenness arithmetic failed")
        if not c_h.contains(q):
            raise AssertionError("convexity conclusion failed membership re-check")
        steps.append(ContainmentStep(q, p, r, q_plus_r))
    return steps


def _minkowski_decompose(q: Point, a: Polytope, b: Polytope):
    """q = p + r with p in a, r in b, recovered by one feasibility LP."""
    from .lp import find_nonnegative_solution

    na, nb = len(a.vertices), len(b.vertices)
    dim = q.dim
    rows = []
    rhs = []
    for j in range(dim):
        row = [v.coords[j] for v in a.vertices] + [v.coords[j] for v in b.vertices]
        rows.append(row)
        rhs.append(q.coords[j])
    rows.append([ONE] * na + [ZERO] * nb)
    rhs.append(ONE)
    rows.append([ZERO] * na + [ONE] * nb)
    rhs.append(ONE)
    sol = find_nonnegative_solution(rows, rhs)
    if sol is None:
        return None
    p = Point(
        tuple(
            sum((sol[k] * a.vertices[k].coords[j] for k in range(na)), ZERO)
            for j in range(dim)
        )
    )
    r = Point(
        tuple(
            sum((sol[na + k] * b.vertices[k].coords[j] for k in range(nb)), ZERO)
            for j in range(dim)
        )
    )
    return p, r


# ---------------------------------------------------------------------------
# the head/tail split model cannot compose

def sg(x):
    """Sign variant with sg(0) = 1; keeps products of signs away from zero."""
    return ONE if x >= 0 else -ONE


@dataclass(frozen=True)
class CompositionDecision:
    kind: str  # "counterexample" | "body_unsatisfiable" | "head_always_true"
    entities: dict | None  # e_head, e_tail, f_head, f_tail, g_head, g_tail
    magnitude: object | None


def _composition_body_holds(params, ents) -> bool:
    r, ri, s, si, _, _, lr, lri, ls, lsi, _, _ = params
    return (
        triple_product(ents["e_head"], r, ents["f_tail"]) >= lr
        and triple_product(ents["f_head"], ri, ents["e_tail"]) >= lri
        and triple_product(ents["f_head"], s, ents["g_tail"]) >= ls
        and triple_product(ents["g_head"], si, ents["f_tail"]) >= lsi
    )


def _composition_head_holds(params, ents) -> bool:
    _, _, _, _, t, ti, _, _, _, _, lt, lti = params
    return (
        triple_product(ents["e_head"], t, ents["g_tail"]) >= lt
        and triple_product(ents["g_head"], ti, ents["e_tail"]) >= lti
    )


def simple_composition_counterexample(
    r, ri, s, si, t, ti, lam_r, lam_ri, lam_s, lam_si, lam_t, lam_ti,
    magnitude_cap: int = 2**60,
) -> CompositionDecision:
    """Entity vectors satisfying a composition rule's body but not its head.

    The only escapes are the two degenerate readings: a body conjunct with a
    zero vector and positive threshold (the body is a contradiction), or
    both head conjuncts with zero vectors and nonpositive thresholds (the
    head is a tautology).  Otherwise the sign-vector construction with the
    all-ones head entity drives every body product to +K or +K^2 while one
    head product drops without bound; K doubles from 1 until the exact
    inequalities hold.
    """
    r, ri, s, si, t, ti = map(_vec, (r, ri, s, si, t, ti))
    lam_r, lam_ri, lam_s, lam_si, lam_t, lam_ti = map(
        rat, (lam_r, lam_ri, lam_s, lam_si, lam_t, lam_ti)
    )
    params = (r, ri, s, si, t, ti, lam_r, lam_ri, lam_s, lam_si, lam_t, lam_ti)

    for vec, lam in ((r, lam_r), (ri, lam_ri), (s, lam_s), (si, lam_si)):
        if all(x == 0 for x in vec) and lam > 0:
            return CompositionDecision("body_unsatisfiable", None, None)
    t_zero = all(x == 0 for x in t)
    ti_zero = all(x == 0 for x in ti)
    if t_zero and lam_t <= 0 and ti_zero and lam_ti <= 0:
        return CompositionDecision("head_always_true", None, None)

    n = len(r)
    break_forward = (not t_zero) or lam_t > 0

    k = ONE
    while True:
        if break_forward:
            ents = {
                "e_head": tuple(ONE for _ in range(n)),
                "g_tail": tuple(-k * sg(x) for x in t),
                "f_tail": tuple(k * sg(x) for x in r),
                "g_head": tuple(k * sg(a) * sg(b) for a, b in zip(r, si)),
                "f_head": tuple(-k * sg(a) * sg(b) for a, b in zip(t, s)),
                "e_tail": tuple(
                    -k * sg(a) * sg(b) * sg(c) for a, b, c in zip(t, s, ri)
                ),
            }
        else:
            # mirror image breaking the inverse head conjunct
            ents = {
                "g_head": tuple(ONE for _ in range(n)),
                "e_tail": tuple(-k * sg(x) for x in ti),
                "f_tail": tuple(k * sg(x) for x in si),
                "e_head": tuple(k * sg(a) * sg(b) for a, b in zip(si, r)),
                "f_head": tuple(-k * sg(a) * sg(b) for a, b in zip(ti, ri)),
                "g_tail": tuple(
                    -k * sg(a) * sg(b) * sg(c) for a, b, c in zip(ti, ri, s)
                ),
            }
        if _composition_body_holds(params, ents) and not _composition_head_holds(params, ents):
            return CompositionDecision("counterexample", ents, k)
        k = k * 2
        if k > magnitude_cap:
            raise AssertionError("magnitude cap reached without a verified witness")
