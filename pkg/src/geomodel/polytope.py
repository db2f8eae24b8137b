"""Exact convex polytopes over rational coordinates.

Polytopes are primarily V-representation objects (a finite generating vertex
set); membership is decided by exact LP feasibility.  An H-representation
(affine-hull equalities plus facet inequalities) is computed lazily by the
double description method and cached; it is what rule checking stacks when it
intersects cylinder liftings of relation regions.

Everything is immutable after construction.  The H-rep cache is filled with a
compute-then-publish assignment, so concurrent readers are safe.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from ._rat import ONE, ZERO, rat, rat_str
from .linalg import independent_rows, invert, nullspace, rref, vec_dot
from .lp import convex_weights, inequalities_feasible


class DimensionMismatchError(ValueError):
    """Operands live in different ambient dimensions."""


class CapExceededError(RuntimeError):
    """An exact-geometry operation exceeded its configured size cap."""


class UnboundedRegionError(RuntimeError):
    """A constraint system admits a recession direction; regions here must be bounded."""


@dataclass(frozen=True)
class Point:
    """A point of R^d with exact rational coordinates."""

    coords: tuple

    @property
    def dim(self) -> int:
        return len(self.coords)

    def __add__(self, other: "Point") -> "Point":
        if len(self.coords) != len(other.coords):
            raise DimensionMismatchError(f"{self.dim} vs {other.dim}")
        return Point(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "Point") -> "Point":
        if len(self.coords) != len(other.coords):
            raise DimensionMismatchError(f"{self.dim} vs {other.dim}")
        return Point(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def scale(self, c) -> "Point":
        c = rat(c)
        return Point(tuple(c * a for a in self.coords))

    def __rmul__(self, c) -> "Point":
        return self.scale(c)

    def __str__(self) -> str:
        return "(" + ", ".join(rat_str(c) for c in self.coords) + ")"


def point(*values) -> Point:
    return Point(tuple(rat(v) for v in values))


def concat_points(points) -> Point:
    """Coordinate concatenation; dimensions add."""
    coords: list = []
    for p in points:
        coords.extend(p.coords)
    return Point(tuple(coords))


@dataclass(frozen=True)
class HRep:
    """Constraint form: a.x == b for equalities, a.x <= b for inequalities."""

    equalities: tuple
    inequalities: tuple

    def holds(self, coords) -> bool:
        for a, b in self.equalities:
            if vec_dot(a, coords) != b:
                return False
        for a, b in self.inequalities:
            if vec_dot(a, coords) > b:
                return False
        return True


class Polytope:
    """Convex hull of finitely many rational points (possibly empty)."""

    __slots__ = ("dim", "vertices", "_hrep", "_bbox")

    def __init__(self, dim: int, vertices=()):
        verts = []
        seen = set()
        for v in vertices:
            if v.dim != dim:
                raise DimensionMismatchError(f"vertex dim {v.dim} in polytope dim {dim}")
            if v.coords not in seen:
                seen.add(v.coords)
                verts.append(v)
        verts.sort(key=lambda p: p.coords)
        self.dim = dim
        self.vertices = tuple(verts)
        self._hrep: HRep | None = None
        self._bbox = None

    @classmethod
    def hull(cls, points, dim: int | None = None) -> "Polytope":
        pts = list(points)
        if dim is None:
            if not pts:
                raise ValueError("dimension required for an empty hull")
            dim = pts[0].dim
        return cls(dim, pts)

    @classmethod
    def empty(cls, dim: int) -> "Polytope":
        return cls(dim, ())

    @property
    def is_empty(self) -> bool:
        return not self.vertices

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Polytope)
            and self.dim == other.dim
            and self.vertices == other.vertices
        )

    def __hash__(self):
        return hash((self.dim, self.vertices))

    def __repr__(self) -> str:
        return f"Polytope(dim={self.dim}, vertices={len(self.vertices)})"

    def bounding_box(self):
        """Per-coordinate (min, max) tuples; None for the empty region."""
        if self.is_empty:
            return None
        if self._bbox is None:
            mins = list(self.vertices[0].coords)
            maxs = list(self.vertices[0].coords)
            for v in self.vertices[1:]:
                for j, c in enumerate(v.coords):
                    if c < mins[j]:
                        mins[j] = c
                    elif c > maxs[j]:
                        maxs[j] = c
            self._bbox = (tuple(mins), tuple(maxs))
        return self._bbox

    def contains(self, p: Point) -> bool:
        """Exact membership: is p a convex combination of the vertices?"""
        if p.dim != self.dim:
            raise DimensionMismatchError(f"point dim {p.dim}, polytope dim {self.dim}")
        if self.is_empty:
            return False
        box = self.bounding_box()
        for c, lo, hi in zip(p.coords, box[0], box[1]):
            if c < lo or c > hi:
                return False
        if len(self.vertices) == 1:
            return p.coords == self.vertices[0].coords
        return convex_weights(p.coords, [v.coords for v in self.vertices]) is not None

    def weights_for(self, p: Point) -> list | None:
        """Convex weights over the vertex list expressing p, or None."""
        if p.dim != self.dim:
            raise DimensionMismatchError(f"point dim {p.dim}, polytope dim {self.dim}")
        if self.is_empty:
            return None
        return convex_weights(p.coords, [v.coords for v in self.vertices])

    def hrep(self, dim_cap: int | None = 10, vertex_cap: int | None = 64) -> HRep:
        """Facet enumeration (cached).  Caps guard the double description run."""
        if self.is_empty:
            raise ValueError("empty polytope has no finite H-representation here")
        cached = self._hrep
        if cached is not None:
            return cached
        if dim_cap is not None and self.dim > dim_cap:
            raise CapExceededError(f"H-rep dim {self.dim} exceeds cap {dim_cap}")
        if vertex_cap is not None and len(self.vertices) > vertex_cap:
            raise CapExceededError(
                f"H-rep on {len(self.vertices)} vertices exceeds cap {vertex_cap}"
            )
        computed = facet_enumeration([v.coords for v in self.vertices], self.dim)
        self._hrep = computed
        return computed


# ---------------------------------------------------------------------------
# double description


def _normalize_ray(ray):
    """Scale a rational ray to a primitive integer vector (positive scale)."""
    denom_lcm = 1
    for x in ray:
        d = int(x.denominator)
        denom_lcm = denom_lcm // gcd(denom_lcm, d) * d
    ints = [int(x.numerator) * (denom_lcm // int(x.denominator)) for x in ray]
    g = 0
    for v in ints:
        g = gcd(g, abs(v))
    if g > 1:
        ints = [v // g for v in ints]
    return tuple(rat(v) for v in ints)


class NotPointedError(RuntimeError):
    """The cone has a nonzero lineality space."""


def extreme_rays(rows, dim: int):
    """Minimal generators of the pointed cone {x : a.x >= 0 for every row a}.

    Incremental double description: seed with a simplicial subcone from `dim`
    independent rows, then cut with the remaining rows, combining adjacent
    positive/negative ray pairs.  Adjacency is the standard combinatorial test
    on active-constraint sets (tracked as bitmasks over processed rows).
    Raises NotPointedError when the rows do not have full column rank.
    """
    if dim == 0:
        return []
    base = independent_rows(rows, dim)
    if base is None:
        raise NotPointedError("constraint rows do not span the space")
    binv = invert([rows[i] for i in base])
    assert binv is not None
    rays = [_normalize_ray(tuple(binv[i][j] for i in range(dim))) for j in range(dim)]

    order = list(base) + [i for i in range(len(rows)) if i not in set(base)]
    masks = []
    for r in rays:
        mask = 0
        for pos in range(dim):
            if vec_dot(rows[order[pos]], r) == 0:
                mask |= 1 << pos
        masks.append(mask)

    for pos in range(dim, len(order)):
        row = rows[order[pos]]
        vals = [vec_dot(row, r) for r in rays]
        if all(v >= 0 for v in vals):
            for i, v in enumerate(vals):
                if v == 0:
                    masks[i] |= 1 << pos
            continue
        plus = [i for i, v in enumerate(vals) if v > 0]
        zero = [i for i, v in enumerate(vals) if v == 0]
        minus = [i for i, v in enumerate(vals) if v < 0]
        new_rays = []
        new_masks = []
        for i in plus:
            new_rays.append(rays[i])
            new_masks.append(masks[i])
        for i in zero:
            new_rays.append(rays[i])
            new_masks.append(masks[i] | (1 << pos))
        for ip in plus:
            for im in minus:
                common = masks[ip] & masks[im]
                adjacent = True
                for k in range(len(rays)):
                    if k != ip and k != im and masks[k] & common == common:
                        adjacent = False
                        break
                if not adjacent:
                    continue
                combo = tuple(
                    vals[ip] * rm - vals[im] * rp
                    for rp, rm in zip(rays[ip], rays[im])
                )
                combo = _normalize_ray(combo)
                mask = common | (1 << pos)
                new_rays.append(combo)
                new_masks.append(mask)
        rays = new_rays
        masks = new_masks
        if not rays:
            break
    return rays


def _affine_chart(eq_rows, eq_rhs, dim):
    """Solve the equality system; return (x0, free columns, pivot expansion).

    A solution is x[free] = t (chart coordinates), x[pivot] affine in t.
    Returns None when inconsistent.
    """
    if not eq_rows:
        return tuple([ZERO] * dim), list(range(dim)), {}
    aug = [list(r) + [b] for r, b in zip(eq_rows, eq_rhs)]
    red, pivots = rref(aug)
    effective = [p for p in pivots if p < dim]
    for row_i, p in enumerate(pivots):
        if p == dim:
            return None
    free = [c for c in range(dim) if c not in set(effective)]
    x0 = [ZERO] * dim
    expansion = {}
    for r, p in enumerate(effective):
        x0[p] = red[r][dim]
        expansion[p] = [(-red[r][f], fi) for fi, f in enumerate(free) if red[r][f] != 0]
    return tuple(x0), free, expansion


def _chart_point_to_ambient(t, x0, free, expansion, dim):
    x = list(x0)
    for fi, f in enumerate(free):
        x[f] = x[f] + t[fi]
    for p, terms in expansion.items():
        acc = x[p]
        for coef, fi in terms:
            acc += coef * t[fi]
        x[p] = acc
    return tuple(x)


def vertex_enumeration(equalities, inequalities, dim: int):
    """All vertices of {x : Ex = f, Ax <= b}; raises if unbounded.

    The equalities are eliminated first (affine chart on the free columns),
    then the homogenized inequality cone is run through double description.
    An empty list means the system is infeasible.
    """
    chart = _affine_chart([e[0] for e in equalities], [e[1] for e in equalities], dim)
    if chart is None:
        return []
    x0, free, expansion = chart
    k = len(free)

    c_rows = []
    d = []
    for a, b in inequalities:
        shift = vec_dot(a, x0)
        coef = [ZERO] * k
        for fi, f in enumerate(free):
            coef[fi] = coef[fi] + a[f]
        for p, terms in expansion.items():
            if a[p] != 0:
                for tcoef, fi in terms:
                    coef[fi] = coef[fi] + a[p] * tcoef
        rhs = b - shift
        if all(x == 0 for x in coef):
            if rhs < 0:
                return []
            continue
        c_rows.append(tuple(coef))
        d.append(rhs)

    if k == 0:
        return [Point(x0)]
    if not inequalities_feasible(c_rows, d):
        return []

    cone_rows = [tuple([ONE] + [ZERO] * k)]
    for coef, rhs in zip(c_rows, d):
        cone_rows.append(tuple([rhs] + [-x for x in coef]))
    try:
        rays = extreme_rays(cone_rows, k + 1)
    except NotPointedError:
        raise UnboundedRegionError("feasible set has a recession direction")
    pts = []
    for ray in rays:
        t0 = ray[0]
        if t0 == 0:
            raise UnboundedRegionError("feasible set has a recession direction")
        t = [x / t0 for x in ray[1:]]
        pts.append(Point(_chart_point_to_ambient(t, x0, free, expansion, dim)))
    return pts


def facet_enumeration(vertex_coords, dim: int) -> HRep:
    """Affine-hull equalities and facet inequalities of a vertex set.

    Equalities come from the nullspace of the difference matrix; facets are
    extreme rays of the dual cone, computed in chart coordinates so the cone
    is pointed even for flat polytopes.
    """
    v0 = vertex_coords[0]
    diffs = [[a - b for a, b in zip(v, v0)] for v in vertex_coords[1:]]
    normals = nullspace(diffs, dim) if diffs else nullspace([], dim)
    equalities = tuple((n, vec_dot(n, v0)) for n in normals)

    red_rows = [list(n) for n in normals]
    chart = _affine_chart(red_rows, [vec_dot(n, v0) for n in normals], dim)
    assert chart is not None
    _, free, _ = chart
    k = len(free)
    if k == 0:
        return HRep(equalities, ())

    dual_rows = [tuple([ONE] + [v[f] for f in free]) for v in vertex_coords]
    rays = extreme_rays(dual_rows, k + 1)
    inequalities = []
    for ray in rays:
        a_chart = ray[1:]
        if all(x == 0 for x in a_chart):
            continue
        coef = [ZERO] * dim
        for fi, f in enumerate(free):
            coef[f] = -a_chart[fi]
        inequalities.append((tuple(coef), ray[0]))
    inequalities.sort()
    return HRep(equalities, tuple(inequalities))
