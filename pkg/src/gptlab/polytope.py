"""Exact V-representation polytopes and their face lattices.

A :class:`VPolytope` stores its extreme points sorted lexicographically, so
two polytopes are equal exactly when their vertex tuples are equal. Facets
are found by brute force over affinely independent vertex subsets inside
an affine chart of the polytope; the face lattice is the intersection
closure of the facets.

The pyramid test counts vertices off a facet ``B``: if exactly one vertex
``a`` lies outside ``B`` then every vertex of ``P`` is in ``B + {a}``, hence
``P = conv(B u {a})``; conversely a pyramid over ``B`` has only its apex
off ``B``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence, Union

from .errors import NoFacets, TooLarge, UsageError
from .exact.linalg import nullspace, pivot_columns, rank, solve_linear_system
from .exact.lp import Feasible, LinearProgram, lp_feasible
from .exact.rational import RatMat, RatVec, dot, primitive, sub, vec

EQUIVALENCE_VERTEX_LIMIT = 12


@dataclass(frozen=True)
class HalfSpace:
    """The set ``{v : normal . v <= offset}``."""

    normal: RatVec
    offset: Fraction

    def __post_init__(self):
        if all(x == 0 for x in self.normal):
            raise UsageError("half-space normal must be nonzero")

    def value(self, x: Sequence[Fraction]) -> Fraction:
        return dot(self.normal, x)

    def contains(self, x: Sequence[Fraction]) -> bool:
        return self.value(x) <= self.offset

    def is_tight(self, x: Sequence[Fraction]) -> bool:
        return self.value(x) == self.offset


@dataclass(frozen=True)
class Face:
    vertex_indices: tuple[int, ...]
    dim: int
    supporting: HalfSpace | None = None

    def __contains__(self, i: int) -> bool:
        return i in self.vertex_indices

    @property
    def index_set(self) -> frozenset[int]:
        return frozenset(self.vertex_indices)


@dataclass(frozen=True)
class FaceLattice:
    dimension: int
    faces: tuple[tuple[Face, ...], ...]

    def f_vector(self) -> tuple[int, ...]:
        return tuple(len(level) for level in self.faces)

    def all_faces(self) -> list[Face]:
        return [f for level in self.faces for f in level]

    def find(self, indices: Iterable[int]) -> Face | None:
        key = tuple(sorted(set(indices)))
        for level in self.faces:
            for f in level:
                if f.vertex_indices == key:
                    return f
        return None

    def facets_of(self, face: Face) -> list[Face]:
        """Faces one dimension lower contained in ``face``, in canonical order."""
        if face.dim == 0:
            return []
        s = face.index_set
        return [g for g in self.faces[face.dim - 1] if g.index_set <= s]


@dataclass(frozen=True)
class Inside:
    """Convex coefficients ``(vertex index, weight)`` reproducing the point."""

    coefficients: tuple[tuple[int, Fraction], ...]


@dataclass(frozen=True)
class Outside:
    separator: HalfSpace


@dataclass(frozen=True)
class Pyramidal:
    apex: int


@dataclass(frozen=True)
class PyramidalReport:
    uniform: bool
    per_facet: tuple[tuple[Face, int | None], ...]

    def __bool__(self) -> bool:
        return self.uniform


@dataclass(frozen=True)
class AffineMap:
    """``x -> linear x + translation`` together with the vertex bijection it realizes."""

    linear: RatMat
    translation: RatVec
    vertex_map: tuple[int, ...]

    def __call__(self, x: Sequence[Fraction]) -> RatVec:
        return tuple(dot(row, x) + t for row, t in zip(self.linear, self.translation))


@dataclass(frozen=True)
class Equivalent:
    map: AffineMap


@dataclass(frozen=True)
class _Chart:
    """Coordinate projection that is injective on the affine hull."""

    origin: RatVec
    columns: tuple[int, ...]

    def project(self, x: Sequence[Fraction]) -> RatVec:
        return tuple(x[c] for c in self.columns)


@dataclass(frozen=True, eq=True)
class VPolytope:
    ambient_dim: int
    vertices: tuple[RatVec, ...]
    _cache: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    def __post_init__(self):
        if self.ambient_dim < 1:
            raise UsageError("ambient dimension must be positive")
        if not self.vertices:
            raise UsageError("a polytope needs at least one vertex")
        for v in self.vertices:
            if len(v) != self.ambient_dim:
                raise UsageError(f"vertex {v} does not have dimension {self.ambient_dim}")

    @classmethod
    def from_points(cls, ambient_dim: int, points: Iterable[Iterable]) -> "VPolytope":
        return from_points(ambient_dim, points)

    @property
    def dim(self) -> int:
        return dim(self)

    def __len__(self) -> int:
        return len(self.vertices)


def _cached(p: VPolytope, key: str, compute):
    if key not in p._cache:
        p._cache[key] = compute()
    return p._cache[key]


def _is_extreme(points: Sequence[RatVec], i: int) -> bool:
    """Point ``i`` is extreme iff it is not a convex combination of the others."""
    others = [p for j, p in enumerate(points) if j != i]
    if not others:
        return True
    k = len(others)
    m = len(points[i])
    eqs = [([o[r] for o in others], points[i][r]) for r in range(m)]
    eqs.append(([1] * k, 1))
    ineqs = [([-1 if c == j else 0 for c in range(k)], 0) for j in range(k)]
    return not isinstance(lp_feasible(LinearProgram(k, eqs, ineqs)), Feasible)


def from_points(ambient_dim: int, points: Iterable[Iterable]) -> VPolytope:
    """Canonical polytope spanned by ``points``: extreme points only, sorted."""
    pts = sorted({vec(p) for p in points})
    if not pts:
        raise UsageError("from_points needs at least one point")
    for p in pts:
        if len(p) != ambient_dim:
            raise UsageError(f"point {p} does not have dimension {ambient_dim}")
    keep = [p for i, p in enumerate(pts) if _is_extreme(pts, i)]
    return VPolytope(ambient_dim, tuple(keep))


def _from_vertices(ambient_dim: int, vertices: Iterable[RatVec]) -> VPolytope:
    # Caller guarantees that every point is extreme.
    return VPolytope(ambient_dim, tuple(sorted(set(vertices))))


def _chart(p: VPolytope) -> _Chart:
    def compute():
        v0 = p.vertices[0]
        diffs = [sub(v, v0) for v in p.vertices[1:]]
        cols = tuple(pivot_columns(diffs)) if diffs else ()
        return _Chart(v0, cols)

    return _cached(p, "chart", compute)


def dim(p: VPolytope) -> int:
    return len(_chart(p).columns)


def affine_hull_constraints(p: VPolytope) -> list[tuple[RatVec, Fraction]]:
    """Equalities ``(a, b)`` with ``a . x = b`` cutting out ``aff(P)``."""
    v0 = p.vertices[0]
    diffs = [sub(v, v0) for v in p.vertices[1:]]
    kernel = nullspace(diffs, p.ambient_dim) if diffs else nullspace([], p.ambient_dim)
    return [(a, dot(a, v0)) for a in kernel]


def _subset_dim(points: Sequence[RatVec]) -> int:
    if len(points) <= 1:
        return 0
    return rank([sub(q, points[0]) for q in points[1:]])


def facets(p: VPolytope) -> list[Face]:
    """All facets, sorted by vertex indices, each with an outward witness."""

    def compute():
        d = dim(p)
        if d == 0:
            raise NoFacets("a 0-dimensional polytope has no facets")
        chart = _chart(p)
        pts = [chart.project(v) for v in p.vertices]
        n = len(pts)
        found: dict[tuple[int, ...], HalfSpace] = {}
        for subset in combinations(range(n), d):
            if any(set(subset) <= set(k) for k in found):
                continue
            base = pts[subset[0]]
            diffs = [sub(pts[i], base) for i in subset[1:]]
            kernel = nullspace(diffs, d) if diffs else nullspace([], d)
            if len(kernel) != 1:
                continue
            a = primitive(kernel[0])
            b = dot(a, base)
            values = [dot(a, q) for q in pts]
            if all(v <= b for v in values):
                pass
            elif all(v >= b for v in values):
                a, b = tuple(-x for x in a), -b
                values = [-v for v in values]
            else:
                continue
            tight = tuple(i for i, v in enumerate(values) if v == b)
            if len(tight) == n:
                continue
            normal = [Fraction(0)] * p.ambient_dim
            for k, c in enumerate(chart.columns):
                normal[c] = a[k]
            found[tight] = HalfSpace(tuple(normal), b)
        return [Face(t, d - 1, h) for t, h in sorted(found.items())]

    return list(_cached(p, "facets", compute))


def _sum_halfspaces(hs: Sequence[HalfSpace]) -> HalfSpace:
    n = len(hs[0].normal)
    normal = tuple(sum((h.normal[k] for h in hs), Fraction(0)) for k in range(n))
    return HalfSpace(normal, sum((h.offset for h in hs), Fraction(0)))


def face_lattice(p: VPolytope) -> FaceLattice:
    def compute():
        d = dim(p)
        everything = tuple(range(len(p.vertices)))
        levels: list[list[Face]] = [[] for _ in range(d + 1)]
        levels[d].append(Face(everything, d, None))
        if d == 0:
            return FaceLattice(0, tuple(tuple(level) for level in levels))
        fs = facets(p)
        facet_sets = [f.index_set for f in fs]
        seen: set[frozenset[int]] = set(facet_sets)
        frontier = list(facet_sets)
        while frontier:
            nxt = []
            for s in frontier:
                for t in facet_sets:
                    u = s & t
                    if u and u not in seen:
                        seen.add(u)
                        nxt.append(u)
            frontier = nxt
        for s in seen:
            idx = tuple(sorted(s))
            fd = _subset_dim([p.vertices[i] for i in idx])
            witness = _sum_halfspaces([f.supporting for f in fs if s <= f.index_set])
            levels[fd].append(Face(idx, fd, witness))
        return FaceLattice(d, tuple(tuple(sorted(level, key=lambda f: f.vertex_indices)) for level in levels))

    return _cached(p, "lattice", compute)


def f_vector(p: VPolytope) -> tuple[int, ...]:
    return face_lattice(p).f_vector()


def _as_index_set(p: VPolytope, face: Union[Face, Iterable[int]]) -> tuple[int, ...]:
    idx = face.vertex_indices if isinstance(face, Face) else tuple(sorted(set(face)))
    if any(not 0 <= i < len(p.vertices) for i in idx):
        raise UsageError(f"vertex index out of range in {idx}")
    return idx


def is_face(p: VPolytope, s: Union[Face, Iterable[int]]) -> Face | None:
    """Return the face with vertex set ``s`` (with a witness), or ``None``.

    Solves for ``(a, b)`` with ``a . v = b`` on ``s`` and ``a . v <= b - 1``
    elsewhere; the constraints are homogeneous in ``(a, b)`` so the gap of 1
    only fixes a scale and strict separation is decided exactly.
    """
    idx = _as_index_set(p, s)
    if not idx:
        raise UsageError("is_face needs a nonempty vertex set")
    fd = _subset_dim([p.vertices[i] for i in idx])
    if len(idx) == len(p.vertices):
        return Face(idx, fd, None)
    m = p.ambient_dim
    inside = set(idx)
    eqs = [(list(p.vertices[i]) + [-1], 0) for i in idx]
    ineqs = [(list(p.vertices[j]) + [-1], -1) for j in range(len(p.vertices)) if j not in inside]
    res = lp_feasible(LinearProgram(m + 1, eqs, ineqs))
    if not isinstance(res, Feasible):
        return None
    w = primitive(res.witness)
    return Face(idx, fd, HalfSpace(w[:m], w[m]))


def facet_chain(p: VPolytope, face: Union[Face, Iterable[int]]) -> list[Face]:
    """Chain ``P = F_0 > F_1 > ... > F_k = face``, each a facet of the previous.

    At every step the lexicographically least facet containing ``face`` is
    taken.
    """
    lattice = face_lattice(p)
    target = lattice.find(_as_index_set(p, face))
    if target is None:
        raise UsageError("facet_chain: the given vertex set is not a face")
    top = lattice.faces[lattice.dimension][0]
    if target == top:
        raise UsageError("facet_chain needs a proper face")
    chain = [top]
    current = top
    while current.dim > target.dim:
        current = next(g for g in lattice.facets_of(current) if target.index_set <= g.index_set)
        chain.append(current)
    return chain


def is_simplex(p: VPolytope) -> bool:
    return len(p.vertices) == dim(p) + 1


def _facet_or_error(p: VPolytope, b: Union[Face, Iterable[int]]) -> Face:
    idx = _as_index_set(p, b)
    try:
        fs = facets(p)
    except NoFacets:
        raise UsageError("a 0-dimensional polytope has no facets") from None
    for f in fs:
        if f.vertex_indices == idx:
            return f
    raise UsageError(f"{idx} is not a facet")


def is_pyramidal_at(p: VPolytope, b: Union[Face, Iterable[int]]) -> Pyramidal | None:
    facet = _facet_or_error(p, b)
    outside = [i for i in range(len(p.vertices)) if i not in facet.index_set]
    return Pyramidal(outside[0]) if len(outside) == 1 else None


def is_uniformly_pyramidal(p: VPolytope) -> PyramidalReport:
    if dim(p) == 0:
        return PyramidalReport(True, ())
    rows = []
    for f in facets(p):
        r = is_pyramidal_at(p, f)
        rows.append((f, r.apex if r else None))
    return PyramidalReport(all(apex is not None for _, apex in rows), tuple(rows))


def _caratheodory(points: Sequence[RatVec], coeffs: dict[int, Fraction]) -> dict[int, Fraction]:
    """Shrink the support of a convex combination to affinely independent points."""
    coeffs = {i: c for i, c in coeffs.items() if c != 0}
    while True:
        support = sorted(coeffs)
        if len(support) <= 1 or _subset_dim([points[i] for i in support]) == len(support) - 1:
            return coeffs
        # Affine dependence: sum mu_i p_i = 0 with sum mu_i = 0, mu != 0.
        rows = [[points[i][r] for i in support] for r in range(len(points[0]))]
        rows.append([Fraction(1)] * len(support))
        mu = nullspace(rows)[0]
        if not any(x > 0 for x in mu):
            mu = tuple(-x for x in mu)
        t = min(coeffs[i] / m for i, m in zip(support, mu) if m > 0)
        new = {}
        for i, m in zip(support, mu):
            c = coeffs[i] - t * m
            if c != 0:
                new[i] = c
        coeffs = new


def contains(p: VPolytope, x: Iterable) -> Union[Inside, Outside]:
    """Exact membership with a support-reduced certificate either way."""
    x = vec(x)
    if len(x) != p.ambient_dim:
        raise UsageError("point dimension differs from ambient dimension")
    k = len(p.vertices)
    m = p.ambient_dim
    eqs = [([v[r] for v in p.vertices], x[r]) for r in range(m)]
    eqs.append(([1] * k, 1))
    ineqs = [([-1 if c == j else 0 for c in range(k)], 0) for j in range(k)]
    res = lp_feasible(LinearProgram(k, eqs, ineqs))
    if isinstance(res, Feasible):
        coeffs = _caratheodory(p.vertices, dict(enumerate(res.witness)))
        return Inside(tuple(sorted(coeffs.items())))
    y = res.certificate.equality_multipliers
    # Row r reads -y_r . v <= t on every vertex and is violated by x.
    normal = tuple(-c for c in y[:m])
    return Outside(HalfSpace(normal, y[m]))


def _vertex_degrees(p: VPolytope) -> list[int]:
    lattice = face_lattice(p)
    deg = [0] * len(p.vertices)
    if lattice.dimension >= 1:
        for e in lattice.faces[1]:
            for i in e.vertex_indices:
                deg[i] += 1
    return deg


def affinely_equivalent(
    p: VPolytope, q: VPolytope, limit: int = EQUIVALENCE_VERTEX_LIMIT
) -> Equivalent | None:
    """Search for an affine bijection ``aff(P) -> aff(Q)`` carrying vertices to vertices."""
    for poly in (p, q):
        if len(poly.vertices) > limit:
            raise TooLarge("vertices for affine equivalence", len(poly.vertices), limit)
    if len(p.vertices) != len(q.vertices) or dim(p) != dim(q):
        return None
    if f_vector(p) != f_vector(q):
        return None
    deg_p, deg_q = _vertex_degrees(p), _vertex_degrees(q)
    if sorted(deg_p) != sorted(deg_q):
        return None

    d = dim(p)
    cp, cq = _chart(p), _chart(q)
    pp = [cp.project(v) for v in p.vertices]
    qq = [cq.project(v) for v in q.vertices]
    q_lookup = {v: i for i, v in enumerate(qq)}
    n = len(pp)
    basis = _affine_basis(pp)
    order = basis + [i for i in range(n) if i not in basis]

    def solve_map(images: Sequence[int]):
        # Unknowns: L (d x d, row-major) and y (d); L p_b + y = q_image.
        a_rows, rhs = [], []
        for b, img in zip(basis, images):
            for r in range(d):
                row = [Fraction(0)] * (d * d + d)
                for c in range(d):
                    row[r * d + c] = pp[b][c]
                row[d * d + r] = Fraction(1)
                a_rows.append(row)
                rhs.append(qq[img][r])
        if not a_rows:
            return (), ()
        sol = solve_linear_system(a_rows, rhs)
        if sol is None:
            return None
        z = sol.particular
        lin = tuple(tuple(z[r * d: (r + 1) * d]) for r in range(d))
        return lin, tuple(z[d * d:])

    assignment: dict[int, int] = {}
    used: set[int] = set()

    def search(pos: int):
        if pos == len(basis):
            mp = solve_map([assignment[b] for b in basis])
            if mp is None:
                return None
            lin, y = mp
            if d and rank(lin) < d:
                return None
            extra = {}
            taken = set(used)
            for i in order[len(basis):]:
                img = tuple(dot(row, pp[i]) + t for row, t in zip(lin, y)) if d else ()
                j = q_lookup.get(img)
                if j is None or j in taken or deg_q[j] != deg_p[i]:
                    return None
                extra[i] = j
                taken.add(j)
            full = dict(assignment)
            full.update(extra)
            return lin, y, full
        i = order[pos]
        for j in range(n):
            if j in used or deg_q[j] != deg_p[i]:
                continue
            assignment[i] = j
            used.add(j)
            found = search(pos + 1)
            if found:
                return found
            del assignment[i]
            used.discard(j)
        return None

    found = search(0)
    if not found:
        return None
    lin, y, full = found
    return Equivalent(_ambient_map(p, q, cp, cq, lin, y, full))


def _affine_basis(points: Sequence[RatVec]) -> list[int]:
    chosen = [0]
    for i in range(1, len(points)):
        trial = [points[j] for j in chosen] + [points[i]]
        if _subset_dim(trial) == len(trial) - 1:
            chosen.append(i)
    return chosen


def _ambient_map(p, q, cp, cq, lin, y, full) -> AffineMap:
    """Express the chart-level map in ambient coordinates and verify it."""
    d = len(cp.columns)
    mp, mq = p.ambient_dim, q.ambient_dim
    # Chart inverse on aff(Q): z -> q0 + M (z - proj(q0)), M solved from Q's vertices.
    q0 = q.vertices[0]
    z0 = cq.project(q0)
    if d:
        diffs_z = [sub(cq.project(v), z0) for v in q.vertices[1:]]
        diffs_x = [sub(v, q0) for v in q.vertices[1:]]
        # Rows of M: for each ambient coordinate r, M[r] . dz = dx_r for all vertex diffs.
        lift = []
        for r in range(mq):
            sol = solve_linear_system(diffs_z, [dx[r] for dx in diffs_x])
            lift.append(sol.particular)
    else:
        lift = [tuple() for _ in range(mq)]
    # x -> proj_P(x) -> lin z + y -> q0 + M (w - z0)
    sel = [[Fraction(int(c == cp.columns[k])) for c in range(mp)] for k in range(d)]
    lin_sel = [[sum((lin[r][k] * sel[k][c] for k in range(d)), Fraction(0)) for c in range(mp)] for r in range(d)]
    linear = tuple(
        tuple(sum((lift[r][k] * lin_sel[k][c] for k in range(d)), Fraction(0)) for c in range(mp))
        for r in range(mq)
    )
    shift = [y[k] - z0[k] for k in range(d)]
    translation = tuple(q0[r] + sum((lift[r][k] * shift[k] for k in range(d)), Fraction(0)) for r in range(mq))
    vmap = tuple(full[i] for i in range(len(p.vertices)))
    amap = AffineMap(linear, translation, vmap)
    for i, v in enumerate(p.vertices):
        if amap(v) != q.vertices[vmap[i]]:
            raise AssertionError("affine map witness does not reproduce the vertex bijection")
    return amap
