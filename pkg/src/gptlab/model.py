"""State spaces in canonical embedding, effects and measurements.

A state space of ambient dimension ``m`` stores its normalized states as a
polytope at height 1 in the last coordinate; the order unit ``u`` is the
last-coordinate covector. Effects are covectors ``f`` with
``0 <= f(w) <= 1`` on every state vertex ``w``.

Purity is decided by the tight-constraint rank: ``f`` is a vertex of the
effect polytope iff the state vertices with ``f(w)`` in ``{0, 1}`` span the
whole space. The effect polytope itself is enumerated by solving
``f(w_i) = b_i`` for every basis of state vertices and every 0/1 pattern
``b``, which visits exactly the intersections of ``m`` independent bounding
hyperplanes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Iterable, Sequence, Union

import sympy

from .errors import ApproximationCollapse, TooLarge, UsageError
from .exact.approx import approx_rational
from .exact.linalg import inverse, rank
from .exact.lp import LinearProgram, Optimal, lp_maximize
from .exact.rational import RatVec, RationalLike, dot, sub, to_rational, unit, vec
from .polytope import Face, VPolytope, _chart, _from_vertices, dim, facets, from_points, is_face

PURE_EFFECT_LIMIT = 24
DEFAULT_EPS = Fraction(1, 10**9)


@dataclass(frozen=True, order=True)
class Effect:
    covector: RatVec

    def __post_init__(self):
        object.__setattr__(self, "covector", vec(self.covector))

    def __call__(self, state: Sequence[Fraction]) -> Fraction:
        return evaluate(self, state)

    def __len__(self) -> int:
        return len(self.covector)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.covector)


@dataclass(frozen=True)
class Measurement:
    """Nonzero effects summing exactly to the last-coordinate order unit."""

    effects: tuple[Effect, ...]

    def __post_init__(self):
        effects = tuple(e if isinstance(e, Effect) else Effect(e) for e in self.effects)
        object.__setattr__(self, "effects", effects)
        if not effects:
            raise UsageError("a measurement needs at least one effect")
        m = len(effects[0])
        if any(len(e) != m for e in effects):
            raise UsageError("measurement effects have different lengths")
        if any(e.is_zero() for e in effects):
            raise UsageError("measurements may not contain the zero effect")
        total = tuple(sum((e.covector[k] for e in effects), Fraction(0)) for k in range(m))
        if total != unit(m, m - 1):
            raise UsageError("measurement effects do not sum to the order unit")

    def __len__(self) -> int:
        return len(self.effects)

    def __iter__(self):
        return iter(self.effects)

    def probabilities(self, state: Sequence[Fraction]) -> tuple[Fraction, ...]:
        return tuple(evaluate(e, state) for e in self.effects)


@dataclass(frozen=True)
class StateSpace:
    """Normalized states ``omega`` at height 1; ``dim(omega) = ambient_dim - 1``."""

    ambient_dim: int
    omega: VPolytope
    descriptor: tuple[tuple[str, str], ...] = field(default=(), compare=False)
    _cache: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    def __post_init__(self):
        if self.omega.ambient_dim != self.ambient_dim:
            raise UsageError("state polytope lives in the wrong dimension")
        for v in self.omega.vertices:
            if v[-1] != 1:
                raise UsageError(f"state {v} is not normalized: last coordinate must be 1")
        if dim(self.omega) != self.ambient_dim - 1:
            raise UsageError("state cone is not generating: dim(omega) must equal ambient_dim - 1")

    @property
    def u(self) -> Effect:
        return Effect(unit(self.ambient_dim, self.ambient_dim - 1))

    @property
    def vertices(self) -> tuple[RatVec, ...]:
        return self.omega.vertices

    def describe(self) -> dict[str, str]:
        return dict(self.descriptor)


@dataclass(frozen=True)
class EffectPolytope:
    polytope: VPolytope

    @property
    def vertices(self) -> tuple[RatVec, ...]:
        return self.polytope.vertices


@dataclass(frozen=True)
class PureEffect:
    effect: Effect


@dataclass(frozen=True)
class OnlyImpure:
    effect: Effect


@dataclass(frozen=True)
class NoEffect:
    pass


def _descriptor(**items) -> tuple[tuple[str, str], ...]:
    return tuple((k, str(v)) for k, v in items.items())


def state_space_from_polytope(q: VPolytope, descriptor=()) -> StateSpace:
    """Express ``q`` in coordinates of its affine hull and lift to height 1."""
    cols = _chart(q).columns
    lifted = [tuple(v[c] for c in cols) + (Fraction(1),) for v in q.vertices]
    m = len(cols) + 1
    return StateSpace(m, _from_vertices(m, lifted), tuple(descriptor))


def classical_model(d: int) -> StateSpace:
    """Simplex with ``d`` vertices: ``0, e_1, ..., e_{d-1}`` lifted to height 1."""
    if d < 1:
        raise UsageError("classical_model needs d >= 1")
    desc = _descriptor(kind="classical", d=d)
    if d == 1:
        return StateSpace(1, VPolytope(1, ((Fraction(1),),)), desc)
    pts = [tuple(Fraction(int(i == j)) for j in range(d - 1)) for i in range(-1, d - 1)]
    return state_space_from_polytope(_from_vertices(d - 1, pts), desc)


def _polygon_expressions(n: int):
    radius = sympy.sqrt(1 / sympy.cos(sympy.pi / n))
    for i in range(1, n + 1):
        angle = 2 * sympy.pi * i / n
        yield radius * sympy.cos(angle), radius * sympy.sin(angle)


def polygon_points(n: int, eps: RationalLike = DEFAULT_EPS) -> list[RatVec]:
    """Approximated states ``w_1..w_n`` of the regular ``n``-gon model, in label order."""
    if n < 3:
        raise UsageError("polygon models need n >= 3")
    eps = to_rational(eps)
    if eps <= 0:
        raise UsageError("eps must be positive")
    return [
        (approx_rational(x, eps), approx_rational(y, eps), Fraction(1))
        for x, y in _polygon_expressions(n)
    ]


def polygon_model(n: int, eps: RationalLike = DEFAULT_EPS) -> StateSpace:
    pts = polygon_points(n, eps)
    omega = from_points(3, pts)
    if len(omega.vertices) != n or dim(omega) != 2:
        raise ApproximationCollapse(
            f"approximating the {n}-gon at eps={to_rational(eps)} left {len(omega.vertices)} extreme points"
        )
    return StateSpace(3, omega, _descriptor(kind="polygon", n=n, eps=to_rational(eps)))


def polygon_labels(n: int, eps: RationalLike = DEFAULT_EPS) -> list[int]:
    """Canonical vertex index of each labelled state ``w_1..w_n`` (0-based list)."""
    pts = polygon_points(n, eps)
    order = sorted(pts)
    return [order.index(p) for p in pts]


def square_model() -> StateSpace:
    """Rational square ``(+-1, 0), (0, +-1)``, affinely equivalent to the 4-gon."""
    pts = [(1, 0), (0, 1), (-1, 0), (0, -1)]
    lifted = [tuple(Fraction(c) for c in p) + (Fraction(1),) for p in pts]
    return StateSpace(3, _from_vertices(3, lifted), _descriptor(kind="square"))


def square_labels() -> list[int]:
    """Canonical vertex index of each labelled square state ``w_1..w_4``.

    The labels run counterclockwise from ``(0, 1)``.
    """
    return [2, 0, 1, 3]


def _as_effect(f: Union[Effect, Iterable]) -> Effect:
    return f if isinstance(f, Effect) else Effect(f)


def evaluate(f: Union[Effect, Iterable], state: Sequence[Fraction]) -> Fraction:
    cov = _as_effect(f).covector
    if len(cov) != len(state):
        raise UsageError(f"effect of length {len(cov)} applied to a state of length {len(state)}")
    return dot(cov, state)


def _check_dim(s: StateSpace, f: Effect) -> None:
    if len(f) != s.ambient_dim:
        raise UsageError(f"effect has length {len(f)}, state space has dimension {s.ambient_dim}")


def is_effect(s: StateSpace, f: Union[Effect, Iterable]) -> bool:
    f = _as_effect(f)
    _check_dim(s, f)
    return all(0 <= dot(f.covector, w) <= 1 for w in s.vertices)


def is_pure(s: StateSpace, f: Union[Effect, Iterable]) -> bool:
    f = _as_effect(f)
    if not is_effect(s, f):
        return False
    tight = [w for w in s.vertices if dot(f.covector, w) in (0, 1)]
    return bool(tight) and rank(tight) == s.ambient_dim


def effect_polytope(s: StateSpace) -> EffectPolytope:
    def compute():
        m = s.ambient_dim
        verts = s.vertices
        found: set[RatVec] = set()
        for subset in combinations(range(len(verts)), m):
            w = [verts[i] for i in subset]
            if rank(w) < m:
                continue
            inv = inverse(w)  # columns give the dual basis
            for bits in product((0, 1), repeat=m):
                f = tuple(
                    sum((inv[r][k] for k in range(m) if bits[k]), Fraction(0)) for r in range(m)
                )
                if f not in found and all(0 <= dot(f, v) <= 1 for v in verts):
                    found.add(f)
        return EffectPolytope(_from_vertices(m, found))

    if "effects" not in s._cache:
        s._cache["effects"] = compute()
    return s._cache["effects"]


def pure_effects(s: StateSpace) -> list[Effect]:
    return [Effect(v) for v in effect_polytope(s).vertices]


def complement(s: StateSpace, f: Union[Effect, Iterable]) -> Effect:
    f = _as_effect(f)
    if not is_effect(s, f):
        raise UsageError("complement needs an effect of the state space")
    return Effect(sub(s.u.covector, f.covector))


def _ones(s: StateSpace, f: Effect) -> tuple[int, ...]:
    return tuple(i for i, w in enumerate(s.vertices) if dot(f.covector, w) == 1)


def face_of_effect(s: StateSpace, f: Union[Effect, Iterable]) -> Face | None:
    """Face of states on which ``f`` is 1, or ``None`` if no state attains 1."""
    f = _as_effect(f)
    if not is_effect(s, f):
        raise UsageError("face_of_effect needs an effect of the state space")
    idx = _ones(s, f)
    if not idx:
        return None
    face = is_face(s.omega, idx)
    if face is None:
        raise AssertionError("the maximum set of an effect must be a face")
    return face


def opposite_face(s: StateSpace, f: Union[Effect, Iterable]) -> Face | None:
    f = _as_effect(f)
    if not is_pure(s, f):
        raise UsageError("opposite_face needs a pure effect")
    return face_of_effect(s, complement(s, f))


def _facet_or_error(s: StateSpace, face: Union[Face, Iterable[int]]) -> Face:
    idx = face.vertex_indices if isinstance(face, Face) else tuple(sorted(set(face)))
    if dim(s.omega) == 0:
        raise UsageError("a single-state space has no facets")
    for g in facets(s.omega):
        if g.vertex_indices == idx:
            return g
    raise UsageError(f"{idx} is not a facet of the state space")


def homogenized(s: StateSpace, face: Face) -> RatVec:
    """Linear functional ``offset * u - normal``: nonnegative on the cone, zero on ``face``."""
    h = face.supporting
    return tuple(h.offset * uk - nk for uk, nk in zip(s.u.covector, h.normal))


def facet_effect(s: StateSpace, facet: Union[Face, Iterable[int]]) -> Effect:
    """Pure effect equal to 1 exactly on ``facet``.

    Built as ``u - g / max g`` from the facet's homogenized witness ``g``;
    the result is checked for purity and for its face.
    """
    facet = _facet_or_error(s, facet)
    g = homogenized(s, facet)
    top = max(dot(g, w) for w in s.vertices)
    f = Effect(tuple(uk - gk / top for uk, gk in zip(s.u.covector, g)))
    if not is_pure(s, f) or _ones(s, f) != facet.vertex_indices:
        raise AssertionError("facet effect failed its purity or face check")
    return f


def find_effect_for_face(s: StateSpace, face: Union[Face, Iterable[int]]) -> Union[PureEffect, OnlyImpure, NoEffect]:
    """Look for effects whose associated face is exactly ``face``.

    Maximizes the smallest gap ``1 - f(w)`` over states outside the face;
    a positive optimum means some effect isolates the face.
    """
    idx = face.vertex_indices if isinstance(face, Face) else tuple(sorted(set(face)))
    if not idx or any(not 0 <= i < len(s.vertices) for i in idx):
        raise UsageError("find_effect_for_face needs a nonempty set of vertex indices")
    m = s.ambient_dim
    inside = set(idx)
    # Variables: f (m entries) then the gap t.
    eqs, ineqs = [], []
    for i, w in enumerate(s.vertices):
        row = list(w) + [0]
        ineqs.append(([-x for x in row], 0))
        ineqs.append((row, 1))
        if i in inside:
            eqs.append((row, 1))
        else:
            ineqs.append((list(w) + [1], 1))
    ineqs.append(([0] * m + [1], 1))
    objective = [0] * m + [1]
    res = lp_maximize(LinearProgram(m + 1, eqs, ineqs, objective))
    if not isinstance(res, Optimal) or res.value <= 0:
        return NoEffect()
    for g in pure_effects(s):
        if _ones(s, g) == idx:
            return PureEffect(g)
    return OnlyImpure(Effect(res.point[:m]))


def decompositions(
    s: StateSpace, target: Sequence[Fraction], effects: Sequence[Effect]
) -> list[tuple[int, ...]]:
    """Index subsets of ``effects`` whose covectors sum exactly to ``target``.

    Depth-first in index order; a branch is cut as soon as the residual is
    negative on some state, since every effect is nonnegative on states.
    """
    verts = s.vertices
    found: list[tuple[int, ...]] = []

    def dfs(start: int, residual: RatVec, chosen: list[int]):
        if all(x == 0 for x in residual):
            found.append(tuple(chosen))
            return
        for j in range(start, len(effects)):
            nxt = sub(residual, effects[j].covector)
            if all(dot(nxt, w) >= 0 for w in verts):
                chosen.append(j)
                dfs(j + 1, nxt, chosen)
                chosen.pop()

    dfs(0, tuple(target), [])
    return found


def enumerate_pure_measurements(s: StateSpace, limit: int = PURE_EFFECT_LIMIT) -> list[Measurement]:
    pure = pure_effects(s)
    if len(pure) > limit:
        raise TooLarge("pure effects", len(pure), limit)
    nonzero = [e for e in pure if not e.is_zero()]
    return [
        Measurement(tuple(nonzero[j] for j in subset))
        for subset in decompositions(s, s.u.covector, nonzero)
    ]
