"""Decision procedures for distinguishability and the four postulates.

Every verdict carries an exact witness: a measurement for positive answers,
a Farkas certificate or an offending vertex for negative ones.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence, Union

from .errors import InternalInconsistency, NotAnAssociatedFace, TooLarge, UsageError
from .exact.linalg import independent_rows, inverse, rank, solve_linear_system
from .exact.lp import FarkasCertificate, Feasible, LinearProgram, lp_feasible
from .exact.rational import RatMat, RatVec, dot, matvec, transpose, vec
from .model import (
    Effect,
    Measurement,
    PureEffect,
    StateSpace,
    _facet_or_error,
    complement,
    enumerate_pure_measurements,
    face_of_effect,
    facet_effect,
    find_effect_for_face,
    homogenized,
    is_pure,
    pure_effects,
)
from .polytope import (
    Face,
    _from_vertices,
    _chart,
    contains,
    dim,
    face_lattice,
    facet_chain,
    facets,
    is_simplex,
    is_uniformly_pyramidal,
    Inside,
)

DISTINGUISH_VERTEX_LIMIT = 12
DISCRIMINATION_VERTEX_LIMIT = 10
SCAN_VERTEX_LIMIT = 10


def vertex_limit(default: int) -> int:
    """Enumeration limit on vertex counts; ``GPTLAB_LIMIT_VERTICES`` overrides it."""
    raw = os.environ.get("GPTLAB_LIMIT_VERTICES")
    if raw is None:
        return default
    try:
        value = int(raw)
    except ValueError:
        raise UsageError(f"GPTLAB_LIMIT_VERTICES must be an integer, got {raw!r}") from None
    if value <= 0:
        raise UsageError("GPTLAB_LIMIT_VERTICES must be positive")
    return value


def _check_limit(s: StateSpace, what: str, default: int) -> None:
    limit = vertex_limit(default)
    if len(s.vertices) > limit:
        raise TooLarge(what, len(s.vertices), limit)


# Distinguishability ---------------------------------------------------------

StateGroup = Sequence[Union[int, Sequence]]


@dataclass(frozen=True)
class Distinguishable:
    measurement: Measurement

    def __bool__(self) -> bool:
        return True


@dataclass(frozen=True)
class NotDistinguishable:
    certificate: FarkasCertificate

    def __bool__(self) -> bool:
        return False


DistinguishabilityResult = Union[Distinguishable, NotDistinguishable]


def _resolve_group(s: StateSpace, group: StateGroup) -> tuple[RatVec, ...]:
    if not group:
        raise UsageError("every group of states must be nonempty")
    out = []
    for item in group:
        if isinstance(item, int) and not isinstance(item, bool):
            if not 0 <= item < len(s.vertices):
                raise UsageError(f"vertex index {item} out of range")
            out.append(s.vertices[item])
        else:
            point = vec(item)
            if len(point) != s.ambient_dim or point[-1] != 1:
                raise UsageError(f"{point} is not a normalized state")
            if not isinstance(contains(s.omega, point), Inside):
                raise UsageError(f"{point} is not a state of the model")
            out.append(point)
    return tuple(sorted(set(out)))


def vertex_groups(s: StateSpace, groups: Iterable[Iterable[int]]) -> list[tuple[RatVec, ...]]:
    """Turn groups of vertex indices into groups of state vectors."""
    return [_resolve_group(s, list(g)) for g in groups]


def delta_pattern_holds(measurement: Measurement, groups: Sequence[Sequence[RatVec]]) -> bool:
    if len(measurement) != len(groups):
        return False
    for i, e in enumerate(measurement.effects):
        for j, group in enumerate(groups):
            want = 1 if i == j else 0
            if any(dot(e.covector, w) != want for w in group):
                return False
    return True


def perfectly_distinguishable(s: StateSpace, groups: Sequence[StateGroup]) -> DistinguishabilityResult:
    """Decide whether one measurement sorts every group to its own outcome.

    Unknowns are the ``n * m`` covector entries of ``e_1..e_n``.
    """
    resolved = [_resolve_group(s, g) for g in groups]
    if not resolved:
        raise UsageError("need at least one group of states")
    n, m = len(resolved), s.ambient_dim
    nv = n * m

    def row_for(i: int, w: Sequence[Fraction], sign: int = 1) -> list[Fraction]:
        row = [Fraction(0)] * nv
        for k in range(m):
            row[i * m + k] = sign * w[k]
        return row

    ineqs = []
    for i in range(n):
        for w in s.vertices:
            ineqs.append((row_for(i, w, -1), 0))
            ineqs.append((row_for(i, w), 1))
    eqs = []
    u = s.u.covector
    for k in range(m):
        row = [Fraction(0)] * nv
        for i in range(n):
            row[i * m + k] = Fraction(1)
        eqs.append((row, u[k]))
    for i in range(n):
        for j, group in enumerate(resolved):
            for w in group:
                eqs.append((row_for(i, w), 1 if i == j else 0))
    res = lp_feasible(LinearProgram(nv, eqs, ineqs))
    if isinstance(res, Feasible):
        x = res.witness
        meas = Measurement(tuple(Effect(x[i * m:(i + 1) * m]) for i in range(n)))
        if not delta_pattern_holds(meas, resolved):
            raise InternalInconsistency("distinguishing witness fails its delta pattern")
        return Distinguishable(meas)
    return NotDistinguishable(res.certificate)


@dataclass(frozen=True)
class MaxDistinguishable:
    count: int
    vertex_indices: tuple[int, ...]
    measurement: Measurement


def max_distinguishable_count(s: StateSpace) -> MaxDistinguishable:
    """Largest number of perfectly distinguishable vertices.

    Tries sizes from ``min(m, #vertices)`` downwards and subsets in
    lexicographic order; the first distinguishable subset is returned.
    """
    _check_limit(s, "vertices for distinguishability search", DISTINGUISH_VERTEX_LIMIT)
    top = min(s.ambient_dim, len(s.vertices))
    for k in range(top, 0, -1):
        for subset in combinations(range(len(s.vertices)), k):
            res = perfectly_distinguishable(s, [[i] for i in subset])
            if isinstance(res, Distinguishable):
                return MaxDistinguishable(k, subset, res.measurement)
    raise InternalInconsistency("a single state is always distinguishable")


# State discrimination -------------------------------------------------------


@dataclass(frozen=True)
class Satisfied:
    measurement: Measurement

    def __bool__(self) -> bool:
        return True


@dataclass(frozen=True)
class PremiseFails:
    which: str
    certificate: FarkasCertificate

    def __bool__(self) -> bool:
        return True


@dataclass(frozen=True)
class Violation:
    groups: tuple[tuple[RatVec, ...], ...]
    first_premise: Measurement
    second_premise: Measurement
    certificate: FarkasCertificate

    def __bool__(self) -> bool:
        return False

    def verify(self) -> bool:
        g1, g2, g3, g4 = self.groups
        return (
            delta_pattern_holds(self.first_premise, [g1, g2])
            and delta_pattern_holds(self.second_premise, [g3, g4])
            and self.certificate.verify()
        )


DiscriminationResult = Union[Satisfied, PremiseFails, Violation]


def check_discrimination(
    s: StateSpace, first: StateGroup, second: StateGroup, third: StateGroup, fourth: StateGroup
) -> DiscriminationResult:
    """If ``first`` vs ``second`` and ``third`` vs ``fourth`` are distinguishable,
    with ``third, fourth`` inside ``second``, then ``first, third, fourth`` must be."""
    g1, g2, g3, g4 = (_resolve_group(s, g) for g in (first, second, third, fourth))
    if not (set(g3) <= set(g2) and set(g4) <= set(g2)):
        raise UsageError("the third and fourth groups must lie inside the second")
    return _discrimination(s, g1, g2, g3, g4, perfectly_distinguishable)


def _discrimination(s, g1, g2, g3, g4, pd) -> DiscriminationResult:
    p1 = pd(s, [g1, g2])
    if not isinstance(p1, Distinguishable):
        return PremiseFails("first", p1.certificate)
    p2 = pd(s, [g3, g4])
    if not isinstance(p2, Distinguishable):
        return PremiseFails("second", p2.certificate)
    c = pd(s, [g1, g3, g4])
    if isinstance(c, Distinguishable):
        return Satisfied(c.measurement)
    return Violation((g1, g2, g3, g4), p1.measurement, p2.measurement, c.certificate)


def find_discrimination_violation(s: StateSpace) -> Violation | None:
    """First violating quadruple of faces in canonical order, if any.

    The second group ranges over faces ordered by (dimension, vertex
    indices); the first over faces disjoint from it; the third and fourth
    over disjoint pairs of faces inside the second.
    """
    _check_limit(s, "vertices for discrimination search", DISCRIMINATION_VERTEX_LIMIT)
    # all_faces() is already ordered by (dimension, vertex indices).
    faces = [f.vertex_indices for f in face_lattice(s.omega).all_faces()]
    memo: dict = {}

    def pd(space, groups):
        key = tuple(groups)
        if key not in memo:
            memo[key] = perfectly_distinguishable(space, list(groups))
        return memo[key]

    def pts(idx):
        return tuple(s.vertices[i] for i in idx)

    for second in faces:
        inner = [f for f in faces if set(f) <= set(second)]
        pairs = [(a, b) for a, b in combinations(inner, 2) if not set(a) & set(b)]
        if not pairs:
            continue
        for first in faces:
            if set(first) & set(second):
                continue
            if not isinstance(pd(s, (pts(first), pts(second))), Distinguishable):
                continue
            for third, fourth in pairs:
                res = _discrimination(s, pts(first), pts(second), pts(third), pts(fourth), pd)
                if isinstance(res, Violation):
                    return res
    return None


# Induced subspaces ----------------------------------------------------------


@dataclass(frozen=True)
class InducedSubspace:
    """Face re-embedded as a state space, with ``embedding @ s_k = w_k``."""

    space: StateSpace
    embedding: RatMat
    vertex_map: tuple[int, ...]

    def restrict(self, f: Effect) -> Effect:
        return Effect(tuple(matvec(transpose(self.embedding), f.covector)))


def _face_indices(s: StateSpace, face: Union[Face, Iterable[int]]) -> tuple[int, ...]:
    idx = face.vertex_indices if isinstance(face, Face) else tuple(sorted(set(face)))
    if not idx:
        raise UsageError("the face must be nonempty")
    if any(not 0 <= i < len(s.vertices) for i in idx):
        raise UsageError(f"vertex index out of range in {idx}")
    return idx


def induced_subspace(s: StateSpace, face: Union[Face, Iterable[int]]) -> InducedSubspace:
    idx = _face_indices(s, face)
    parent = [s.vertices[i] for i in idx]
    sub_poly = _from_vertices(s.ambient_dim, parent)
    cols = _chart(sub_poly).columns
    k = len(cols) + 1
    local = {w: tuple(w[c] for c in cols) + (Fraction(1),) for w in parent}
    space = StateSpace(k, _from_vertices(k, local.values()), (("kind", "induced"),))
    rows = [local[w] for w in parent]
    embedding = []
    for r in range(s.ambient_dim):
        sol = solve_linear_system(rows, [w[r] for w in parent])
        if sol is None:
            raise InternalInconsistency("face vertices admit no linear embedding")
        embedding.append(sol.particular)
    back = {local[w]: i for w, i in zip(parent, idx)}
    vertex_map = tuple(back[v] for v in space.vertices)
    # Extreme points of the face are extreme points of the parent.
    if sorted(vertex_map) != list(idx):
        raise InternalInconsistency("induced subspace lost or gained extreme points")
    return InducedSubspace(space, tuple(embedding), vertex_map)


@dataclass(frozen=True)
class Extended:
    measurement: Measurement


@dataclass(frozen=True)
class NoExtendingPureEffect:
    effect_index: int


@dataclass(frozen=True)
class NoCompletion:
    pass


@dataclass(frozen=True)
class NoFaceMatch:
    pass


SubspaceOutcome = Union[Extended, NoExtendingPureEffect, NoCompletion, NoFaceMatch]


@dataclass(frozen=True)
class SubspaceVerdict:
    face: tuple[int, ...]
    condition_a: bool
    per_measurement: tuple[tuple[Measurement, SubspaceOutcome], ...]

    @property
    def holds(self) -> bool:
        return self.condition_a and all(isinstance(o, Extended) for _, o in self.per_measurement)

    def first_failure(self) -> tuple[Measurement, SubspaceOutcome] | None:
        return next(((m, o) for m, o in self.per_measurement if not isinstance(o, Extended)), None)


def _subspace_measurements(sub: StateSpace, binary_only: bool) -> list[Measurement]:
    if binary_only:
        out = []
        for e in pure_effects(sub):
            if e.is_zero() or e == sub.u:
                continue
            other = complement(sub, e)
            if e < other:
                out.append(Measurement((e, other)))
        return out
    return [meas for meas in enumerate_pure_measurements(sub) if len(meas) > 1]


def check_physical_subspace(
    s: StateSpace, face: Union[Face, Iterable[int]], binary_only: bool = True
) -> SubspaceVerdict:
    """Test whether the face of a pure effect behaves as a physical subspace.

    For each pure measurement on the induced space the outcome is, in order
    of precedence: ``NoExtendingPureEffect`` when some effect has no pure
    parent effect restricting to it, ``NoCompletion`` when no pure parent
    measurement contains restricting effects for all outcomes,
    ``NoFaceMatch`` when such measurements exist but none also matches the
    associated faces, and ``Extended`` otherwise.
    """
    idx = _face_indices(s, face)
    if not isinstance(find_effect_for_face(s, idx), PureEffect):
        raise NotAnAssociatedFace(f"{idx} is not the face of a pure effect")
    induced = induced_subspace(s, idx)
    sub = induced.space
    condition_a = set(induced.vertex_map) <= set(range(len(s.vertices)))
    parent_pure = [e for e in pure_effects(s) if not e.is_zero()]
    restrictions = {e: induced.restrict(e) for e in parent_pure}
    parent_measurements = enumerate_pure_measurements(s)

    def parent_face(e: Effect) -> frozenset[int]:
        return frozenset(i for i, w in enumerate(s.vertices) if dot(e.covector, w) == 1)

    def sub_face(e: Effect) -> frozenset[int]:
        return frozenset(induced.vertex_map[i] for i, w in enumerate(sub.vertices) if dot(e.covector, w) == 1)

    rows = []
    for meas in _subspace_measurements(sub, binary_only):
        outcome: SubspaceOutcome | None = None
        for i, e in enumerate(meas.effects):
            if not any(r == e for r in restrictions.values()):
                outcome = NoExtendingPureEffect(i)
                break
        if outcome is None:
            completed = False
            for pm in parent_measurements:
                plain = _assign(meas, pm, lambda g, e: restrictions[g] == e)
                if not plain:
                    continue
                completed = True
                if _assign(meas, pm, lambda g, e: restrictions[g] == e and parent_face(g) == sub_face(e)):
                    outcome = Extended(pm)
                    break
            if outcome is None:
                outcome = NoFaceMatch() if completed else NoCompletion()
        rows.append((meas, outcome))
    return SubspaceVerdict(idx, condition_a, tuple(rows))


def _assign(meas: Measurement, parent: Measurement, ok) -> bool:
    """Injective choice of a parent effect for every effect of ``meas``."""
    used: set[int] = set()

    def go(i: int) -> bool:
        if i == len(meas.effects):
            return True
        for j, g in enumerate(parent.effects):
            if j not in used and ok(g, meas.effects[i]):
                used.add(j)
                if go(i + 1):
                    return True
                used.discard(j)
        return False

    return go(0)


def repeatability_face(s: StateSpace, f: Effect) -> Face | None:
    """States left possible after a pure effect ``f`` has occurred."""
    if not is_pure(s, f):
        raise UsageError("repeatability_face needs a pure effect")
    return face_of_effect(s, f)


# Preservation ---------------------------------------------------------------


@dataclass(frozen=True)
class Holds:
    transformation: RatMat


@dataclass(frozen=True)
class DimensionClash:
    span_dims: tuple[int, int]


@dataclass(frozen=True)
class NonPositive:
    vertex: int
    image: RatVec
    violated_facet: tuple[int, ...] | None
    reason: str


@dataclass(frozen=True)
class OppositeFaceEmpty:
    pass


PreservationOutcome = Union[Holds, DimensionClash, NonPositive, OppositeFaceEmpty]


@dataclass(frozen=True)
class PreservationVerdict:
    per_facet: tuple[tuple[tuple[int, ...], PreservationOutcome], ...]

    @property
    def holds(self) -> bool:
        return all(isinstance(o, Holds) for _, o in self.per_facet)

    def __bool__(self) -> bool:
        return self.holds


def preservation_check(s: StateSpace, facet: Union[Face, Iterable[int]]) -> PreservationOutcome:
    """Build the map fixing the facet and killing its opposite face, then test positivity."""
    facet = _facet_or_error(s, facet)
    f = facet_effect(s, facet)
    opposite = face_of_effect(s, complement(s, f))
    if opposite is None:
        return OppositeFaceEmpty()
    m = s.ambient_dim
    on_face = [s.vertices[i] for i in facet.vertex_indices]
    off_face = [s.vertices[i] for i in opposite.vertex_indices]
    r_face, r_opp = rank(on_face), rank(off_face)
    if r_face + r_opp != m or rank(on_face + off_face) != m:
        return DimensionClash((r_face, r_opp))
    basis_face = [on_face[i] for i in independent_rows(on_face)]
    basis_opp = [off_face[i] for i in independent_rows(off_face)]
    # T X = Y with X = basis as columns; T = Y X^-1.
    x_inv = inverse(transpose(basis_face + basis_opp))
    images = basis_face + [tuple(Fraction(0) for _ in range(m))] * len(basis_opp)
    y = transpose(images)
    t = tuple(tuple(sum((y[r][k] * x_inv[k][c] for k in range(m)), Fraction(0)) for c in range(m)) for r in range(m))
    cone = [(g.vertex_indices, homogenized(s, g)) for g in facets(s.omega)]
    for i, w in enumerate(s.vertices):
        image = matvec(t, w)
        for fidx, g in cone:
            if dot(g, image) < 0:
                return NonPositive(i, image, fidx, "image leaves the state cone")
        if dot(s.u.covector, image) > 1:
            return NonPositive(i, image, None, "image has normalization above 1")
    return Holds(t)


def check_preservation_postulate(s: StateSpace) -> PreservationVerdict:
    if dim(s.omega) == 0:
        return PreservationVerdict(())
    return PreservationVerdict(
        tuple((g.vertex_indices, preservation_check(s, g)) for g in facets(s.omega))
    )


# Classicality ---------------------------------------------------------------


@dataclass(frozen=True)
class ClassicalityReport:
    classical: bool
    simplex: bool
    uniformly_pyramidal: bool
    preservation: PreservationVerdict

    def __bool__(self) -> bool:
        return self.classical


def is_classical(s: StateSpace) -> ClassicalityReport:
    """Simplex test cross-checked against pyramidality and preservation."""
    simplex = is_simplex(s.omega)
    pyramidal = bool(is_uniformly_pyramidal(s.omega))
    preservation = check_preservation_postulate(s)
    if not simplex == pyramidal == preservation.holds:
        raise InternalInconsistency(
            "simplex, pyramidality and preservation disagree",
            {
                "vertices": [[str(c) for c in v] for v in s.vertices],
                "simplex": simplex,
                "uniformly_pyramidal": pyramidal,
                "preservation": [
                    [list(k), type(o).__name__] for k, o in preservation.per_facet
                ],
            },
        )
    return ClassicalityReport(simplex, simplex, pyramidal, preservation)


@dataclass(frozen=True)
class ScanLevel:
    face: tuple[int, ...]
    opposite: tuple[int, ...]
    distinguishable: bool


@dataclass(frozen=True)
class ScanReport:
    chain: tuple[tuple[int, ...], ...]
    levels: tuple[ScanLevel, ...]
    failed_level: int | None
    certificate: FarkasCertificate | None
    states: tuple[int, ...]
    measurement: Measurement | None

    @property
    def succeeded(self) -> bool:
        return self.failed_level is None


def theorem_result1_scan(s: StateSpace) -> ScanReport:
    """Walk a facet chain down to a vertex collecting opposite faces.

    At level ``i`` the opposite face of ``F_i`` inside ``F_{i-1}`` is found
    with the facet effect of the induced space; the family of all opposite
    faces so far together with ``F_i`` must be perfectly distinguishable.
    Success yields ``d + 1`` distinguishable states, one from each set.
    """
    _check_limit(s, "vertices for the classicality scan", SCAN_VERTEX_LIMIT)
    d = dim(s.omega)
    if d == 0:
        meas = Measurement((s.u,))
        return ScanReport(((0,),), (), None, None, (0,), meas)
    chain = [f.vertex_indices for f in facet_chain(s.omega, [0])]
    levels: list[ScanLevel] = []
    opposites: list[tuple[int, ...]] = []
    for i in range(1, len(chain)):
        induced = induced_subspace(s, chain[i - 1])
        local = {p: j for j, p in enumerate(induced.vertex_map)}
        local_facet = tuple(sorted(local[p] for p in chain[i]))
        f = facet_effect(induced.space, local_facet)
        opp = face_of_effect(induced.space, complement(induced.space, f))
        if opp is None:
            raise InternalInconsistency("facet effect has an empty opposite face")
        opposite = tuple(sorted(induced.vertex_map[j] for j in opp.vertex_indices))
        opposites.append(opposite)
        family = [list(o) for o in opposites] + [list(chain[i])]
        res = perfectly_distinguishable(s, family)
        levels.append(ScanLevel(chain[i], opposite, isinstance(res, Distinguishable)))
        if not isinstance(res, Distinguishable):
            return ScanReport(tuple(chain), tuple(levels), i, res.certificate, (), None)
    states = tuple(o[0] for o in opposites) + (chain[-1][0],)
    res = perfectly_distinguishable(s, [[k] for k in states])
    if not isinstance(res, Distinguishable) or not is_simplex(s.omega):
        raise InternalInconsistency("classicality scan succeeded on a non-simplex")
    return ScanReport(tuple(chain), tuple(levels), None, None, states, res.measurement)


# Full report ----------------------------------------------------------------

REPORT_SECTIONS = ("classical", "preservation", "discrimination", "subspace", "effects", "faces")


@dataclass(frozen=True)
class PostulateReport:
    descriptor: dict
    sections: tuple[str, ...]
    classical: ClassicalityReport | None = None
    discrimination: Violation | None = None
    discrimination_skipped: str | None = None
    subspace: tuple[tuple[tuple[int, ...], object], ...] = ()
    pure_effects: tuple[Effect, ...] = ()
    measurements: tuple[Measurement, ...] = ()
    faces: tuple[tuple[int, ...], ...] = ()
    extras: dict = field(default_factory=dict)


def build_report(s: StateSpace, which: str = "all") -> PostulateReport:
    sections = REPORT_SECTIONS if which == "all" else (which,)
    if which != "all" and which not in REPORT_SECTIONS:
        raise UsageError(f"unknown report section {which!r}")
    kw: dict = {"descriptor": s.describe(), "sections": sections}
    if "classical" in sections or "preservation" in sections:
        report = is_classical(s)
        if report.classical and not report.uniformly_pyramidal:
            raise InternalInconsistency("classical model is not uniformly pyramidal")
        kw["classical"] = report
    if "discrimination" in sections:
        try:
            kw["discrimination"] = find_discrimination_violation(s)
        except TooLarge as exc:
            kw["discrimination_skipped"] = str(exc)
    if "subspace" in sections:
        rows = []
        if dim(s.omega) > 0:
            for g in facets(s.omega):
                try:
                    rows.append((g.vertex_indices, check_physical_subspace(s, g)))
                except TooLarge as exc:
                    rows.append((g.vertex_indices, str(exc)))
        kw["subspace"] = tuple(rows)
    if "effects" in sections:
        kw["pure_effects"] = tuple(pure_effects(s))
        try:
            kw["measurements"] = tuple(enumerate_pure_measurements(s))
        except TooLarge:
            kw["measurements"] = ()
    if "faces" in sections:
        kw["faces"] = tuple(f.vertex_indices for f in face_lattice(s.omega).all_faces())
    return PostulateReport(**kw)
