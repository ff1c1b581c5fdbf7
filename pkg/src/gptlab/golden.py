"""Golden suite: pinned worked examples on the reference models.

Each case names the model and the property it pins. Models are built in
process unless a corpus directory supplies ``<name>.json`` overrides, in
which case the file is loaded and every case on it must still pass.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from .errors import GptlabError
from .exact.lp import Feasible, LinearProgram, lp_feasible
from .exact.linalg import solve_linear_system
from .exact.rational import matvec, transpose
from .model import (
    Effect,
    OnlyImpure,
    PureEffect,
    StateSpace,
    classical_model,
    complement,
    evaluate,
    face_of_effect,
    facet_effect,
    find_effect_for_face,
    enumerate_pure_measurements,
    is_pure,
    opposite_face,
    polygon_labels,
    polygon_model,
    pure_effects,
    square_labels,
)
from .polytope import (
    affinely_equivalent,
    dim,
    f_vector,
    facet_chain,
    facets,
    from_points,
    is_face,
    is_simplex,
    is_uniformly_pyramidal,
)
from .postulates import (
    DimensionClash,
    Distinguishable,
    Holds,
    NoExtendingPureEffect,
    NoFaceMatch,
    NonPositive,
    NotDistinguishable,
    Satisfied,
    Violation,
    check_discrimination,
    check_physical_subspace,
    check_preservation_postulate,
    find_discrimination_violation,
    induced_subspace,
    is_classical,
    max_distinguishable_count,
    perfectly_distinguishable,
    preservation_check,
    theorem_result1_scan,
)
from .serialize import load_state_space

MODEL_NAMES = ("bit", "triangle", "tetrahedron", "square", "pentagon")


@dataclass(frozen=True)
class Case:
    name: str
    anchor: str
    check: Callable[["Models"], bool]


class Models:
    """Reference models, optionally replaced by files from a corpus directory."""

    def __init__(self, corpus: Path | None = None):
        self.corpus = corpus
        self._cache: dict[str, StateSpace] = {}

    def get(self, name: str) -> StateSpace:
        if name not in self._cache:
            path = self.corpus / f"{name}.json" if self.corpus else None
            if path is not None and path.exists():
                self._cache[name] = load_state_space(path)
            else:
                self._cache[name] = _build(name)
        return self._cache[name]

    @property
    def square(self) -> StateSpace:
        return self.get("square")

    @property
    def pentagon(self) -> StateSpace:
        return self.get("pentagon")

    @property
    def triangle(self) -> StateSpace:
        return self.get("triangle")

    @property
    def tetrahedron(self) -> StateSpace:
        return self.get("tetrahedron")

    @property
    def bit(self) -> StateSpace:
        return self.get("bit")


def _build(name: str) -> StateSpace:
    from .model import square_model

    return {
        "bit": lambda: classical_model(2),
        "triangle": lambda: classical_model(3),
        "tetrahedron": lambda: classical_model(4),
        "square": square_model,
        "pentagon": lambda: polygon_model(5),
    }[name]()


def model_names() -> tuple[str, ...]:
    return MODEL_NAMES


# Labelled objects on the square and the pentagon ---------------------------


def _sq(k: int) -> int:
    return square_labels()[k - 1]


def _pent(k: int) -> int:
    return polygon_labels(5)[(k - 1) % 5]


def _effect_with_face(s: StateSpace, indices) -> Effect:
    want = tuple(sorted(indices))
    for e in pure_effects(s):
        if tuple(i for i, w in enumerate(s.vertices) if evaluate(e, w) == 1) == want:
            return e
    raise LookupError(f"no pure effect with face {want}")


def _square_effect(s: StateSpace, k: int) -> Effect:
    # e_k is one exactly on the edge {w_k, w_(k-1)} (indices mod 4, w_0 = w_4).
    prev = 4 if k == 1 else k - 1
    return _effect_with_face(s, [_sq(k), _sq(prev)])


def _pent_effect(s: StateSpace, k: int) -> Effect:
    return _effect_with_face(s, [_pent(k)])


def _ones(s: StateSpace, e: Effect) -> tuple[int, ...]:
    return tuple(i for i, w in enumerate(s.vertices) if evaluate(e, w) == 1)


# Cases ----------------------------------------------------------------------


def _lp_square_pair(m: Models) -> bool:
    s = m.square
    a, b = s.vertices[_sq(2)], s.vertices[_sq(3)]
    res = perfectly_distinguishable(s, [[_sq(2)], [_sq(3)]])
    if not isinstance(res, Distinguishable):
        return False
    e_first, e_second = res.measurement.effects
    direct = lp_feasible(
        LinearProgram(3, [(list(a), 1), (list(b), 0)], [([-x for x in w], 0) for w in s.vertices]
                      + [(list(w), 1) for w in s.vertices])
    )
    return (
        isinstance(direct, Feasible)
        and e_first == _square_effect(s, 2)
        and e_second == _square_effect(s, 4)
    )


def _point_dim(m: Models) -> bool:
    return dim(from_points(2, [(1, 2)])) == 0


def _square_facets(m: Models) -> bool:
    return len(facets(m.square.omega)) == 4


def _tetra_lattice(m: Models) -> bool:
    t = m.tetrahedron.omega
    return len(facets(t)) == 4 and f_vector(t) == (4, 6, 4, 1)


def _vertex_is_face(m: Models) -> bool:
    s = m.pentagon.omega
    return all(is_face(s, [i]) is not None for i in range(len(s.vertices)))


def _tetra_chain(m: Models) -> bool:
    chain = facet_chain(m.tetrahedron.omega, [0])
    return [f.dim for f in chain] == [3, 2, 1, 0]


def _tetra_simplex(m: Models) -> bool:
    t = m.tetrahedron.omega
    return is_simplex(t) and bool(is_uniformly_pyramidal(t))


def _state_space_dims(m: Models) -> bool:
    return m.triangle.ambient_dim == 3 and m.square.ambient_dim == 3


def _classical_three_is_triangle(m: Models) -> bool:
    tri = polygon_model(3)
    return is_simplex(tri.omega) and affinely_equivalent(tri.omega, m.triangle.omega) is not None


def _die_model(m: Models) -> bool:
    die = classical_model(6)
    return len(die.vertices) == 6 and is_simplex(die.omega)


def _polygon_counts(m: Models) -> bool:
    return len(pure_effects(m.square)) == 6 and len(pure_effects(m.pentagon)) == 12


def _square_complement(m: Models) -> bool:
    s = m.square
    return complement(s, _square_effect(s, 1)) == _square_effect(s, 3)


def _pent_complement(m: Models) -> bool:
    s = m.pentagon
    c = complement(s, _pent_effect(s, 3))
    return is_pure(s, c) and c not in [_pent_effect(s, k) for k in range(1, 6)]


def _square_face(m: Models) -> bool:
    s = m.square
    face = face_of_effect(s, _square_effect(s, 3))
    return face is not None and face.dim == 1 and face.vertex_indices == tuple(sorted([_sq(2), _sq(3)]))


def _pent_face(m: Models) -> bool:
    s = m.pentagon
    face = face_of_effect(s, _pent_effect(s, 3))
    return face is not None and face.vertex_indices == (_pent(3),)


def _square_opposite(m: Models) -> bool:
    s = m.square
    face = opposite_face(s, _square_effect(s, 3))
    return face is not None and face.vertex_indices == _ones(s, _square_effect(s, 1))


def _pent_opposite(m: Models) -> bool:
    s = m.pentagon
    face = opposite_face(s, _pent_effect(s, 3))
    return face is not None and face.vertex_indices == tuple(sorted([_pent(5), _pent(1)]))


def _facet_effects(m: Models) -> bool:
    ok = True
    for s in (m.square, m.triangle):
        for g in facets(s.omega):
            f = facet_effect(s, g)
            ok &= is_pure(s, f) and _ones(s, f) == g.vertex_indices
    tri = m.triangle
    for g in facets(tri.omega):
        apex = next(i for i in range(3) if i not in g.vertex_indices)
        ok &= facet_effect(tri, g) == complement(tri, _effect_with_face(tri, [apex]))
    return ok


def _square_vertex_impure(m: Models) -> bool:
    s = m.square
    return all(isinstance(find_effect_for_face(s, [i]), OnlyImpure) for i in range(4))


def _facets_have_pure(m: Models) -> bool:
    return all(
        isinstance(find_effect_for_face(s, g), PureEffect)
        for s in (m.square, m.pentagon)
        for g in facets(s.omega)
    )


def _pent_vertex_pure(m: Models) -> bool:
    s = m.pentagon
    res = find_effect_for_face(s, [_pent(3)])
    return isinstance(res, PureEffect) and res.effect == _pent_effect(s, 3)


def _square_measurements(m: Models) -> bool:
    s = m.square
    found = {frozenset(meas.effects) for meas in enumerate_pure_measurements(s)}
    want = {
        frozenset([s.u]),
        frozenset([_square_effect(s, 1), _square_effect(s, 3)]),
        frozenset([_square_effect(s, 2), _square_effect(s, 4)]),
    }
    return found == want


def _pent_measurements(m: Models) -> bool:
    s = m.pentagon
    found = {frozenset(meas.effects) for meas in enumerate_pure_measurements(s)}
    return all(
        frozenset([_pent_effect(s, k), complement(s, _pent_effect(s, k))]) in found for k in range(1, 6)
    )


def _square_evaluate(m: Models) -> bool:
    s = m.square
    e2 = _square_effect(s, 2)
    return evaluate(e2, s.vertices[_sq(2)]) == 1 and evaluate(e2, s.vertices[_sq(3)]) == 0


def _triangle_distinguishable(m: Models) -> bool:
    return isinstance(perfectly_distinguishable(m.triangle, [[0], [1], [2]]), Distinguishable)


def _square_three_states(m: Models) -> bool:
    res = perfectly_distinguishable(m.square, [[_sq(2)], [_sq(3)], [_sq(4)]])
    return isinstance(res, NotDistinguishable) and res.certificate.verify()


def _square_edges_distinguishable(m: Models) -> bool:
    s = m.square
    res = perfectly_distinguishable(s, [[_sq(1), _sq(2)], [_sq(3), _sq(4)]])
    return isinstance(res, Distinguishable)


def _classical_max(m: Models) -> bool:
    return all(max_distinguishable_count(classical_model(d)).count == d for d in range(2, 7))


def _square_violation(m: Models) -> bool:
    s = m.square
    res = check_discrimination(s, [_sq(1), _sq(2)], [_sq(3), _sq(4)], [_sq(3)], [_sq(4)])
    return isinstance(res, Violation) and res.verify()


def _classical_discrimination(m: Models) -> bool:
    s = m.triangle
    return isinstance(check_discrimination(s, [0], [1, 2], [1], [2]), Satisfied)


def _square_search(m: Models) -> bool:
    v = find_discrimination_violation(m.square)
    return v is not None and v.verify()


def _square_edge_bit(m: Models) -> bool:
    s = m.square
    sub = induced_subspace(s, [_sq(2), _sq(3)]).space
    return sub.ambient_dim == 2 and is_simplex(sub.omega)


def _tetra_facet_triangle(m: Models) -> bool:
    t = m.tetrahedron
    sub = induced_subspace(t, facets(t.omega)[0]).space
    return sub.ambient_dim == 3 and is_simplex(sub.omega) and len(sub.vertices) == 3


def _pent_subspace(m: Models) -> bool:
    s = m.pentagon
    g = facets(s.omega)[0]
    fail = check_physical_subspace(s, g).first_failure()
    return fail is not None and isinstance(fail[1], NoExtendingPureEffect)


def _square_subspace(m: Models) -> bool:
    s = m.square
    g = facets(s.omega)[0]
    fail = check_physical_subspace(s, g).first_failure()
    return fail is not None and isinstance(fail[1], NoFaceMatch)


def _tetra_subspace(m: Models) -> bool:
    t = m.tetrahedron
    return all(check_physical_subspace(t, g).holds for g in facets(t.omega))


def _square_preservation(m: Models) -> bool:
    v = check_preservation_postulate(m.square)
    return len(v.per_facet) == 4 and all(
        isinstance(o, DimensionClash) and o.span_dims == (2, 2) for _, o in v.per_facet
    )


def _pent_preservation(m: Models) -> bool:
    s = m.pentagon
    facet = _ones(s, complement(s, _pent_effect(s, 3)))
    return isinstance(preservation_check(s, facet), NonPositive)


def _triangle_preservation(m: Models) -> bool:
    s = m.triangle
    for g in facets(s.omega):
        out = preservation_check(s, g)
        if not isinstance(out, Holds):
            return False
        corners = [s.vertices[i] for i in g.vertex_indices]
        for w in s.vertices:
            image = matvec(out.transformation, w)
            # image = sum lambda_i corner_i with lambda >= 0 and sum lambda <= 1.
            sol = solve_linear_system(transpose(corners), image)
            if sol is None or sol.kernel:
                return False
            lam = sol.particular
            if any(x < 0 for x in lam) or sum(lam) > 1:
                return False
    return True


def _classical_positive(m: Models) -> bool:
    return all(is_classical(classical_model(d)).classical for d in range(1, 7))


def _polygons_negative(m: Models) -> bool:
    return not any(is_classical(polygon_model(n)).classical for n in range(4, 9))


def _scan_tetra(m: Models) -> bool:
    r = theorem_result1_scan(m.tetrahedron)
    return r.succeeded and len(r.states) == 4


def _scan_triangle(m: Models) -> bool:
    r = theorem_result1_scan(m.triangle)
    return r.succeeded and len(r.states) == 3


CASES: tuple[Case, ...] = (
    Case("lp-square-pair", "square: adjacent states sorted by e_2, e_4", _lp_square_pair),
    Case("dim-point", "0-polytope is a point", _point_dim),
    Case("facets-square", "square has four edges", _square_facets),
    Case("lattice-tetrahedron", "tetrahedron face counts 4, 6, 4, 1", _tetra_lattice),
    Case("face-vertex", "every vertex is a face", _vertex_is_face),
    Case("chain-tetrahedron", "tetrahedron facet chain dims 3, 2, 1, 0", _tetra_chain),
    Case("simplex-tetrahedron", "tetrahedron is a uniformly pyramidal simplex", _tetra_simplex),
    Case("embedding-dims", "triangle and square lift to dimension 3", _state_space_dims),
    Case("polygon-three", "3-gon model is classical", _classical_three_is_triangle),
    Case("die-model", "six-outcome die is a 5-simplex", _die_model),
    Case("pure-effect-counts", "square n+2, pentagon 2n+2 pure effects", _polygon_counts),
    Case("complement-square", "square: u - e_1 = e_3", _square_complement),
    Case("complement-pentagon", "pentagon: u - e_3 is pure and new", _pent_complement),
    Case("face-square", "square: face of e_3 is an edge", _square_face),
    Case("face-pentagon", "pentagon: face of e_3 is w_3 alone", _pent_face),
    Case("opposite-square", "square: opposite of e_3 is face of e_1", _square_opposite),
    Case("opposite-pentagon", "pentagon: opposite of e_3 is an edge", _pent_opposite),
    Case("facet-effects", "facet effects are pure with the facet as face", _facet_effects),
    Case("vertex-effect-square", "square: vertex faces have only impure effects", _square_vertex_impure),
    Case("facet-pure-effects", "every facet has a pure effect", _facets_have_pure),
    Case("vertex-effect-pentagon", "pentagon: w_3 isolated by pure e_3", _pent_vertex_pure),
    Case("measurements-square", "square: pure measurements u, {e_1,e_3}, {e_2,e_4}", _square_measurements),
    Case("measurements-pentagon", "pentagon: every {e_k, u - e_k} is a measurement", _pent_measurements),
    Case("evaluate-square", "square: e_2(w_2) = 1, e_2(w_3) = 0", _square_evaluate),
    Case("distinguish-triangle", "triangle: three states distinguishable", _triangle_distinguishable),
    Case("distinguish-square-three", "square: w_2, w_3, w_4 not distinguishable", _square_three_states),
    Case("distinguish-square-edges", "square: opposite edges distinguishable", _square_edges_distinguishable),
    Case("max-distinguishable-classical", "d-simplex: d distinguishable states", _classical_max),
    Case("discrimination-square", "square: state discrimination violated", _square_violation),
    Case("discrimination-triangle", "triangle: state discrimination satisfied", _classical_discrimination),
    Case("discrimination-search-square", "square: violation found by search", _square_search),
    Case("subspace-square-edge", "square: edge induces a bit", _square_edge_bit),
    Case("subspace-tetrahedron-facet", "tetrahedron: facet induces a triangle", _tetra_facet_triangle),
    Case("physical-pentagon", "pentagon: facet fails condition (b)(i)", _pent_subspace),
    Case("physical-square", "square: facet fails condition (b)(ii)", _square_subspace),
    Case("physical-tetrahedron", "tetrahedron: facets are physical subspaces", _tetra_subspace),
    Case("preservation-square", "square: fixing and killing spans clash", _square_preservation),
    Case("preservation-pentagon", "pentagon: preservation map not positive", _pent_preservation),
    Case("preservation-triangle", "triangle: preservation map into conv(facet, 0)", _triangle_preservation),
    Case("classical-simplices", "classical models are classical", _classical_positive),
    Case("classical-polygons", "polygons n >= 4 are not classical", _polygons_negative),
    Case("scan-tetrahedron", "tetrahedron: four distinguishable states", _scan_tetra),
    Case("scan-triangle", "triangle: three distinguishable states", _scan_triangle),
)


@dataclass(frozen=True)
class GoldenResult:
    case: Case
    passed: bool
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f" ({self.detail})" if self.detail else ""
        return f"{status} {self.case.name}: {self.case.anchor}{extra}"


def run_golden(corpus: Path | str | None = None) -> list[GoldenResult]:
    models = Models(Path(corpus) if corpus is not None else None)
    results = []
    for case in CASES:
        try:
            ok = bool(case.check(models))
            results.append(GoldenResult(case, ok))
        except (GptlabError, LookupError, StopIteration) as exc:
            results.append(GoldenResult(case, False, f"{type(exc).__name__}: {exc}"))
    return results
