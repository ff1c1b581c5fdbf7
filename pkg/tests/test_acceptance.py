"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""

import io
import time
from contextlib import contextmanager
from fractions import Fraction
from math import comb

from gptlab.cli import main
from gptlab.exact import Feasible, lp_feasible, lp_feasible_fm
from gptlab.exact.rational import dot, matvec
from gptlab.model import (
    classical_model,
    complement,
    effect_polytope,
    evaluate,
    homogenized,
    opposite_face,
    polygon_model,
    polygon_points,
    pure_effects,
    square_labels,
    square_model,
)
from gptlab.polytope import (
    Inside,
    contains,
    dim,
    f_vector,
    face_lattice,
    facet_chain,
    facets,
    from_points,
    is_face,
    is_simplex,
    is_uniformly_pyramidal,
)
from gptlab.postulates import (
    DimensionClash,
    Distinguishable,
    Holds,
    NoExtendingPureEffect,
    NonPositive,
    NotDistinguishable,
    Violation,
    check_discrimination,
    check_physical_subspace,
    check_preservation_postulate,
    delta_pattern_holds,
    max_distinguishable_count,
    perfectly_distinguishable,
    preservation_check,
    theorem_result1_scan,
)
from gptlab.randomgen import RandomPolytopeSpec, SplitMix64, random_lp, random_polytope, random_state_space
from gptlab.serialize import dumps, state_space_to_json

from oracles import convex_combination_feasible, effect_vertices_by_hyperplanes

F = Fraction
EPS = F(1, 10**9)


@contextmanager
def criterion(capsys, number, title):
    try:
        yield
    except BaseException as exc:
        with capsys.disabled():
            print(f"\nFAIL criterion {number}: {title} ({type(exc).__name__}: {exc})")
        raise
    with capsys.disabled():
        print(f"\nPASS criterion {number}: {title}")


def ones(s, e):
    return tuple(i for i, w in enumerate(s.vertices) if evaluate(e, w) == 1)


def random_spaces(count):
    """Seeded random state spaces with polytope dimension 2..4 and at most 10 vertices."""
    rng = SplitMix64(2024)
    out = []
    seed = 0
    while len(out) < count:
        d = 2 + rng.below(3)
        n = rng.integer(d + 1, 10)
        out.append(random_state_space(RandomPolytopeSpec(d, n, seed, 1 + rng.below(3))))
        seed += 1
    return out


def test_criterion_1_equivalence(capsys):
    with criterion(capsys, 1, "simplex <=> uniformly pyramidal <=> preservation holds"):
        start = time.monotonic()
        spaces = [polygon_model(n, EPS) for n in range(3, 9)] + random_spaces(200)
        disagreements = []
        simplices = 0
        for s in spaces:
            assert len(s.vertices) <= 10 and 2 <= dim(s.omega) <= 4
            a = is_simplex(s.omega)
            b = bool(is_uniformly_pyramidal(s.omega))
            c = check_preservation_postulate(s).holds
            simplices += a
            if not a == b == c:
                disagreements.append((s.descriptor, a, b, c))
        elapsed = time.monotonic() - start
        assert disagreements == []
        assert simplices >= 2  # both sides of the equivalence are exercised
        assert elapsed < 300, f"took {elapsed:.1f}s"


def test_criterion_2_pure_effect_counts(capsys):
    with criterion(capsys, 2, "polygon pure-effect counts n+2 (even), 2n+2 (odd)"):
        counts = {}
        for n in range(3, 9):
            s = polygon_model(n, EPS)
            pure = pure_effects(s)
            counts[n] = len(pure)
            # Each listed effect is extreme in the list and in the hyperplane oracle.
            assert len(from_points(3, [e.covector for e in pure]).vertices) == len(pure)
            assert {e.covector for e in pure} == effect_vertices_by_hyperplanes(s)
            assert set(effect_polytope(s).vertices) == {e.covector for e in pure}
        assert counts == {n: (n + 2 if n % 2 == 0 else 2 * n + 2) for n in range(3, 9)}
        assert counts[3] == 8


def test_criterion_3_square(capsys):
    with criterion(capsys, 3, "square discrimination violation and dimension clash"):
        s = square_model()
        w = [None] + square_labels()
        res = check_discrimination(s, [w[1], w[2]], [w[3], w[4]], [w[3]], [w[4]])
        assert isinstance(res, Violation)
        g1, g2, g3, g4 = res.groups
        assert delta_pattern_holds(res.first_premise, [g1, g2])
        assert delta_pattern_holds(res.second_premise, [g3, g4])
        assert res.certificate.verify() and res.verify()
        again = perfectly_distinguishable(s, [[w[1], w[2]], [w[3]], [w[4]]])
        assert isinstance(again, NotDistinguishable) and again.certificate.verify()
        verdict = check_preservation_postulate(s)
        assert len(verdict.per_facet) == len(facets(s.omega)) == 4
        assert all(isinstance(o, DimensionClash) and sum(o.span_dims) > 3 for _, o in verdict.per_facet)


def test_criterion_4_pentagon(capsys):
    with criterion(capsys, 4, "pentagon preservation not positive and subspace (b)(i) fails"):
        s = polygon_model(5, EPS)
        vertex_effects = [e for e in pure_effects(s) if len(ones(s, e)) == 1]
        assert len(vertex_effects) == 5
        for e in vertex_effects:
            facet = opposite_face(s, e)
            assert facet.dim == 1
            out = preservation_check(s, facet)
            assert isinstance(out, NonPositive)
            g = next(f for f in facets(s.omega) if f.vertex_indices == out.violated_facet)
            assert dot(homogenized(s, g), out.image) < 0
            _, first = check_physical_subspace(s, facet).first_failure()
            assert isinstance(first, NoExtendingPureEffect)
            assert complement(s, e) in pure_effects(s)


def test_criterion_5_classical(capsys):
    with criterion(capsys, 5, "classical models d=2..6 positive results"):
        for d in range(2, 7):
            s = classical_model(d)
            assert max_distinguishable_count(s).count == d
            verdict = check_preservation_postulate(s)
            assert len(verdict.per_facet) == d
            for _, out in verdict.per_facet:
                assert isinstance(out, Holds)
                for w in s.vertices:
                    image = matvec(out.transformation, w)
                    assert image[-1] <= 1
                    assert all(dot(homogenized(s, g), image) >= 0 for g in facets(s.omega))
            scan = theorem_result1_scan(s)
            assert scan.succeeded and len(set(scan.states)) == d
            assert isinstance(perfectly_distinguishable(s, [[i] for i in scan.states]), Distinguishable)


def geometry_corpus():
    named = [
        from_points(2, [(0, 0), (1, 0), (0, 1)]),
        from_points(2, [(0, 0), (1, 0), (0, 1), (1, 1)]),
        from_points(2, [(x, y) for x, y, _ in polygon_points(5)]),
        from_points(2, [(x, y) for x, y, _ in polygon_points(6)]),
        from_points(3, [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)]),
        from_points(3, [(a, b, c) for a in (0, 1) for b in (0, 1) for c in (0, 1)]),
        from_points(3, [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)]),
        from_points(3, [(0, 0, 0), (2, 0, 0), (0, 2, 0), (2, 2, 0), (1, 1, 1)]),
        from_points(4, [(0,) * 4] + [tuple(int(i == j) for j in range(4)) for i in range(4)]),
    ]
    rng = SplitMix64(7)
    randoms = []
    for seed in range(20):
        d = 2 + rng.below(3)
        randoms.append(random_polytope(RandomPolytopeSpec(d, rng.integer(d + 1, 9), 1000 + seed, 2)))
    return named + randoms


def random_points(p, rng, count):
    lo = [min(v[k] for v in p.vertices) - 1 for k in range(p.ambient_dim)]
    hi = [max(v[k] for v in p.vertices) + 1 for k in range(p.ambient_dim)]
    pts = []
    for i in range(count):
        if i % 2:
            weights = [rng.below(5) for _ in p.vertices]
            total = sum(weights) or 1
            pts.append(tuple(sum(F(wt, total) * v[k] for wt, v in zip(weights, p.vertices)) for k in range(p.ambient_dim)))
        else:
            pts.append(tuple(lo[k] + F(rng.below(64), 64) * (hi[k] - lo[k]) for k in range(p.ambient_dim)))
    return pts


def test_criterion_6_geometry_suite(capsys):
    with criterion(capsys, 6, "geometry property suite on the corpus"):
        rng = SplitMix64(99)
        for p in geometry_corpus():
            d = dim(p)
            assert from_points(p.ambient_dim, p.vertices) == p
            fv = f_vector(p)
            assert all(fv[k] >= comb(d + 1, k + 1) for k in range(d))
            lattice = face_lattice(p)
            for face in lattice.all_faces():
                assert is_face(p, face.vertex_indices) is not None
            fs = facets(p)
            if d >= 2:
                for ridge in (f for f in lattice.all_faces() if f.dim == d - 2):
                    assert sum(ridge.index_set <= f.index_set for f in fs) == 2
            for v in range(len(p.vertices)):
                chain = facet_chain(p, [v])
                assert chain[-1].vertex_indices == (v,)
                assert [f.dim for f in chain] == list(range(chain[0].dim, -1, -1))
            for x in random_points(p, rng, 100):
                assert isinstance(contains(p, x), Inside) == convex_combination_feasible(p.vertices, x)


def test_criterion_7_lp_cross_oracle(capsys):
    with criterion(capsys, 7, "500 random LPs: simplex and Fourier-Motzkin agree"):
        kinds = {True: 0, False: 0}
        for seed in range(500):
            lp = random_lp(seed)
            assert lp.variables <= 6
            a, b = lp_feasible(lp), lp_feasible_fm(lp)
            assert type(a) is type(b), f"seed {seed}"
            kinds[isinstance(a, Feasible)] += 1
            for res in (a, b):
                if isinstance(res, Feasible):
                    assert lp.is_satisfied_by(res.witness)
                else:
                    assert res.certificate.verify()
        assert kinds[True] and kinds[False]


def test_criterion_8_determinism(capsys):
    with criterion(capsys, 8, "golden output and seeded generation are byte-identical"):
        runs = []
        for _ in range(2):
            out = io.StringIO()
            assert main(["golden"], out, io.StringIO()) == 0
            runs.append(out.getvalue())
        assert runs[0] == runs[1]
        for seed in (0, 1, 2**63):
            spec = RandomPolytopeSpec(3, 8, seed, 3)
            a = dumps(state_space_to_json(random_state_space(spec)))
            b = dumps(state_space_to_json(random_state_space(spec)))
            assert a == b
