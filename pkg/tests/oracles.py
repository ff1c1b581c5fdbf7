"""Independent reference computations used to cross-check the library.

These deliberately take different routes from the production code:
Fourier-Motzkin instead of simplex, brute-force subset scans instead of
pruned search, hyperplane-subset enumeration instead of basis patterns.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import chain, combinations

from gptlab.exact import LinearProgram, lp_feasible_fm, solve_linear_system
from gptlab.exact.lp import Feasible
from gptlab.exact.rational import dot


def convex_combination_feasible(vertices, x) -> bool:
    """Is ``x`` a convex combination of ``vertices``? Fourier-Motzkin route."""
    k = len(vertices)
    m = len(x)
    eqs = [([v[r] for v in vertices], x[r]) for r in range(m)] + [([1] * k, 1)]
    ineqs = [([-int(c == j) for c in range(k)], 0) for j in range(k)]
    return isinstance(lp_feasible_fm(LinearProgram(k, eqs, ineqs)), Feasible)


def distinguishable_fm(space, groups) -> bool:
    """Perfect distinguishability of vertex-index groups via Fourier-Motzkin."""
    m = space.ambient_dim
    n = len(groups)
    nv = n * m
    verts = space.vertices

    def row(i, w, sign=1):
        r = [Fraction(0)] * nv
        for k in range(m):
            r[i * m + k] = sign * w[k]
        return r

    ineqs = [(row(i, w, -1), 0) for i in range(n) for w in verts]
    eqs = []
    for k in range(m):
        r = [Fraction(0)] * nv
        for i in range(n):
            r[i * m + k] = Fraction(1)
        eqs.append((r, Fraction(int(k == m - 1))))
    for i in range(n):
        for j, g in enumerate(groups):
            for idx in g:
                eqs.append((row(i, verts[idx]), int(i == j)))
    return isinstance(lp_feasible_fm(LinearProgram(nv, eqs, ineqs)), Feasible)


def effect_vertices_by_hyperplanes(space) -> set:
    """Vertices of ``{f : 0 <= f(w) <= 1}`` from every m-subset of the 2V bounding hyperplanes."""
    m = space.ambient_dim
    planes = [(w, Fraction(b)) for w in space.vertices for b in (0, 1)]
    found = set()
    for subset in combinations(planes, m):
        sol = solve_linear_system([p[0] for p in subset], [p[1] for p in subset])
        if sol is None or sol.kernel:
            continue
        f = sol.particular
        if all(0 <= dot(f, w) <= 1 for w in space.vertices):
            found.add(f)
    return found


def pure_measurements_brute(space, effects) -> set:
    """All subsets of nonzero effects summing to the order unit (no pruning)."""
    m = space.ambient_dim
    u = tuple(Fraction(int(k == m - 1)) for k in range(m))
    nonzero = [e for e in effects if any(e.covector)]
    out = set()
    subsets = chain.from_iterable(combinations(nonzero, r) for r in range(1, len(nonzero) + 1))
    for sub in subsets:
        total = tuple(sum((e.covector[k] for e in sub), Fraction(0)) for k in range(m))
        if total == u:
            out.add(frozenset(sub))
    return out


def faces_by_brute_force(polytope, is_face) -> set:
    """Every nonempty vertex subset accepted by ``is_face``."""
    n = len(polytope.vertices)
    out = set()
    for r in range(1, n + 1):
        for sub in combinations(range(n), r):
            if is_face(polytope, sub) is not None:
                out.add(sub)
    return out
