"""Seeded random polytopes and linear programs.

SplitMix64 is used instead of :mod:`random` so corpora are reproducible
byte for byte across Python versions and platforms.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import UsageError
from .exact.lp import LinearProgram
from .model import StateSpace, state_space_from_polytope
from .polytope import VPolytope, dim, from_points

_MASK = (1 << 64) - 1
COORDINATE_BOUND = 10
MAX_RETRIES = 100


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Uniform integer in ``[0, n)`` by rejection."""
        if n <= 0:
            raise UsageError("below() needs a positive bound")
        limit = (1 << 64) - (1 << 64) % n
        while True:
            x = self.next()
            if x < limit:
                return x % n

    def integer(self, lo: int, hi: int) -> int:
        return lo + self.below(hi - lo + 1)


@dataclass(frozen=True)
class RandomPolytopeSpec:
    dim: int
    vertices: int
    seed: int
    denominator: int = 1

    def __post_init__(self):
        if not 1 <= self.dim <= 5:
            raise UsageError("random polytope dimension must be between 1 and 5")
        if not 3 <= self.vertices <= 12 and not (self.dim == 1 and self.vertices == 2):
            raise UsageError("random polytope vertex target must be between 3 and 12")
        if self.vertices < self.dim + 1:
            raise UsageError("a d-polytope needs at least d + 1 vertices")
        if self.denominator < 1:
            raise UsageError("denominator bound must be positive")
        if not 0 <= self.seed <= _MASK:
            raise UsageError("seed must be a 64-bit unsigned integer")


def random_polytope(spec: RandomPolytopeSpec) -> VPolytope:
    """Hull of random rational points, redrawn until it has full dimension."""
    rng = SplitMix64(spec.seed)
    for _ in range(MAX_RETRIES):
        pts = []
        for _ in range(spec.vertices):
            den = rng.integer(1, spec.denominator)
            pts.append(
                tuple(Fraction(rng.integer(-COORDINATE_BOUND, COORDINATE_BOUND), den) for _ in range(spec.dim))
            )
        p = from_points(spec.dim, pts)
        if dim(p) == spec.dim:
            return p
    raise UsageError(f"no {spec.dim}-dimensional polytope after {MAX_RETRIES} draws")


def random_state_space(spec: RandomPolytopeSpec) -> StateSpace:
    desc = (
        ("kind", "random"),
        ("dim", str(spec.dim)),
        ("vertices", str(spec.vertices)),
        ("seed", str(spec.seed)),
        ("denominator", str(spec.denominator)),
    )
    return state_space_from_polytope(random_polytope(spec), desc)


def random_lp(seed: int, max_variables: int = 6, max_rows: int = 7, bound: int = 5) -> LinearProgram:
    """Small LP with integer data, a mix of equalities and inequalities."""
    rng = SplitMix64(seed)
    n = rng.integer(1, max_variables)
    n_eq = rng.integer(0, 2)
    n_ineq = rng.integer(1, max_rows)

    def row():
        return [rng.integer(-bound, bound) for _ in range(n)], rng.integer(-bound, bound)

    return LinearProgram(n, [row() for _ in range(n_eq)], [row() for _ in range(n_ineq)])
