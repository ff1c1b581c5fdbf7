"""Exact linear programming.

All variables are free; constraints are ``a . x = b`` and ``a . x <= b``.
The solver is a two-phase primal simplex with Bland's rule, run on an
integer-preserving tableau: every row shares one positive denominator and
pivots use Edmonds' exact-division update, so no gcd work happens inside
the loop.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

from ..errors import InternalInconsistency, UsageError
from .rational import RatVec, RationalLike, dot, format_vec, integer_scale, to_rational, vec

Row = tuple[RatVec, Fraction]


def _row(coeffs: Iterable[RationalLike], rhs: RationalLike) -> Row:
    return vec(coeffs), to_rational(rhs)


@dataclass(frozen=True)
class LinearProgram:
    variables: int
    equalities: tuple[Row, ...] = ()
    inequalities: tuple[Row, ...] = ()
    objective: RatVec | None = None

    def __post_init__(self):
        eqs = tuple(_row(a, b) for a, b in self.equalities)
        ineqs = tuple(_row(a, b) for a, b in self.inequalities)
        object.__setattr__(self, "equalities", eqs)
        object.__setattr__(self, "inequalities", ineqs)
        if self.objective is not None:
            object.__setattr__(self, "objective", vec(self.objective))
        if self.variables < 0:
            raise UsageError("variable count must be non-negative")
        for a, _ in eqs + ineqs:
            if len(a) != self.variables:
                raise UsageError(f"constraint has {len(a)} coefficients, expected {self.variables}")
        if self.objective is not None and len(self.objective) != self.variables:
            raise UsageError("objective length differs from variable count")

    def is_satisfied_by(self, x: Sequence[Fraction]) -> bool:
        if len(x) != self.variables:
            return False
        return all(dot(a, x) == b for a, b in self.equalities) and all(
            dot(a, x) <= b for a, b in self.inequalities
        )


@dataclass(frozen=True)
class FarkasCertificate:
    """Multipliers proving infeasibility of ``lp``.

    Equality multipliers are free, inequality multipliers non-negative; the
    combined row has all-zero coefficients and a negative right-hand side,
    i.e. it reads ``0 <= c`` with ``c < 0``.
    """

    lp: LinearProgram = field(repr=False)
    equality_multipliers: RatVec
    inequality_multipliers: RatVec

    def combined(self) -> Row:
        n = self.lp.variables
        coeffs = [Fraction(0)] * n
        rhs = Fraction(0)
        rows = list(zip(self.equality_multipliers, self.lp.equalities)) + list(
            zip(self.inequality_multipliers, self.lp.inequalities)
        )
        for y, (a, b) in rows:
            if y:
                for k in range(n):
                    coeffs[k] += y * a[k]
                rhs += y * b
        return tuple(coeffs), rhs

    def verify(self) -> bool:
        if len(self.equality_multipliers) != len(self.lp.equalities):
            return False
        if len(self.inequality_multipliers) != len(self.lp.inequalities):
            return False
        if any(z < 0 for z in self.inequality_multipliers):
            return False
        coeffs, rhs = self.combined()
        return all(c == 0 for c in coeffs) and rhs < 0

    def to_json(self) -> dict:
        return {
            "equality_multipliers": format_vec(self.equality_multipliers),
            "inequality_multipliers": format_vec(self.inequality_multipliers),
            "contradiction_rhs": str(self.combined()[1]),
        }


@dataclass(frozen=True)
class Feasible:
    witness: RatVec


@dataclass(frozen=True)
class Infeasible:
    certificate: FarkasCertificate


@dataclass(frozen=True)
class Optimal:
    point: RatVec
    value: Fraction


@dataclass(frozen=True)
class Unbounded:
    point: RatVec
    direction: RatVec


FeasibilityResult = Union[Feasible, Infeasible]
OptimizationResult = Union[Optimal, Infeasible, Unbounded]


def _normalize_certificate(lp: LinearProgram, eq: Sequence[Fraction], ineq: Sequence[Fraction]) -> FarkasCertificate:
    ints, _ = integer_scale(list(eq) + list(ineq))
    g = 0
    for v in ints:
        g = math.gcd(g, v)
    g = g or 1
    k = len(eq)
    scaled = [Fraction(v, g) for v in ints]
    return FarkasCertificate(lp, tuple(scaled[:k]), tuple(scaled[k:]))


class _Tableau:
    """Integer-preserving simplex tableau for ``A' z = b', z >= 0``.

    Columns: ``x+`` (n), ``x-`` (n), one slack per inequality, then the
    artificials. Row ``i`` is the original constraint scaled by a positive
    integer and possibly negated (``sign[i]``) so that its rhs is >= 0.
    """

    def __init__(self, lp: LinearProgram):
        n = lp.variables
        self.lp = lp
        self.n = n
        rows = [(a, b, False) for a, b in lp.equalities] + [(a, b, True) for a, b in lp.inequalities]
        n_slack = len(lp.inequalities)
        self.slack0 = 2 * n
        self.art0 = 2 * n + n_slack
        self.scale: list[int] = []
        self.sign: list[int] = []
        self.initial_col: list[int] = []
        tableau: list[list[int]] = []
        arts = 0
        slack_idx = 0
        needs_art = []
        for a, b, is_ineq in rows:
            ints, s = integer_scale(list(a) + [b])
            coeffs, rhs = ints[:-1], ints[-1]
            sg = 1 if rhs >= 0 else -1
            self.scale.append(s)
            self.sign.append(sg)
            row = [sg * c for c in coeffs] + [-sg * c for c in coeffs] + [0] * n_slack
            if is_ineq:
                row[self.slack0 + slack_idx] = sg
                own_slack = self.slack0 + slack_idx
                slack_idx += 1
            else:
                own_slack = None
            if own_slack is not None and sg == 1:
                self.initial_col.append(own_slack)
                needs_art.append(False)
            else:
                self.initial_col.append(self.art0 + arts)
                needs_art.append(True)
                arts += 1
            tableau.append(row + [sg * rhs])
        self.ncols = self.art0 + arts
        for i, row in enumerate(tableau):
            rhs = row.pop()
            row.extend([0] * arts)
            if needs_art[i]:
                row[self.initial_col[i]] = 1
            row.append(rhs)
        self.rows = tableau
        self.basis = list(self.initial_col)
        self.den = 1
        self.cost: list[int] = []

    @property
    def rhs_col(self) -> int:
        return self.ncols

    def set_cost(self, c: Sequence[int]) -> None:
        """Install reduced costs for integer cost vector ``c`` (minimization)."""
        d = self.den
        red = [d * cj for cj in c] + [0]
        for i, bi in enumerate(self.basis):
            cb = c[bi]
            if cb:
                row = self.rows[i]
                for j in range(self.ncols + 1):
                    if row[j]:
                        red[j] -= cb * row[j]
        self.cost = red

    def pivot(self, r: int, c: int) -> None:
        prow = self.rows[r]
        p = prow[c]
        d = self.den
        width = self.ncols + 1
        for target in self.rows + [self.cost]:
            if target is prow:
                continue
            f = target[c]
            if f == 0:
                if p != d:
                    for j in range(width):
                        if target[j]:
                            target[j] = p * target[j] // d
            else:
                for j in range(width):
                    target[j] = (p * target[j] - f * prow[j]) // d
        self.den = p
        self.basis[r] = c
        if p < 0:
            for target in self.rows + [self.cost]:
                for j in range(width):
                    target[j] = -target[j]
            self.den = -p

    def run(self, allowed: Sequence[bool]) -> str:
        """Bland's rule iterations; returns ``"optimal"`` or ``"unbounded:<col>"``."""
        rc = self.rhs_col
        while True:
            cost = self.cost
            enter = next((j for j in range(self.ncols) if allowed[j] and cost[j] < 0), None)
            if enter is None:
                return "optimal"
            best = None
            for i, row in enumerate(self.rows):
                a = row[enter]
                if a > 0:
                    key_num, key_den = row[rc], a
                    if best is None:
                        best = (i, key_num, key_den)
                        continue
                    _, bn, bd = best
                    lhs, rhs = key_num * bd, bn * key_den
                    if lhs < rhs or (lhs == rhs and self.basis[i] < self.basis[best[0]]):
                        best = (i, key_num, key_den)
            if best is None:
                return f"unbounded:{enter}"
            self.pivot(best[0], enter)

    def values(self) -> list[Fraction]:
        z = [Fraction(0)] * self.ncols
        for i, bi in enumerate(self.basis):
            z[bi] = Fraction(self.rows[i][self.rhs_col], self.den)
        return z

    def point(self) -> RatVec:
        z = self.values()
        return tuple(z[k] - z[self.n + k] for k in range(self.n))


def _phase_one(lp: LinearProgram) -> tuple[_Tableau, FarkasCertificate | None]:
    t = _Tableau(lp)
    c = [0] * t.art0 + [1] * (t.ncols - t.art0)
    t.set_cost(c)
    t.run([True] * t.ncols)
    value = Fraction(-t.cost[t.rhs_col], t.den)
    if value == 0:
        return t, None
    # Row duals from reduced costs of the initial identity columns.
    mults = []
    for i, col in enumerate(t.initial_col):
        pi = Fraction(c[col]) - Fraction(t.cost[col], t.den)
        mults.append(-pi * t.sign[i] * t.scale[i])
    k = len(lp.equalities)
    cert = _normalize_certificate(lp, mults[:k], mults[k:])
    if not cert.verify():
        raise InternalInconsistency("simplex produced an invalid Farkas certificate", {"lp": repr(lp)})
    return t, cert


def lp_feasible(lp: LinearProgram) -> FeasibilityResult:
    """Decide feasibility exactly; returns a witness point or a Farkas certificate."""
    t, cert = _phase_one(lp)
    if cert is not None:
        return Infeasible(cert)
    x = t.point()
    if not lp.is_satisfied_by(x):
        raise InternalInconsistency("simplex witness violates a constraint", {"lp": repr(lp)})
    return Feasible(x)


def lp_maximize(lp: LinearProgram) -> OptimizationResult:
    """Maximize ``lp.objective`` exactly (phase two with Bland's rule)."""
    if lp.objective is None:
        raise UsageError("lp_maximize needs an objective")
    t, cert = _phase_one(lp)
    if cert is not None:
        return Infeasible(cert)
    is_art = [j >= t.art0 for j in range(t.ncols)]
    # Drive zero-level artificials out of the basis where possible.
    for i in range(len(t.rows)):
        if is_art[t.basis[i]]:
            row = t.rows[i]
            j = next((j for j in range(t.art0) if row[j] != 0), None)
            if j is not None:
                t.pivot(i, j)
    obj_ints, _ = integer_scale(lp.objective)
    n = lp.variables
    c = [-v for v in obj_ints] + list(obj_ints) + [0] * (t.ncols - 2 * n)
    t.set_cost(c)
    status = t.run([not a for a in is_art])
    x = t.point()
    if not lp.is_satisfied_by(x):
        raise InternalInconsistency("simplex optimum violates a constraint", {"lp": repr(lp)})
    if status.startswith("unbounded"):
        col = int(status.split(":")[1])
        direction = [Fraction(0)] * t.ncols
        direction[col] = Fraction(1)
        for i, bi in enumerate(t.basis):
            direction[bi] = -Fraction(t.rows[i][col], t.den)
        d = tuple(direction[k] - direction[n + k] for k in range(n))
        return Unbounded(x, d)
    return Optimal(x, dot(lp.objective, x))
