"""Fourier-Motzkin elimination: an independent feasibility oracle.

Deliberately shares nothing with the simplex code beyond the problem and
result types. Every derived inequality carries the multipliers that
produced it from the original rows, so a contradiction ``0 <= c < 0``
yields a Farkas certificate directly.
"""

from __future__ import annotations

from fractions import Fraction

from ..errors import InternalInconsistency, TooLarge
from .lp import FarkasCertificate, Feasible, FeasibilityResult, Infeasible, LinearProgram, _normalize_certificate

MAX_VARIABLES = 12

# (coefficients, rhs, multipliers over [equalities..., inequalities...])
_Ineq = tuple[tuple[Fraction, ...], Fraction, tuple[Fraction, ...]]


def _combine(c1: Fraction, r1: _Ineq, c2: Fraction, r2: _Ineq) -> _Ineq:
    a = tuple(c1 * x + c2 * y for x, y in zip(r1[0], r2[0]))
    b = c1 * r1[1] + c2 * r2[1]
    m = tuple(c1 * x + c2 * y for x, y in zip(r1[2], r2[2]))
    return a, b, m


def _normalized(row: _Ineq) -> _Ineq:
    """Scale by a positive factor so the first nonzero coefficient is +-1."""
    a, b, m = row
    lead = next((abs(x) for x in a if x != 0), None)
    if lead is None or lead == 1:
        return row
    return tuple(x / lead for x in a), b / lead, tuple(x / lead for x in m)


def _certificate(lp: LinearProgram, mults: tuple[Fraction, ...]) -> FarkasCertificate:
    k = len(lp.equalities)
    cert = _normalize_certificate(lp, mults[:k], mults[k:])
    if not cert.verify():
        raise InternalInconsistency("Fourier-Motzkin produced an invalid certificate", {"lp": repr(lp)})
    return cert


def lp_feasible_fm(lp: LinearProgram, max_variables: int = MAX_VARIABLES) -> FeasibilityResult:
    """Feasibility by equality substitution followed by Fourier-Motzkin.

    Raises :class:`TooLarge` above ``max_variables`` variables because the
    number of derived rows can grow doubly exponentially.
    """
    n = lp.variables
    if n > max_variables:
        raise TooLarge("Fourier-Motzkin variables", n, max_variables)
    total = len(lp.equalities) + len(lp.inequalities)

    def unit(k: int) -> tuple[Fraction, ...]:
        return tuple(Fraction(int(i == k)) for i in range(total))

    eqs: list[_Ineq] = [(a, b, unit(i)) for i, (a, b) in enumerate(lp.equalities)]
    ineqs: list[_Ineq] = [
        (a, b, unit(len(lp.equalities) + i)) for i, (a, b) in enumerate(lp.inequalities)
    ]

    # Equalities: Gauss-Jordan substitution, remembering each pivot row.
    substitutions: list[tuple[int, _Ineq]] = []
    remaining = list(eqs)
    while remaining:
        row = remaining.pop(0)
        a, b, m = row
        pv = next((k for k in range(n) if a[k] != 0), None)
        if pv is None:
            if b != 0:
                mults = m if b < 0 else tuple(-x for x in m)
                return Infeasible(_certificate(lp, mults))
            continue
        piv = a[pv]
        row = tuple(x / piv for x in a), b / piv, tuple(x / piv for x in m)

        def eliminate(other: _Ineq) -> _Ineq:
            f = other[0][pv]
            return other if f == 0 else _combine(Fraction(1), other, -f, row)

        remaining = [eliminate(r) for r in remaining]
        ineqs = [eliminate(r) for r in ineqs]
        substitutions = [(v, eliminate(r)) for v, r in substitutions]
        substitutions.append((pv, row))

    eliminated_by_eq = {v for v, _ in substitutions}
    free_vars = [k for k in range(n) if k not in eliminated_by_eq]

    stages: list[tuple[int, list[_Ineq]]] = []
    current = ineqs
    for var in free_vars:
        current = _prune(current, lp)
        if isinstance(current, Infeasible):
            return current
        stages.append((var, current))
        pos = [r for r in current if r[0][var] > 0]
        neg = [r for r in current if r[0][var] < 0]
        nxt = [r for r in current if r[0][var] == 0]
        for p in pos:
            for q in neg:
                nxt.append(_combine(-q[0][var], p, p[0][var], q))
        current = nxt
    final = _prune(current, lp)
    if isinstance(final, Infeasible):
        return final

    x = [Fraction(0)] * n
    for var, rows in reversed(stages):
        lo, hi = None, None
        for a, b, _ in rows:
            c = a[var]
            if c == 0:
                continue
            rest = b - sum((a[k] * x[k] for k in range(n) if k != var and a[k]), Fraction(0))
            bound = rest / c
            if c > 0:
                hi = bound if hi is None else min(hi, bound)
            else:
                lo = bound if lo is None else max(lo, bound)
        if lo is not None:
            x[var] = lo
        elif hi is not None:
            x[var] = hi
        else:
            x[var] = Fraction(0)
    for var, (a, b, _) in reversed(substitutions):
        x[var] = b - sum((a[k] * x[k] for k in range(n) if k != var and a[k]), Fraction(0))
    witness = tuple(x)
    if not lp.is_satisfied_by(witness):
        raise InternalInconsistency("Fourier-Motzkin back-substitution failed", {"lp": repr(lp)})
    return Feasible(witness)


def _prune(rows: list[_Ineq], lp: LinearProgram) -> list[_Ineq] | Infeasible:
    """Drop trivial rows, keep the tightest of parallel rows, detect 0 <= c < 0."""
    best: dict[tuple[Fraction, ...], _Ineq] = {}
    for row in rows:
        row = _normalized(row)
        a, b, m = row
        if all(x == 0 for x in a):
            if b < 0:
                return Infeasible(_certificate(lp, m))
            continue
        kept = best.get(a)
        if kept is None or b < kept[1]:
            best[a] = row
    return list(best.values())
