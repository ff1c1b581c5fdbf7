"""Fraction-free Gaussian elimination over the rationals.

Rows are scaled to integers and reduced with Bareiss' one-step scheme, so
every intermediate entry is a minor of the input and divisions are exact.
Back-substitution happens in :class:`~fractions.Fraction` arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from ..errors import UsageError
from .rational import RatMat, RatVec, integer_scale, primitive


def _integer_rows(rows: Sequence[Sequence[Fraction]]) -> list[list[int]]:
    return [list(integer_scale(r)[0]) for r in rows]


def _bareiss(m: list[list[int]], ncols: int) -> list[int]:
    """Reduce ``m`` in place to row echelon form; return the pivot columns."""
    nrows = len(m)
    prev = 1
    r = 0
    pivots: list[int] = []
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        if p is None:
            continue
        if p != r:
            m[r], m[p] = m[p], m[r]
        piv_row = m[r]
        piv = piv_row[c]
        for i in range(r + 1, nrows):
            row = m[i]
            f = row[c]
            if f == 0:
                for j in range(c + 1, ncols):
                    row[j] = piv * row[j] // prev
            else:
                for j in range(c + 1, ncols):
                    row[j] = (piv * row[j] - f * piv_row[j]) // prev
            row[c] = 0
        prev = piv
        pivots.append(c)
        r += 1
    return pivots


def _check_rect(a: Sequence[Sequence[Fraction]]) -> int:
    if not a:
        return 0
    n = len(a[0])
    if any(len(r) != n for r in a):
        raise UsageError("matrix is not rectangular")
    return n


def echelon(a: Sequence[Sequence[Fraction]]) -> tuple[list[list[int]], list[int]]:
    """Integer row echelon form of ``a`` and its pivot columns."""
    n = _check_rect(a)
    m = _integer_rows(a)
    pivots = _bareiss(m, n)
    return m[: len(pivots)], pivots


def rank(a: Sequence[Sequence[Fraction]]) -> int:
    return len(echelon(a)[1])


def pivot_columns(a: Sequence[Sequence[Fraction]]) -> list[int]:
    return echelon(a)[1]


def _back_substitute(
    rows: list[list[int]], pivots: list[int], n: int, rhs: Sequence[int], free_values: dict[int, Fraction]
) -> RatVec:
    x = [Fraction(0)] * n
    for j, v in free_values.items():
        x[j] = v
    for r in range(len(pivots) - 1, -1, -1):
        pc = pivots[r]
        row = rows[r]
        acc = Fraction(rhs[r])
        for j in range(pc + 1, n):
            if row[j]:
                acc -= row[j] * x[j]
        x[pc] = acc / row[pc]
    return tuple(x)


@dataclass(frozen=True)
class LinearSolution:
    """Affine solution set ``particular + span(kernel)``."""

    particular: RatVec
    kernel: tuple[RatVec, ...]


def solve_linear_system(a: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> LinearSolution | None:
    """Solve ``a x = b`` exactly.

    Returns ``None`` when the system is inconsistent. The particular solution
    sets every free variable to zero; kernel vectors are primitive integer
    vectors whose first nonzero entry is positive, one per free column.
    """
    if len(a) != len(b):
        raise UsageError(f"right-hand side has length {len(b)}, matrix has {len(a)} rows")
    n = _check_rect(a)
    if not a:
        raise UsageError("cannot solve a system without rows; variable count is unknown")
    aug = [list(r) + [Fraction(bi)] for r, bi in zip(a, b)]
    m = _integer_rows(aug)
    pivots = _bareiss(m, n + 1)
    if pivots and pivots[-1] == n:
        return None
    rows = m[: len(pivots)]
    rhs = [row[n] for row in rows]
    particular = _back_substitute(rows, pivots, n, rhs, {})
    kernel = _kernel_from_echelon(rows, pivots, n)
    return LinearSolution(particular, kernel)


def _kernel_from_echelon(rows: list[list[int]], pivots: list[int], n: int) -> tuple[RatVec, ...]:
    pivset = set(pivots)
    zero_rhs = [0] * len(pivots)
    basis = []
    for f in range(n):
        if f in pivset:
            continue
        v = _back_substitute(rows, pivots, n, zero_rhs, {f: Fraction(1)})
        basis.append(_canonical_direction(v))
    return tuple(basis)


def _canonical_direction(v: Sequence[Fraction]) -> RatVec:
    p = primitive(v)
    lead = next((x for x in p if x != 0), Fraction(0))
    return tuple(-x for x in p) if lead < 0 else p


def nullspace(a: Sequence[Sequence[Fraction]], ncols: int | None = None) -> tuple[RatVec, ...]:
    """Basis of ``{x : a x = 0}``; ``ncols`` is required when ``a`` has no rows."""
    if not a:
        if ncols is None:
            raise UsageError("ncols is required for an empty matrix")
        return tuple(tuple(Fraction(int(i == j)) for j in range(ncols)) for i in range(ncols))
    n = _check_rect(a)
    rows, pivots = echelon(a)
    return _kernel_from_echelon(rows, pivots, n)


def inverse(a: Sequence[Sequence[Fraction]]) -> RatMat:
    """Exact inverse of a square matrix; raises on singular input."""
    n = _check_rect(a)
    if len(a) != n:
        raise UsageError("inverse of a non-square matrix")
    cols = []
    for i in range(n):
        e = [Fraction(int(i == j)) for j in range(n)]
        sol = solve_linear_system(a, e)
        if sol is None or sol.kernel:
            raise UsageError("matrix is singular")
        cols.append(sol.particular)
    return tuple(tuple(cols[j][i] for j in range(n)) for i in range(n))


def independent_rows(vectors: Sequence[Sequence[Fraction]]) -> list[int]:
    """Indices of a lexicographically first maximal linearly independent subset."""
    chosen: list[int] = []
    current: list[Sequence[Fraction]] = []
    r = 0
    for i, v in enumerate(vectors):
        trial = current + [v]
        rk = rank(trial)
        if rk > r:
            chosen.append(i)
            current = trial
            r = rk
    return chosen
