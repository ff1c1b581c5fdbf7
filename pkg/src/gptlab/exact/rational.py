"""Rational scalars and vectors.

Scalars are :class:`fractions.Fraction`, which already keeps lowest terms
with a positive denominator. Vectors are plain tuples of fractions and
matrices are tuples of such rows.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Iterable, Sequence, Union

from ..errors import UsageError

Rational = Fraction
RatVec = tuple[Fraction, ...]
RatMat = tuple[RatVec, ...]

RationalLike = Union[Fraction, int, str]

_RATIONAL_TEXT = re.compile(r"^-?\d+(/\d+)?$")


def to_rational(value: RationalLike) -> Fraction:
    """Coerce ``value`` to a Fraction; strings must look like ``p`` or ``p/q``."""
    if isinstance(value, bool):
        raise UsageError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if not _RATIONAL_TEXT.match(text):
            raise UsageError(f"not a rational in p/q form: {value!r}")
        try:
            return Fraction(text)
        except ZeroDivisionError:
            raise UsageError(f"zero denominator in {value!r}") from None
    raise UsageError(f"cannot interpret {type(value).__name__} as an exact rational")


def format_rational(q: Fraction) -> str:
    return str(Fraction(q))


def parse_rational(text: str) -> Fraction:
    return to_rational(text)


def vec(values: Iterable[RationalLike]) -> RatVec:
    return tuple(to_rational(v) for v in values)


def mat(rows: Iterable[Iterable[RationalLike]]) -> RatMat:
    out = tuple(vec(r) for r in rows)
    if out and len({len(r) for r in out}) != 1:
        raise ValueError("matrix rows have unequal length")
    return out


def zeros(n: int) -> RatVec:
    return (Fraction(0),) * n


def unit(n: int, i: int) -> RatVec:
    return tuple(Fraction(1) if k == i else Fraction(0) for k in range(n))


def dot(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    if len(a) != len(b):
        raise ValueError(f"dimension mismatch: {len(a)} vs {len(b)}")
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def add(a: Sequence[Fraction], b: Sequence[Fraction]) -> RatVec:
    if len(a) != len(b):
        raise ValueError(f"dimension mismatch: {len(a)} vs {len(b)}")
    return tuple(x + y for x, y in zip(a, b))


def sub(a: Sequence[Fraction], b: Sequence[Fraction]) -> RatVec:
    if len(a) != len(b):
        raise ValueError(f"dimension mismatch: {len(a)} vs {len(b)}")
    return tuple(x - y for x, y in zip(a, b))


def scale(c: RationalLike, a: Sequence[Fraction]) -> RatVec:
    c = to_rational(c)
    return tuple(c * x for x in a)


def vsum(vectors: Iterable[Sequence[Fraction]], n: int) -> RatVec:
    acc = [Fraction(0)] * n
    for v in vectors:
        if len(v) != n:
            raise ValueError("dimension mismatch in sum")
        for i, x in enumerate(v):
            acc[i] += x
    return tuple(acc)


def matvec(m: Sequence[Sequence[Fraction]], v: Sequence[Fraction]) -> RatVec:
    return tuple(dot(row, v) for row in m)


def transpose(m: Sequence[Sequence[Fraction]], ncols: int | None = None) -> RatMat:
    if not m:
        return tuple(() for _ in range(ncols or 0))
    return tuple(zip(*m))


def matmul(a: Sequence[Sequence[Fraction]], b: Sequence[Sequence[Fraction]]) -> RatMat:
    bt = transpose(b)
    return tuple(tuple(dot(row, col) for col in bt) for row in a)


def is_zero(v: Sequence[Fraction]) -> bool:
    return all(x == 0 for x in v)


def integer_scale(v: Sequence[Fraction]) -> tuple[tuple[int, ...], int]:
    """Return ``(ints, s)`` with ``ints == s * v`` and ``s`` the lcm of denominators."""
    s = 1
    for x in v:
        s = s * x.denominator // math.gcd(s, x.denominator)
    return tuple(int(x * s) for x in v), s


def primitive(v: Sequence[Fraction]) -> RatVec:
    """Positive multiple of ``v`` with coprime integer entries (zero stays zero)."""
    ints, _ = integer_scale(v)
    g = 0
    for x in ints:
        g = math.gcd(g, x)
    if g == 0:
        return tuple(Fraction(0) for _ in v)
    return tuple(Fraction(x // g) for x in ints)


def format_vec(v: Sequence[Fraction]) -> list[str]:
    return [format_rational(x) for x in v]
