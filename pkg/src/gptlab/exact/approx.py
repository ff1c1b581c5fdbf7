"""Continued-fraction approximation of real constants given symbolically.

The input is a sympy expression built from rationals, ``pi``, ``+ * /``,
powers, ``sqrt``, ``cos`` and ``sin``. It is evaluated with mpmath interval
arithmetic, so every decision below is made on a rigorous enclosure; if an
enclosure is too wide to decide, precision is doubled and the work redone.
"""

from __future__ import annotations

import math
from fractions import Fraction

import sympy
from mpmath import iv
from mpmath.libmp import to_rational as _mpf_to_rational

from ..errors import UsageError
from .rational import RationalLike, to_rational

_START_BITS = 192
_MAX_BITS = 1 << 14


class _Undecided(Exception):
    pass


def _to_interval(expr: sympy.Expr):
    if expr.is_Rational:
        return iv.mpf(int(expr.p)) / int(expr.q)
    if expr is sympy.pi:
        return iv.pi
    if isinstance(expr, sympy.Add):
        acc = iv.mpf(0)
        for arg in expr.args:
            acc = acc + _to_interval(arg)
        return acc
    if isinstance(expr, sympy.Mul):
        acc = iv.mpf(1)
        for arg in expr.args:
            acc = acc * _to_interval(arg)
        return acc
    if isinstance(expr, sympy.Pow):
        base, exp = expr.args
        b = _to_interval(base)
        if exp.is_Integer:
            k = int(exp)
            out = iv.mpf(1)
            for _ in range(abs(k)):
                out = out * b
            return out if k >= 0 else 1 / out
        if exp == sympy.Rational(1, 2):
            return iv.sqrt(b)
        if exp == sympy.Rational(-1, 2):
            return 1 / iv.sqrt(b)
        return iv.exp(_to_interval(exp) * iv.log(b))
    if isinstance(expr, sympy.cos):
        return iv.cos(_to_interval(expr.args[0]))
    if isinstance(expr, sympy.sin):
        return iv.sin(_to_interval(expr.args[0]))
    raise UsageError(f"unsupported expression node: {expr.func.__name__}")


def enclose(expr, bits: int) -> tuple[Fraction, Fraction]:
    """Exact rational endpoints of an interval containing ``expr``."""
    old = iv.prec
    iv.prec = bits
    try:
        x = _to_interval(sympy.sympify(expr))
    finally:
        iv.prec = old
    lo, hi = x._mpi_
    p, q = _mpf_to_rational(lo)
    r, s = _mpf_to_rational(hi)
    return Fraction(int(p), int(q)), Fraction(int(r), int(s))


def _convergents_of_interval(lo: Fraction, hi: Fraction):
    """Yield convergents shared by every real in ``[lo, hi]`` (lo >= 0)."""
    h0, h1 = 0, 1
    k0, k1 = 1, 0
    a_lo, a_hi = lo, hi
    while True:
        fl, fh = math.floor(a_lo), math.floor(a_hi)
        if fl != fh:
            raise _Undecided
        a = fl
        h0, h1 = h1, a * h1 + h0
        k0, k1 = k1, a * k1 + k0
        yield Fraction(h1, k1)
        r_lo, r_hi = a_lo - a, a_hi - a
        if r_lo == 0 and r_hi == 0:
            return
        if r_lo == 0 or r_hi == 0:
            raise _Undecided
        a_lo, a_hi = 1 / r_hi, 1 / r_lo


def _best_convergent(lo: Fraction, hi: Fraction, eps: Fraction) -> Fraction:
    for c in _convergents_of_interval(lo, hi):
        worst = max(abs(c - lo), abs(c - hi))
        if worst < eps:
            return c
        # Some real in the enclosure is within eps of c: cannot rule c out yet.
        nearest = Fraction(0) if lo <= c <= hi else min(abs(c - lo), abs(c - hi))
        if nearest < eps:
            raise _Undecided
    raise _Undecided


def approx_rational(x, eps: RationalLike) -> Fraction:
    """Convergent of ``x`` with the smallest denominator among those within ``eps``.

    Exact rationals are expanded exactly. Negative values are handled as
    ``-approx_rational(-x)``, so approximations are sign-symmetric.
    """
    eps = to_rational(eps)
    if eps <= 0:
        raise UsageError("eps must be positive")
    if isinstance(x, float):
        raise UsageError("floats are not accepted; pass an exact or symbolic value")
    expr = sympy.sympify(x)
    if expr.is_Rational:
        value = Fraction(int(expr.p), int(expr.q))
        if value < 0:
            return -_best_convergent(-value, -value, eps)
        return _best_convergent(value, value, eps)
    bits = _START_BITS
    while bits <= _MAX_BITS:
        lo, hi = enclose(expr, bits)
        try:
            if lo >= 0:
                return _best_convergent(lo, hi, eps)
            if hi <= 0:
                return -_best_convergent(-hi, -lo, eps)
            # Enclosure straddles zero: the value is within the enclosure width of 0.
            if max(-lo, hi) < eps:
                return Fraction(0)
            raise _Undecided
        except _Undecided:
            bits *= 2
    raise UsageError(f"could not decide an approximation of {expr} within {_MAX_BITS} bits")
