"""Exact rational arithmetic, linear algebra, LP and rational approximation."""

from .approx import approx_rational
from .fourier_motzkin import lp_feasible_fm
from .linalg import LinearSolution, inverse, nullspace, pivot_columns, rank, solve_linear_system
from .lp import (
    FarkasCertificate,
    Feasible,
    Infeasible,
    LinearProgram,
    Optimal,
    Unbounded,
    lp_feasible,
    lp_maximize,
)
from .rational import RatMat, RatVec, Rational, format_rational, mat, parse_rational, to_rational, vec

__all__ = [
    "FarkasCertificate",
    "Feasible",
    "Infeasible",
    "LinearProgram",
    "LinearSolution",
    "Optimal",
    "RatMat",
    "RatVec",
    "Rational",
    "Unbounded",
    "approx_rational",
    "format_rational",
    "inverse",
    "lp_feasible",
    "lp_feasible_fm",
    "lp_maximize",
    "mat",
    "nullspace",
    "parse_rational",
    "pivot_columns",
    "rank",
    "solve_linear_system",
    "to_rational",
    "vec",
]
