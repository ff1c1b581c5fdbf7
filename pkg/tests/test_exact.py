from fractions import Fraction

import mpmath
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from gptlab.errors import TooLarge, UsageError
from gptlab.exact import (
    Feasible,
    Infeasible,
    LinearProgram,
    Optimal,
    Unbounded,
    approx_rational,
    format_rational,
    lp_feasible,
    lp_feasible_fm,
    lp_maximize,
    parse_rational,
    rank,
    solve_linear_system,
    to_rational,
)
from gptlab.exact.linalg import inverse, nullspace
from gptlab.exact.rational import matmul, transpose
from gptlab.randomgen import random_lp

F = Fraction

small = st.integers(-6, 6)


def matrices(max_rows=4, max_cols=4):
    return st.integers(1, max_cols).flatmap(
        lambda n: st.lists(st.lists(small, min_size=n, max_size=n), min_size=1, max_size=max_rows)
    )


# Rationals -------------------------------------------------------------------


def test_text_form():
    assert format_rational(F(3, 1)) == "3"
    assert format_rational(F(-6, 4)) == "-3/2"
    assert parse_rational("-3/2") == F(-3, 2)
    assert parse_rational("4/2") == 2


def test_to_rational_rejects_floats_and_bools():
    with pytest.raises(UsageError):
        to_rational(0.5)
    with pytest.raises(UsageError):
        to_rational(True)


@given(st.integers(-1000, 1000), st.integers(1, 1000))
def test_text_round_trip(p, q):
    x = F(p, q)
    assert parse_rational(format_rational(x)) == x


# Linear systems ----------------------------------------------------------------


def test_identity_system():
    sol = solve_linear_system([[1, 0], [0, 1]], [3, 4])
    assert sol.particular == (3, 4) and sol.kernel == ()


def test_underdetermined_system():
    sol = solve_linear_system([[1, 1]], [1])
    assert sol.particular == (1, 0)
    assert sol.kernel == ((1, -1),)


def test_inconsistent_system():
    assert solve_linear_system([[1, 0], [1, 0]], [0, 1]) is None


def test_dimension_mismatch():
    with pytest.raises(UsageError):
        solve_linear_system([[1, 0]], [1, 2])
    with pytest.raises(UsageError):
        rank([[1, 0], [1]])


@pytest.mark.parametrize(
    "matrix, expected",
    [([[1, 0], [0, 1]], 2), ([[1, 2], [2, 4]], 1), ([[0] * 3] * 3, 0)],
)
def test_rank_examples(matrix, expected):
    assert rank(matrix) == expected


@given(matrices(), st.data())
def test_solution_family_reproduces_rhs(a, data):
    b = data.draw(st.lists(small, min_size=len(a), max_size=len(a)))
    sol = solve_linear_system(a, b)
    if sol is None:
        # Inconsistent means b is outside the column space: the rank grows.
        assert rank([row + [bi] for row, bi in zip(a, b)]) == rank(a) + 1
        return
    coeffs = data.draw(st.lists(small, min_size=len(sol.kernel), max_size=len(sol.kernel)))
    x = list(sol.particular)
    for c, k in zip(coeffs, sol.kernel):
        x = [xi + c * ki for xi, ki in zip(x, k)]
    assert [sum(F(r) * xi for r, xi in zip(row, x)) for row in a] == [F(v) for v in b]
    assert len(sol.kernel) == len(a[0]) - rank(a)


@given(matrices())
def test_rank_of_transpose(a):
    assert rank(a) == rank(transpose(a))


@given(matrices())
def test_nullspace_is_annihilated(a):
    for k in nullspace(a):
        assert all(sum(F(r) * x for r, x in zip(row, k)) == 0 for row in a)


def test_inverse_round_trip():
    a = [[2, 1, 0], [1, 3, 1], [0, 1, 4]]
    inv = inverse(a)
    ident = matmul([[F(x) for x in r] for r in a], inv)
    assert ident == tuple(tuple(F(int(i == j)) for j in range(3)) for i in range(3))
    with pytest.raises(UsageError):
        inverse([[1, 2], [2, 4]])


# Linear programming ------------------------------------------------------------


def test_lp_interval_feasible():
    lp = LinearProgram(1, [], [([-1], 0), ([1], 1)])
    for solver in (lp_feasible, lp_feasible_fm):
        res = solver(lp)
        assert isinstance(res, Feasible) and res.witness == (0,)


def test_lp_contradiction_certificate():
    lp = LinearProgram(1, [], [([1], 0), ([-1], -1)])
    for solver in (lp_feasible, lp_feasible_fm):
        res = solver(lp)
        assert isinstance(res, Infeasible)
        assert res.certificate.verify()
        assert res.certificate.inequality_multipliers == (1, 1)


def test_lp_equalities_only():
    lp = LinearProgram(2, [([1, 1], 2), ([1, -1], 0)], [])
    res = lp_feasible(lp)
    assert res.witness == (1, 1)


def test_lp_shape_checked():
    with pytest.raises(UsageError):
        LinearProgram(2, [([1], 0)], [])


def test_fm_variable_limit():
    lp = LinearProgram(13, [], [([1] * 13, 1)])
    with pytest.raises(TooLarge):
        lp_feasible_fm(lp)


def test_maximize():
    lp = LinearProgram(2, [], [([1, 0], 1), ([0, 1], 2), ([-1, 0], 0), ([0, -1], 0)], [1, 1])
    res = lp_maximize(lp)
    assert isinstance(res, Optimal) and res.value == 3 and res.point == (1, 2)
    open_lp = LinearProgram(1, [], [([-1], 0)], [1])
    res = lp_maximize(open_lp)
    assert isinstance(res, Unbounded) and res.direction == (1,)


@pytest.mark.parametrize("seed", range(0, 500, 7))
def test_cross_oracle_sample(seed):
    lp = random_lp(seed)
    a, b = lp_feasible(lp), lp_feasible_fm(lp)
    assert type(a) is type(b)
    for res in (a, b):
        if isinstance(res, Feasible):
            assert lp.is_satisfied_by(res.witness)
        else:
            assert res.certificate.verify()


@settings(max_examples=150, deadline=None)
@given(
    st.integers(1, 4).flatmap(
        lambda n: st.tuples(
            st.just(n),
            st.lists(st.tuples(st.lists(small, min_size=n, max_size=n), small), max_size=2),
            st.lists(st.tuples(st.lists(small, min_size=n, max_size=n), small), min_size=1, max_size=6),
        )
    )
)
def test_solvers_agree(problem):
    n, eqs, ineqs = problem
    lp = LinearProgram(n, eqs, ineqs)
    a, b = lp_feasible(lp), lp_feasible_fm(lp)
    assert type(a) is type(b)
    if isinstance(a, Feasible):
        assert lp.is_satisfied_by(a.witness) and lp.is_satisfied_by(b.witness)
    else:
        assert a.certificate.verify() and b.certificate.verify()


# Rational approximation ----------------------------------------------------------


def test_exact_values():
    eps = F(1, 10**6)
    assert approx_rational(sympy.cos(2 * sympy.pi * 4 / 4), eps) == 1
    assert approx_rational(sympy.cos(2 * sympy.pi / 3), eps) == F(-1, 2)


def test_pentagon_coordinate_against_fifty_digits():
    eps = F(1, 10**9)
    r5 = sympy.sqrt(1 / sympy.cos(sympy.pi / 5))
    q = approx_rational(r5 * sympy.cos(2 * sympy.pi / 5), eps)
    with mpmath.workdps(50):
        exact = mpmath.sqrt(1 / mpmath.cos(mpmath.pi / 5)) * mpmath.cos(2 * mpmath.pi / 5)
        assert abs(mpmath.mpf(q.numerator) / q.denominator - exact) < mpmath.mpf(1) / 10**9


def test_convergent_has_minimal_denominator():
    # Convergents of pi: 3, 22/7, 333/106, 355/113.
    assert approx_rational(sympy.pi, F(1, 100)) == F(22, 7)
    assert approx_rational(sympy.pi, F(1, 10**6)) == F(355, 113)
    assert approx_rational(-sympy.pi, F(1, 100)) == F(-22, 7)


def test_approx_rejects_bad_input():
    with pytest.raises(UsageError):
        approx_rational(sympy.pi, 0)
    with pytest.raises(UsageError):
        approx_rational(3.14, F(1, 10))


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 12), st.integers(0, 11), st.integers(3, 12))
def test_polygon_coordinates_within_eps(n, i, k):
    eps = F(1, 10**k)
    r = sympy.sqrt(1 / sympy.cos(sympy.pi / n))
    expr = r * sympy.sin(2 * sympy.pi * i / n)
    q = approx_rational(expr, eps)
    with mpmath.workdps(60):
        exact = mpmath.sqrt(1 / mpmath.cos(mpmath.pi / n)) * mpmath.sin(2 * mpmath.pi * i / n)
        assert abs(mpmath.mpf(q.numerator) / q.denominator - exact) < mpmath.mpf(eps.numerator) / eps.denominator
