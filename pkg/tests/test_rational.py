from fractions import Fraction as F
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncspeedup.rational import (
    EQ,
    GE,
    LE,
    MAXIMIZE,
    DimensionLimitError,
    LinearProgram,
    LPValidationError,
    Polytope,
    UnboundedPolytopeError,
    enumerate_vertices,
    format_rational,
    is_extreme,
    parse_rational,
    solve_lp,
)
from ncspeedup.traffic import PortShape, admissible_polytope, full_structure

import oracles


def _row_value(coeffs, x):
    return sum((a * b for a, b in zip(coeffs, x)), F(0))


def check_certificates(lp, res):
    """Primal feasibility, dual feasibility and equal objective values."""
    x = res.primal
    lbs = lp.bounds()
    assert all(xi >= lb for xi, lb in zip(x, lbs))
    for con in lp.constraints:
        lhs = _row_value(con.coefficients, x)
        assert {LE: lhs <= con.rhs, GE: lhs >= con.rhs, EQ: lhs == con.rhs}[con.relation]
    assert _row_value(lp.objective, x) == res.value
    sign = 1 if lp.sense == "min" else -1
    y = res.dual
    for con, yi in zip(lp.constraints, y):
        if con.relation == GE:
            assert sign * yi >= 0
        elif con.relation == LE:
            assert sign * yi <= 0
    reduced = [
        c - sum((con.coefficients[j] * yi for con, yi in zip(lp.constraints, y)), F(0))
        for j, c in enumerate(lp.objective)
    ]
    assert all(sign * d >= 0 for d in reduced)
    dual_value = sum((yi * con.rhs for con, yi in zip(lp.constraints, y)), F(0))
    dual_value += sum((d * lb for d, lb in zip(reduced, lbs)), F(0))
    assert dual_value == res.value
    # complementary slackness
    for con, yi in zip(lp.constraints, y):
        if yi:
            assert _row_value(con.coefficients, x) == con.rhs
    for d, xi, lb in zip(reduced, x, lbs):
        if d:
            assert xi == lb


@pytest.mark.parametrize(
    "text,expected",
    [("3/4", F(3, 4)), ("-2/6", F(-1, 3)), ("5", F(5)), (7, F(7)), (" 1 / 2 ", F(1, 2))],
)
def test_parse_rational(text, expected):
    assert parse_rational(text) == expected


@pytest.mark.parametrize("bad", ["1/0", "0.5", "abc", 0.5, True, None, "1/-2"])
def test_parse_rational_rejects(bad):
    with pytest.raises(ValueError):
        parse_rational(bad)


def test_format_rational():
    assert format_rational(F(5, 4)) == "5/4"
    assert format_rational(F(2)) == "2"
    assert format_rational(F(-6, 4)) == "-3/2"


def test_box_corner():
    lp = LinearProgram.build([1, 1], [([1, 0], LE, 1), ([0, 1], LE, 1)], MAXIMIZE)
    res = solve_lp(lp)
    assert res.optimal
    assert res.value == 2
    assert res.primal == (1, 1)
    check_certificates(lp, res)


def test_c5_cover_lp():
    sets = [s for s in oracles.maximal_stable_sets(5, [(k, (k + 1) % 5) for k in range(5)])]
    assert len(sets) == 5
    lp = LinearProgram.build(
        [1] * 5, [([1 if v in s else 0 for s in sets], GE, 1) for v in range(5)]
    )
    res = solve_lp(lp)
    assert res.value == F(5, 2)
    check_certificates(lp, res)


def test_infeasible():
    assert solve_lp(LinearProgram.build([1], [([1], LE, -1)])).status == "infeasible"


def test_unbounded():
    lp = LinearProgram.build([1, 0], [([1, -1], LE, 1)], MAXIMIZE)
    assert solve_lp(lp).status == "unbounded"


def test_arity_mismatch():
    with pytest.raises(LPValidationError):
        LinearProgram.build([1, 1], [([1], LE, 1)])
    with pytest.raises(LPValidationError):
        LinearProgram.build([1], [([1], "<", 1)])


def test_equality_and_lower_bounds():
    lp = LinearProgram.build(
        [1, 2, -1],
        [([1, 1, 1], EQ, 4), ([1, -1, 0], GE, -1), ([0, 1, 1], LE, 3)],
        lower_bounds=[1, 0, -2],
    )
    res = solve_lp(lp)
    assert res.optimal
    check_certificates(lp, res)


def test_redundant_equalities():
    lp = LinearProgram.build(
        [1, 1], [([1, 1], EQ, 1), ([2, 2], EQ, 2), ([1, 0], GE, F(1, 3))]
    )
    res = solve_lp(lp)
    assert res.value == 1
    check_certificates(lp, res)


def test_deterministic():
    lp = LinearProgram.build([1] * 4, [([1, 1, 0, 0], GE, 1), ([0, 1, 1, 0], GE, 1), ([0, 0, 1, 1], GE, 1)])
    assert solve_lp(lp) == solve_lp(lp)


small = st.fractions(min_value=-5, max_value=5, max_denominator=4)


@settings(max_examples=60, deadline=None)
@given(
    st.integers(min_value=1, max_value=4).flatmap(
        lambda n: st.tuples(
            st.lists(small, min_size=n, max_size=n),
            st.lists(
                st.tuples(
                    st.lists(small, min_size=n, max_size=n),
                    st.sampled_from([LE, GE, EQ]),
                    small,
                ),
                min_size=1,
                max_size=4,
            ),
            st.sampled_from(["min", "max"]),
        )
    )
)
def test_random_lps_certify(data):
    obj, rows, sense = data
    n = len(obj)
    # a box keeps every instance bounded
    rows = rows + [([1 if j == k else 0 for j in range(n)], LE, 10) for k in range(n)]
    lp = LinearProgram.build(obj, rows, sense)
    res = solve_lp(lp)
    if res.optimal:
        check_certificates(lp, res)
    else:
        assert res.status == "infeasible"
        # brute force: no basic point of the system is feasible
        assert not _brute_feasible(lp)


def _brute_feasible(lp):
    n = lp.n_vars
    rows = [(list(c.coefficients), c.rhs) for c in lp.constraints]
    rows += [([1 if j == k else 0 for j in range(n)], 0) for k in range(n)]
    for combo in combinations(rows, n):
        x = oracles._solve([r for r, _ in combo], [b for _, b in combo])
        if x is None:
            continue
        ok = all(xi >= 0 for xi in x)
        for c in lp.constraints:
            lhs = _row_value(c.coefficients, x)
            ok = ok and {LE: lhs <= c.rhs, GE: lhs >= c.rhs, EQ: lhs == c.rhs}[c.relation]
        if ok:
            return True
    return False


def test_unit_square():
    p = Polytope.build(2, [([-1, 0], 0), ([0, -1], 0), ([1, 0], 1), ([0, 1], 1)])
    assert enumerate_vertices(p) == [(0, 0), (0, 1), (1, 0), (1, 1)]


def test_simplex_vertices():
    p = Polytope.build(3, [([-1, 0, 0], 0), ([0, -1, 0], 0), ([0, 0, -1], 0), ([1, 1, 1], 1)])
    assert len(enumerate_vertices(p)) == 4


def test_unbounded_polytope():
    p = Polytope.build(2, [([-1, 0], 0), ([0, -1], 0), ([1, -1], 1)])
    with pytest.raises(UnboundedPolytopeError):
        enumerate_vertices(p)


def test_empty_polytope():
    p = Polytope.build(1, [([1], -1), ([-1], 0)])
    assert enumerate_vertices(p) == []


def test_dimension_limit():
    p = Polytope.build(15, [([1 if j == k else 0 for j in range(15)], 1) for k in range(15)])
    with pytest.raises(DimensionLimitError):
        enumerate_vertices(p)


def brute_vertices(p):
    found = set()
    rows = p.inequalities
    for combo in combinations(rows, p.dimension):
        x = oracles._solve([list(a) for a, _ in combo], [b for _, b in combo])
        if x is not None and p.contains(x):
            found.add(tuple(x))
    return sorted(found)


def test_admissible_2x3_vertices_match_bruteforce():
    p = admissible_polytope(PortShape(2, 3), full_structure(2, 3))
    assert p.dimension == 8 and len(p.inequalities) == 13
    verts = enumerate_vertices(p)
    assert verts == brute_vertices(p)
    assert len(verts) == 29  # regression value


def test_vertex_properties():
    p = admissible_polytope(PortShape(2, 2), full_structure(2, 2))
    verts = enumerate_vertices(p)
    for v in verts:
        assert p.contains(v)
        tight = p.tight(v)
        assert len(tight) >= p.dimension
        assert oracles_rank([p.inequalities[k][0] for k in tight]) == p.dimension
        assert is_extreme(v, verts)


def oracles_rank(rows):
    rows = [list(map(F, r)) for r in rows]
    rank = 0
    ncols = len(rows[0])
    for c in range(ncols):
        piv = next((r for r in range(rank, len(rows)) if rows[r][c] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for r in range(len(rows)):
            if r != rank and rows[r][c] != 0:
                f = rows[r][c] / rows[rank][c]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
    return rank


@settings(max_examples=25, deadline=None)
@given(st.lists(st.lists(st.integers(-3, 3), min_size=3, max_size=3), min_size=1, max_size=4))
def test_random_polytopes_match_bruteforce(extra):
    rows = [([-1, 0, 0], 0), ([0, -1, 0], 0), ([0, 0, -1], 0), ([1, 1, 1], 3)]
    rows += [(r[:2] + [r[2]], r[0] + 1) for r in extra]
    p = Polytope.build(3, [(r[0], r[1]) for r in rows])
    assert enumerate_vertices(p) == brute_vertices(p)
