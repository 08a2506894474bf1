"""Exact rational arithmetic, linear programming and vertex enumeration.

Every number is a :class:`fractions.Fraction`; there is no floating point
anywhere in this module.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

Rational = Fraction

LE, GE, EQ = "<=", ">=", "="
MINIMIZE, MAXIMIZE = "min", "max"
OPTIMAL, INFEASIBLE, UNBOUNDED = "optimal", "infeasible", "unbounded"

MAX_VERTEX_DIMENSION = 14

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*)?$")


class LPValidationError(ValueError):
    """Malformed linear program (arity mismatch, bad relation, ...)."""


class UnboundedPolytopeError(ValueError):
    pass


class DimensionLimitError(ValueError):
    pass


def parse_rational(value) -> Fraction:
    """Parse ``"p/q"``, ``"p"`` or an ``int`` into an exact Fraction.

    Floats are rejected outright: they cannot round-trip exactly.
    """
    if isinstance(value, bool):
        raise ValueError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        m = _RATIONAL_RE.match(value)
        if m is None:
            raise ValueError(f"not a rational: {value!r}")
        num = int(m.group(1))
        den = int(m.group(2)) if m.group(2) is not None else 1
        if den == 0:
            raise ValueError(f"zero denominator: {value!r}")
        return Fraction(num, den)
    raise ValueError(f"not a rational: {value!r}")


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class Constraint:
    coefficients: tuple[Fraction, ...]
    relation: str
    rhs: Fraction


@dataclass(frozen=True)
class LinearProgram:
    objective: tuple[Fraction, ...]
    constraints: tuple[Constraint, ...]
    sense: str = MINIMIZE
    lower_bounds: tuple[Fraction, ...] | None = None

    @classmethod
    def build(cls, objective, rows, sense=MINIMIZE, lower_bounds=None):
        """Convenience constructor from plain lists; ``rows`` are
        ``(coefficients, relation, rhs)`` triples."""
        obj = tuple(Fraction(c) for c in objective)
        cons = tuple(
            Constraint(tuple(Fraction(a) for a in coeffs), rel, Fraction(rhs))
            for coeffs, rel, rhs in rows
        )
        lbs = None if lower_bounds is None else tuple(Fraction(x) for x in lower_bounds)
        lp = cls(obj, cons, sense, lbs)
        lp.validate()
        return lp

    @property
    def n_vars(self) -> int:
        return len(self.objective)

    def bounds(self) -> tuple[Fraction, ...]:
        if self.lower_bounds is None:
            return (Fraction(0),) * self.n_vars
        return self.lower_bounds

    def validate(self) -> None:
        n = self.n_vars
        if self.sense not in (MINIMIZE, MAXIMIZE):
            raise LPValidationError(f"unknown sense {self.sense!r}")
        if self.lower_bounds is not None and len(self.lower_bounds) != n:
            raise LPValidationError(
                f"{len(self.lower_bounds)} lower bounds for {n} variables"
            )
        for k, row in enumerate(self.constraints):
            if len(row.coefficients) != n:
                raise LPValidationError(
                    f"constraint {k} has {len(row.coefficients)} coefficients, expected {n}"
                )
            if row.relation not in (LE, GE, EQ):
                raise LPValidationError(f"constraint {k}: unknown relation {row.relation!r}")


@dataclass(frozen=True)
class LPResult:
    """Outcome of :func:`solve_lp`.

    ``dual`` holds one multiplier per constraint, normalised so that the
    dual objective ``sum(y_i * b_i) + sum(reduced_j * lb_j)`` equals
    ``value``; for a minimisation ``>=`` rows get ``y >= 0`` and ``<=`` rows
    ``y <= 0`` (signs flip for maximisation).
    """

    status: str
    value: Fraction | None = None
    primal: tuple[Fraction, ...] = ()
    dual: tuple[Fraction, ...] = ()

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


def _dot(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    return sum((x * y for x, y in zip(a, b) if x and y), Fraction(0))


class _Tableau:
    """Dense simplex tableau ``[A | b]`` with an explicit basis list."""

    def __init__(self, rows: list[list[Fraction]], basis: list[int], n_cols: int):
        self.rows = rows
        self.basis = basis
        self.n_cols = n_cols

    def pivot(self, r: int, c: int) -> None:
        rows = self.rows
        prow = rows[r]
        p = prow[c]
        if p != 1:
            prow = [x / p if x else x for x in prow]
            rows[r] = prow
        nz = [j for j, x in enumerate(prow) if x]
        for i, row in enumerate(rows):
            if i == r:
                continue
            f = row[c]
            if f:
                for j in nz:
                    row[j] -= f * prow[j]
        self.basis[r] = c

    def reduced_costs(self, cost: Sequence[Fraction], allowed: Sequence[bool]) -> list[Fraction]:
        n = self.n_cols
        d = list(cost[:n])
        for i, b in enumerate(self.basis):
            cb = cost[b]
            if cb:
                row = self.rows[i]
                for j in range(n):
                    if row[j]:
                        d[j] -= cb * row[j]
        for j in range(n):
            if not allowed[j]:
                d[j] = Fraction(0)
        return d

    def run(self, cost: Sequence[Fraction], allowed: Sequence[bool]) -> bool:
        """Minimise ``cost`` with Bland's rule.  False when unbounded."""
        n = self.n_cols
        while True:
            d = self.reduced_costs(cost, allowed)
            enter = next((j for j in range(n) if allowed[j] and d[j] < 0), None)
            if enter is None:
                return True
            leave = None
            best = None
            for i, row in enumerate(self.rows):
                a = row[enter]
                if a > 0:
                    ratio = row[n] / a
                    if (
                        best is None
                        or ratio < best
                        or (ratio == best and self.basis[i] < self.basis[leave])
                    ):
                        best, leave = ratio, i
            if leave is None:
                return False
            self.pivot(leave, enter)


def solve_lp(lp: LinearProgram) -> LPResult:
    """Solve ``lp`` exactly with a two-phase dense tableau simplex.

    Bland's rule guarantees termination.  Infeasible and unbounded problems
    are reported through ``status``; a malformed program raises
    :class:`LPValidationError`.
    """
    lp.validate()
    n = lp.n_vars
    lbs = lp.bounds()
    sign = 1 if lp.sense == MINIMIZE else -1
    cost_x = [sign * c for c in lp.objective]

    # shift x = x' + lb, then make every rhs nonnegative
    norm_rows: list[tuple[list[Fraction], str, Fraction, int]] = []
    for con in lp.constraints:
        coeffs = list(con.coefficients)
        rhs = con.rhs - _dot(coeffs, lbs)
        rel = con.relation
        flip = 1
        if rhs < 0:
            coeffs = [-a for a in coeffs]
            rhs = -rhs
            rel = {LE: GE, GE: LE, EQ: EQ}[rel]
            flip = -1
        norm_rows.append((coeffs, rel, rhs, flip))

    m = len(norm_rows)
    # column layout: x' | slack/surplus | artificial
    n_slack = sum(1 for _, rel, _, _ in norm_rows if rel != EQ)
    slack_col: list[int | None] = []
    art_col: list[int | None] = []
    s = n
    for _, rel, _, _ in norm_rows:
        if rel == EQ:
            slack_col.append(None)
        else:
            slack_col.append(s)
            s += 1
    a = n + n_slack
    for _, rel, _, _ in norm_rows:
        if rel == LE:
            art_col.append(None)
        else:
            art_col.append(a)
            a += 1
    n_cols = a

    rows: list[list[Fraction]] = []
    basis: list[int] = []
    for i, (coeffs, rel, rhs, _) in enumerate(norm_rows):
        row = [Fraction(0)] * (n_cols + 1)
        row[:n] = coeffs
        if rel == LE:
            row[slack_col[i]] = Fraction(1)
            basis.append(slack_col[i])
        else:
            if rel == GE:
                row[slack_col[i]] = Fraction(-1)
            row[art_col[i]] = Fraction(1)
            basis.append(art_col[i])
        row[n_cols] = rhs
        rows.append(row)
    tab = _Tableau(rows, basis, n_cols)

    is_art = [False] * n_cols
    for c in art_col:
        if c is not None:
            is_art[c] = True

    if any(is_art):
        cost1 = [Fraction(1) if is_art[j] else Fraction(0) for j in range(n_cols)]
        tab.run(cost1, [True] * n_cols)
        if _dot([cost1[b] for b in tab.basis], [r[n_cols] for r in tab.rows]) != 0:
            return LPResult(INFEASIBLE)
        # drive zero-level artificials out of the basis where possible
        for i in range(m):
            if is_art[tab.basis[i]]:
                row = tab.rows[i]
                c = next((j for j in range(n_cols) if not is_art[j] and row[j]), None)
                if c is not None:
                    tab.pivot(i, c)

    cost2 = cost_x + [Fraction(0)] * (n_cols - n)
    allowed = [not is_art[j] for j in range(n_cols)]
    # artificial rows still basic are redundant; they stay at zero because
    # their entries in every allowed column are zero
    if not tab.run(cost2, allowed):
        return LPResult(UNBOUNDED)

    xprime = [Fraction(0)] * n_cols
    for i, b in enumerate(tab.basis):
        xprime[b] = tab.rows[i][n_cols]
    x = tuple(xprime[j] + lbs[j] for j in range(n))
    value = _dot(lp.objective, x)

    # y_i = c_B B^-1 e_i, read off the columns that started as identity
    cb = [cost2[b] for b in tab.basis]
    duals = []
    for i, (_, rel, _, flip) in enumerate(norm_rows):
        col = slack_col[i] if rel == LE else art_col[i]
        y = sum((cb[k] * tab.rows[k][col] for k in range(m) if cb[k]), Fraction(0))
        duals.append(sign * flip * y)
    return LPResult(OPTIMAL, value, x, tuple(duals))


@dataclass(frozen=True)
class Polytope:
    """``{x : A x <= b}`` in ``dimension`` variables."""

    dimension: int
    inequalities: tuple[tuple[tuple[Fraction, ...], Fraction], ...]
    labels: tuple[str, ...] = field(default=(), compare=False)

    @classmethod
    def build(cls, dimension, rows, labels=()):
        ineq = tuple(
            (tuple(Fraction(a) for a in coeffs), Fraction(rhs)) for coeffs, rhs in rows
        )
        for coeffs, _ in ineq:
            if len(coeffs) != dimension:
                raise LPValidationError(
                    f"inequality has {len(coeffs)} coefficients, expected {dimension}"
                )
        return cls(dimension, ineq, tuple(labels))

    def contains(self, point: Sequence[Fraction]) -> bool:
        return all(_dot(a, point) <= b for a, b in self.inequalities)

    def tight(self, point: Sequence[Fraction]) -> list[int]:
        return [k for k, (a, b) in enumerate(self.inequalities) if _dot(a, point) == b]


def _coordinate_bounded(p: Polytope) -> bool | None:
    """True if bounded, False if unbounded, None if empty.

    Free variables are split as ``x = x+ - x-``.
    """
    d = p.dimension
    rows = []
    for a, b in p.inequalities:
        rows.append((list(a) + [-c for c in a], LE, b))
    zero = [Fraction(0)] * (2 * d)
    feas = solve_lp(LinearProgram.build(zero, rows))
    if feas.status == INFEASIBLE:
        return None
    for j in range(d):
        for s in (1, -1):
            obj = [Fraction(0)] * (2 * d)
            obj[j] = Fraction(s)
            obj[d + j] = Fraction(-s)
            if solve_lp(LinearProgram.build(obj, rows, MAXIMIZE)).status == UNBOUNDED:
                return False
    return True


def enumerate_vertices(p: Polytope, max_dimension: int = MAX_VERTEX_DIMENSION) -> list[tuple[Fraction, ...]]:
    """All vertices of a bounded polytope, sorted lexicographically.

    Every ``dimension``-subset of the inequality rows with full rank is
    solved exactly; feasible points are kept and deduplicated.  Subsets are
    grown one row at a time against an incrementally reduced basis, so a
    row that is linearly dependent on the rows already chosen prunes every
    superset at once.
    """
    d = p.dimension
    if d > max_dimension:
        raise DimensionLimitError(
            f"dimension {d} exceeds the vertex-enumeration limit of {max_dimension}"
        )
    bounded = _coordinate_bounded(p)
    if bounded is None:
        return []
    if not bounded:
        raise UnboundedPolytopeError("polytope is unbounded")

    ineq = p.inequalities
    n_rows = len(ineq)
    found: set[tuple[Fraction, ...]] = set()

    def reduce(vec, echelon):
        vec = list(vec)
        for prow, pc in echelon:
            f = vec[pc]
            if f:
                vec = [x - f * y for x, y in zip(vec, prow)]
        return vec

    def solve(echelon):
        # echelon rows are normalised with pivots; back substitute from the end
        x = [Fraction(0)] * d
        for prow, pc in reversed(echelon):
            val = prow[d] - sum((prow[j] * x[j] for j in range(d) if j != pc and prow[j]), Fraction(0))
            x[pc] = val
        return tuple(x)

    def rec(start, echelon):
        if len(echelon) == d:
            x = solve(echelon)
            if x not in found and p.contains(x):
                found.add(x)
            return
        need = d - len(echelon)
        for k in range(start, n_rows - need + 1):
            a, b = ineq[k]
            vec = reduce(list(a) + [b], echelon)
            pc = next((j for j in range(d) if vec[j]), None)
            if pc is None:
                continue
            piv = vec[pc]
            vec = [x / piv for x in vec]
            # keep the echelon fully reduced so back substitution is trivial
            new = []
            for prow, c in echelon:
                f = prow[pc]
                if f:
                    prow = [x - f * y for x, y in zip(prow, vec)]
                new.append((prow, c))
            new.append((vec, pc))
            rec(k + 1, new)

    rec(0, [])
    return sorted(found)


def is_extreme(point: Sequence[Fraction], others: Iterable[Sequence[Fraction]]) -> bool:
    """True iff ``point`` is not a convex combination of ``others`` (LP check)."""
    others = [list(o) for o in others if tuple(o) != tuple(point)]
    if not others:
        return True
    d = len(point)
    rows = []
    for j in range(d):
        rows.append(([o[j] for o in others], EQ, point[j]))
    rows.append(([Fraction(1)] * len(others), EQ, Fraction(1)))
    res = solve_lp(LinearProgram.build([Fraction(0)] * len(others), rows))
    return res.status == INFEASIBLE
