"""Rate regions and speedup.

The least ``s`` with ``w`` in ``s * STAB(G)`` is the weighted fractional
chromatic number, solved here as a covering LP over maximal stable sets.
Class-wide speedups and the imperfection ratio maximise that quantity over
the vertices of a polytope; it is a pointwise maximum of linear functions
(LP duality), so the maximum sits at a vertex.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Mapping, Sequence

from .analysis import (
    PerfectionVerdict,
    _bits,
    check_size,
    clique_masks,
    is_perfect,
    stable_masks,
    weight_list,
)
from .conflict_graph import ConflictGraph, build_conflict_graph, induced_subgraph, pattern_graph
from .rational import (
    GE,
    LE,
    MAX_VERTEX_DIMENSION,
    DimensionLimitError,
    LinearProgram,
    Polytope,
    enumerate_vertices,
    format_rational,
    solve_lp,
)
from .traffic import (
    Flow,
    PortShape,
    TrafficPattern,
    admissible_polytope,
    enhance,
    full_structure,
    validate_pattern,
    validate_structure,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SpeedupResult:
    value: Fraction
    schedule: tuple[tuple[tuple[str, ...], Fraction], ...] = ()
    witness: TrafficPattern | None = None
    witness_weights: Mapping[str, Fraction] | None = field(default=None, compare=False)
    polytope_vertices: int | None = None

    def covers(self, w: Mapping[str, Fraction]) -> bool:
        """Exact check that the schedule dominates ``w`` and sums to value."""
        if sum((c for _, c in self.schedule), Fraction(0)) != self.value:
            return False
        if any(c < 0 for _, c in self.schedule):
            return False
        got = {v: Fraction(0) for v in w}
        for s, c in self.schedule:
            for v in s:
                got[v] = got.get(v, Fraction(0)) + c
        return all(got[v] >= x for v, x in w.items())

    def to_obj(self) -> dict:
        obj = {
            "value": format_rational(self.value),
            "schedule": [
                {"vertices": list(s), "coefficient": format_rational(c)} for s, c in self.schedule
            ],
        }
        if self.witness is not None:
            obj["witness"] = self.witness.to_json_obj()
        if self.witness_weights is not None:
            obj["witness_weights"] = {v: format_rational(x) for v, x in self.witness_weights.items()}
        if self.polytope_vertices is not None:
            obj["polytope_vertices"] = self.polytope_vertices
        return obj


@lru_cache(maxsize=4096)
def _stable_columns(adj: tuple[int, ...], support: int) -> tuple[int, ...]:
    return tuple(stable_masks(adj, support))


def _extend_stable(adj: Sequence[int], mask: int, n: int) -> int:
    for k in range(n):
        if not mask >> k & 1 and not adj[k] & mask:
            mask |= 1 << k
    return mask


def chi_f_weights(g: ConflictGraph, ws: Sequence[Fraction]) -> tuple[Fraction, list[tuple[int, Fraction]]]:
    """Core of :func:`fractional_chromatic` on an index-aligned weight
    list; returns the value and ``(stable-set mask, coefficient)`` pairs."""
    support = 0
    for k, x in enumerate(ws):
        if x > 0:
            support |= 1 << k
    if not support:
        return Fraction(0), []
    cols = _stable_columns(g.adj, support)
    rows_idx = _bits(support)
    rows = [([1 if c >> v & 1 else 0 for c in cols], GE, ws[v]) for v in rows_idx]
    res = solve_lp(LinearProgram.build([1] * len(cols), rows))
    assert res.optimal
    schedule = [
        (_extend_stable(g.adj, c, g.n), lam) for c, lam in zip(cols, res.primal) if lam
    ]
    schedule.sort(key=lambda sc: _bits(sc[0]))
    return res.value, schedule


def fractional_chromatic(
    g: ConflictGraph, w: Mapping[str, Fraction], limit: int | None = None
) -> SpeedupResult:
    """Least ``t`` with ``w`` in ``t * STAB(g)``, with an optimal schedule.

    Zero-weight vertices are dropped before enumerating stable sets; each
    stable set in the schedule is then padded to a maximal one of ``g``.
    """
    check_size(g, limit)
    ws = weight_list(g, w)
    value, schedule = chi_f_weights(g, ws)
    return SpeedupResult(
        value, tuple((g.labels_of(m), c) for m, c in schedule)
    )


def in_stab(g: ConflictGraph, w: Mapping[str, Fraction], limit: int | None = None) -> bool:
    return fractional_chromatic(g, w, limit).value <= 1


def in_qstab(g: ConflictGraph, w: Mapping[str, Fraction], limit: int | None = None) -> bool:
    """Nonnegative and every maximal clique carries weight at most one."""
    check_size(g, limit)
    try:
        ws = weight_list(g, w)
    except ValueError:
        return False
    for m in clique_masks(g.adj, g.full_mask):
        if sum((ws[k] for k in _bits(m)), Fraction(0)) > 1:
            return False
    return True


def pattern_speedup(p: TrafficPattern, limit: int | None = None) -> SpeedupResult:
    validate_pattern(p)
    return fractional_chromatic(pattern_graph(p), enhance(p), limit)


def _sweep(g: ConflictGraph, points: Sequence[Sequence[Fraction]], weights_of: Callable, jobs: int, progress):
    """Evaluate chi_f at every point; returns the exact values in order."""
    weight_lists = [weights_of(pt) for pt in points]
    if jobs > 1 and len(points) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunk = max(1, len(points) // (jobs * 8))
            values = []
            for k, v in enumerate(pool.map(_chi_value, [g] * len(points), weight_lists, chunksize=chunk)):
                values.append(v)
                if progress:
                    progress(k + 1, len(points))
            return values
    values = []
    for k, ws in enumerate(weight_lists):
        values.append(chi_f_weights(g, ws)[0])
        if progress:
            progress(k + 1, len(points))
    return values


def _chi_value(g: ConflictGraph, ws: Sequence[Fraction]) -> Fraction:
    return chi_f_weights(g, ws)[0]


def _argmax(values: Sequence[Fraction]) -> int:
    best = 0
    for k, v in enumerate(values):
        if v > values[best]:
            best = k
    return best


def class_min_speedup(
    K: int,
    N: int,
    structure: Sequence[tuple[int, Sequence[int]]] | None = None,
    jobs: int = 1,
    progress=None,
    max_dimension: int = MAX_VERTEX_DIMENSION,
) -> SpeedupResult:
    """Minimum speedup for every admissible rate vector of ``structure``
    (default: all unicasts plus one broadcast per input).

    The witness is the lexicographically least admissible vertex attaining
    the maximum.
    """
    shape = PortShape(K, N)
    if structure is None:
        structure = full_structure(K, N)
    flows = validate_structure(shape, structure)
    if len(flows) > max_dimension:
        raise DimensionLimitError(
            f"{len(flows)} flows exceed the vertex-enumeration limit of {max_dimension}"
        )
    poly = admissible_polytope(shape, flows)
    points = enumerate_vertices(poly, max_dimension)
    g = build_conflict_graph(shape, flows)
    template = TrafficPattern(shape, tuple(Flow(i, frozenset(o)) for i, o in flows))

    def weights_of(pt):
        w = enhance(template.with_rates(pt))
        return [w[v] for v in g.vertices]

    log.info("%dx%d: %d admissible vertices, %d subflows", K, N, len(points), g.n)
    values = _sweep(g, points, weights_of, jobs, progress)
    best = _argmax(values)
    witness = template.with_rates(points[best])
    res = pattern_speedup(witness)
    assert res.value == values[best]
    return SpeedupResult(res.value, res.schedule, witness, None, len(points))


def qstab_polytope(g: ConflictGraph) -> Polytope:
    rows = []
    for m in clique_masks(g.adj, g.full_mask):
        rows.append(([1 if m >> k & 1 else 0 for k in range(g.n)], 1))
    for k in range(g.n):
        rows.append(([-1 if c == k else 0 for c in range(g.n)], 0))
    return Polytope.build(g.n, rows)


def imperfection_ratio_exact(
    g: ConflictGraph, jobs: int = 1, progress=None, max_dimension: int = MAX_VERTEX_DIMENSION
) -> SpeedupResult:
    """Least ``t`` with ``QSTAB(g)`` inside ``t * STAB(g)``.

    Every vertex of QSTAB is scored independently, so unlike
    :func:`class_min_speedup` subflows of one flow may carry different
    weights.  ``witness_weights`` holds the least maximising vertex.
    """
    if g.n > max_dimension:
        raise DimensionLimitError(
            f"{g.n} graph vertices exceed the vertex-enumeration limit of {max_dimension}"
        )
    points = enumerate_vertices(qstab_polytope(g), max_dimension)
    values = _sweep(g, points, list, jobs, progress)
    best = _argmax(values)
    w = dict(zip(g.vertices, points[best]))
    res = fractional_chromatic(g, w)
    assert res.value == values[best]
    return SpeedupResult(res.value, res.schedule, None, w, len(points))


class InvalidCoverError(ValueError):
    pass


class ImperfectMemberError(InvalidCoverError):
    def __init__(self, member: int, verdict: PerfectionVerdict):
        super().__init__(
            f"cover member {member} is not perfect: {verdict.certificate} {list(verdict.cycle)}"
        )
        self.member = member
        self.verdict = verdict


class UndercoveredVertexError(InvalidCoverError):
    def __init__(self, vertex: str, count: int, p: int):
        super().__init__(f"vertex {vertex} covered {count} times, need {p}")
        self.vertex = vertex
        self.count = count


@dataclass(frozen=True)
class PerfectCover:
    """A multiset of induced subgraphs (by vertex list) covering every
    vertex at least ``p`` times."""

    members: tuple[tuple[str, ...], ...]
    p: int
    names: tuple[str, ...] = ()

    @property
    def q(self) -> int:
        return len(self.members)

    @property
    def bound(self) -> Fraction:
        return Fraction(self.q, self.p)

    def counts(self, g: ConflictGraph) -> dict[str, int]:
        counts = {v: 0 for v in g.vertices}
        for m in self.members:
            for v in m:
                counts[v] += 1
        return counts

    def restricted(self, labels) -> "PerfectCover":
        keep = set(labels)
        return PerfectCover(
            tuple(tuple(v for v in m if v in keep) for m in self.members), self.p, self.names
        )

    def to_obj(self) -> dict:
        return {
            "members": [list(m) for m in self.members],
            "names": list(self.names),
            "p": self.p,
            "q": self.q,
            "bound": format_rational(self.bound),
        }


@dataclass(frozen=True)
class CoverReport:
    counts: Mapping[str, int]
    verdicts: tuple[PerfectionVerdict | None, ...]
    regime: str  # "checked": perfection verified; "trusted": taken from the lemmas


def validate_cover(
    g: ConflictGraph, cover: PerfectCover, check_perfection: bool = True, limit: int | None = None
) -> CoverReport:
    counts = cover.counts(g)
    for v in g.vertices:
        if counts[v] < cover.p:
            raise UndercoveredVertexError(v, counts[v], cover.p)
    verdicts: list[PerfectionVerdict | None] = []
    cache: dict[tuple[str, ...], PerfectionVerdict] = {}
    for k, m in enumerate(cover.members):
        if not check_perfection:
            verdicts.append(None)
            continue
        key = tuple(sorted(m))
        if key not in cache:
            cache[key] = is_perfect(induced_subgraph(g, m), limit)
        verdict = cache[key]
        if not verdict.perfect:
            raise ImperfectMemberError(k, verdict)
        verdicts.append(verdict)
    return CoverReport(counts, tuple(verdicts), "checked" if check_perfection else "trusted")


def cover_bound(g: ConflictGraph, cover: PerfectCover, check_perfection: bool = True) -> Fraction:
    """``q / p`` once the cover validates."""
    validate_cover(g, cover, check_perfection)
    return cover.bound
