"""Perfect covers of G_{K,N} and the resulting speedup bound.

Input side: K-1 copies of the unicast subgraph plus, for every input i,
all broadcast subflows together with the unicasts of input i.  This covers
each vertex K times with 2K-1 perfect subgraphs.

Output side: for every output i, the unicasts to i with all broadcast
subflows, and the broadcast subflows to i with all unicasts.  This covers
each vertex N+1 times with 2N perfect subgraphs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .conflict_graph import ConflictGraph, build_kn_graph, class_members, induced_subgraph
from .rational import format_rational
from .speedup import CoverReport, PerfectCover, validate_cover

KINDS = ("Gu", "Gi", "Go1", "Go2")

# perfection of cover members is checked (not trusted) up to this size
CHECK_LIMIT = 4


def _kind_vertices(g: ConflictGraph, K: int, N: int, kind: str, index: int | None) -> list[str]:
    if kind == "Gu":
        return [v for k in range(1, K + 1) for v in class_members(g, "U", k)]
    if kind not in KINDS:
        raise ValueError(f"unknown subgraph kind {kind!r}")
    top = K if kind == "Gi" else N
    if index is None or not 1 <= index <= top:
        raise IndexError(f"{kind} index must lie in [1, {top}], got {index}")
    broadcasts = [v for k in range(1, K + 1) for v in class_members(g, "B", k)]
    unicasts = [v for k in range(1, K + 1) for v in class_members(g, "U", k)]
    if kind == "Gi":
        return broadcasts + class_members(g, "U", index)
    if kind == "Go1":
        return class_members(g, "Uo", index) + broadcasts
    return class_members(g, "Bo", index) + unicasts


def named_vertices(K: int, N: int, kind: str, index: int | None = None) -> tuple[str, ...]:
    g = build_kn_graph(K, N)
    return tuple(v for v in g.vertices if v in set(_kind_vertices(g, K, N, kind, index)))


def named_subgraph(K: int, N: int, kind: str, index: int | None = None) -> ConflictGraph:
    g = build_kn_graph(K, N)
    return induced_subgraph(g, _kind_vertices(g, K, N, kind, index))


def all_named(K: int, N: int) -> list[tuple[str, ConflictGraph]]:
    out = [("Gu", named_subgraph(K, N, "Gu"))]
    out += [(f"Gi({i})", named_subgraph(K, N, "Gi", i)) for i in range(1, K + 1)]
    out += [(f"Go1({i})", named_subgraph(K, N, "Go1", i)) for i in range(1, N + 1)]
    out += [(f"Go2({i})", named_subgraph(K, N, "Go2", i)) for i in range(1, N + 1)]
    return out


def input_cover(K: int, N: int) -> PerfectCover:
    gu = named_vertices(K, N, "Gu")
    members = [gu] * (K - 1)
    names = ["Gu"] * (K - 1)
    for i in range(1, K + 1):
        members.append(named_vertices(K, N, "Gi", i))
        names.append(f"Gi({i})")
    return PerfectCover(tuple(members), K, tuple(names))


def output_cover(K: int, N: int) -> PerfectCover:
    members = []
    names = []
    for i in range(1, N + 1):
        members.append(named_vertices(K, N, "Go1", i))
        names.append(f"Go1({i})")
        members.append(named_vertices(K, N, "Go2", i))
        names.append(f"Go2({i})")
    return PerfectCover(tuple(members), N + 1, tuple(names))


def kn_speedup_bound(K: int, N: int) -> Fraction:
    """min((2K-1)/K, 2N/(N+1))."""
    if K < 1 or N < 1:
        raise ValueError("K and N must be positive")
    return min(Fraction(2 * K - 1, K), Fraction(2 * N, N + 1))


@dataclass(frozen=True)
class BoundReport:
    K: int
    N: int
    input_cover: PerfectCover
    output_cover: PerfectCover
    input_report: CoverReport
    output_report: CoverReport

    @property
    def bound(self) -> Fraction:
        return min(self.input_cover.bound, self.output_cover.bound)

    def to_obj(self) -> dict:
        def side(cover, report):
            obj = cover.to_obj()
            obj["regime"] = report.regime
            obj["coverage"] = sorted(set(report.counts.values()))
            return obj

        return {
            "K": self.K,
            "N": self.N,
            "input_cover": side(self.input_cover, self.input_report),
            "output_cover": side(self.output_cover, self.output_report),
            "bound": format_rational(self.bound),
            "closed_form": format_rational(kn_speedup_bound(self.K, self.N)),
        }


def bound_report(K: int, N: int, check_perfection: bool | None = None) -> BoundReport:
    """Validate both covers of G_{K,N}; perfection of members is checked
    by default only when K, N <= CHECK_LIMIT."""
    if check_perfection is None:
        check_perfection = K <= CHECK_LIMIT and N <= CHECK_LIMIT
    g = build_kn_graph(K, N)
    ic, oc = input_cover(K, N), output_cover(K, N)
    ir = validate_cover(g, ic, check_perfection)
    orp = validate_cover(g, oc, check_perfection)
    report = BoundReport(K, N, ic, oc, ir, orp)
    assert report.bound == kn_speedup_bound(K, N)
    return report
