"""Enhanced conflict graphs.

Two subflows are adjacent exactly when they belong to different flows and
share an input or an output.  Subflows of one flow never conflict, since
intra-flow coding lets the switch serve them together.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .traffic import (
    PortShape,
    Subflow,
    TrafficPattern,
    flow_kind,
    make_subflow,
    subflows_of,
    validate_structure,
)


class UnknownVertexError(KeyError):
    pass


@dataclass(frozen=True)
class ConflictGraph:
    """Undirected simple graph with bitmask adjacency.

    ``adj[k]`` has bit ``m`` set iff vertices ``k`` and ``m`` are adjacent.
    ``subflows`` is filled in for graphs built from traffic.
    """

    vertices: tuple[str, ...]
    adj: tuple[int, ...]
    subflows: tuple[Subflow, ...] | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("duplicate vertex labels")
        for k, mask in enumerate(self.adj):
            if mask >> k & 1:
                raise ValueError(f"self-loop at {self.vertices[k]}")
            rest = mask
            while rest:
                low = rest & -rest
                m = low.bit_length() - 1
                if not self.adj[m] >> k & 1:
                    raise ValueError("adjacency is not symmetric")
                rest ^= low

    @classmethod
    def from_edges(cls, vertices: Sequence[str], edges: Iterable[tuple[str, str]], subflows=None):
        index = {v: k for k, v in enumerate(vertices)}
        adj = [0] * len(vertices)
        for a, b in edges:
            if a not in index or b not in index:
                raise UnknownVertexError(a if a not in index else b)
            ia, ib = index[a], index[b]
            adj[ia] |= 1 << ib
            adj[ib] |= 1 << ia
        return cls(tuple(vertices), tuple(adj), None if subflows is None else tuple(subflows))

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def index(self, label: str) -> int:
        try:
            return self.vertices.index(label)
        except ValueError:
            raise UnknownVertexError(label) from None

    def adjacent(self, a: str, b: str) -> bool:
        return bool(self.adj[self.index(a)] >> self.index(b) & 1)

    def edges(self) -> list[tuple[str, str]]:
        out = []
        for k in range(self.n):
            for m in range(k + 1, self.n):
                if self.adj[k] >> m & 1:
                    out.append((self.vertices[k], self.vertices[m]))
        return out

    @property
    def n_edges(self) -> int:
        return sum(bin(a).count("1") for a in self.adj) // 2

    def labels_of(self, mask: int) -> tuple[str, ...]:
        return tuple(self.vertices[k] for k in range(self.n) if mask >> k & 1)

    def mask_of(self, labels: Iterable[str]) -> int:
        mask = 0
        for v in labels:
            mask |= 1 << self.index(v)
        return mask


def _graph_from_subflows(subs: Sequence[Subflow]) -> ConflictGraph:
    subs = sorted(subs)
    n = len(subs)
    adj = [0] * n
    for a in range(n):
        sa = subs[a]
        for b in range(a + 1, n):
            sb = subs[b]
            if sa.flow_key != sb.flow_key and (sa.input == sb.input or sa.output == sb.output):
                adj[a] |= 1 << b
                adj[b] |= 1 << a
    return ConflictGraph(tuple(s.label for s in subs), tuple(adj), tuple(subs))


def build_conflict_graph(shape: PortShape, structure: Sequence[tuple[int, Iterable[int]]]) -> ConflictGraph:
    """One vertex per subflow of ``structure``, ordered by (input, kind,
    output) with unicasts before multicasts before broadcasts."""
    flows = validate_structure(shape, structure)
    subs = []
    for i, outs in flows:
        kind = flow_kind(outs, shape.N)
        subs.extend(make_subflow(i, outs, j, kind) for j in outs)
    return _graph_from_subflows(subs)


def pattern_graph(p: TrafficPattern) -> ConflictGraph:
    return _graph_from_subflows([sf for sf, _ in subflows_of(p)])


def build_kn_graph(K: int, N: int) -> ConflictGraph:
    """G_{K,N}: every unicast u_ij plus the subflows b_ij of one broadcast
    per input.  For N == 1 the broadcast is still a separate flow."""
    PortShape(K, N)
    every = tuple(range(1, N + 1))
    subs = []
    for i in range(1, K + 1):
        subs.extend(make_subflow(i, (j,), j, "u") for j in every)
        subs.extend(make_subflow(i, every, j, "b") for j in every)
    return _graph_from_subflows(subs)


def vertex_classes(s: Subflow) -> tuple[tuple[str, int], tuple[str, int]]:
    """Input class (U_i / B_i) and output class (U^o_j / B^o_j) of a
    G_{K,N} vertex."""
    if s.kind == "u":
        return ("U", s.input), ("Uo", s.output)
    if s.kind == "b":
        return ("B", s.input), ("Bo", s.output)
    raise ValueError(f"{s.label} is neither a unicast nor a broadcast subflow")


def class_members(g: ConflictGraph, tag: str, index: int) -> list[str]:
    if g.subflows is None:
        raise ValueError("graph carries no subflow annotations")
    return [
        s.label
        for s in g.subflows
        if (tag, index) in vertex_classes(s)
    ]


def kn_edge_families(K: int, N: int) -> set[frozenset[str]]:
    """Union of the per-input unicast edges, the broadcast-vs-unicast input
    edges and the per-output edges, written out family by family."""
    def u(i, j):
        return make_subflow(i, (j,), j, "u").label

    def b(i, j):
        return make_subflow(i, tuple(range(1, N + 1)), j, "b").label

    out: set[frozenset[str]] = set()
    for i in range(1, K + 1):
        for j in range(1, N + 1):
            for k in range(1, N + 1):
                if j != k:
                    out.add(frozenset((u(i, j), u(i, k))))
                out.add(frozenset((b(i, j), u(i, k))))
    for col in range(1, N + 1):
        for j in range(1, K + 1):
            for k in range(1, K + 1):
                if j != k:
                    out.add(frozenset((u(j, col), u(k, col))))
                    out.add(frozenset((b(j, col), b(k, col))))
                    out.add(frozenset((b(j, col), u(k, col))))
    return out


def induced_subgraph(g: ConflictGraph, labels: Iterable[str]) -> ConflictGraph:
    """Restrict ``g`` to ``labels``; canonical order of ``g`` is kept."""
    wanted = set(labels)
    for v in wanted:
        g.index(v)
    keep = [k for k in range(g.n) if g.vertices[k] in wanted]
    return _induced_by_indices(g, keep)


def _induced_by_indices(g: ConflictGraph, keep: Sequence[int]) -> ConflictGraph:
    pos = {old: new for new, old in enumerate(keep)}
    adj = []
    for old in keep:
        mask = 0
        for other in keep:
            if g.adj[old] >> other & 1:
                mask |= 1 << pos[other]
        adj.append(mask)
    subs = None if g.subflows is None else tuple(g.subflows[k] for k in keep)
    return ConflictGraph(tuple(g.vertices[k] for k in keep), tuple(adj), subs)


def induced_by_mask(g: ConflictGraph, mask: int) -> ConflictGraph:
    return _induced_by_indices(g, [k for k in range(g.n) if mask >> k & 1])


def complement(g: ConflictGraph) -> ConflictGraph:
    full = g.full_mask
    adj = tuple((full ^ a) & ~(1 << k) for k, a in enumerate(g.adj))
    return ConflictGraph(g.vertices, adj, g.subflows)


def cycle_graph(n: int) -> ConflictGraph:
    labels = [f"c{k}" for k in range(n)]
    return ConflictGraph.from_edges(labels, [(labels[k], labels[(k + 1) % n]) for k in range(n)])


def complete_graph(n: int) -> ConflictGraph:
    labels = [f"k{k}" for k in range(n)]
    return ConflictGraph.from_edges(
        labels, [(labels[a], labels[b]) for a in range(n) for b in range(a + 1, n)]
    )


def export_dot(g: ConflictGraph, name: str = "G") -> str:
    lines = [f"graph {name} {{"]
    for v in g.vertices:
        lines.append(f'  "{v}";')
    for a, b in g.edges():
        lines.append(f'  "{a}" -- "{b}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


def graph_to_obj(g: ConflictGraph) -> dict:
    return {"vertices": list(g.vertices), "edges": [list(e) for e in g.edges()]}


def export_json(g: ConflictGraph) -> str:
    return json.dumps(graph_to_obj(g), indent=2)


def graph_from_obj(obj) -> ConflictGraph:
    if not isinstance(obj, dict) or "vertices" not in obj or "edges" not in obj:
        raise ValueError("graph JSON needs 'vertices' and 'edges'")
    verts = [str(v) for v in obj["vertices"]]
    edges = []
    for e in obj["edges"]:
        if not isinstance(e, list) or len(e) != 2:
            raise ValueError(f"bad edge {e!r}")
        edges.append((str(e[0]), str(e[1])))
    return ConflictGraph.from_edges(verts, edges)


def parse_graph_json(text: str) -> ConflictGraph:
    return graph_from_obj(json.loads(text))
