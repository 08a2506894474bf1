"""Exact combinatorial analyses on conflict graphs.

All routines are exponential in the worst case and guarded by a vertex
limit (``DEFAULT_LIMIT``).  Ties are broken by the graph's canonical vertex
order, so every result is reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .conflict_graph import ConflictGraph, complement

DEFAULT_LIMIT = 40


class SizeLimitError(ValueError):
    pass


class MissingWeightError(KeyError):
    pass


def check_size(g: ConflictGraph, limit: int | None) -> None:
    limit = DEFAULT_LIMIT if limit is None else limit
    if g.n > limit:
        raise SizeLimitError(f"graph has {g.n} vertices, limit is {limit}")


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def clique_masks(adj, universe: int) -> list[int]:
    """Maximal cliques within ``universe`` (Bron-Kerbosch with Tomita
    pivoting), as bitmasks sorted by their sorted index tuples."""
    out: list[int] = []

    def expand(r: int, p: int, x: int) -> None:
        if not p and not x:
            out.append(r)
            return
        px = p | x
        pivot = max(_bits(px), key=lambda u: bin(p & adj[u]).count("1"))
        for v in _bits(p & ~adj[pivot]):
            bit = 1 << v
            expand(r | bit, p & adj[v], x & adj[v])
            p &= ~bit
            x |= bit

    if universe:
        expand(0, universe, 0)
    out.sort(key=_bits)
    return out


def stable_masks(adj, universe: int) -> list[int]:
    """Maximal stable sets within ``universe``."""
    n = len(adj)
    full = (1 << n) - 1
    co = [(full ^ a) & ~(1 << k) for k, a in enumerate(adj)]
    return clique_masks(co, universe)


def maximal_cliques(g: ConflictGraph, limit: int | None = None) -> list[tuple[str, ...]]:
    check_size(g, limit)
    out = [g.labels_of(m) for m in clique_masks(g.adj, g.full_mask)]
    for c in out:
        assert all(g.adjacent(a, b) for a in c for b in c if a != b)
    return out


def maximal_stable_sets(g: ConflictGraph, limit: int | None = None) -> list[tuple[str, ...]]:
    check_size(g, limit)
    out = [g.labels_of(m) for m in stable_masks(g.adj, g.full_mask)]
    for s in out:
        assert not any(g.adjacent(a, b) for a in s for b in s if a != b)
    return out


def weight_list(g: ConflictGraph, w: Mapping[str, Fraction]) -> list[Fraction]:
    missing = [v for v in g.vertices if v not in w]
    if missing:
        raise MissingWeightError(f"no weight for vertex {missing[0]}")
    ws = [Fraction(w[v]) for v in g.vertices]
    for v, x in zip(g.vertices, ws):
        if x < 0:
            raise ValueError(f"negative weight on {v}")
    return ws


def max_weight_clique(
    g: ConflictGraph, w: Mapping[str, Fraction], limit: int | None = None
) -> tuple[Fraction, tuple[str, ...]]:
    """Heaviest clique under nonnegative weights ``w``; the witness is the
    first maximal clique in canonical order attaining the maximum."""
    check_size(g, limit)
    ws = weight_list(g, w)
    best = Fraction(-1)
    witness = 0
    for m in clique_masks(g.adj, g.full_mask):
        total = sum((ws[k] for k in _bits(m)), Fraction(0))
        if total > best:
            best, witness = total, m
    if best < 0:
        return Fraction(0), ()
    return best, g.labels_of(witness)


def odd_hole_indices(adj, n: int) -> list[int] | None:
    """Lexicographically least odd hole as an index cycle, or None.

    A hole is written starting at its smallest vertex and oriented so that
    the second vertex is smaller than the last.  For each start ``s`` the
    search grows chordless paths through vertices above ``s`` in increasing
    order; a new vertex adjacent to ``s`` closes the path and is never
    extended through.  Preorder DFS visits paths lexicographically, so the
    first hole reported is the least one.
    """
    for s in range(n):
        higher = ((1 << n) - 1) & ~((1 << (s + 1)) - 1)
        s_bit = 1 << s
        for p1 in _bits(adj[s] & higher):
            # inner = path vertices plus neighbours of the interior ones;
            # neighbours of s are handled as closing moves
            found = _extend(adj, s_bit, [s, p1], higher, s_bit | (1 << p1))
            if found is not None:
                return found
    return None


def _extend(adj, s_bit, path, higher, inner):
    last = path[-1]
    cands = adj[last] & higher & ~inner
    for x in _bits(cands):
        if adj[x] & s_bit:
            length = len(path) + 1
            if length >= 5 and length % 2 == 1 and path[1] < x:
                return path + [x]
            continue
        found = _extend(adj, s_bit, path + [x], higher, inner | adj[last] | (1 << x))
        if found is not None:
            return found
    return None


def find_odd_hole(g: ConflictGraph, limit: int | None = None) -> tuple[str, ...] | None:
    check_size(g, limit)
    cyc = odd_hole_indices(g.adj, g.n)
    if cyc is None:
        return None
    labels = tuple(g.vertices[k] for k in cyc)
    assert is_hole(g, labels)
    return labels


def is_hole(g: ConflictGraph, cycle) -> bool:
    """True iff ``cycle`` is a chordless cycle of ``g`` of length >= 4."""
    k = len(cycle)
    if k < 4 or len(set(cycle)) != k:
        return False
    for a in range(k):
        for b in range(a + 1, k):
            consecutive = b == a + 1 or (a == 0 and b == k - 1)
            if g.adjacent(cycle[a], cycle[b]) != consecutive:
                return False
    return True


@dataclass(frozen=True)
class PerfectionVerdict:
    perfect: bool
    certificate: str | None = None  # "odd_hole" | "odd_antihole"
    cycle: tuple[str, ...] = ()

    def to_obj(self) -> dict:
        return {
            "perfect": self.perfect,
            "certificate": self.certificate,
            "cycle": list(self.cycle),
        }


def is_perfect(g: ConflictGraph, limit: int | None = None) -> PerfectionVerdict:
    """Perfect iff neither ``g`` nor its complement has an odd hole."""
    check_size(g, limit)
    hole = find_odd_hole(g, limit)
    if hole is not None:
        return PerfectionVerdict(False, "odd_hole", hole)
    anti = find_odd_hole(complement(g), limit)
    if anti is not None:
        return PerfectionVerdict(False, "odd_antihole", anti)
    return PerfectionVerdict(True)
