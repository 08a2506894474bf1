"""Switch traffic patterns: flows, subflows, admissibility, enhanced rates."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .rational import Polytope, format_rational, parse_rational


class TrafficError(ValueError):
    """Base class for invalid traffic patterns."""


class PortRangeError(TrafficError):
    pass


class DuplicateFlowError(TrafficError):
    pass


class NegativeRateError(TrafficError):
    pass


class EmptyOutputsError(TrafficError):
    pass


class PatternFormatError(TrafficError):
    """Raised while decoding pattern JSON; ``field`` names the culprit."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


@dataclass(frozen=True)
class PortShape:
    K: int
    N: int

    def __post_init__(self):
        if self.K < 1 or self.N < 1:
            raise PortRangeError(f"switch shape must have K, N >= 1, got {self.K}x{self.N}")


@dataclass(frozen=True)
class Flow:
    input: int
    outputs: frozenset[int]
    rate: Fraction = Fraction(0)

    @property
    def key(self) -> tuple[int, tuple[int, ...]]:
        return (self.input, tuple(sorted(self.outputs)))


@dataclass(frozen=True, order=True)
class Subflow:
    """One (flow, output) pair.  ``kind`` is ``"u"`` (unicast), ``"b"``
    (broadcast) or ``"m"`` (any other multicast)."""

    input: int
    kind_rank: int
    outputs: tuple[int, ...]
    output: int
    kind: str = field(compare=False)

    @property
    def flow_key(self) -> tuple[int, str, tuple[int, ...]]:
        return (self.input, self.kind, self.outputs)

    @property
    def label(self) -> str:
        i, j = self.input, self.output
        ij = f"{i}{j}" if i < 10 and j < 10 else f"{i}_{j}"
        if self.kind == "m":
            return f"m{ij}[{','.join(map(str, self.outputs))}]"
        return f"{self.kind}{ij}"


_KIND_RANK = {"u": 0, "m": 1, "b": 2}


def flow_kind(outputs: Iterable[int], N: int) -> str:
    outs = set(outputs)
    if len(outs) == 1:
        return "u"
    if outs == set(range(1, N + 1)):
        return "b"
    return "m"


def make_subflow(input: int, outputs: Sequence[int], output: int, kind: str) -> Subflow:
    return Subflow(input, _KIND_RANK[kind], tuple(sorted(outputs)), output, kind)


@dataclass(frozen=True)
class TrafficPattern:
    shape: PortShape
    flows: tuple[Flow, ...]

    @classmethod
    def from_flows(cls, K: int, N: int, flows: Iterable[tuple[int, Iterable[int], object]]):
        return cls(
            PortShape(K, N),
            tuple(Flow(i, frozenset(outs), parse_rational(r)) for i, outs, r in flows),
        )

    @property
    def structure(self) -> list[tuple[int, tuple[int, ...]]]:
        return [f.key for f in self.flows]

    @property
    def rates(self) -> tuple[Fraction, ...]:
        return tuple(f.rate for f in self.flows)

    def with_rates(self, rates: Sequence[Fraction]) -> "TrafficPattern":
        return TrafficPattern(
            self.shape,
            tuple(Flow(f.input, f.outputs, Fraction(r)) for f, r in zip(self.flows, rates)),
        )

    def to_json_obj(self) -> dict:
        return {
            "K": self.shape.K,
            "N": self.shape.N,
            "flows": [
                {"input": f.input, "outputs": sorted(f.outputs), "rate": format_rational(f.rate)}
                for f in self.flows
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), indent=2)


def validate_structure(shape: PortShape, structure: Iterable[tuple[int, Iterable[int]]]) -> list[tuple[int, tuple[int, ...]]]:
    seen = set()
    out = []
    for k, (i, outs) in enumerate(structure):
        outs = tuple(sorted(set(outs)))
        if not 1 <= i <= shape.K:
            raise PortRangeError(f"flow {k}: input {i} outside [1, {shape.K}]")
        if not outs:
            raise EmptyOutputsError(f"flow {k}: empty output set")
        bad = [j for j in outs if not 1 <= j <= shape.N]
        if bad:
            raise PortRangeError(f"flow {k}: output {bad[0]} outside [1, {shape.N}]")
        if (i, outs) in seen:
            raise DuplicateFlowError(f"flow {k}: duplicate flow (input {i}, outputs {list(outs)})")
        seen.add((i, outs))
        out.append((i, outs))
    return out


def validate_pattern(p: TrafficPattern) -> TrafficPattern:
    """Return ``p`` unchanged if it is well formed, otherwise raise the
    specific :class:`TrafficError` subclass."""
    validate_structure(p.shape, [(f.input, f.outputs) for f in p.flows])
    for k, f in enumerate(p.flows):
        if f.rate < 0:
            raise NegativeRateError(f"flow {k}: negative rate {format_rational(f.rate)}")
    return p


def port_loads(p: TrafficPattern) -> tuple[list[Fraction], list[Fraction]]:
    inputs = [Fraction(0)] * p.shape.K
    outputs = [Fraction(0)] * p.shape.N
    for f in p.flows:
        inputs[f.input - 1] += f.rate
        for j in f.outputs:
            outputs[j - 1] += f.rate
    return inputs, outputs


def is_admissible(p: TrafficPattern) -> tuple[bool, list[Fraction], list[Fraction]]:
    """No input and no output oversubscribed; returns the exact loads too."""
    validate_pattern(p)
    ins, outs = port_loads(p)
    ok = all(x <= 1 for x in ins) and all(x <= 1 for x in outs)
    return ok, ins, outs


def subflows_of(p: TrafficPattern) -> list[tuple[Subflow, Flow]]:
    N = p.shape.N
    out = []
    for f in p.flows:
        kind = flow_kind(f.outputs, N)
        for j in sorted(f.outputs):
            out.append((make_subflow(f.input, sorted(f.outputs), j, kind), f))
    out.sort(key=lambda sf: sf[0])
    return out


def enhance(p: TrafficPattern) -> dict[str, Fraction]:
    """Enhanced rate vector: each subflow inherits its flow's rate.

    Keys are subflow labels (``u11``, ``b12``, ...) in canonical order.
    """
    validate_pattern(p)
    return {sf.label: f.rate for sf, f in subflows_of(p)}


def admissible_polytope(shape: PortShape, structure: Sequence[tuple[int, Iterable[int]]]) -> Polytope:
    """Flow-rate polytope: K input-load rows, N output-load rows, then one
    nonnegativity row per flow."""
    flows = validate_structure(shape, structure)
    f = len(flows)
    rows = []
    labels = []
    for i in range(1, shape.K + 1):
        rows.append(([1 if fi == i else 0 for fi, _ in flows], 1))
        labels.append(f"input {i}")
    for j in range(1, shape.N + 1):
        rows.append(([1 if j in outs else 0 for _, outs in flows], 1))
        labels.append(f"output {j}")
    for k in range(f):
        rows.append(([-1 if c == k else 0 for c in range(f)], 0))
        labels.append(f"rate {k} >= 0")
    return Polytope.build(f, rows, labels)


def full_structure(K: int, N: int, broadcasts: bool = True) -> list[tuple[int, tuple[int, ...]]]:
    """Every unicast plus (optionally) one broadcast per input.

    For ``N == 1`` a broadcast coincides with the unicast, so it is omitted.
    """
    out = []
    for i in range(1, K + 1):
        out.extend((i, (j,)) for j in range(1, N + 1))
        if broadcasts and N > 1:
            out.append((i, tuple(range(1, N + 1))))
    return out


def parse_pattern(obj: Mapping) -> TrafficPattern:
    """Decode the pattern JSON object; errors name the offending field."""
    if not isinstance(obj, Mapping):
        raise PatternFormatError("<root>", "expected a JSON object")
    for key in ("K", "N"):
        if key not in obj:
            raise PatternFormatError(key, "missing")
        if not isinstance(obj[key], int) or isinstance(obj[key], bool):
            raise PatternFormatError(key, f"expected an integer, got {obj[key]!r}")
    try:
        shape = PortShape(obj["K"], obj["N"])
    except PortRangeError as exc:
        raise PatternFormatError("K/N", str(exc)) from None
    raw_flows = obj.get("flows", [])
    if not isinstance(raw_flows, list):
        raise PatternFormatError("flows", "expected a list")
    flows = []
    for k, rf in enumerate(raw_flows):
        where = f"flows[{k}]"
        if not isinstance(rf, Mapping):
            raise PatternFormatError(where, "expected an object")
        i = rf.get("input")
        if not isinstance(i, int) or isinstance(i, bool):
            raise PatternFormatError(f"{where}.input", f"expected an integer, got {i!r}")
        outs = rf.get("outputs")
        if not isinstance(outs, list) or not all(
            isinstance(j, int) and not isinstance(j, bool) for j in outs
        ):
            raise PatternFormatError(f"{where}.outputs", f"expected a list of integers, got {outs!r}")
        try:
            rate = parse_rational(rf.get("rate", 0))
        except ValueError as exc:
            raise PatternFormatError(f"{where}.rate", str(exc)) from None
        flows.append(Flow(i, frozenset(outs), rate))
    pattern = TrafficPattern(shape, tuple(flows))
    try:
        return validate_pattern(pattern)
    except TrafficError as exc:
        raise PatternFormatError("flows", str(exc)) from None


def load_pattern(text: str) -> TrafficPattern:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PatternFormatError("<json>", str(exc)) from None
    return parse_pattern(obj)


def fig1_pattern(N: int) -> TrafficPattern:
    """Input 1 broadcasts at rate 1 - 1/N; input 2 sends a 1/N unicast to
    every output."""
    flows = [(1, range(1, N + 1), Fraction(N - 1, N))]
    flows += [(2, [j], Fraction(1, N)) for j in range(1, N + 1)]
    return TrafficPattern.from_flows(2, N, flows)


def fig2_pattern() -> TrafficPattern:
    """The 2x3 pattern that needs speedup 5/4."""
    half = Fraction(1, 2)
    return TrafficPattern.from_flows(
        2, 3, [(1, [1, 2, 3], half), (1, [1], half), (2, [2], half), (2, [3], half)]
    )
