from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncspeedup.rational import enumerate_vertices
from ncspeedup.traffic import (
    DuplicateFlowError,
    NegativeRateError,
    PatternFormatError,
    PortRangeError,
    PortShape,
    TrafficPattern,
    admissible_polytope,
    enhance,
    fig1_pattern,
    fig2_pattern,
    full_structure,
    is_admissible,
    load_pattern,
    parse_pattern,
    validate_pattern,
)


def test_fig1_valid_and_admissible():
    p = validate_pattern(fig1_pattern(3))
    ok, ins, outs = is_admissible(p)
    assert ok
    assert ins == [F(2, 3), F(1)]
    assert outs == [1, 1, 1]


def test_fig2_admissible():
    ok, ins, outs = is_admissible(fig2_pattern())
    assert ok
    assert ins == [1, 1]
    assert outs == [1, 1, 1]


def test_overloaded_input():
    p = TrafficPattern.from_flows(1, 2, [(1, [1], "3/5"), (1, [2], "3/5")])
    ok, ins, _ = is_admissible(p)
    assert not ok and ins == [F(6, 5)]


def test_output_out_of_range():
    with pytest.raises(PortRangeError):
        validate_pattern(TrafficPattern.from_flows(1, 3, [(1, [4], 0)]))
    with pytest.raises(PortRangeError):
        validate_pattern(TrafficPattern.from_flows(1, 3, [(2, [1], 0)]))


def test_duplicate_flow():
    with pytest.raises(DuplicateFlowError):
        validate_pattern(TrafficPattern.from_flows(2, 2, [(1, [1, 2], 0), (1, [2, 1], "1/2")]))


def test_negative_rate():
    with pytest.raises(NegativeRateError):
        validate_pattern(TrafficPattern.from_flows(1, 1, [(1, [1], "-1/2")]))


def test_bad_shape():
    with pytest.raises(PortRangeError):
        PortShape(0, 2)


def test_enhance_fig2():
    w = enhance(fig2_pattern())
    assert list(w) == ["u11", "b11", "b12", "b13", "u22", "u23"]
    assert set(w.values()) == {F(1, 2)}


def test_enhance_fig1():
    w = enhance(fig1_pattern(3))
    assert {v: x for v, x in w.items() if v.startswith("b")} == {f"b1{j}": F(2, 3) for j in (1, 2, 3)}
    assert {v: x for v, x in w.items() if v.startswith("u")} == {f"u2{j}": F(1, 3) for j in (1, 2, 3)}


def test_enhance_zero_rate():
    w = enhance(TrafficPattern.from_flows(2, 2, [(1, [1, 2], 0), (2, [1], "1/3")]))
    assert w == {"b11": 0, "b12": 0, "u21": F(1, 3)}


def test_multicast_labels():
    p = TrafficPattern.from_flows(1, 3, [(1, [1, 3], "1/2"), (1, [2, 3], "1/4")])
    assert list(enhance(p)) == ["m11[1,3]", "m13[1,3]", "m12[2,3]", "m13[2,3]"]


def test_admissible_polytope_2x3():
    p = admissible_polytope(PortShape(2, 3), full_structure(2, 3))
    assert p.dimension == 8
    assert len(p.inequalities) == 5 + 8


def test_admissible_polytope_1x1():
    p = admissible_polytope(PortShape(1, 1), [(1, [1])])
    assert enumerate_vertices(p) == [(0,), (1,)]


@pytest.mark.parametrize("N", [2, 3, 4, 5])
def test_admissible_polytope_2xN_counts(N):
    p = admissible_polytope(PortShape(2, N), full_structure(2, N))
    assert p.dimension == 2 * N + 2
    assert len(p.inequalities) - p.dimension == 2 + N


def test_json_roundtrip():
    p = fig2_pattern()
    assert load_pattern(p.to_json()) == p


def test_json_integer_rates():
    p = parse_pattern({"K": 1, "N": 1, "flows": [{"input": 1, "outputs": [1], "rate": 1}]})
    assert p.flows[0].rate == 1


@pytest.mark.parametrize(
    "obj,field",
    [
        ({"N": 1, "flows": []}, "K"),
        ({"K": 1, "N": 1, "flows": [{"input": 1, "outputs": [1], "rate": "1/0"}]}, "flows[0].rate"),
        ({"K": 1, "N": 1, "flows": [{"input": "1", "outputs": [1]}]}, "flows[0].input"),
        ({"K": 1, "N": 1, "flows": [{"input": 1, "outputs": 1}]}, "flows[0].outputs"),
        ({"K": 1, "N": 1, "flows": [{"input": 1, "outputs": [2], "rate": "1"}]}, "flows"),
    ],
)
def test_parse_errors_name_field(obj, field):
    with pytest.raises(PatternFormatError) as exc:
        parse_pattern(obj)
    assert exc.value.field == field


rates = st.fractions(min_value=0, max_value=1, max_denominator=6)


@settings(max_examples=50, deadline=None)
@given(st.lists(rates, min_size=8, max_size=8), st.integers(1, 5))
def test_admissible_iff_in_polytope_and_scaling(rs, alpha):
    shape = PortShape(2, 3)
    structure = full_structure(2, 3)
    p = TrafficPattern.from_flows(2, 3, [(i, o, r) for (i, o), r in zip(structure, rs)])
    poly = admissible_polytope(shape, structure)
    assert is_admissible(p)[0] == poly.contains(p.rates)
    scaled = p.with_rates([alpha * r for r in rs])
    w, ws = enhance(p), enhance(scaled)
    assert all(ws[v] == alpha * w[v] for v in w)
