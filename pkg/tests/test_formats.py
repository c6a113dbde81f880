import json

import pytest
from hypothesis import given, strategies as st

from arcops import formats
from arcops.formats import FormatError
from arcops.frobenius import dual_numbers, matrix_algebra_2, quasi_frobenius_example
from arcops.graph_core import dual_ribbon
from arcops.partition_gluing import expand

from conftest import ALL_SMALL, QF


@given(st.sampled_from(ALL_SMALL))
def test_graph_round_trip(g):
    text = formats.graph_to_json(g)
    assert formats.graph_from_json(text).key() == g.key()
    assert formats.graph_to_json(formats.graph_from_json(text)) == text


@given(st.sampled_from(ALL_SMALL))
def test_genus_is_solved_when_missing(g):
    d = formats.graph_to_dict(g)
    del d["genus"]
    assert formats.graph_from_dict(d).genus == g.genus


@given(st.sampled_from(QF))
def test_ribbon_round_trip(g):
    gamma = dual_ribbon(g)
    assert formats.ribbon_from_dict(formats.ribbon_to_dict(gamma)).key() == gamma.key()


@pytest.mark.parametrize("A", [dual_numbers(), matrix_algebra_2(), quasi_frobenius_example()])
def test_algebra_round_trip(A):
    B = formats.algebra_from_dict(json.loads(formats.dumps(formats.algebra_to_dict(A))))
    assert B.names == A.names and B.mul_table == A.mul_table and B.integral == A.integral
    assert B.d == A.d


def test_formal_sum_output(annulus1):
    d = formats.formal_sum_to_dict(expand(annulus1, 3), weight_cap=3)
    assert d["schema_version"] == formats.SCHEMA_VERSION
    assert [t["mult"] for t in d["terms"]] == [{"0": 1}, {"0": 2}, {"0": 3}]


@pytest.mark.parametrize("text", ["1/0", "x", "1.5.2"])
def test_bad_rationals(text):
    with pytest.raises(FormatError):
        formats.parse_rational(text)


def test_rational_text():
    assert formats.rational_to_str(formats.parse_rational("2/4")) == "1/2"
    assert formats.rational_to_str(3) == "3/1"
    with pytest.raises(FormatError):
        formats.parse_rational(True)


@pytest.mark.parametrize("mutate", [
    lambda d: d.pop("boundaries"),
    lambda d: d["boundaries"].append(dict(d["boundaries"][0])),
    lambda d: d.__setitem__("arcs", [["0.0"]]),
    lambda d: d.__setitem__("angle_marks", [1, 2]),
    lambda d: d.__setitem__("io", {"0": "out"}),
])
def test_malformed_graphs(annulus1, mutate):
    d = formats.graph_to_dict(annulus1)
    mutate(d)
    with pytest.raises(FormatError):
        formats.graph_from_dict(d)


def test_not_json():
    with pytest.raises(FormatError):
        formats.loads("{")
