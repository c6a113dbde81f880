from math import comb

from hypothesis import given, strategies as st

from arcops.graph_core import dual_ribbon, enumerate_graphs, validate
from arcops.partition_gluing import (as_partitioned, compose_sums, count_ordered_partitions, dual_of_sum,
                                     expand, expand_ribbon, glue, ordered_partitions, partition_term,
                                     self_glue, underlying)
from arcops.suites import p_morphism_instance, product_converges, twisted_annulus

from conftest import EXH, QF


def _term(g, mult):
    return partition_term(g, mult)[1]


@given(st.integers(1, 8), st.integers(1, 4))
def test_ordered_partitions_count(n, k):
    parts = list(ordered_partitions(n, k))
    assert len(parts) == count_ordered_partitions(n, k) == (comb(n - 1, k - 1) if n >= k else 0)
    assert all(sum(p) == n and min(p) >= 1 for p in parts)


def test_annulus_expansion(annulus1):
    x = expand(annulus1, 4)
    assert sorted((p.mult, c) for p, c in x) == [((1,), 1), ((2,), 1), ((3,), 1), ((4,), 1)]


def test_angle_expansion_marks_new_angles(annulus1):
    for p, _ in expand(annulus1, 3, angle=True):
        assert all(m == 1 for _, m in p.graph.angle_marks)
        assert len(p.graph.angle_marks) == 2 * p.weight


def test_glue_matched_multiplicities(annulus1):
    two = _term(annulus1, (2,))
    r = glue(two, 1, two, 0)
    assert r is not None and r.graph.n_boundaries == 2
    assert r.mult == (2,)
    assert underlying(r).key() == annulus1.key()


def test_glue_mismatch_is_zero(annulus1):
    assert glue(_term(annulus1, (2,)), 1, _term(annulus1, (3,)), 0) is None


def test_both_twisted_gluing():
    tw = as_partitioned(twisted_annulus())
    assert glue(tw, 1, tw, 0, mode="topological") is None
    assert glue(tw, 1, tw, 0, mode="algebraic") is not None


def test_self_glue_closed_loop_is_zero(annulus1):
    one = as_partitioned(annulus1)
    assert self_glue(one, 0, 1, "algebraic") is None
    assert self_glue(one, 0, 1, "topological") is None


def test_self_glue_gains_genus():
    g = next(h for h in enumerate_graphs(0, 2, 2, "all")
             if h.arcs == (("0.0", "1.0"), ("0.1", "2.0")))
    r = self_glue(as_partitioned(g), 1, 2)
    assert r.graph.genus == 1 and r.graph.n_boundaries == 1
    assert validate(r.graph).ok


@given(st.sampled_from([g for g in QF if g.n_arcs <= 3]), st.integers(1, 5))
def test_partitioning_commutes_with_duality(g, w):
    x = expand(g, w)
    y = expand_ribbon(dual_ribbon(g), w)
    assert len(x) == len(y)
    assert dict(dual_of_sum(x)) == dict(y)


@given(st.sampled_from(EXH), st.sampled_from(EXH), st.data())
def test_p_morphism_on_small_pairs(a, b, data):
    i = data.draw(st.integers(0, a.n_boundaries - 1))
    if not product_converges(a, i, b, 0, 4):
        return
    assert p_morphism_instance(a, i, b, 0, 4)


@given(st.sampled_from(EXH), st.sampled_from([g for g in EXH if g.n_boundaries > 1]),
       st.sampled_from([g for g in EXH if g.n_arcs <= 2]), st.data())
def test_sequential_associativity_of_sums(a, b, c, data):
    x, y, z = expand(a, 3), expand(b, 3), expand(c, 2)
    i = data.draw(st.integers(0, a.n_boundaries - 1))
    k = data.draw(st.integers(1, b.n_boundaries - 1))
    left = compose_sums(compose_sums(x, i, y), i + k - 1, z)
    right = compose_sums(x, i, compose_sums(y, k, z))
    assert left == right
