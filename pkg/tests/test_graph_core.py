import random

import pytest
from hypothesis import given, strategies as st

from arcops.graph_core import (ArcGraph, DomainError, FormalSum, MarkingMissingError, StructuralError,
                               arc_from_dual, canonical, classify, differential,
                               differential_sum, dual_ribbon, enumerate_graphs, euler_defect,
                               in_family, insert_vertex, is_quasi_filling, relabel, remove_arc,
                               remove_vertex, twisted_boundaries, validate)
from arcops.suites import twisted_annulus

from conftest import ALL_SMALL, QF


def test_torus_euler_identity(torus2):
    assert torus2.n_arcs == 2 and torus2.genus == 1
    assert [(r.genus, len(r.cycles)) for r in torus2.regions] == [(0, 1)]
    assert euler_defect(torus2) == 0
    assert validate(torus2).ok


def test_annulus_region_is_square(annulus1):
    (region,) = annulus1.regions
    (cycle,) = region.cycles
    kinds = [k for k, _ in cycle]
    assert kinds.count("arc") == 2 and kinds.count("angle") == 2


def test_bad_arc_reference_raises(annulus1):
    bad = ArcGraph(annulus1.boundaries, (("0.0", "9.9"),), annulus1.regions, 0)
    with pytest.raises(StructuralError):
        validate(bad)


def test_wrong_genus_is_a_violation(annulus1):
    g = ArcGraph(annulus1.boundaries, annulus1.arcs, annulus1.regions, 1)
    rep = validate(g)
    assert not rep.ok and rep.violations


def test_twisted_annulus():
    tw = twisted_annulus()
    assert 0 in twisted_boundaries(tw.core)
    assert twisted_boundaries(tw.core) == frozenset({0, 1})


def test_classify_needs_io_when_asked(annulus1):
    with pytest.raises(MarkingMissingError):
        classify(annulus1, require_io=True)
    c = classify(annulus1)
    assert c.exhaustive and c.quasi_filling and c.in_out_only is None


def test_torus_dual_is_two_loops(torus2):
    gamma = dual_ribbon(torus2)
    assert len(gamma.vertices) == 1 and len(gamma.edges) == 2
    assert arc_from_dual(gamma).key() == torus2.key()


def test_torus_differential(torus2):
    assert len(differential(torus2, "quasi_filling")) == 0
    # two summands, equal graphs, opposite signs
    a, b = (remove_arc(torus2, e) for e in torus2.arcs)
    assert canonical(a).key() == canonical(b).key()
    assert len(differential(torus2, "all")) == 0


def test_enumeration_counts():
    assert len(enumerate_graphs(0, 1, 1, "exhaustive")) == 1
    assert len(enumerate_graphs(0, 0, 1, "all")) == 0
    torus = enumerate_graphs(1, 0, 2, "quasi_filling")
    assert any(g.n_arcs == 2 for g in torus)


def test_dual_requires_quasi_filling():
    g = next(g for g in ALL_SMALL if not is_quasi_filling(g))
    with pytest.raises(DomainError):
        dual_ribbon(g)


@given(st.sampled_from(ALL_SMALL))
def test_enumerated_graphs_are_valid(g):
    assert validate(g).ok
    assert canonical(canonical(g)).key() == canonical(g).key()


@given(st.sampled_from(ALL_SMALL), st.sampled_from(["all", "exhaustive", "quasi_filling"]))
def test_d_squared_zero(g, family):
    if not in_family(g, family):
        return
    assert len(differential_sum(differential(g, family), family)) == 0


@given(st.sampled_from(ALL_SMALL), st.randoms(use_true_random=False))
def test_relabel_preserves_validity(g, rnd):
    perm = list(range(g.n_boundaries))
    rnd.shuffle(perm)
    h = relabel(g, perm)
    assert validate(h).ok
    assert h.genus == g.genus and h.n_arcs == g.n_arcs


@given(st.sampled_from(QF))
def test_dual_round_trip(g):
    assert arc_from_dual(dual_ribbon(g)).key() == g.key()


@given(st.sampled_from(QF), st.integers(0, 1000))
def test_insert_remove_vertex_inverse(g, seed):
    gamma = dual_ribbon(g)
    rng = random.Random(seed)
    edge = rng.choice(list(gamma.edges))
    bigger, v = insert_vertex(gamma, edge)
    assert len(bigger.vertices) == len(gamma.vertices) + 1
    assert len(bigger.cycles()) == len(gamma.cycles())
    back = remove_vertex(bigger, v, role=gamma.role)
    assert back.key() == gamma.key()


def test_formal_sum_cancels(annulus1):
    x = FormalSum([(annulus1, 2)]) - FormalSum([(annulus1, 2)])
    assert len(x) == 0
