import itertools
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from arcops.correlators import (ArityMismatch, ContractViolation, Multilinear, act_graph, angle_slots,
                                compose_correlators, euler_correlator, feynman, polygon,
                                trace_correlator, y_cylinder, y_partitioned, y_poly,
                                y_polygon, y_ribbon, y_surface, y_tensor)
from arcops.frobenius import dual_numbers, matrix_algebra_2, truncated_polynomial
from arcops.graph_core import MarkedRibbonGraph, dual_ribbon
from arcops.partition_gluing import partition_term
from arcops.suites import find_graph

from conftest import QF

A = dual_numbers()
ONE, X = [F(1), F(0)], [F(0), F(1)]


def test_polygon_values():
    assert y_polygon(A, [X, ONE, X, ONE]) == 0
    assert y_polygon(A, [X, ONE, ONE, ONE]) == 1
    with pytest.raises(ArityMismatch):
        y_polygon(A, [])


def test_surface_values():
    # annulus region: e = 2x
    assert y_surface(A, [[ONE], [ONE]]) == 2
    # genus one: e^2 = 0
    assert y_surface(A, [[ONE]], genus=1) == 0


def test_annulus_correlator(annulus1):
    form = y_partitioned(A, annulus1)
    assert form.arity == 2
    assert {k: v for k, v in form.table.items() if v} == {(0, 1): 1, (1, 0): 1}


@pytest.mark.parametrize("B", [dual_numbers(), matrix_algebra_2()], ids=["k[x]/x2", "M2"])
def test_annulus_multiplicity_two_two_paths(annulus1, B):
    gamma = partition_term(annulus1, (2,))[1]
    assert angle_slots(gamma) == (0, 1, 2, 3)
    form = y_partitioned(B, gamma)
    pair = lambda a, b: B.pair(B.basis(a), B.basis(b))
    # edge pairings read the second boundary backwards
    for idx in itertools.product(range(B.dim), repeat=4):
        i, j, k, m = idx
        assert y_tensor(gamma, [[i, j], [k, m]], pair) == form.at((i, j, m, k))


@given(st.sampled_from([g for g in QF if g.n_arcs <= 3]))
def test_duality_of_correlators(g):
    gamma = dual_ribbon(g)
    a = y_partitioned(A, g)
    b = y_ribbon(A, gamma)
    # the angle after flag q on a boundary is the dual angle after iota(q)
    pos = {f: p for p, f in enumerate(g.flag_order)}
    renamed = Multilinear(tuple(pos[gamma.iota[f]] for f in b.slots), b.dim, dict(b.table))
    assert renamed.reorder(a.slots) == a


def test_poly_triangle_table():
    t = y_poly(A, polygon(2))
    nonzero = {k: v for k, v in t.table.items() if v}
    assert nonzero == {(0, 0, 1): 1, (0, 1, 0): 1, (1, 0, 0): 1}


@pytest.mark.parametrize("p,q", [(1, 1), (2, 1), (2, 2), (3, 2)])
def test_trace_correlators_compose(p, q):
    C = A.casimir()
    for i in range(1, p + 1):
        assert compose_correlators(trace_correlator(A, p), i, trace_correlator(A, q), C) \
            == trace_correlator(A, p + q - 1)


def _theta():
    return MarkedRibbonGraph((("a", "b", "c"), ("d", "e", "f")),
                             (("a", "d"), ("b", "f"), ("c", "e")), ())


def _with_marks(gamma):
    seen, marks = set(), []
    for f in [f for fl in gamma.vertices for f in fl]:
        if f in seen:
            continue
        marks.append(f)
        g = f
        while g not in seen:
            seen.add(g)
            g = gamma.cycle_step(g)
    return MarkedRibbonGraph(gamma.vertices, gamma.edges, tuple(marks))


@pytest.mark.parametrize("B", [dual_numbers(), truncated_polynomial(3)], ids=["k[x]/x2", "k[x]/x3"])
def test_theta_two_ways(B):
    theta = _with_marks(_theta())
    phi = trace_correlator(B, 2)
    direct = feynman(B, theta, [phi, phi], "direct")
    seq = feynman(B, theta, [phi, phi], "sequential")
    assert direct == seq
    # a sphere with three holes
    assert theta.genus == 0 and len(theta.cycles()) == 3
    assert direct == y_surface(B, [[B.one()]] * 3)


def test_feynman_rejects_non_cyclic():
    theta = _with_marks(_theta())
    bad = Multilinear(("u", "v", "w"), 2, {(0, 0, 1): F(1)})
    with pytest.raises(ContractViolation):
        feynman(A, theta, [bad, bad])


@pytest.mark.parametrize("n,m", [(1, 1), (2, 1), (2, 2), (3, 1)])
def test_cylinder_cut_independent(n, m):
    ref = y_cylinder(A, n, m, 1, 1)
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            assert y_cylinder(A, n, m, i, j) == ref
    assert ref == euler_correlator(A, n, m)


def test_one_arc_annulus_acts_as_identity():
    ann = find_graph((("0.0",), ("1.0",)), (("0.0", "1.0"),))
    for w in [(0,), (1, 0), (0, 1, 1), (1, 1, 0, 1)]:
        assert act_graph(ann, {1: w}) == {(w,): 1}
