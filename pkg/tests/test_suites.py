import random

import pytest

from arcops.correlators import hochschild_form
from arcops.frobenius import matrix_algebra_2, truncated_polynomial
from arcops.hochschild import connes_B, random_cyclic
from arcops.suites import (BOX_SIGNS, BRACE_SIGNS, CUP_SIGNS, SQCUP_SIGNS, CheckResult, SuiteReport,
                           run_suite, tree_graph, twisted_annulus)


def test_check_result_keeps_smallest_counterexample():
    c = CheckResult("demo")
    c.record(True, lambda: {"n": 0}, 1)
    c.record(False, lambda: {"n": 5}, 5)
    c.record(False, lambda: {"n": 2}, 2)
    c.record(False, lambda: {"n": 9}, 9)
    assert not c.passed and c.failures == 3 and c.instances == 4
    assert c.counterexample == {"n": 2}
    d = c.to_dict()
    assert d["status"] == "fail" and "seconds" not in d
    assert "seconds" in c.to_dict(timing=True)


def test_empty_check_does_not_pass():
    assert not CheckResult("nothing ran").passed


def test_report_status():
    ok = CheckResult("a")
    ok.record(True, dict)
    rep = SuiteReport("x", "small", [ok], 0.0)
    assert rep.passed and rep.to_dict()["status"] == "pass"


def test_unknown_suite_and_size():
    with pytest.raises(KeyError):
        run_suite("nope")
    with pytest.raises(ValueError):
        run_suite("structural", "huge")


def test_tree_graph_markings():
    cup = tree_graph("cup")
    sq = tree_graph("sqcup")
    box = tree_graph("box")
    assert cup.arcs == (("0.0", "1.0"), ("0.1", "2.0"))
    assert dict(sq.angle_marks)["0.0"] == 1 and dict(cup.angle_marks)["0.0"] == 0
    assert dict(box.angle_marks)["0.0"] == dict(box.angle_marks)["0.1"] == 1
    assert tree_graph("brace").n_arcs == 3


def test_frozen_tree_signs():
    assert set(CUP_SIGNS.values()) <= {1, -1} and len(CUP_SIGNS) == 9
    assert SQCUP_SIGNS[(0, 0)] == 1 and SQCUP_SIGNS[(1, 0)] == -1 and SQCUP_SIGNS[(1, 1)] == -1
    assert SQCUP_SIGNS[(2, 1)] == 1
    assert set(BRACE_SIGNS) == set(BOX_SIGNS)


@pytest.mark.parametrize("A", [truncated_polynomial(3), matrix_algebra_2()], ids=["k[x]/x3", "M2"])
@pytest.mark.parametrize("n", [2, 3])
def test_twisted_annulus_acts_as_connes_b(A, n):
    # on cyclic cochains of arity n + 1; B is almost always zero over k[x]/x^2
    phi = next(p for p in (random_cyclic(A, n + 1, random.Random(s), normalized=True) for s in range(50))
               if not connes_B(A, p).is_zero())
    once = hochschild_form(A, twisted_annulus(), {1: phi}, open_boundary=0, open_arity=n - 1)
    assert once == connes_B(A, phi).scale((-1) ** (n * (n - 1) // 2))
