from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from arcops.frobenius import (GradedAlgebra, NondegeneracyError, dual_numbers, group_algebra_z2, homology,
                              inverse, matrix_algebra_2, nullspace, quasi_frobenius_example, rank, rref,
                              solve, transfer_identity_holds, truncated_polynomial, verify_algebra)

ALGEBRAS = [dual_numbers(), group_algebra_z2(), truncated_polynomial(3), matrix_algebra_2()]


def test_dual_numbers_casimir_and_euler():
    A = dual_numbers()
    assert A.names == ("1", "x")
    assert A.pairing_matrix() == [[0, 1], [1, 0]]
    assert A.casimir() == [[0, 1], [1, 0]]
    assert A.coproduct(A.one()) == [[0, 1], [1, 0]]
    assert A.euler() == [0, 2]


def test_group_algebra_pairing():
    Z = group_algebra_z2()
    assert Z.pairing_matrix() == [[1, 0], [0, 1]]
    assert verify_algebra(Z) == []


@pytest.mark.parametrize("A", ALGEBRAS, ids=lambda A: ",".join(A.names))
def test_acceptance_algebras_verify(A):
    assert verify_algebra(A) == []


def test_degenerate_pairing_rejected():
    A = GradedAlgebra.from_sparse(["1", "x"], [0, 0], 0,
                                  {(0, 0, 0): 1, (0, 1, 1): 1, (1, 0, 1): 1}, [1, 0])
    with pytest.raises(NondegeneracyError):
        A.casimir()


def test_quasi_frobenius_homology():
    Q = quasi_frobenius_example()
    H = homology(Q)
    assert len(H.section) == 2
    HA = H.homology_algebra()
    assert verify_algebra(HA) == []
    # the class of x squares to zero and pairs with 1
    x = next(i for i in range(HA.dim) if i != HA.unit_index)
    assert HA.mul(HA.basis(x), HA.basis(x)) == HA.zero()
    assert HA.pair(HA.one(), HA.basis(x)) != 0


@pytest.mark.parametrize("A", ALGEBRAS[:3], ids=lambda A: ",".join(A.names))
def test_transfer_identity_on_frobenius_algebras(A):
    assert transfer_identity_holds(A)


def test_bad_integral_detected():
    assert verify_algebra(quasi_frobenius_example(bad_integral=True), frobenius=False)


matrices = st.lists(st.lists(st.integers(-3, 3).map(F), min_size=3, max_size=3), min_size=3, max_size=3)


@given(matrices)
def test_inverse_or_singular(m):
    if rank(m) < 3:
        assert nullspace(m, 3)
        return
    inv = inverse(m)
    prod = [[sum(m[i][k] * inv[k][j] for k in range(3)) for j in range(3)] for i in range(3)]
    assert prod == [[F(int(i == j)) for j in range(3)] for i in range(3)]


@given(matrices)
def test_rank_nullity(m):
    assert rank(m) + len(nullspace(m, 3)) == 3
    red, pivots = rref(m)
    assert len(pivots) == rank(m)


@given(matrices, st.lists(st.integers(-3, 3).map(F), min_size=3, max_size=3))
def test_solve_consistent(m, x):
    b = [sum(m[i][k] * x[k] for k in range(3)) for i in range(3)]
    y = solve(m, b)
    assert y is not None
    assert [sum(m[i][k] * y[k] for k in range(3)) for i in range(3)] == b


@pytest.mark.parametrize("A", ALGEBRAS, ids=lambda A: ",".join(A.names))
def test_frobenius_identity_on_basis(A):
    # <a, bc> = <ab, c>
    B = [A.basis(i) for i in range(A.dim)]
    for a in B:
        for b in B:
            for c in B:
                assert A.pair(a, A.mul(b, c)) == A.pair(A.mul(a, b), c)
