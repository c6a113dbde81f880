import random
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from arcops.frobenius import dual_numbers, matrix_algebra_2, truncated_polynomial
from arcops.hochschild import (ArityError, add_tensors, box, brace, bracket, connes_B, cup, d_cyc, d_hoch,
                               delta, dualize, element_cochain, eta_m, gerstenhaber_circle, mu_tensor,
                               normalize, random_cochain, random_cyclic, sqcup, tensor, undualize,
                               zero_cochain)

ALGS = [dual_numbers(), truncated_polynomial(3), matrix_algebra_2()]
IDS = ["k[x]/x2", "k[x]/x3", "M2"]
seeds = st.integers(0, 10_000)


def _add(*cs):
    out = dict()
    for c in cs:
        for k, v in c.table.items():
            cur = out.get(k, (F(0),) * c.dim)
            out[k] = tuple(a + b for a, b in zip(cur, v))
    return type(cs[0])(cs[0].arity, cs[0].dim, out)


def _scale(s, c):
    return type(c)(c.arity, c.dim, {k: tuple(s * x for x in v) for k, v in c.table.items()})


@pytest.mark.parametrize("A", ALGS, ids=IDS)
@given(seed=seeds, n=st.integers(0, 2))
def test_hochschild_d_squared(A, seed, n):
    f = random_cochain(A, n, random.Random(seed))
    assert d_hoch(A, d_hoch(A, f)) == zero_cochain(A, n + 2)


@pytest.mark.parametrize("A", ALGS, ids=IDS)
@given(seed=seeds, n=st.integers(0, 2))
def test_dualization_intertwines(A, seed, n):
    f = random_cochain(A, n, random.Random(seed))
    assert undualize(A, dualize(A, f)) == f
    assert d_cyc(A, dualize(A, f)) == dualize(A, d_hoch(A, f))


@pytest.mark.parametrize("A", ALGS, ids=IDS)
@given(seed=seeds, n=st.integers(1, 3))
def test_connes_b_squares_to_zero(A, seed, n):
    phi = random_cyclic(A, n, random.Random(seed), normalized=True)
    bb = connes_B(A, connes_B(A, phi))
    assert not any(bb.table.values())


@pytest.mark.parametrize("A", ALGS, ids=IDS)
@given(seed=seeds, a=st.integers(0, 2), b=st.integers(0, 2), c=st.integers(0, 1))
def test_cup_associative(A, seed, a, b, c):
    rng = random.Random(seed)
    f, g, h = (random_cochain(A, k, rng) for k in (a, b, c))
    assert cup(A, cup(A, f, g), h) == cup(A, f, cup(A, g, h))


@pytest.mark.parametrize("A", ALGS[:2], ids=IDS[:2])
@given(seed=seeds)
def test_elements_commute_in_commutative_algebras(A, seed):
    rng = random.Random(seed)
    f, g = random_cochain(A, 0, rng), random_cochain(A, 0, rng)
    assert cup(A, f, g) == cup(A, g, f)


def test_sqcup_of_elements():
    A = matrix_algebra_2()
    rng = random.Random(1)
    a = [F(rng.randint(-2, 2)) for _ in range(4)]
    c = [F(rng.randint(-2, 2)) for _ in range(4)]
    f, g = element_cochain(A, a), element_cochain(A, c)
    h = sqcup(A, f, g)
    assert h.arity == 1
    for k in range(A.dim):
        b = A.basis(k)
        assert h(b) == A.product([a, b, c])


def test_box_with_element():
    A = matrix_algebra_2()
    rng = random.Random(2)
    f = random_cochain(A, 2, rng)
    c = [F(1), F(-1), F(0), F(2)]
    g = element_cochain(A, c)
    for i in (1, 2):
        h = box(A, f, i, g)
        assert h.arity == 3
        for idx in [(0, 1, 2), (3, 2, 1), (1, 1, 3)]:
            a = [A.basis(k) for k in idx]
            args = list(a)
            args[i - 1:i + 1] = [A.product([a[i - 1], c, a[i]])]
            assert h(*a) == f(*args)
    with pytest.raises(ArityError):
        box(A, f, 3, g)


@pytest.mark.parametrize("A", ALGS, ids=IDS)
@given(seed=seeds, a=st.integers(0, 2), b=st.integers(0, 2))
def test_bracket_antisymmetry(A, seed, a, b):
    rng = random.Random(seed)
    f, g = random_cochain(A, a, rng), random_cochain(A, b, rng)
    sign = -(-1) ** ((a - 1) * (b - 1))
    assert bracket(A, f, g) == _scale(sign, bracket(A, g, f))


@pytest.mark.parametrize("A", ALGS, ids=IDS)
@given(seed=seeds, a=st.integers(1, 2), b=st.integers(0, 2))
def test_circle_is_sum_of_braces(A, seed, a, b):
    rng = random.Random(seed)
    f, g = random_cochain(A, a, rng), random_cochain(A, b, rng)
    parts = [_scale((-1) ** ((i - 1) * (b - 1)), brace(A, f, i, g)) for i in range(1, a + 1)]
    assert gerstenhaber_circle(A, f, g) == _add(*parts)


words = st.lists(st.integers(0, 1), min_size=1, max_size=5).map(tuple)


@given(words, words)
def test_tv_identity(u, v):
    x = tensor(u, v)
    rhs = add_tensors(mu_tensor(delta(x, 0), 1), x, mu_tensor(delta(x, 1), 0))
    assert delta(mu_tensor(x)) == rhs


def test_eta_m_nested_pairing():
    A = dual_numbers()
    pair = lambda a, b: A.pair(A.basis(a), A.basis(b))
    assert eta_m(pair, (0, 1), (0, 1)) == 1
    assert eta_m(pair, (0, 0), (1, 1)) == 1
    assert eta_m(pair, (0, 1), (1, 0)) == 0


@pytest.mark.parametrize("A", ALGS, ids=IDS)
@given(seed=seeds, n=st.integers(1, 3))
def test_normalize_idempotent(A, seed, n):
    phi = random_cyclic(A, n, random.Random(seed))
    once = normalize(A, phi)
    assert normalize(A, once) == once


@pytest.mark.parametrize("A", ALGS, ids=IDS)
@given(seed=seeds, a=st.integers(0, 2), b=st.integers(1, 2), c=st.integers(1, 2))
def test_insertion_distributes_over_cup(A, seed, a, b, c):
    # (g h) o f = (g o f) h + (-1)^((a-1) b) g (h o f)
    rng = random.Random(seed)
    f, g, h = random_cochain(A, a, rng), random_cochain(A, b, rng), random_cochain(A, c, rng)
    lhs = gerstenhaber_circle(A, cup(A, g, h), f)
    rhs = _add(cup(A, gerstenhaber_circle(A, g, f), h),
               _scale((-1) ** ((a - 1) * b), cup(A, g, gerstenhaber_circle(A, h, f))))
    assert lhs == rhs
