import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from brkit.errors import DivisionByZero, UnsupportedCardinality
from brkit.field import SUPPORTED, Field, arith, field_make


@pytest.mark.parametrize("q,p,k", [(4, 2, 2), (3, 3, 1), (2, 2, 1), (5, 5, 1), (7, 7, 1)])
def test_field_parameters(q, p, k):
    F = field_make(q)
    assert (F.q, F.p, F.k) == (q, p, k)


@pytest.mark.parametrize("q", [0, 1, 6, 8, 9])
def test_unsupported_cardinality(q):
    with pytest.raises(UnsupportedCardinality):
        Field(q)


def test_field_make_is_cached():
    assert field_make(5) is field_make(5)


def test_scalar_examples():
    assert arith(field_make(3), "add", 2, 2) == 1
    assert arith(field_make(4), "mul", 2, 3) == 1     # w (w + 1) = w^2 + w = 1
    assert arith(field_make(5), "inv", 2) == 3


def test_gf4_tables_frozen():
    F = field_make(4)
    assert F.mul_table.tolist() == [[0, 0, 0, 0], [0, 1, 2, 3], [0, 2, 3, 1], [0, 3, 1, 2]]
    assert F.add_table.tolist() == [[0, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]]


def test_inverse_of_zero(field):
    with pytest.raises(DivisionByZero):
        field.inv(0)


def test_sqrt_char2():
    for q in (2, 4):
        F = field_make(q)
        x = F.elements()
        assert np.array_equal(F.mul(F.sqrt(x), F.sqrt(x)), x)
    with pytest.raises(ValueError):
        field_make(3).sqrt(1)


qs = st.sampled_from(SUPPORTED)


@settings(max_examples=200, deadline=None)
@given(q=qs, data=st.data())
def test_field_axioms(q, data):
    F = field_make(q)
    el = st.integers(0, q - 1)
    a, b, c = data.draw(el), data.draw(el), data.draw(el)
    assert F.add(a, b) == F.add(b, a)
    assert F.mul(a, b) == F.mul(b, a)
    assert F.add(F.add(a, b), c) == F.add(a, F.add(b, c))
    assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
    assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
    assert F.add(a, F.neg(a)) == 0
    assert F.sub(a, b) == F.add(a, F.neg(b))
    if a:
        assert F.mul(a, F.inv(a)) == 1


@settings(max_examples=60, deadline=None)
@given(q=qs, seed=st.integers(0, 2 ** 31))
def test_matmul_matches_scalar_loop(q, seed):
    F = field_make(q)
    rng = np.random.default_rng(seed)
    A = F.random(rng, (3, 4))
    B = F.random(rng, (4, 2))
    ref = np.zeros((3, 2), dtype=np.int64)
    for i in range(3):
        for j in range(2):
            acc = 0
            for k in range(4):
                acc = int(F.add(acc, F.mul(A[i, k], B[k, j])))
            ref[i, j] = acc
    assert np.array_equal(F.matmul(A, B), ref)
