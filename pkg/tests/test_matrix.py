import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from brkit import matrix as mx
from brkit.errors import IndexOutOfRange, SingularBlock
from brkit.field import field_make
from conftest import brute_rank


def E(n, i, j):
    return mx.elementary(n, i, j)


def test_rank_examples():
    assert mx.rank(field_make(2), np.eye(3, dtype=int)) == 3
    assert mx.rank(field_make(2), [[1, 1], [1, 1]]) == 1
    assert mx.rank(field_make(3), E(2, 1, 2) + E(2, 2, 1)) == 2


@settings(max_examples=80, deadline=None)
@given(q=st.sampled_from([2, 3, 4, 5]), m=st.integers(1, 4), n=st.integers(1, 5), seed=st.integers(0, 2 ** 31))
def test_rank_matches_enumeration(q, m, n, seed):
    F = field_make(q)
    M = F.random(np.random.default_rng(seed), (m, n))
    assert mx.rank(F, M) == brute_rank(F, M)


def test_batch_rank_agrees(field, rng):
    Ms = field.random(rng, (50, 5, 6))
    Ms[::7] = 0
    Ms[1::5, 2] = Ms[1::5, 0]
    assert mx.batch_rank(field, Ms).tolist() == [mx.rank(field, M) for M in Ms]


def test_nullspace_and_solve(field, rng):
    for _ in range(20):
        A = field.random(rng, (3, 5))
        K = mx.nullspace(field, A)
        assert len(K) == 5 - mx.rank(field, A)
        assert not field.matmul(A, K.T).any()
        x0 = field.random(rng, 5)
        b = field.matmul(A, x0)
        x = mx.solve(field, A, b)
        assert np.array_equal(field.matmul(A, x), b)
        y = mx.left_nullspace(field, A.T)
        assert not field.matmul(y, A.T).any()


def test_solve_inconsistent():
    F = field_make(3)
    assert mx.solve(F, [[1, 0], [0, 0]], [0, 1]) is None


def test_inverse(field, rng):
    P = mx.random_invertible(field, 5, rng)
    assert np.array_equal(field.matmul(P, mx.inverse(field, P)), np.eye(5, dtype=int))
    with pytest.raises(SingularBlock):
        mx.inverse(field, np.zeros((3, 3), dtype=int))


def test_schur_examples():
    F = field_make(3)
    S = mx.schur_complement(F, np.eye(2, dtype=int), np.zeros((1, 2), int), np.zeros((2, 1), int), [[0]])
    assert not S.any() and mx.rank(F, mx.block(np.eye(2, dtype=int), np.zeros((2, 1), int),
                                             np.zeros((1, 2), int), [[0]])) == 2
    F5 = field_make(5)
    S = mx.schur_complement(F5, [[1]], [[2]], [[2]], [[4]])
    assert S.tolist() == [[0]]
    assert mx.rank(F5, mx.block([[1]], [[2]], [[2]], [[4]])) == 1


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_schur_rank_identity(q):
    F = field_make(q)
    rng = np.random.default_rng(q)
    for _ in range(200):
        n = int(rng.integers(2, 7))
        r = int(rng.integers(1, n))
        A = mx.random_invertible(F, r, rng)
        B, C, D = F.random(rng, (n - r, r)), F.random(rng, (r, n - r)), F.random(rng, (n - r, n - r))
        full = mx.block(A, C, B, D)
        assert brute_rank(F, full) == r + mx.rank(F, mx.schur_complement(F, A, B, C, D))


def test_congruence_examples(rng):
    F = field_make(3)
    M = F.random(rng, (4, 4))
    assert np.array_equal(mx.congruence(F, np.eye(4, dtype=int), M), M)
    perm = [2, 0, 3, 1]
    P = np.eye(4, dtype=int)[perm]
    out = mx.congruence(F, P, E(4, 1, 1))
    k = perm.index(0)
    assert out[k, k] == 1 and out.sum() == 1
    A = F.sub(M, M.T)
    Q = mx.random_invertible(F, 4, rng)
    img = mx.congruence(F, Q, A)
    assert mx.is_alternating(F, img) and mx.rank(F, img) == mx.rank(F, A)
    with pytest.raises(SingularBlock):
        mx.congruence(F, np.zeros((4, 4), int), M)


def test_classify_form():
    assert mx.classify_form(field_make(3), (E(2, 1, 2) - E(2, 2, 1)) % 3) == mx.ALTERNATING
    assert mx.classify_form(field_make(2), [[0, 1], [1, 0]]) == mx.ALTERNATING
    assert mx.classify_form(field_make(2), [[1, 0], [0, 0]]) == mx.SYMMETRIC_NONALTERNATING
    assert mx.classify_form(field_make(3), [[0, 1], [0, 0]]) == mx.GENERAL


def test_delete_rows_cols():
    M = np.arange(25).reshape(5, 5)
    assert np.array_equal(mx.delete_rows_cols(M, {1, 5}), M[1:4, 1:4])
    assert np.array_equal(mx.delete_rows_cols(M, set()), M)
    with pytest.raises(IndexOutOfRange):
        mx.delete_rows_cols(M, {6})


def test_delete_corners_of_wa511():
    from brkit.models import CompressionModel, model_space
    F = field_make(2)
    for M in model_space(CompressionModel("alt", 5, 1, 1), F).basis:
        assert not mx.delete_rows_cols(M, {1, 5}).any()


def test_form_eval():
    F2 = field_make(2)
    assert mx.form_eval(field_make(3), np.eye(2, dtype=int), [1, 0], [1, 0]) == 1
    assert mx.form_eval(F2, E(2, 1, 1), [1, 1], [1, 1]) == 1
    F = field_make(5)
    rng = np.random.default_rng(1)
    M = F.random(rng, (4, 4))
    A = F.sub(M, M.T)
    for _ in range(10):
        X = F.random(rng, 4)
        assert mx.form_eval(F, A, X, X) == 0


def test_complete_basis(field, rng):
    rows = field.random(rng, (2, 5))
    rows = mx.row_basis(field, rows)
    extra = mx.complete_basis(field, rows, 5)
    assert len(rows) + len(extra) == 5
    assert mx.rank(field, np.vstack([rows, extra])) == 5
    pool = field.random(rng, (3, 5))
    extra = mx.complete_basis(field, rows, 5, pool=pool)
    assert mx.rank(field, np.vstack([rows, extra])) == 5


def test_rref_is_reduced(field, rng):
    M = field.random(rng, (4, 6))
    R, piv = mx.rref(field, M)
    for i, p in enumerate(piv):
        assert R[i, p] == 1
        assert np.count_nonzero(R[:, p]) == 1
    assert mx.rank(field, np.vstack([R[: len(piv)], M])) == len(piv)
