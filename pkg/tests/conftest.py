"""Brute-force oracles shared by the tests.

Everything here enumerates; nothing calls the package's elimination code,
so agreement with the package is independent evidence.
"""
import itertools

import numpy as np
import pytest

from brkit.field import field_make


def all_vectors(q, m):
    if m == 0:
        return np.zeros((1, 0), dtype=np.int64)
    return np.array(list(itertools.product(range(q), repeat=m)), dtype=np.int64)


def span_size(F, rows):
    """Number of distinct vectors in the span of ``rows`` (enumerate all combinations)."""
    rows = np.asarray(rows, dtype=np.int64)
    if rows.size == 0:
        return 1
    coeffs = all_vectors(F.q, rows.shape[0])
    combos = F.matmul(coeffs, rows.reshape(rows.shape[0], -1))
    return len({tuple(c) for c in combos})


def brute_rank(F, M):
    size = span_size(F, M)
    return int(round(np.log(size) / np.log(F.q)))


def brute_members(S):
    coeffs = all_vectors(S.q, S.dim)
    return S.combine(coeffs)


def brute_urk(S):
    if S.dim == 0:
        return 0
    return max(brute_rank(S.field, M) for M in brute_members(S))


def brute_dim_sh(S, hbasis):
    """log_q of the number of members vanishing on H x H."""
    F = S.field
    Ms = brute_members(S)
    vals = F.matmul(F.matmul(hbasis[None], Ms), hbasis.T[None])
    count = int((~vals.reshape(len(Ms), -1).any(axis=1)).sum())
    return int(round(np.log(count) / np.log(F.q)))


@pytest.fixture(params=[2, 3, 4, 5], ids=lambda q: f"GF{q}")
def field(request):
    return field_make(request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
