from math import comb

import numpy as np
import pytest

from brkit import matrix as mx
from brkit.errors import InvalidModel, InvalidParams
from brkit.field import field_make
from brkit.models import (CompressionModel, a_dim, all_models, convexity_check, convexity_sequence, in_pattern,
                          model_dim, model_space, model_urk, pattern_mask, s_dim, thresholds)
from brkit.space import space_make, urk
from conftest import brute_rank, brute_urk

F2, F3 = field_make(2), field_make(3)


def test_model_validation():
    with pytest.raises(InvalidModel):
        CompressionModel("alt", 3, 2, 0)
    with pytest.raises(InvalidModel):
        CompressionModel("rect", 3, 1, 0)
    with pytest.raises(InvalidModel):
        CompressionModel("sym", 3, -1, 1)
    assert str(CompressionModel("sym", 5, 1, 1)) == "WS_{5,1,1}"
    assert str(CompressionModel("alt", 6, 2, 1)) == "WA_{6,2,1}"


def test_model_space_examples():
    S = model_space(CompressionModel("alt", 5, 1, 1), F2)
    gens = []
    for j in range(2, 6):
        M = np.zeros((5, 5), dtype=int)
        M[0, j - 1] = M[j - 1, 0] = 1
        gens.append(M)
    assert S.dim == 4 and S == space_make(F2, "alt", 5, gens)
    assert model_space(CompressionModel("sym", 4, 0, 2), F3).dim == 3
    assert model_space(CompressionModel("alt", 6, 0, 5), F2).dim == 10


def test_dimension_formulas_against_counting():
    for n in range(1, 9):
        for kind in ("sym", "alt"):
            for m in all_models(kind, n):
                mask = pattern_mask(m)
                free = int(np.triu(mask).sum()) if kind == "sym" else int(np.triu(mask, 1).sum())
                assert model_dim(m) == free


def test_dimension_values_frozen():
    assert a_dim(6, 2, 1) == 9 and a_dim(6, 1, 3) == 8 and a_dim(6, 0, 5) == 10
    assert s_dim(10, 1, 4) == 20 and s_dim(10, 2, 2) == 22 and s_dim(4, 0, 2) == 3 and s_dim(4, 1, 0) == 4
    assert s_dim(6, 2, 0) == 11 and a_dim(5, 2, 1) == 7


def test_model_urk_examples():
    assert model_urk(CompressionModel("sym", 5, 1, 1)).value == 3
    assert model_urk(CompressionModel("alt", 6, 2, 1), F2).value == 4
    r = model_urk(CompressionModel("alt", 7, 0, 1), F2)
    assert r.value == 0 and not r.witness.any()
    even = model_urk(CompressionModel("alt", 6, 1, 2), F3)
    assert not even.exact and even.value == 4


@pytest.mark.parametrize("q", [2, 3])
def test_model_urk_against_enumeration(q):
    F = field_make(q)
    for kind in ("sym", "alt"):
        for n in range(1, 5):
            for m in all_models(kind, n):
                mr = model_urk(m, F)
                S = model_space(m, F)
                assert brute_rank(F, mr.witness) == mr.value
                assert in_pattern(mr.witness, m)
                if q ** S.dim <= 4096:
                    assert brute_urk(S) == mr.value


def test_thresholds_examples():
    assert thresholds("alt", 6, 4).new_thm == 8
    assert thresholds("sym", 10, 6).new_thm == 22
    assert thresholds("sym", 4, 2).old_thm_max == 4
    assert thresholds("alt", 5, 2).new_thm == 3
    assert thresholds("sym", 6, 3).new_thm == 6
    for bad in [("alt", 6, 3), ("sym", 4, 4), ("sym", 4, 1), ("rect", 4, 2)]:
        with pytest.raises(InvalidParams):
            thresholds(*bad)


def test_threshold_is_below_the_model_maxima():
    for n in range(4, 14):
        for r in range(2, n):
            for kind in ("sym", "alt"):
                if kind == "alt" and r % 2:
                    continue
                th = thresholds(kind, n, r)
                assert th.new_thm <= th.old_thm_max


def test_convexity_examples():
    assert convexity_check("sym", 10, 6)
    assert convexity_check("alt", 9, 4)
    assert convexity_check("sym", 5, 0)
    assert convexity_sequence("sym", 10, 6) == [s_dim(10, s, 6 - 2 * s) for s in range(4)]


def test_second_difference_is_three():
    for n in range(1, 31):
        for r in range(0, n + 1):
            for kind in ("sym", "alt"):
                seq = convexity_sequence(kind, n, r)
                assert all(seq[i + 2] - 2 * seq[i + 1] + seq[i] == 3 for i in range(len(seq) - 2))


def test_in_pattern_stack():
    m = CompressionModel("sym", 4, 1, 1)
    S = model_space(m, F3)
    assert in_pattern(S.basis, m)
    assert not in_pattern(np.ones((4, 4), int), m)


def test_all_models_count():
    assert len(list(all_models("sym", 4))) == sum(4 - 2 * s + 1 for s in range(3))
