import json

import numpy as np
import pytest

from brkit import matrix as mx
from brkit.errors import (DimensionTooSmall, InvalidParams, RankBoundViolated, ThresholdNotMet, UnsupportedField)
from brkit.field import field_make
from brkit.models import CompressionModel, in_pattern, model_space
from brkit.recognize import (CERTIFIED, NOT_CONTAINED, STALLED, CongruenceCert, RecognitionOutcome, candidate_models,
                             cert_from_flag, decompose, dumps_cert, find_flag, flag_condition, gaussian_binomial,
                             guided_recognize_alt, guided_recognize_sym, lift_kind1_alt, lift_kind2, loads_cert,
                             oracle_recognize, recognize, recognize_small_rank, verify_cert)
from brkit.recognize.guided import Context, _kernel_span
from brkit.space import full_space, space_make, zero_space
from brkit.verify import sample_bounded_space

F2, F3, F4 = field_make(2), field_make(3), field_make(4)
WA = lambda n, s, t: CompressionModel("alt", n, s, t)  # noqa: E731
WS = lambda n, s, t: CompressionModel("sym", n, s, t)  # noqa: E731


def conj(S, seed):
    rng = np.random.default_rng(seed)
    P = mx.random_invertible(S.field, S.n, rng)
    return S.congruent(P)


# ---------------------------------------------------------------- certificates and flags

def test_verify_cert_examples():
    S = model_space(WA(6, 2, 1), F2)
    assert verify_cert(S, CongruenceCert(np.eye(6, dtype=int), WA(6, 2, 1)))
    assert not verify_cert(S, CongruenceCert(np.zeros((6, 6), int), WA(6, 2, 1)))
    assert not verify_cert(S, CongruenceCert(np.eye(6, dtype=int), WA(6, 0, 5)))


def test_cert_text_round_trip():
    cert = CongruenceCert(mx.random_invertible(F4, 5, np.random.default_rng(2)), WS(5, 1, 1))
    back, F = loads_cert(dumps_cert(cert, 4))
    assert F.q == 4 and back.model == cert.model and np.array_equal(back.P, cert.P)


def test_outcome_json_round_trip():
    out = recognize(conj(model_space(WA(5, 1, 1), F3), 1), 2)
    back = RecognitionOutcome.from_json(json.dumps(out.to_json()))
    assert back.verdict == out.verdict and back.model == out.model and np.array_equal(back.cert.P, out.cert.P)
    assert back.trace == out.trace


def test_gaussian_binomial():
    assert gaussian_binomial(4, 2, 2) == 35
    assert gaussian_binomial(5, 0, 3) == 1
    assert gaussian_binomial(3, 4, 2) == 0


def test_flag_gives_certificate():
    S = conj(model_space(WS(5, 1, 1), F3), 4)
    z, zp = find_flag(S, 1, 1)
    assert flag_condition(S, z, zp)
    cert = cert_from_flag(S, WS(5, 1, 1), z, zp)
    assert verify_cert(S, cert)


# ---------------------------------------------------------------- oracle

def test_oracle_certifies_conjugated_model():
    S = conj(model_space(WA(6, 2, 1), F2), 11)
    out = oracle_recognize(S, WA(6, 2, 1))
    assert out.verdict == CERTIFIED and verify_cert(S, out.cert)


def test_oracle_sharpness_example():
    S = model_space(WA(6, 1, 3), F2)
    for model in (WA(6, 2, 1), WA(6, 0, 5)):
        assert oracle_recognize(S, model).verdict == NOT_CONTAINED


def test_oracle_zero_space():
    S = zero_space(F3, "sym", 4)
    out = oracle_recognize(S, WS(4, 1, 0))
    assert out.certified and np.array_equal(out.cert.P, np.eye(4, dtype=int))


def test_oracle_kind_mismatch():
    S = model_space(WS(4, 1, 0), F3)
    assert oracle_recognize(S, WA(4, 1, 1)).verdict == NOT_CONTAINED


# ---------------------------------------------------------------- lifting

def _embedded_mata5_with_column(F, f):
    """Members [[A, 0, f(A)], [0, 0, 0], [-f(A)^T, 0, 0]] for A in Mata_5."""
    gens = []
    for A in full_space(F, "alt", 5).basis:
        M = np.zeros((7, 7), dtype=int)
        M[:5, :5] = A
        c = f(A)
        M[:5, 6] = c
        M[6, :5] = F.neg(c)
        gens.append(M)
    return space_make(F, "alt", 7, gens)


def test_lift_kind1_recovers_local_map():
    F = F2
    e2 = np.array([0, 1, 0, 0, 0])
    S = _embedded_mata5_with_column(F, lambda A: F.matmul(A, e2))
    cert = lift_kind1_alt(S, 5)
    assert cert is not None and cert.model == WA(7, 0, 5) and verify_cert(S, cert)
    assert np.array_equal(cert.P[6, :5], F.neg(e2))


def test_lift_kind1_zero_map():
    S = _embedded_mata5_with_column(F3, lambda A: np.zeros(5, dtype=int))
    cert = lift_kind1_alt(S, 5)
    assert np.array_equal(cert.P, np.eye(7, dtype=int))


def test_lift_kind1_rejects_non_local_map():
    F = F3
    S = _embedded_mata5_with_column(F, lambda A: np.array([1, 0, 0, 0, 0]))
    assert lift_kind1_alt(S, 5) is None


def test_lift_kind2_recovers_shear():
    F = F3
    Y = np.array([1, 2])
    P = np.eye(6, dtype=int)
    P[5, :2] = Y
    S = model_space(WA(6, 2, 1), F).congruent(P)
    cert = lift_kind2(S, WA(6, 2, 1))
    assert cert is not None and verify_cert(S, cert)
    assert np.array_equal(cert.P[5, :2], F.neg(Y))
    assert np.array_equal(F.matmul(cert.P, P), np.eye(6, dtype=int))


def test_lift_kind2_already_in_pattern():
    S = model_space(WA(6, 2, 1), F3)
    assert np.array_equal(lift_kind2(S, WA(6, 2, 1)).P, np.eye(6, dtype=int))


@pytest.mark.parametrize("n,check", [(8, True), (6, False)])
def test_lift_kind2_symmetric_with_odd_t(n, check):
    # for n = 6 the dimension hypothesis s_{n-1,s,1} - (n-s-5) exceeds the model itself
    F = F3
    rng = np.random.default_rng(5)
    for _ in range(6):
        Y = F.random(rng, 2)
        P = np.eye(n, dtype=int)
        P[n - 1, :2] = Y
        S = model_space(WS(n, 2, 1), F).congruent(P)
        cert = lift_kind2(S, WS(n, 2, 1), check_dims=check)
        assert cert is not None and verify_cert(S, cert)


def test_lift_kind2_normalises_the_corner_block():
    # mixing the t-coordinate into the last one puts the t-block entry into the corner
    F, n = F3, 8
    P = np.eye(n, dtype=int)
    P[n - 1, 2] = 1
    P[n - 1, :2] = [2, 1]
    S = model_space(WS(n, 2, 1), F).congruent(P)
    assert not in_pattern(S.basis, WS(n, 2, 1))
    cert = lift_kind2(S, WS(n, 2, 1))
    assert cert is not None and verify_cert(S, cert)


def test_lift_kind2_dimension_hypothesis():
    M = np.zeros((6, 6), dtype=int)
    M[0, 2], M[2, 0] = 1, 2
    S = space_make(F3, "alt", 6, [M])
    with pytest.raises(DimensionTooSmall):
        lift_kind2(S, WA(6, 2, 1))


def test_decompose_reassembles(rng):
    M = model_space(WS(7, 2, 1), F3).random_member(rng)
    d = decompose(M, 2, tb=True)
    assert np.array_equal(d.reassemble(), M)
    assert d.J.shape == (2, 2) and d.B.shape == (3, 2)


# ---------------------------------------------------------------- guided recognition

def test_guided_alt_examples():
    S = conj(model_space(WA(6, 2, 1), F3), 1)
    out = guided_recognize_alt(S, 4)
    assert out.certified and out.model == WA(6, 2, 1) and verify_cert(S, out.cert)
    smp = sample_bounded_space(WA(6, 0, 5), 9, F2, seed=3)
    out = guided_recognize_alt(smp.space, 4)
    assert out.certified and out.model == WA(6, 0, 5)
    with pytest.raises(ThresholdNotMet):
        guided_recognize_alt(model_space(WA(6, 1, 3), F2), 4)


def test_guided_sym_examples():
    S = conj(model_space(WS(6, 2, 0), F3), 2)
    out = guided_recognize_sym(S, 4)
    assert out.certified and out.model == WS(6, 2, 0)
    S = conj(model_space(WA(6, 0, 5), F4), 3).as_kind("sym")
    out = guided_recognize_sym(S, 4)
    assert out.certified and out.model == WA(6, 0, 5) and verify_cert(S, out.cert)
    with pytest.raises(UnsupportedField):
        guided_recognize_sym(conj(model_space(WS(5, 2, 0), F2), 1), 4)


def test_small_rank_examples():
    S = conj(model_space(WA(5, 1, 1), F2), 5)
    out = recognize_small_rank(S, 2)
    assert out.certified and out.model == WA(5, 1, 1)
    smp = sample_bounded_space(WS(7, 1, 1), 7, F3, seed=8)
    out = recognize_small_rank(smp.space, 3)
    assert out.certified and out.model in (WS(7, 1, 1), WS(7, 0, 3)) and verify_cert(smp.space, out.cert)
    with pytest.raises(UnsupportedField):
        recognize_small_rank(conj(model_space(WS(5, 1, 0), F2), 1), 2)
    with pytest.raises(InvalidParams):
        recognize_small_rank(S, 4)


@pytest.mark.parametrize("model,r", [(WS(5, 2, 0), 4), (WS(6, 2, 1), 5)])
def test_kernel_span_exit(model, r):
    S = conj(model_space(model, F3), 9)
    cert = _kernel_span(S, model, Context(), 0)
    assert verify_cert(S, cert) and cert.model == model


def test_guided_stall_and_auto_fallback():
    S = model_space(WA(6, 1, 3), F2)
    g = recognize(S, 4, mode="guided", check=False)
    assert g.verdict == STALLED and g.reason
    a = recognize(S, 4, mode="auto", check=False)
    assert a.verdict == NOT_CONTAINED and set(a.models) == {WA(6, 2, 1), WA(6, 0, 5)}
    assert any("falling back" in line for line in a.trace)


def test_front_end_errors():
    S = full_space(F2, "alt", 6)
    with pytest.raises(RankBoundViolated):
        recognize(S, 4)
    with pytest.raises(InvalidParams):
        recognize(S, 3)
    with pytest.raises(InvalidParams):
        recognize(S, 4, mode="fast")


def test_trivial_rank_bounds():
    S = conj(full_space(F3, "alt", 5), 1)
    out = recognize(S, 4)
    assert out.certified and out.model == WA(5, 0, 5)
    S = full_space(F3, "sym", 4)
    assert recognize(S, 4).model == WS(4, 0, 4)


def test_modes_agree_on_model_class():
    smp = sample_bounded_space(WS(5, 2, 0), 9, F3, seed=12)
    S = smp.space
    g = recognize(S, 4, mode="guided")
    o = recognize(S, 4, mode="oracle")
    assert g.certified and o.certified
    assert oracle_recognize(S, g.model).certified


def test_recognition_is_deterministic():
    S = sample_bounded_space(WA(6, 2, 1), 9, F3, seed=21).space
    a, b = recognize(S, 4), recognize(S, 4)
    assert np.array_equal(a.cert.P, b.cert.P) and a.trace == b.trace


def test_candidate_models():
    assert candidate_models("alt", 6, 4, 2) == [WA(6, 2, 1), WA(6, 0, 5)]
    assert candidate_models("sym", 6, 4, 4) == [WS(6, 2, 0), WS(6, 0, 4), WA(6, 0, 5)]
    assert candidate_models("sym", 6, 3, 3) == [WS(6, 1, 1), WS(6, 0, 3)]


@pytest.mark.parametrize("q,kind,n,r", [(2, "alt", 6, 4), (3, "alt", 6, 2), (4, "alt", 5, 2),
                                         (3, "sym", 6, 4), (4, "sym", 6, 3), (3, "sym", 5, 2)])
def test_round_trip_on_samples(q, kind, n, r):
    from brkit.models import model_dim, thresholds
    F = field_make(q)
    th = thresholds(kind, n, r).new_thm
    models = [m for m in candidate_models(kind, n, r, q) if model_dim(m) > th]
    for i in range(12):
        m = models[i % len(models)]
        smp = sample_bounded_space(m, model_dim(m) - (i % 2 if model_dim(m) - 1 > th else 0), F, seed=i)
        S = smp.space if m.kind == kind else smp.space.as_kind(kind)
        out = recognize(S, r, mode="guided")
        assert out.certified and verify_cert(S, out.cert)
        assert in_pattern(mx.congruence(F, out.cert.P, S.basis), out.model)


def test_rank_n_minus_1_sanity_bound():
    # full Mats_4 has upper-rank 4: with the precheck skipped the hyperplane bound still catches it
    S = full_space(F3, "sym", 4)
    with pytest.raises(RankBoundViolated):
        recognize(S, 3, mode="guided", check=False)
