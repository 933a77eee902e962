import numpy as np
import pytest

from brkit.errors import ConfigError, InvalidParams
from brkit.field import field_make
from brkit.models import CompressionModel, in_pattern, model_space
from brkit import matrix as mx
from brkit.recognize import verify_cert
from brkit.verify import SUITES, Report, SuiteConfig, derive_seed, run_suite, sample_bounded_space
from conftest import brute_urk


def test_sample_full_model():
    m = CompressionModel("alt", 6, 2, 1)
    smp = sample_bounded_space(m, 9, field_make(2), seed=7)
    assert smp.space.dim == 9 and smp.inner == model_space(m, field_make(2))
    assert verify_cert(smp.space, smp.truth)


def test_sample_subspace_urk():
    m = CompressionModel("sym", 5, 1, 1)
    smp = sample_bounded_space(m, 3, field_make(3), seed=1)
    assert smp.space.dim == 3 and brute_urk(smp.space) <= 3
    F = field_make(3)
    assert in_pattern(mx.congruence(F, smp.truth.P, smp.space.basis), m)


def test_sample_too_large():
    with pytest.raises(InvalidParams):
        sample_bounded_space(CompressionModel("sym", 5, 1, 1), 20, 3, seed=0)


def test_sample_is_reproducible():
    m = CompressionModel("sym", 6, 2, 0)
    a = sample_bounded_space(m, 9, 4, seed=5)
    b = sample_bounded_space(m, 9, 4, seed=5)
    assert a.space == b.space and np.array_equal(a.truth.P, b.truth.P)


def test_derive_seed_stable():
    assert derive_seed(0, "instance", "alt", 2, 6, 4, 0) == derive_seed(0, "instance", "alt", 2, 6, 4, 0)
    assert derive_seed(0, "a") != derive_seed(1, "a")


def test_config_errors():
    with pytest.raises(ConfigError):
        run_suite(SuiteConfig("nonsense"))
    with pytest.raises(ConfigError):
        run_suite(SuiteConfig("schur", fields=(6,)))
    with pytest.raises(ConfigError):
        run_suite(SuiteConfig("schur", trials=-1))


@pytest.mark.parametrize("suite,kw", [
    ("formulas", {"n_max": 12}),
    ("sharpness", {"fields": (2,), "n_max": 6, "r_values": (4,)}),
    ("extraction", {"fields": (3,), "trials": 1000}),
    ("schur", {"trials": 100}),
    ("convexity", {"n_max": 12}),
    ("maximality", {"n_max": 4}),
    ("urk", {"n_max": 4, "trials": 20}),
    ("dichotomy", {"n_max": 6, "trials": 3}),
    ("char2", {"trials": 4}),
    ("recognize", {"fields": (3,), "n_max": 5, "trials": 3}),
    ("agreement", {"fields": (3,), "n_max": 5, "trials": 2}),
])
def test_suites_pass(suite, kw):
    rep = run_suite(SuiteConfig(suite, **kw))
    assert rep.records and rep.passed, [r.params for r in rep.failures][:3]


def test_sharpness_record():
    rep = run_suite(SuiteConfig("sharpness", fields=(2,), n_max=6, r_values=(4,)))
    (rec,) = rep.records
    assert rec.params["space"] == "WA_{6,1,3}" and rec.params["dim"] == 8
    assert set(rec.params["verdicts"].values()) == {"not_contained"}


def test_report_is_byte_identical():
    cfg = SuiteConfig("recognize", fields=(4,), n_max=5, trials=2, seed=3)
    a, b = run_suite(cfg).to_jsonl(), run_suite(cfg).to_jsonl()
    assert a == b and a.count("\n") == len(run_suite(cfg).records)


def test_failing_record_carries_witness():
    rec_ok = run_suite(SuiteConfig("schur", fields=(3,), trials=5)).records[0]
    assert rec_ok.witness is None
    rep = Report("x", SuiteConfig("schur"))
    assert rep.passed
    assert "suite x: PASS" in rep.summary()


def test_all_suites_listed():
    assert set(SUITES) == {"formulas", "urk", "maximality", "convexity", "extraction", "schur", "sharpness",
                           "recognize", "agreement", "dichotomy", "char2"}
