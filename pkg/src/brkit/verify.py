"""Seeded check suites for the dimension and rank formulas, the rank identities and the recognizer.

Every suite is a deterministic function of its SuiteConfig.  A suite yields
one record per check; records are merged in key order, so the report does
not depend on how trials are scheduled.  The arbiters are always
independent of the guided recognizer: closed formulas, exhaustive
enumeration, ground-truth certificates kept by the sampler, and the flag
search oracle.
"""
from __future__ import annotations

import json
import time
import zlib
from dataclasses import asdict, dataclass, field as dc_field
from math import comb
from typing import Callable, Iterator

import numpy as np

from . import matrix as mx
from .errors import BudgetExceeded, ConfigError, InvalidParams
from .field import DTYPE, SUPPORTED, Field, field_make
from .models import (CompressionModel, all_models, convexity_check, convexity_sequence, in_pattern, model_dim,
                     model_space, model_urk, pattern_mask, thresholds)
from .recognize import (CERTIFIED, NOT_CONTAINED, STALLED, CongruenceCert, candidate_models, oracle_recognize,
                        recognize, verify_cert)
from .space import MatSpace, min_dim_sh, space_make, space_to_json, urk

SAMPLE_RETRIES = 64


# ---------------------------------------------------------------- instance generator

@dataclass(frozen=True, eq=False)
class BoundedSample:
    space: MatSpace
    truth: CongruenceCert     # maps the space back into the model
    inner: MatSpace           # the subspace of the model before conjugation
    seed: int


def derive_seed(*key) -> int:
    """Stable 32-bit seed for a key tuple, independent of the interpreter's hash salt."""
    return int(np.random.SeedSequence([zlib.crc32(repr(key).encode())]).generate_state(1)[0])


def random_subspace(space: MatSpace, d: int, rng: np.random.Generator) -> MatSpace:
    """Random d-dimensional subspace by random coordinates, retried on a rank deficit."""
    if not 0 <= d <= space.dim:
        raise InvalidParams(f"cannot take a {d}-dimensional subspace of a {space.dim}-dimensional space")
    F = space.field
    for _ in range(SAMPLE_RETRIES):
        coeffs = F.random(rng, (d, space.dim))
        if mx.rank(F, coeffs) == d:
            return space_make(F, space.kind, space.n, space.combine(coeffs), check=False)
    raise InvalidParams(f"no {d}-dimensional subspace after {SAMPLE_RETRIES} draws")


def sample_bounded_space(model: CompressionModel, d: int, F: Field | int, seed: int = 0,
                         conjugate: bool = True) -> BoundedSample:
    """Random d-dimensional subspace of ``model``, conjugated by a random invertible matrix.

    The returned ``truth`` certificate is P^-1, which maps the sample back
    into the model pattern.
    """
    F = field_make(F) if isinstance(F, int) else F
    if d > model_dim(model) or d < 0:
        raise InvalidParams(f"d = {d} must lie in [0, {model_dim(model)}] for {model}")
    rng = np.random.default_rng(seed)
    inner = random_subspace(model_space(model, F), d, rng)
    if conjugate:
        P = mx.random_invertible(F, model.n, rng)
    else:
        P = np.eye(model.n, dtype=DTYPE)
    S = inner.congruent(P)
    return BoundedSample(S, CongruenceCert(mx.inverse(F, P), model), inner, seed)


# ---------------------------------------------------------------- configuration and report

SUITES = ("formulas", "urk", "maximality", "convexity", "extraction", "schur", "sharpness",
          "recognize", "agreement", "dichotomy", "char2")

# per-suite defaults: fields, n_max, trials, budget
_DEFAULTS = {
    "formulas": ((2, 3, 4, 5), 12, 0, 0),
    "urk": ((2, 3, 4, 5), 8, 200, 10 ** 6),
    "maximality": ((2, 3), 6, 0, 4096),
    "convexity": ((), 30, 0, 0),
    "extraction": ((2, 3, 4, 5), 7, 1000, 0),
    "schur": ((2, 3, 4, 5), 8, 1000, 0),
    "sharpness": ((2,), 6, 0, 10 ** 8),
    "recognize": ((2, 3, 4), 6, 200, 10 ** 8),
    "agreement": ((2, 3, 4), 6, 50, 10 ** 8),
    "dichotomy": ((2, 3), 6, 50, 10 ** 8),
    "char2": ((4,), 6, 50, 10 ** 8),
}


@dataclass
class SuiteConfig:
    """What to run.  Fields left as None take the suite's defaults."""

    suite: str
    fields: tuple | None = None
    n_max: int | None = None
    r_values: tuple | None = None
    trials: int | None = None
    seed: int = 0
    budget: int | None = None
    agree_trials: int = 50
    jobs: int = 1

    def resolved(self) -> "SuiteConfig":
        if self.suite not in _DEFAULTS:
            raise ConfigError(f"unknown suite {self.suite!r}; choose from {', '.join(SUITES)}")
        fields, n_max, trials, budget = _DEFAULTS[self.suite]
        out = SuiteConfig(self.suite,
                          tuple(self.fields) if self.fields is not None else fields,
                          self.n_max if self.n_max is not None else n_max,
                          tuple(self.r_values) if self.r_values is not None else None,
                          self.trials if self.trials is not None else trials,
                          self.seed,
                          self.budget if self.budget is not None else budget,
                          self.agree_trials, self.jobs)
        bad = [q for q in out.fields if q not in SUPPORTED]
        if bad:
            raise ConfigError(f"unsupported field sizes {bad}; supported: {SUPPORTED}")
        if out.n_max < 1 or out.trials < 0 or out.budget < 0 or out.jobs < 1 or out.agree_trials < 0:
            raise ConfigError("n_max and jobs must be positive, trials and budgets non-negative")
        if out.r_values is not None and any(r < 1 for r in out.r_values):
            raise ConfigError("rank bounds must be positive")
        return out


@dataclass
class Record:
    check: str
    params: dict
    passed: bool
    witness: dict | None = None
    seconds: float = 0.0

    def to_json(self, timing: bool = False) -> dict:
        out = {"check": self.check, "params": self.params, "passed": self.passed}
        if self.witness is not None:
            out["witness"] = self.witness
        if timing:
            out["seconds"] = round(self.seconds, 4)
        return out


@dataclass
class Report:
    suite: str
    config: SuiteConfig
    records: list = dc_field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(rec.passed for rec in self.records)

    @property
    def failures(self) -> list:
        return [rec for rec in self.records if not rec.passed]

    def to_jsonl(self, timing: bool = False) -> str:
        """One JSON object per record.  Without timing the text depends only on the config."""
        return "".join(json.dumps(rec.to_json(timing), sort_keys=True) + "\n" for rec in self.records)

    def summary(self) -> str:
        rows = {}
        for rec in self.records:
            tot, ok = rows.get(rec.check, (0, 0))
            rows[rec.check] = (tot + 1, ok + rec.passed)
        width = max([len(k) for k in rows] + [5])
        lines = [f"{'check':<{width}}  {'total':>6}  {'passed':>6}  {'failed':>6}"]
        for k, (tot, ok) in rows.items():
            lines.append(f"{k:<{width}}  {tot:>6}  {ok:>6}  {tot - ok:>6}")
        verdict = "PASS" if self.passed else "FAIL"
        lines.append(f"suite {self.suite}: {verdict} ({len(self.records)} records, seed {self.config.seed})")
        return "\n".join(lines)


def _space_witness(S: MatSpace, **extra) -> dict:
    out = {"space": space_to_json(S)}
    out.update(extra)
    return out


def _mat(M) -> list:
    return np.asarray(M).tolist()


# ---------------------------------------------------------------- suites

def suite_formulas(cfg: SuiteConfig) -> Iterator[Record]:
    """Dimension of the model pattern space against the closed formulas."""
    for kind in ("sym", "alt"):
        for q in cfg.fields:
            F = field_make(q)
            for n in range(1, cfg.n_max + 1):
                bad = []
                for model in all_models(kind, n):
                    got = model_space(model, F).dim
                    if got != model_dim(model):
                        bad.append([model.s, model.t, got, model_dim(model)])
                yield Record("model_dim", {"kind": kind, "q": q, "n": n}, not bad,
                             {"mismatches(s,t,got,formula)": bad} if bad else None)


def suite_urk(cfg: SuiteConfig) -> Iterator[Record]:
    """Witness rank, the structural bound on random members, and exhaustive maxima where affordable."""
    for kind in ("sym", "alt"):
        for q in cfg.fields:
            F = field_make(q)
            rng = np.random.default_rng(derive_seed(cfg.seed, "urk", kind, q))
            for n in range(1, cfg.n_max + 1):
                for model in all_models(kind, n):
                    mr = model_urk(model, F)
                    bound = 2 * model.s + model.t - (1 if kind == "alt" and model.t % 2 else 0)
                    V = model_space(model, F)
                    ok = mx.rank(F, mr.witness) == mr.value and in_pattern(mr.witness, model)
                    wit = {}
                    if V.dim and cfg.trials:
                        rk = mx.batch_rank(F, V.random_member(rng, cfg.trials))
                        if rk.max() > bound:
                            ok = False
                            wit["random_rank"] = int(rk.max())
                    params = {"kind": kind, "q": q, "n": n, "s": model.s, "t": model.t, "claimed": mr.value}
                    if q ** V.dim <= cfg.budget:
                        ex = urk(V, "exact", budget=cfg.budget)
                        params["exact"] = ex.value
                        if ex.value != mr.value:
                            ok = False
                            wit["exact_witness"] = _mat(ex.witness)
                    yield Record("model_urk", params, ok, wit or None)


def _external_positions(model: CompressionModel):
    mask = pattern_mask(model)
    n = model.n
    for i in range(n):
        for j in range(i if model.kind == "sym" else i + 1, n):
            if not mask[i, j]:
                yield i, j


def suite_maximality(cfg: SuiteConfig) -> Iterator[Record]:
    """Adjoining an outside elementary matrix raises the upper-rank.

    Only models with 2s+t < n qualify (alternating ones also need t odd):
    when 2s+t = n the upper-rank is already the largest the ambient space
    allows, so nothing can raise it.
    """
    for kind in ("sym", "alt"):
        for q in cfg.fields:
            F = field_make(q)
            nonzero = F.elements()[1:]
            for n in range(2, cfg.n_max + 1):
                for model in all_models(kind, n):
                    if (kind == "alt" and model.t % 2 == 0) or 2 * model.s + model.t >= n:
                        continue
                    mr = model_urk(model, F)
                    V = model_space(model, F)
                    rng = np.random.default_rng(derive_seed(cfg.seed, "max", kind, q, n, model.s, model.t))
                    for i, j in _external_positions(model):
                        E = np.zeros((n, n), dtype=DTYPE)
                        E[i, j] = 1
                        E[j, i] = 1 if kind == "sym" else F.neg(1)
                        # members of V + span(E) outside V are c (M + E); scan M + c E first from the witness
                        cands = [F.add(mr.witness, F.mul(E, c)) for c in nonzero]
                        found = None
                        rk = mx.batch_rank(F, np.array(cands))
                        if rk.max() > mr.value:
                            found = cands[int(np.argmax(rk))]
                        tried = 0
                        while found is None and tried < cfg.budget and V.dim:
                            batch = F.add(V.random_member(rng, 256), E[None])
                            rk = mx.batch_rank(F, batch)
                            if rk.max() > mr.value:
                                found = batch[int(np.argmax(rk))]
                            tried += 256
                        params = {"kind": kind, "q": q, "n": n, "s": model.s, "t": model.t,
                                  "entry": [i + 1, j + 1]}
                        wit = None if found is not None else {"searched": tried, "urk": mr.value}
                        yield Record("maximality", params, found is not None, wit)


def suite_convexity(cfg: SuiteConfig) -> Iterator[Record]:
    for kind in ("sym", "alt"):
        for n in range(1, cfg.n_max + 1):
            for r in range(0, n + 1):
                ok = convexity_check(kind, n, r)
                yield Record("convexity", {"kind": kind, "n": n, "r": r}, ok,
                             None if ok else {"sequence": convexity_sequence(kind, n, r)})


def _extraction_trial(F: Field, kind: str, rng: np.random.Generator, n_max: int):
    """Random member of a model containing the elementary matrix at (i, j), with r < n."""
    while True:
        n = int(rng.integers(3, n_max + 1))
        models = [m for m in all_models(kind, n) if m.s + m.t > 0]
        model = models[int(rng.integers(len(models)))]
        r = model_urk(model, F).value if kind == "sym" else 2 * model.s + model.t - (model.t % 2)
        if r >= n or r < 1:
            continue
        pos = [(i, j) for i in range(n) for j in range(i + 1, n) if pattern_mask(model)[i, j]]
        if pos:
            i, j = pos[int(rng.integers(len(pos)))]
            if rng.integers(2):
                i, j = j, i
            M = model_space(model, F).random_member(rng)
            return model, r, i, j, M


def suite_extraction(cfg: SuiteConfig) -> Iterator[Record]:
    """Deleting rows and columns i, j of a member drops the rank bound by two."""
    for q in cfg.fields:
        F = field_make(q)
        kinds = ("alt",) if q == 2 else ("alt", "sym")
        for kind in kinds:
            rng = np.random.default_rng(derive_seed(cfg.seed, "extraction", kind, q))
            bad = []
            for trial in range(cfg.trials):
                model, r, i, j, M = _extraction_trial(F, kind, rng, cfg.n_max)
                sub = mx.delete_rows_cols(M, {i + 1, j + 1})
                if mx.rank(F, sub) > r - 2:
                    bad.append({"trial": trial, "model": list(model.to_tuple()), "entry": [i + 1, j + 1],
                                "M": _mat(M)})
            yield Record("extraction", {"kind": kind, "q": q, "trials": cfg.trials}, not bad,
                         {"violations": bad[:5], "count": len(bad)} if bad else None)


def suite_schur(cfg: SuiteConfig) -> Iterator[Record]:
    """rank [[A, C], [B, D]] = r + rank(D - B A^-1 C) for invertible A."""
    for q in cfg.fields:
        F = field_make(q)
        rng = np.random.default_rng(derive_seed(cfg.seed, "schur", q))
        bad = []
        for trial in range(cfg.trials):
            n = int(rng.integers(2, cfg.n_max + 1))
            r = int(rng.integers(1, n))
            A = mx.random_invertible(F, r, rng)
            B = F.random(rng, (n - r, r))
            C = F.random(rng, (r, n - r))
            # low-rank D - B A^-1 C is the interesting case: build D from a random complement of small rank
            k = int(rng.integers(0, n - r + 1))
            low = F.matmul(F.random(rng, (n - r, k)), F.random(rng, (k, n - r)))
            D = F.add(low, F.matmul(F.matmul(B, mx.inverse(F, A)), C)) if rng.integers(2) else F.random(rng, (n - r, n - r))
            lhs = mx.rank(F, mx.block(A, C, B, D))
            rhs = r + mx.rank(F, mx.schur_complement(F, A, B, C, D))
            if lhs != rhs:
                bad.append({"trial": trial, "A": _mat(A), "B": _mat(B), "C": _mat(C), "D": _mat(D)})
        yield Record("schur", {"q": q, "trials": cfg.trials}, not bad, {"violations": bad[:5]} if bad else None)


def _r_values(cfg: SuiteConfig, kind: str, default) -> tuple:
    rs = cfg.r_values if cfg.r_values is not None else default
    return tuple(r for r in rs if kind == "sym" or r % 2 == 0)


def suite_sharpness(cfg: SuiteConfig) -> Iterator[Record]:
    """Models of exactly threshold dimension escape every candidate model."""
    n = cfg.n_max
    for q in cfg.fields:
        F = field_make(q)
        for kind in (("alt",) if q == 2 else ("alt", "sym")):
            for r in _r_values(cfg, kind, (4,)):
                if not 4 <= r < n:
                    continue
                s, eps = divmod(r, 2)
                if kind == "alt":
                    extremal = {CompressionModel("alt", n, 1, r - 1), CompressionModel("alt", n, s - 1, 3)}
                else:
                    extremal = {CompressionModel("sym", n, 1, r - 2), CompressionModel("sym", n, s - 1, 2 + eps)}
                th = thresholds(kind, n, r).new_thm
                for ext in sorted(extremal, key=lambda m: m.to_tuple()):
                    S = model_space(ext, F)
                    verdicts = {}
                    for target in candidate_models(kind, n, r, q):
                        if target.kind != kind:
                            continue
                        verdicts[str(target)] = oracle_recognize(S, target, cfg.budget).verdict
                    ok = S.dim == th and all(v == NOT_CONTAINED for v in verdicts.values())
                    yield Record("sharpness", {"kind": kind, "q": q, "n": n, "r": r, "space": str(ext),
                                               "dim": S.dim, "threshold": th, "verdicts": verdicts}, ok,
                                 None if ok else _space_witness(S))


def recognition_configs(cfg: SuiteConfig):
    """(kind, q, n, r, models) for every configuration with a non-empty instance pool."""
    for kind in ("alt", "sym"):
        for q in cfg.fields:
            if kind == "sym" and q == 2:
                continue
            for n in range(4, cfg.n_max + 1):
                for r in _r_values(cfg, kind, (2, 4) if kind == "alt" else (2, 3, 4)):
                    if not 2 <= r < n:
                        continue
                    th = thresholds(kind, n, r).new_thm
                    models = [m for m in candidate_models(kind, n, r, q) if model_dim(m) > th]
                    if models:
                        yield kind, q, n, r, models


def recognition_instance(cfg: SuiteConfig, kind: str, q: int, n: int, r: int, models, i: int):
    """The i-th instance of a configuration: model cycled, dimension uniform above the threshold."""
    F = field_make(q)
    seed = derive_seed(cfg.seed, "instance", kind, q, n, r, i)
    rng = np.random.default_rng(seed)
    model = models[i % len(models)]
    th = thresholds(kind, n, r).new_thm
    d = int(rng.integers(th + 1, model_dim(model) + 1))
    sample = sample_bounded_space(model, d, F, seed)
    S = sample.space if model.kind == kind else sample.space.as_kind(kind)
    return S, sample, seed


def suite_recognize(cfg: SuiteConfig) -> Iterator[Record]:
    """Auto mode certifies every instance; records whether the guided recursion needed the fallback."""
    for kind, q, n, r, models in recognition_configs(cfg):
        for i in range(cfg.trials):
            S, sample, seed = recognition_instance(cfg, kind, q, n, r, models, i)
            t0 = time.perf_counter()
            out = recognize(S, r, mode="auto", seed=seed, budget=cfg.budget)
            ok = out.certified and verify_cert(S, out.cert) and verify_cert(S, sample.truth)
            params = {"kind": kind, "q": q, "n": n, "r": r, "instance": i, "seed": seed,
                      "dim": S.dim, "source": str(sample.truth.model),
                      "model": str(out.model) if out.model else None, "guided": out.method == "guided"}
            wit = None if ok else _space_witness(S, verdict=out.verdict, reason=out.reason)
            yield Record("recognize", params, ok, wit, time.perf_counter() - t0)


def suite_agreement(cfg: SuiteConfig) -> Iterator[Record]:
    """The guided model is one of the models the flag search certifies."""
    for kind, q, n, r, models in recognition_configs(cfg):
        for i in range(cfg.trials):
            S, sample, seed = recognition_instance(cfg, kind, q, n, r, models, i)
            t0 = time.perf_counter()
            g = recognize(S, r, mode="guided", seed=seed)
            if g.verdict == STALLED:
                continue
            certified = []
            for model in candidate_models(kind, n, r, q):
                if model.kind != kind and not (model.kind == "alt" and q % 2 == 0):
                    continue
                try:
                    if oracle_recognize(S, model, cfg.budget).certified:
                        certified.append(str(model))
                except BudgetExceeded:
                    certified = None
                    break
            if certified is None:
                continue
            ok = str(g.model) in certified
            params = {"kind": kind, "q": q, "n": n, "r": r, "instance": i, "seed": seed,
                      "guided": str(g.model), "oracle": certified}
            yield Record("agreement", params, ok, None if ok else _space_witness(S), time.perf_counter() - t0)


def suite_dichotomy(cfg: SuiteConfig) -> Iterator[Record]:
    """Congruent copies of WA_{n,s,1} have every S_H of dimension >= s; other large subspaces of
    WA_{n,0,2s+1} have some S_H of dimension < s."""
    for q in cfg.fields:
        F = field_make(q)
        for n in range(3, cfg.n_max + 1):
            for s in range(1, (n - 1) // 2 + 1):
                full = CompressionModel("alt", n, s, 1)
                for i in range(cfg.trials):
                    seed = derive_seed(cfg.seed, "dichotomy-full", q, n, s, i)
                    S = sample_bounded_space(full, model_dim(full), F, seed).space
                    m = min_dim_sh(S).m
                    yield Record("dichotomy_full", {"q": q, "n": n, "s": s, "instance": i, "seed": seed,
                                                    "min_dim_sh": m}, m >= s,
                                 None if m >= s else _space_witness(S))
                r = 2 * s
                if r >= n - 1:        # WA_{n,0,n} is all of Mata_n, nothing to separate
                    continue
                big = CompressionModel("alt", n, 0, r + 1)
                th = thresholds("alt", n, r).new_thm
                if model_dim(big) <= th:
                    continue
                for i in range(cfg.trials):
                    for attempt in range(SAMPLE_RETRIES):
                        seed = derive_seed(cfg.seed, "dichotomy-sub", q, n, s, i, attempt)
                        rng = np.random.default_rng(seed)
                        d = int(rng.integers(th + 1, model_dim(big) + 1))
                        S = sample_bounded_space(big, d, F, seed).space
                        if not oracle_recognize(S, full, cfg.budget).certified:
                            break
                    else:
                        raise ConfigError(f"every sample of {big} fits in {full}")
                    m = min_dim_sh(S).m
                    yield Record("dichotomy_sub", {"q": q, "n": n, "s": s, "instance": i, "seed": seed,
                                                   "dim": d, "min_dim_sh": m}, m < s,
                                 None if m < s else _space_witness(S))


def suite_char2(cfg: SuiteConfig) -> Iterator[Record]:
    """Alternating spaces viewed as symmetric ones are certified into WA_{n,0,r+1}."""
    for q in cfg.fields:
        if q % 2:
            continue
        F = field_make(q)
        configs = []
        for n in range(3, cfg.n_max + 1):
            for r in _r_values(cfg, "sym", (2, 4)):
                if r % 2 or not 2 <= r < n:
                    continue
                model = CompressionModel("alt", n, 0, r + 1)
                th = thresholds("sym", n, r).new_thm
                if model_dim(model) > th:
                    configs.append((n, r, model, th))
        if not configs:
            continue
        for i in range(cfg.trials):
            n, r, model, th = configs[i % len(configs)]
            seed = derive_seed(cfg.seed, "char2", q, n, r, i)
            d = int(np.random.default_rng(seed).integers(th + 1, model_dim(model) + 1))
            S = sample_bounded_space(model, d, F, seed).space.as_kind("sym")
            out = recognize(S, r, mode="auto", seed=seed, budget=cfg.budget)
            ok = out.certified and out.model == model and verify_cert(S, out.cert)
            yield Record("char2", {"q": q, "n": n, "r": r, "instance": i, "seed": seed, "dim": d,
                                   "model": str(out.model) if out.model else None}, ok,
                         None if ok else _space_witness(S, verdict=out.verdict))


SUITE_FUNCS: dict[str, Callable[[SuiteConfig], Iterator[Record]]] = {
    "formulas": suite_formulas, "urk": suite_urk, "maximality": suite_maximality,
    "convexity": suite_convexity, "extraction": suite_extraction, "schur": suite_schur,
    "sharpness": suite_sharpness, "recognize": suite_recognize, "agreement": suite_agreement,
    "dichotomy": suite_dichotomy, "char2": suite_char2,
}


def run_suite(config: SuiteConfig) -> Report:
    """Run one suite deterministically.  ``jobs`` is accepted; trials run in a single worker."""
    cfg = config.resolved()
    t0 = time.perf_counter()
    records = list(SUITE_FUNCS[cfg.suite](cfg))
    return Report(cfg.suite, cfg, records, time.perf_counter() - t0)
