"""Recognition of spaces of bounded rank up to congruence.

``recognize(S, r)`` returns a RecognitionOutcome whose certificate, when
present, has already been checked with ``verify_cert``.
"""
from __future__ import annotations

import numpy as np

from ..errors import BudgetExceeded, InvalidParams, RankBoundViolated, ThresholdNotMet
from ..models import CompressionModel, thresholds
from ..space import MatSpace, urk
from .cert import (CERTIFIED, NOT_CONTAINED, STALLED, CongruenceCert, RecognitionOutcome, cert_from_flag,
                   dumps_cert, flag_condition, loads_cert, orthogonal_space, verify_cert)
from .guided import Context, Stall, recognize_alt, recognize_sym
from .lifting import LiftingDecomposition, decompose, lift_kind1_alt, lift_kind1_sym, lift_kind2
from .oracle import DEFAULT_FLAG_BUDGET, find_flag, gaussian_binomial, oracle_recognize

MODES = ("auto", "guided", "oracle")
PRECHECK_BUDGET = 1 << 16
PRECHECK_TRIALS = 400


def candidate_models(kind: str, n: int, r: int, q: int) -> list[CompressionModel]:
    """Models a large space of upper-rank <= r can land in, in the order they are tried."""
    s, eps = divmod(r, 2)
    if r >= n or (kind == "alt" and r >= n - 1):
        return [CompressionModel(kind, n, 0, n)]
    if kind == "alt":
        return [CompressionModel("alt", n, s, 1), CompressionModel("alt", n, 0, r + 1)]
    out = [CompressionModel("sym", n, s, eps), CompressionModel("sym", n, 0, r)]
    if q % 2 == 0 and eps == 0:
        out.append(CompressionModel("alt", n, 0, r + 1))
    return out


def check_threshold(S: MatSpace, r: int) -> None:
    th = thresholds(S.kind, S.n, r)
    if S.dim <= th.new_thm:
        raise ThresholdNotMet(f"dim S = {S.dim} does not exceed the threshold {th.new_thm} for n={S.n}, r={r}")


def precheck_rank(S: MatSpace, r: int, seed: int = 0) -> int:
    """Exact upper-rank when q^dim is small, otherwise a sampled lower bound; raises if it exceeds r."""
    if S.q ** S.dim <= PRECHECK_BUDGET:
        res = urk(S, "exact", budget=PRECHECK_BUDGET, stop_above=r)
    else:
        res = urk(S, "sampled", trials=PRECHECK_TRIALS, seed=seed, stop_above=r)
    if res.value > r:
        raise RankBoundViolated(f"S has a member of rank {res.value} > {r}")
    return res.value


def _validate(S: MatSpace, r: int) -> None:
    if S.kind not in ("sym", "alt"):
        raise InvalidParams(f"recognition needs a sym or alt space, got {S.kind}")
    if r < 2:
        raise InvalidParams(f"rank bound must be at least 2, got {r}")
    if S.kind == "alt" and r % 2:
        raise InvalidParams("alternating spaces need an even rank bound")


def guided_recognize(S: MatSpace, r: int, check: bool = True, seed: int = 0) -> RecognitionOutcome:
    """Run the inductive recognizer; stalls are reported, never hidden."""
    _validate(S, r)
    if check and r < S.n:
        check_threshold(S, r)
        precheck_rank(S, r, seed)
    ctx = Context()
    run = recognize_alt if S.kind == "alt" else recognize_sym
    try:
        cert = run(S, r, ctx)
    except Stall as e:
        return RecognitionOutcome(STALLED, None, (), str(e), ctx.trace, ctx.stats, "guided")
    assert verify_cert(S, cert), "guided recognition produced an invalid certificate"
    return RecognitionOutcome(CERTIFIED, cert, (), "", ctx.trace, ctx.stats, "guided")


def guided_recognize_alt(S: MatSpace, r: int, check: bool = True, seed: int = 0) -> RecognitionOutcome:
    if S.kind != "alt":
        raise InvalidParams("expected an alternating space")
    return guided_recognize(S, r, check, seed)


def guided_recognize_sym(S: MatSpace, r: int, check: bool = True, seed: int = 0) -> RecognitionOutcome:
    if S.kind != "sym":
        raise InvalidParams("expected a symmetric space")
    return guided_recognize(S, r, check, seed)


def recognize_small_rank(S: MatSpace, r: int, check: bool = True, seed: int = 0) -> RecognitionOutcome:
    """Guided recognition for r = 2 (both kinds) and r = 3 (symmetric)."""
    if r not in (2, 3) or (S.kind == "alt" and r != 2):
        raise InvalidParams(f"small-rank recognition covers r in {{2, 3}}, got {r} for {S.kind}")
    return guided_recognize(S, r, check, seed)


def oracle_models(S: MatSpace, r: int, budget: int = DEFAULT_FLAG_BUDGET) -> RecognitionOutcome:
    """Try each candidate model with the flag search; the first hit wins."""
    stats = {"hyperplanes_scanned": 0, "flags_tested": 0}
    trace = []
    for model in candidate_models(S.kind, S.n, r, S.q):
        if model.kind != S.kind and not (model.kind == "alt" and S.q % 2 == 0):
            continue
        out = oracle_recognize(S, model, budget)
        trace += out.trace
        stats["flags_tested"] += out.stats["flags_tested"]
        if out.certified:
            return RecognitionOutcome(CERTIFIED, out.cert, (), "", trace, stats, "oracle")
    ruled = tuple(candidate_models(S.kind, S.n, r, S.q))
    return RecognitionOutcome(NOT_CONTAINED, None, ruled, "", trace, stats, "oracle")


def recognize(S: MatSpace, r: int, mode: str = "auto", check: bool = True, seed: int = 0,
              budget: int = DEFAULT_FLAG_BUDGET) -> RecognitionOutcome:
    """Certify S (upper-rank <= r, dimension above the threshold) into a compression model.

    mode "guided" runs the inductive recognizer only, "oracle" the flag
    search over the candidate models, and "auto" the former with the latter
    as fallback when the recursion stalls.
    """
    if mode not in MODES:
        raise InvalidParams(f"mode must be one of {MODES}, got {mode!r}")
    _validate(S, r)
    if check and r < S.n:
        check_threshold(S, r)
        precheck_rank(S, r, seed)
    if mode == "oracle":
        out = oracle_models(S, r, budget)
    else:
        out = guided_recognize(S, r, check=False, seed=seed)
        if mode == "auto" and out.verdict == STALLED:
            fb = oracle_models(S, r, budget)
            fb.trace = out.trace + [f"guided stall: {out.reason}; falling back to flag search"] + fb.trace
            fb.stats["hyperplanes_scanned"] += out.stats.get("hyperplanes_scanned", 0)
            fb.method = "auto"
            out = fb
    if out.certified:
        assert verify_cert(S, out.cert)
    return out


__all__ = [
    "CERTIFIED", "NOT_CONTAINED", "STALLED", "MODES", "CongruenceCert", "RecognitionOutcome", "Stall",
    "candidate_models", "cert_from_flag", "check_threshold", "decompose", "dumps_cert", "find_flag",
    "flag_condition", "gaussian_binomial", "guided_recognize", "guided_recognize_alt", "guided_recognize_sym",
    "lift_kind1_alt", "lift_kind1_sym", "lift_kind2", "LiftingDecomposition", "loads_cert", "oracle_models",
    "oracle_recognize", "orthogonal_space", "precheck_rank", "recognize", "recognize_small_rank", "verify_cert",
    "BudgetExceeded",
]
