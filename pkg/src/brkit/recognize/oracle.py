"""Exhaustive flag search: the reference decision procedure.

S is congruent to a subspace of W_{n,s,t} iff there are subspaces z in z' of
dimensions n-s-t and n-s with X^T M Y = 0 for X in z, Y in z', M in S.
Given z, the best z' is any (n-s)-dimensional subspace of z^{perp S}
containing z, so the search runs over z only: every subspace of dimension
n-s-t in reduced echelon form, built row by row with two prunings

* each new row is isotropic with itself and with the earlier rows,
* the forms X^T M (X in z so far) span at most s dimensions, so that
  dim z^{perp S} >= n-s stays possible.
"""
from __future__ import annotations

from itertools import combinations

import numpy as np

from .. import matrix as mx
from ..errors import BudgetExceeded
from ..field import DTYPE
from ..models import CompressionModel
from ..space import MatSpace
from .cert import (CERTIFIED, NOT_CONTAINED, CongruenceCert, RecognitionOutcome, cert_from_flag,
                   orthogonal_space, verify_cert)

DEFAULT_FLAG_BUDGET = 10 ** 8


def gaussian_binomial(n: int, k: int, q: int) -> int:
    """Number of k-dimensional subspaces of GF(q)^n."""
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def _row_candidates(q: int, n: int, pivots: tuple, a: int) -> np.ndarray:
    """All rows of a reduced echelon matrix with the given pivots, at position a."""
    p = pivots[a]
    free = [c for c in range(p + 1, n) if c not in pivots]
    count = q ** len(free)
    rows = np.zeros((count, n), dtype=DTYPE)
    rows[:, p] = 1
    idx = np.arange(count, dtype=np.int64)
    for c in reversed(free):
        idx, rows[:, c] = np.divmod(idx, q)
    return rows


def _kind_compatible(S: MatSpace, model: CompressionModel) -> bool:
    if model.kind == "alt":
        return all(mx.is_alternating(S.field, M) for M in S.basis)
    return all(mx.is_symmetric(M) for M in S.basis)


def find_flag(S: MatSpace, s: int, t: int, budget: int = DEFAULT_FLAG_BUDGET, stats: dict | None = None):
    """First flag (z, z') in enumeration order, or None."""
    F, n = S.field, S.n
    k = n - s - t
    stats = {} if stats is None else stats
    stats.setdefault("flags_tested", 0)
    if k == 0:
        return np.zeros((0, n), DTYPE), np.eye(n, dtype=DTYPE)[s:]
    Ms = S.basis
    d = S.dim
    cand_cache: dict = {}

    def extend(pivots, chosen, L):
        a = len(chosen)
        if a == k:
            return chosen
        key = (pivots, a)
        if key not in cand_cache:
            cand_cache[key] = _row_candidates(F.q, n, pivots, a)
        X = cand_cache[key]
        stats["flags_tested"] += len(X)
        if stats["flags_tested"] > budget:
            raise BudgetExceeded(f"flag search exceeded {budget} tests")
        V = F.matmul(X[:, None, None, :], Ms[None]).reshape(len(X), d, n)  # rows X^T M_j
        ok = ~F.matmul(V, X[:, :, None])[..., 0].any(axis=1)
        if chosen:
            Z = np.array(chosen, dtype=DTYPE)
            ok &= ~F.matmul(V, Z.T).reshape(len(X), -1).any(axis=1)
        if not ok.any():
            return None
        X, V = X[ok], V[ok]
        if len(L):
            stacked = np.concatenate([np.broadcast_to(L, (len(X),) + L.shape), V], axis=1)
        else:
            stacked = V
        ranks = mx.batch_rank(F, stacked)
        for i in np.flatnonzero(ranks <= s):
            newL = mx.row_basis(F, stacked[i])
            got = extend(pivots, chosen + [X[i]], newL)
            if got is not None:
                return got
        return None

    for pivots in combinations(range(n), k):
        z = extend(pivots, [], np.zeros((0, n), DTYPE))
        if z is not None:
            z = np.array(z, dtype=DTYPE)
            W = orthogonal_space(S, z)
            extra = mx.complete_basis(F, z, n, pool=W)[: n - s - k]
            return z, np.vstack([z, extra])
    return None


def oracle_recognize(S: MatSpace, model: CompressionModel, budget: int = DEFAULT_FLAG_BUDGET) -> RecognitionOutcome:
    """Decide whether S is congruent to a subspace of ``model`` by exhaustive flag search."""
    n, s, t = model.n, model.s, model.t
    stats = {"hyperplanes_scanned": 0, "flags_tested": 0}
    trace = [f"oracle: search flags for {model}"]
    if model.n != S.n:
        raise ValueError(f"model size {model.n} differs from space size {S.n}")
    if not _kind_compatible(S, model):
        trace.append("space has members outside the model's matrix kind")
        return RecognitionOutcome(NOT_CONTAINED, None, (model,), "", trace, stats, "oracle")
    k = n - s - t
    count = gaussian_binomial(n, k, S.q)
    if count > budget:
        raise BudgetExceeded(f"{count} candidate subspaces exceed the flag budget {budget}")
    if S.dim == 0:
        cert = CongruenceCert(np.eye(n, dtype=DTYPE), model)
        return RecognitionOutcome(CERTIFIED, cert, (), "", trace + ["zero space"], stats, "oracle")
    flag = find_flag(S, s, t, budget, stats)
    if flag is None:
        trace.append(f"no flag among {count} subspaces of dimension {k}")
        return RecognitionOutcome(NOT_CONTAINED, None, (model,), "", trace, stats, "oracle")
    cert = cert_from_flag(S, model, *flag)
    assert verify_cert(S, cert), "flag search produced an invalid certificate"
    trace.append("flag found, certificate verified")
    return RecognitionOutcome(CERTIFIED, cert, (), "", trace, stats, "oracle")
