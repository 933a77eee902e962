"""Compression spaces WS_{n,s,t} and WA_{n,s,t}, their dimensions and thresholds.

A model is defined by a zero pattern on n x n matrices: the (1-based) entry
(i, j) may be nonzero iff i <= s, or j <= s, or both i and j lie in
[s+1, s+t].  WS takes all symmetric matrices with that pattern, WA all
alternating ones.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .errors import InvalidModel, InvalidParams
from .field import DTYPE, Field
from .space import MatSpace, space_make


@dataclass(frozen=True)
class CompressionModel:
    kind: str  # "sym" or "alt"
    n: int
    s: int
    t: int

    def __post_init__(self):
        if self.kind not in ("sym", "alt"):
            raise InvalidModel(f"model kind must be sym or alt, got {self.kind!r}")
        if min(self.n, self.s, self.t) < 0 or 2 * self.s + self.t > self.n:
            raise InvalidModel(f"need 0 <= 2s+t <= n, got n={self.n}, s={self.s}, t={self.t}")

    def __str__(self):
        name = "WS" if self.kind == "sym" else "WA"
        return f"{name}_{{{self.n},{self.s},{self.t}}}"

    def to_tuple(self):
        return (self.kind, self.n, self.s, self.t)


def s_dim(n: int, s: int, t: int) -> int:
    """s_{n,s,t} = C(s+1,2) + C(t+1,2) + s(n-s)."""
    return comb(s + 1, 2) + comb(t + 1, 2) + s * (n - s)


def a_dim(n: int, s: int, t: int) -> int:
    """a_{n,s,t} = C(s,2) + C(t,2) + s(n-s)."""
    return comb(s, 2) + comb(t, 2) + s * (n - s)


def model_dim(model: CompressionModel) -> int:
    f = s_dim if model.kind == "sym" else a_dim
    return f(model.n, model.s, model.t)


def pattern_mask(model: CompressionModel) -> np.ndarray:
    """Boolean n x n array of the entries the model allows (diagonal excluded for alt)."""
    n, s, t = model.n, model.s, model.t
    idx = np.arange(n)
    low = idx < s
    mid = (idx >= s) & (idx < s + t)
    mask = low[:, None] | low[None, :] | (mid[:, None] & mid[None, :])
    if model.kind == "alt":
        np.fill_diagonal(mask, False)
    return mask


def in_pattern(M, model: CompressionModel) -> bool:
    M = np.asarray(M)
    return not np.any(M[..., ~pattern_mask(model)])


def model_space(model: CompressionModel, F: Field) -> MatSpace:
    mask = pattern_mask(model)
    n = model.n
    gens = []
    for i in range(n):
        for j in range(i, n):
            if not mask[i, j]:
                continue
            E = np.zeros((n, n), dtype=DTYPE)
            E[i, j] = 1
            if i != j:
                E[j, i] = 1 if model.kind == "sym" else F.neg(1)
            gens.append(E)
    return space_make(F, model.kind, n, gens, check=False)


@dataclass(frozen=True)
class ModelRank:
    value: int
    witness: np.ndarray
    exact: bool  # False for alternating models with even t: value is only the structural bound


def model_urk(model: CompressionModel, F: Field | None = None) -> ModelRank:
    """Upper-rank of the model with a witness of that rank.

    Every row past s+t is supported on the first s columns, so the rank is at
    most 2s+t; alternating matrices on the t-block lose one more when t is odd.
    """
    n, s, t = model.n, model.s, model.t
    W = np.zeros((n, n), dtype=DTYPE)
    neg1 = 1 if F is None else int(F.neg(1))
    if model.kind == "sym":
        for i in range(s + t):
            W[i, i] = 1
        for i in range(s):
            W[i, s + t + i] = W[s + t + i, i] = 1
        return ModelRank(2 * s + t, W, True)
    if F is None:
        raise InvalidModel("alternating witness needs the field (for -1)")
    for i in range(s):
        W[i, s + t + i] = 1
        W[s + t + i, i] = neg1
    for k in range(t // 2):
        a, b = s + 2 * k, s + 2 * k + 1
        W[a, b] = 1
        W[b, a] = neg1
    if t % 2 == 1:
        return ModelRank(2 * s + t - 1, W, True)
    return ModelRank(2 * s + t, W, False)


@dataclass(frozen=True)
class Thresholds:
    new_thm: int       # dim S must exceed this for the recognition theorem
    old_thm_max: int   # largest dimension of a bounded-rank space (model maxima)
    s: int
    eps: int


def thresholds(kind: str, n: int, r: int) -> Thresholds:
    """Dimension thresholds for spaces of upper-rank at most r in n x n matrices.

    With s = floor(r/2) and eps = r - 2s: for s >= 2 the bound is
    max(a_{n,1,r-1}, a_{n,s-1,3}) (alt) or max(s_{n,1,r-2}, s_{n,s-1,2+eps})
    (sym).  For s = 1 the small-rank bounds apply: dim > 3 for r = 2 and
    dim > 6 for symmetric r = 3.
    """
    if kind not in ("sym", "alt"):
        raise InvalidParams(f"kind must be sym or alt, got {kind!r}")
    if not 0 < r < n:
        raise InvalidParams(f"need 0 < r < n, got r={r}, n={n}")
    if kind == "alt" and r % 2:
        raise InvalidParams("alternating spaces have even upper-rank bound")
    if r < 2:
        raise InvalidParams("rank bound r=1 has no recognition threshold")
    s, eps = divmod(r, 2)
    if kind == "alt":
        old = max(a_dim(n, 0, 2 * s + 1), a_dim(n, s, 1))
        new = 3 if s == 1 else max(a_dim(n, 1, r - 1), a_dim(n, s - 1, 3))
    else:
        old = max(s_dim(n, 0, r), s_dim(n, s, eps))
        if s == 1:
            new = 3 if r == 2 else 6
        else:
            new = max(s_dim(n, 1, r - 2), s_dim(n, s - 1, 2 + eps))
    return Thresholds(new, old, s, eps)


def convexity_sequence(kind: str, n: int, r: int) -> list[int]:
    if kind == "sym":
        return [s_dim(n, s, r - 2 * s) for s in range(r // 2 + 1)]
    return [a_dim(n, s, r + 1 - 2 * s) for s in range((r + 1) // 2 + 1)]


def convexity_check(kind: str, n: int, r: int) -> bool:
    """All second differences of the model-dimension sequence equal 3."""
    seq = convexity_sequence(kind, n, r)
    return all(seq[i + 2] - 2 * seq[i + 1] + seq[i] == 3 for i in range(len(seq) - 2))


def all_models(kind: str, n: int):
    for s in range(n // 2 + 1):
        for t in range(n - 2 * s + 1):
            yield CompressionModel(kind, n, s, t)
