"""Lifting steps: extend a certificate for P(S) to one for S.

Both kinds assume the leading (n-1) x (n-1) block of every member already
lies in a model pattern and only the last row and column need fixing.

* First kind: P(S) inside W_{n-1,0,r}.  The last column restricted to the
  leading r coordinates is a local map N -> N Y, and the shear
  e_n -> e_n - Y clears it.
* Second kind: P(S) inside W_{n-1,s,eps}.  The block [B(M) C(M)] has a common
  right annihilator with nonzero last entry, giving C(M) = B(M) Y and the
  same shear on the first s coordinates.  Symmetric targets then need the
  corner a(M) = 0 (eps = 0) or a 2 x 2 congruence of the trailing J-block
  (eps = 1).

The matrices built here are written P = Q^T where Q is the matrix acting by
M -> Q^T M Q, so that every certificate uses M -> P M P^T.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Optional

import numpy as np

from .. import matrix as mx
from ..errors import AnnihilatorDegenerate, DimensionTooSmall, UnsupportedField
from ..field import DTYPE
from ..models import CompressionModel, a_dim, in_pattern, s_dim
from ..space import MatSpace, compress_p, solve_local_map, space_make
from .cert import CongruenceCert, verify_cert


@dataclass
class LiftingDecomposition:
    """Blocks of a member along the split (free | t-coordinate | middle | last).

    ``blocks[(g, h)]`` is the submatrix on row group g and column group h, with
    groups "free" (first s), "tb" (the single t-coordinate of a symmetric
    target with eps = 1), "mid" and "last".
    """

    groups: dict
    blocks: dict

    @property
    def B(self):
        return self.blocks[("mid", "free")]

    @property
    def C(self):
        return self.blocks[("mid", "last")][:, 0]

    @property
    def a(self):
        g = "tb" if "tb" in self.groups else "last"
        return int(self.blocks[(g, g)][0, 0])

    @property
    def b(self):
        return int(self.blocks[("tb", "last")][0, 0]) if "tb" in self.groups else 0

    @property
    def c(self):
        return int(self.blocks[("last", "last")][0, 0])

    @property
    def J(self):
        if "tb" not in self.groups:
            return None
        return np.array([[self.a, self.b], [int(self.blocks[("last", "tb")][0, 0]), self.c]], dtype=DTYPE)

    def reassemble(self) -> np.ndarray:
        order = [g for g in ("free", "tb", "mid", "last") if g in self.groups]
        return np.block([[self.blocks[(g, h)] for h in order] for g in order])


def lifting_groups(n: int, s: int, tb: bool) -> dict:
    groups = {"free": np.arange(0, s)}
    start = s
    if tb:
        groups["tb"] = np.array([s])
        start = s + 1
    groups["mid"] = np.arange(start, n - 1)
    groups["last"] = np.array([n - 1])
    return groups


def decompose(M, s: int, tb: bool = False) -> LiftingDecomposition:
    M = np.asarray(M, dtype=DTYPE)
    groups = lifting_groups(M.shape[0], s, tb)
    blocks = {(g, h): M[np.ix_(gi, hi)] for g, gi in groups.items() for h, hi in groups.items()}
    return LiftingDecomposition(groups, blocks)


def _shear(n: int, cols, Y, F) -> np.ndarray:
    """P = Q^T for Q = I - (embedding of Y into the given columns) in the last column."""
    P = np.eye(n, dtype=DTYPE)
    P[n - 1, cols] = F.neg(np.asarray(Y, dtype=DTYPE))
    return P


def _check_p_pattern(S: MatSpace, model: CompressionModel) -> bool:
    if S.dim == 0:
        return True
    return in_pattern(S.basis[:, : S.n - 1, : S.n - 1], model)


# ---------------------------------------------------------------- first kind

def _lift_kind1(S: MatSpace, r: int, kind: str, check_dims: bool) -> Optional[CongruenceCert]:
    F, n = S.field, S.n
    inner = CompressionModel(kind, n - 1, 0, r)
    if not _check_p_pattern(S, inner):
        return None
    V = compress_p(S)
    if check_dims:
        bound = comb(r - 1, 2) + 2 if kind == "alt" else comb(r, 2) + 2
        if V.dim <= bound:
            raise DimensionTooSmall(f"dim P(S) = {V.dim} is not above {bound}")
    target = CompressionModel(kind, n, 0, r)
    if S.dim == 0:
        return CongruenceCert(np.eye(n, dtype=DTYPE), target)
    f = S.basis[:, : n - 1, n - 1]
    if f[:, r:].any():          # C_2 must vanish
        return None
    N = S.basis[:, :r, :r]
    Y = solve_local_map(N, f[:, :r], F)
    if Y is None:               # C_1 is not local
        return None
    cert = CongruenceCert(_shear(n, np.arange(r), Y, F), target)
    return cert if verify_cert(S, cert) else None


def lift_kind1_alt(S: MatSpace, r: int, check_dims: bool = True) -> Optional[CongruenceCert]:
    """Lift P(S) inside WA_{n-1,0,r} (r odd) to a certificate into WA_{n,0,r}."""
    if r % 2 == 0:
        raise ValueError("alternating first-kind lift needs odd r")
    return _lift_kind1(S, r, "alt", check_dims)


def lift_kind1_sym(S: MatSpace, r: int, check_dims: bool = True) -> Optional[CongruenceCert]:
    """Lift P(S) inside WS_{n-1,0,r} to a certificate into WS_{n,0,r}; the corner must vanish after the shear."""
    if S.q == 2:
        raise UnsupportedField("symmetric lifting needs a field with more than two elements")
    return _lift_kind1(S, r, "sym", check_dims)


# ---------------------------------------------------------------- second kind

def _kind2_bound(target: CompressionModel) -> int:
    n, s, t = target.n, target.s, target.t
    if target.kind == "alt":
        return 1 if s == 1 else a_dim(n - 1, s, 1) - (n - s - 3)
    if t == 0:
        return 2 if s == 1 else s_dim(n - 1, s, 0) - (n - s - 3)
    return 5 if s == 1 else s_dim(n - 1, s, 1) - (n - s - 5)


def lift_kind2(S: MatSpace, target: CompressionModel, check_dims: bool = True) -> Optional[CongruenceCert]:
    """Lift P(S) inside W_{n-1,s,t} to a certificate into ``target`` = W_{n,s,t}.

    Alternating targets have t = 1, symmetric ones t in {0, 1}.  Returns None
    when a checked step fails; raises AnnihilatorDegenerate when every common
    annihilator of [B C] has zero last entry.
    """
    F, n = S.field, S.n
    s, t = target.s, target.t
    if target.kind == "alt" and t != 1:
        raise ValueError("alternating second-kind lift targets WA_{n,s,1}")
    if target.kind == "sym" and S.q == 2:
        raise UnsupportedField("symmetric lifting needs a field with more than two elements")
    inner = CompressionModel(target.kind, n - 1, s, t)
    if not _check_p_pattern(S, inner):
        return None
    if check_dims:
        bound = _kind2_bound(target)
        dP = compress_p(S).dim
        if dP <= bound:
            raise DimensionTooSmall(f"dim P(S) = {dP} is not above {bound}")
    if S.dim == 0:
        return CongruenceCert(np.eye(n, dtype=DTYPE), target)
    tb = target.kind == "sym" and t == 1
    start = s + 1 if tb else s
    B = S.basis[:, start: n - 1, :s]
    C = S.basis[:, start: n - 1, n - 1: n]
    T = np.concatenate([B, C], axis=2)                 # stack of [B(M) C(M)]
    K = mx.nullspace(F, T.reshape(-1, s + 1))
    good = [x for x in K if x[s] != 0]
    if not good:
        raise AnnihilatorDegenerate("no common annihilator of [B C] with nonzero last entry")
    X = good[0]
    Y = F.mul(X[:s], F.neg(F.inv(X[s])))               # C = B Y
    P = _shear(n, np.arange(s), Y, F)
    if tb:
        images = mx.congruence(F, P, S.basis, check=False)
        J = images[:, [s, n - 1]][:, :, [s, n - 1]]
        Jspace = space_make(F, "sym", 2, J, check=False)
        if Jspace.dim > 1:
            return None
        if Jspace.dim == 1:
            J0 = Jspace.basis[0]
            w = mx.nullspace(F, J0)
            if len(w) != 1:
                return None
            u = mx.complete_basis(F, w, 2)[0]
            R2 = np.vstack([u, w[0]])
            R = np.eye(n, dtype=DTYPE)
            R[np.ix_([s, n - 1], [s, n - 1])] = R2
            P = F.matmul(R, P)
    cert = CongruenceCert(P, target)
    return cert if verify_cert(S, cert) else None
