"""Inductive recognition of bounded-rank spaces.

The recursion works on n and follows the classical argument.

* Scan all hyperplanes for the smallest dim S_H (S-adapted hyperplanes only,
  for symmetric spaces).  If every S_H is large, S sits inside W_{n,s,eps}
  and a rank-r anchor matrix reveals the flag directly (``_anchor``).
* m = 0: move H to x_n = 0, recognise P(S) one size down, and lift.
* 0 < m < s: move a rank-2 member of S_H to E_{1,n} +- E_{n,1}, recognise
  K(S) two sizes down with bound r-2, rebuild P(S) inside W_{n-1,s,eps} and
  lift.

Every choice the argument leaves open ("choose a rank r matrix", "assume H
is x_n = 0") is made deterministically, and every lift checks its own
output.  A step that does not work out raises ``Stall``; the caller tries the
anchor construction as a second route and otherwise reports the stall.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .. import matrix as mx
from ..errors import (AnnihilatorDegenerate, DimensionTooSmall, NoAdaptedHyperplane, RankBoundViolated,
                      UnsupportedField)
from ..field import DTYPE, Field
from ..models import CompressionModel
from ..space import (Hyperplane, MatSpace, compress_k, compress_p, min_dim_sh, projective_coefficients,
                     s_sub_h, sh_dims)
from .cert import CongruenceCert, cert_from_flag, orthogonal_space, verify_cert
from .lifting import lift_kind1_alt, lift_kind1_sym, lift_kind2

ANCHOR_TRIES = 3
ANCHOR_SCAN = 1 << 14
KERNEL_SCAN = 1 << 12


class Stall(Exception):
    """A reduction step did not go through; carries a human-readable reason."""


@dataclass
class Context:
    trace: list = dc_field(default_factory=list)
    stats: dict = dc_field(default_factory=lambda: {"hyperplanes_scanned": 0, "flags_tested": 0})
    anchors: int = ANCHOR_TRIES

    def log(self, depth: int, msg: str) -> None:
        self.trace.append("  " * depth + msg)


# ---------------------------------------------------------------- small helpers

def _chain(F: Field, *Ps) -> np.ndarray:
    """Product P_1 P_2 ... P_k (apply the rightmost congruence first)."""
    out = Ps[0]
    for P in Ps[1:]:
        out = F.matmul(out, P)
    return out


def _embed(P, n: int, offset: int = 0) -> np.ndarray:
    E = np.eye(n, dtype=DTYPE)
    k = P.shape[0]
    E[offset:offset + k, offset:offset + k] = P
    return E


def _hyperplane_frame(F: Field, H: Hyperplane) -> np.ndarray:
    """Invertible P whose first n-1 rows span H; afterwards H is x_n = 0."""
    B = H.basis(F)
    return np.vstack([B, mx.complete_basis(F, B, H.n)])


def _identity(n: int, model: CompressionModel) -> CongruenceCert:
    return CongruenceCert(np.eye(n, dtype=DTYPE), model)


def _is_alternating_space(S: MatSpace) -> bool:
    return all(mx.is_alternating(S.field, M) for M in S.basis)


def _lift(S2: MatSpace, inner: CompressionModel, ctx: Context, depth: int) -> CongruenceCert:
    """Lift from P(S2) inside ``inner`` (size n-1) to S2."""
    n = S2.n
    try:
        if inner.s == 0:
            if inner.kind == "alt":
                if S2.kind != "alt" or inner.t % 2 == 0:
                    raise Stall(f"cannot lift from {inner}")
                cert = lift_kind1_alt(S2, inner.t, check_dims=False)
            else:
                cert = lift_kind1_sym(S2, inner.t, check_dims=False)
        else:
            if inner.kind != S2.kind:
                raise Stall(f"cannot lift a {S2.kind} space from {inner}")
            cert = lift_kind2(S2, CompressionModel(inner.kind, n, inner.s, inner.t), check_dims=False)
    except (AnnihilatorDegenerate, DimensionTooSmall) as e:
        raise Stall(f"lift from {inner}: {e}") from None
    if cert is None:
        raise Stall(f"lift from {inner} failed its checks")
    ctx.log(depth, f"lifted {inner} to {cert.model}")
    return cert


# ---------------------------------------------------------------- anchor construction

def _rank_r_members(S: MatSpace, r: int, count: int, nonalternating: bool):
    F = S.field
    found, seen = [], 0
    for c in projective_coefficients(F.q, S.dim):
        Ms = S.combine(c)
        rk = mx.batch_rank(F, Ms)
        for i in np.flatnonzero(rk == r):
            if nonalternating and mx.is_alternating(F, Ms[i]):
                continue
            found.append(Ms[i])
            if len(found) == count:
                return found
        seen += len(c)
        if seen >= ANCHOR_SCAN:
            break
    return found


def _anchor_try(S: MatSpace, A, r: int, target: CompressionModel) -> CongruenceCert | None:
    F, n = S.field, S.n
    s, t = target.s, target.t
    K = mx.nullspace(F, A)
    PA = np.vstack([mx.complete_basis(F, K, n), K])
    S1 = S.congruent(PA)
    SH = s_sub_h(S1, Hyperplane.coordinate(n, r + 1))
    if SH.dim and SH.basis[:, r, r].any():
        return None
    T = mx.row_basis(F, SH.basis[:, :r, r]) if SH.dim else np.zeros((0, r), DTYPE)
    if len(T) != s:
        return None
    perp = mx.nullspace(F, T) if len(T) else np.eye(r, dtype=DTYPE)
    U = np.zeros((n - s, n), dtype=DTYPE)
    U[: r - s, :r] = perp
    U[r - s:, r:] = np.eye(n - r, dtype=DTYPE)
    if S1.dim:
        G = F.matmul(F.matmul(U[None], S1.basis), U.T[None])
        rad = mx.nullspace(F, G.reshape(-1, n - s))
    else:
        rad = np.eye(n - s, dtype=DTYPE)
    if len(rad) < n - s - t:
        return None
    z = F.matmul(rad[: n - s - t], U)
    try:
        cert = cert_from_flag(S1, target, z, U)
    except ValueError:
        return None
    out = CongruenceCert(F.matmul(cert.P, PA), target)
    return out if verify_cert(S, out) else None


def _anchor(S: MatSpace, r: int, target: CompressionModel, ctx: Context, depth: int) -> CongruenceCert:
    nonalt = S.kind == "sym" and S.field.p == 2
    anchors = _rank_r_members(S, r, ctx.anchors, nonalt)
    if not anchors:
        raise Stall(f"no rank-{r} anchor found for {target}")
    for i, A in enumerate(anchors):
        cert = _anchor_try(S, A, r, target)
        if cert is not None:
            ctx.log(depth, f"anchor #{i} of rank {r} gives {target}")
            return cert
    raise Stall(f"{len(anchors)} anchors did not reveal a flag for {target}")


def _kernel_span(S: MatSpace, target: CompressionModel, ctx: Context, depth: int) -> CongruenceCert:
    """Take z as the span of the kernels of maximal-rank members (n x n, rank n-1)."""
    F, n = S.field, S.n
    k = n - target.s - target.t
    z = np.zeros((0, n), dtype=DTYPE)
    seen = 0
    for c in projective_coefficients(F.q, S.dim):
        Ms = S.combine(c)
        Ms = Ms[mx.batch_rank(F, Ms) == n - 1]
        while len(Ms):
            # a kernel already inside z shows up as a rank drop of z M
            if len(z):
                fresh = mx.batch_rank(F, F.matmul(z[None], Ms)) == len(z)
                Ms = Ms[fresh]
                if not len(Ms):
                    break
            z = mx.row_basis(F, np.vstack([z, mx.nullspace(F, Ms[0])]))
            Ms = Ms[1:]
            if len(z) > k:
                raise Stall("kernels of rank n-1 members span too much")
        seen += len(c)
        if seen >= KERNEL_SCAN:
            break
    if len(z) != k:
        raise Stall(f"kernels of rank n-1 members span {len(z)} dimensions, need {k}")
    W = orthogonal_space(S, z)
    if len(W) < n - target.s or mx.rank(F, np.vstack([W, z])) != len(W):
        raise Stall("kernel span is not isotropic enough")
    extra = mx.complete_basis(F, z, n, pool=W)[: n - target.s - k]
    cert = cert_from_flag(S, target, z, np.vstack([z, extra]))
    if not verify_cert(S, cert):
        raise Stall("kernel-span flag failed verification")
    ctx.log(depth, f"kernel span of rank-{n - 1} members gives {target}")
    return cert


def _with_fallbacks(primary, fallbacks, ctx: Context, depth: int) -> CongruenceCert:
    reasons = []
    for step in [primary] + list(fallbacks):
        if step is None:
            continue
        try:
            return step()
        except Stall as e:
            reasons.append(str(e))
            ctx.log(depth, f"stall: {e}")
    raise Stall("; ".join(reasons))


# ---------------------------------------------------------------- alternating

def recognize_alt(S: MatSpace, r: int, ctx: Context, depth: int = 0) -> CongruenceCert:
    """Certificate into WA_{n,s,1} or WA_{n,0,r+1} (r = 2s even) or raise Stall."""
    F, n = S.field, S.n
    s = r // 2
    if r >= n - 1:
        ctx.log(depth, f"n={n}, r={r}: inside Mata_{n}")
        return _identity(n, CompressionModel("alt", n, 0, n))
    target = CompressionModel("alt", n, s, 1)
    if S.dim == 0:
        return _identity(n, target)
    phis, dims = sh_dims(S)
    ctx.stats["hyperplanes_scanned"] += len(phis)
    i = int(np.argmin(dims))
    m = int(dims[i])
    H = Hyperplane(tuple(int(x) for x in phis[i]))
    ctx.log(depth, f"alt n={n} r={r} dim={S.dim}: min dim S_H = {m} at phi={H.phi}")
    anchor = lambda: _anchor(S, r, target, ctx, depth)  # noqa: E731
    if m >= s:
        return _with_fallbacks(anchor, [], ctx, depth)
    if m == 0:
        return _with_fallbacks(lambda: _alt_case_p(S, r, H, ctx, depth), [anchor], ctx, depth)
    return _with_fallbacks(lambda: _alt_case_k(S, r, H, ctx, depth), [anchor], ctx, depth)


def _alt_case_p(S, r, H, ctx, depth):
    F, n = S.field, S.n
    PH = _hyperplane_frame(F, H)
    S1 = S.congruent(PH)
    sub = recognize_alt(compress_p(S1), r, ctx, depth + 1)
    E = _embed(sub.P, n)
    cert = _lift(S1.congruent(E), sub.model, ctx, depth)
    return CongruenceCert(_chain(F, cert.P, E, PH), cert.model)


def _alt_case_k(S, r, H, ctx, depth):
    F, n = S.field, S.n
    s = r // 2
    PH = _hyperplane_frame(F, H)
    S1 = S.congruent(PH)
    N = s_sub_h(S1, Hyperplane.coordinate(n, n)).basis[0]
    c = N[: n - 1, n - 1]
    cols = np.vstack([c, mx.complete_basis(F, c[None], n - 1)])
    R = mx.inverse(F, cols.T)                               # R c = e_1
    P2 = _embed(R, n)
    S2 = S1.congruent(P2)
    ctx.log(depth, "normalised a rank-2 member of S_H to E_{1,n} - E_{n,1}")
    sub = recognize_alt(compress_k(S2, 1, n), r - 2, ctx, depth + 1)
    want = CompressionModel("alt", n - 2, s - 1, 1)
    if sub.model != want:
        raise Stall(f"K(S) landed in {sub.model}, not {want}")
    E = _embed(sub.P, n, 1)
    cert = _lift(S2.congruent(E), CompressionModel("alt", n - 1, s, 1), ctx, depth)
    return CongruenceCert(_chain(F, cert.P, E, P2, PH), cert.model)


# ---------------------------------------------------------------- symmetric

def recognize_sym(S: MatSpace, r: int, ctx: Context, depth: int = 0) -> CongruenceCert:
    """Certificate into WS_{n,s,eps}, WS_{n,0,r} or (char 2, r even) WA_{n,0,r+1}, or raise Stall."""
    F, n = S.field, S.n
    if F.q == 2:
        raise UnsupportedField("symmetric recognition needs a field with more than two elements")
    s, eps = divmod(r, 2)
    if r >= n:
        return _identity(n, CompressionModel("sym", n, 0, n))
    target = CompressionModel("sym", n, s, eps)
    if S.dim == 0:
        return _identity(n, target)
    if F.p == 2 and _is_alternating_space(S):
        return _sym_alternating(S, r, ctx, depth)
    try:
        an = min_dim_sh(S, adapted=True)
        H, m = an.hyperplane, an.m
        ctx.stats["hyperplanes_scanned"] += an.scanned
        ctx.log(depth, f"sym n={n} r={r} dim={S.dim}: min adapted dim S_H = {m} at phi={H.phi}")
    except NoAdaptedHyperplane:
        H, m = None, None
        ctx.stats["hyperplanes_scanned"] += (F.q ** n - 1) // (F.q - 1)
        ctx.log(depth, f"sym n={n} r={r} dim={S.dim}: no adapted hyperplane")
    anchor = lambda: _anchor(S, r, target, ctx, depth)  # noqa: E731
    if r < n - 1:
        if H is None or m >= s:
            return _with_fallbacks(anchor, [], ctx, depth)
        if m == 0:
            return _with_fallbacks(lambda: _sym_case_p(S, r, H, ctx, depth), [anchor], ctx, depth)
        return _with_fallbacks(lambda: _sym_case_k(S, r, H, ctx, depth), [anchor], ctx, depth)
    if F.p != 2:
        # with upper-rank n-1 some hyperplane has dim S_H <= (n-1)/2; failure means the rank bound is false
        low = int(sh_dims(S)[1].min())
        if low > (n - 1) // 2:
            raise RankBoundViolated(f"every S_H has dimension > {(n - 1) // 2}, so urk S > {r}")
    kernel = lambda: _kernel_span(S, target, ctx, depth)  # noqa: E731
    if H is not None and m == 0:
        return _with_fallbacks(lambda: _sym_case_p(S, r, H, ctx, depth), [anchor, kernel], ctx, depth)
    return _with_fallbacks(anchor, [kernel], ctx, depth)


def _sym_alternating(S, r, ctx, depth):
    """Characteristic 2 with every member alternating: recognise as an alternating space."""
    n = S.n
    s, eps = divmod(r, 2)
    ctx.log(depth, "every member is alternating (characteristic 2): switching to the alternating recursion")
    sub = recognize_alt(S.as_kind("alt"), 2 * s, ctx, depth + 1)
    m = sub.model
    if m.s > 0:
        model = CompressionModel("sym", n, s, eps)
    elif eps == 0:
        model = CompressionModel("alt", n, 0, min(r + 1, n))
    else:
        model = CompressionModel("sym", n, 0, r)
    cert = CongruenceCert(sub.P, model)
    if not verify_cert(S, cert):
        raise Stall(f"alternating outcome {m} does not transfer to {model}")
    return cert


def _sym_case_p(S, r, H, ctx, depth):
    F, n = S.field, S.n
    PH = _hyperplane_frame(F, H)
    S1 = S.congruent(PH)
    if r >= n - 1:
        sub = _identity(n - 1, CompressionModel("sym", n - 1, 0, n - 1))
    else:
        sub = recognize_sym(compress_p(S1), r, ctx, depth + 1)
    E = _embed(sub.P, n)
    cert = _lift(S1.congruent(E), sub.model, ctx, depth)
    return CongruenceCert(_chain(F, cert.P, E, PH), cert.model)


def _sym_case_k(S, r, H, ctx, depth):
    F, n = S.field, S.n
    s, eps = divmod(r, 2)
    PH = _hyperplane_frame(F, H)
    S1 = S.congruent(PH)
    N = s_sub_h(S1, Hyperplane.coordinate(n, n)).basis[0]
    c = N[: n - 1, n - 1]
    if not c.any():
        raise Stall("S_H has a rank-1 member")
    X = None
    for cand in projective_coefficients(F.q, n - 1):
        ok = F.matmul(cand, c) != 0
        if F.p == 2:
            psi = F.sqrt(np.diagonal(S1.basis, axis1=1, axis2=2))[:, : n - 1]
            ok &= F.matmul(cand, psi.T).any(axis=1)
        hits = np.flatnonzero(ok)
        if len(hits):
            X = cand[hits[0]]
            break
    if X is None:
        raise Stall("no vector outside ker N with a nonzero quadratic value")
    X = F.mul(X, F.inv(F.matmul(X, c)))
    G = mx.nullspace(F, c[None])
    P2 = _embed(np.vstack([X, G]), n)
    S2 = S1.congruent(P2)
    ctx.log(depth, "normalised a rank-2 member of S_H to E_{1,n} + E_{n,1} + a E_{n,n}")
    sub = recognize_sym(compress_k(S2, 1, n), r - 2, ctx, depth + 1)
    want = CompressionModel("sym", n - 2, s - 1, eps)
    if sub.model != want:
        raise Stall(f"K(S) landed in {sub.model}, not {want}")
    E = _embed(sub.P, n, 1)
    cert = _lift(S2.congruent(E), CompressionModel("sym", n - 1, s, eps), ctx, depth)
    return CongruenceCert(_chain(F, cert.P, E, P2, PH), cert.model)
