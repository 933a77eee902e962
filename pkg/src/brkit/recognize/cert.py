"""Congruence certificates, recognition outcomes and the flag witness.

A certificate is an invertible P together with a model: it asserts that
P M P^T lies in the model pattern for every M in the space.  Checking it
needs nothing but a rank computation and a pattern mask, which is the point.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np

from .. import matrix as mx
from ..errors import FormatError
from ..field import DTYPE, Field, field_make
from ..models import CompressionModel, in_pattern
from ..space import MatSpace, _matrix_rows

CERTIFIED = "certified"
NOT_CONTAINED = "not_contained"
STALLED = "stalled"


@dataclass(frozen=True, eq=False)
class CongruenceCert:
    P: np.ndarray
    model: CompressionModel

    def __repr__(self):
        return f"CongruenceCert({self.model}, P={self.P.tolist()})"


def verify_cert(S: MatSpace, cert: CongruenceCert) -> bool:
    """True iff P is invertible and P M P^T lies in the model pattern for every basis matrix M."""
    F = S.field
    P = np.asarray(cert.P, dtype=DTYPE)
    model = cert.model
    if P.shape != (S.n, S.n) or model.n != S.n or S.kind == "rect":
        return False
    if not mx.is_invertible(F, P):
        return False
    if S.dim == 0:
        return True
    images = mx.congruence(F, P, S.basis, check=False)
    if not in_pattern(images, model):
        return False
    if model.kind == "alt":
        return all(mx.is_alternating(F, M) for M in images)
    return all(mx.is_symmetric(M) for M in images)


@dataclass
class RecognitionOutcome:
    verdict: str
    cert: Optional[CongruenceCert] = None
    models: tuple = ()          # models ruled out (not_contained)
    reason: str = ""            # stall reason
    trace: list = dc_field(default_factory=list)
    stats: dict = dc_field(default_factory=lambda: {"hyperplanes_scanned": 0, "flags_tested": 0})
    method: str = ""

    @property
    def certified(self) -> bool:
        return self.verdict == CERTIFIED

    @property
    def model(self) -> Optional[CompressionModel]:
        return self.cert.model if self.cert is not None else None

    def to_json(self) -> dict:
        out = {"verdict": self.verdict,
               "model": list(self.cert.model.to_tuple()) if self.cert else None,
               "P": self.cert.P.tolist() if self.cert else None,
               "trace": list(self.trace),
               "stats": dict(self.stats)}
        if self.models:
            out["models"] = [list(m.to_tuple()) for m in self.models]
        if self.reason:
            out["reason"] = self.reason
        if self.method:
            out["method"] = self.method
        return out

    @staticmethod
    def from_json(obj) -> "RecognitionOutcome":
        if isinstance(obj, str):
            obj = json.loads(obj)
        cert = None
        if obj.get("model") is not None:
            cert = CongruenceCert(np.asarray(obj["P"], dtype=DTYPE), CompressionModel(*obj["model"]))
        models = tuple(CompressionModel(*m) for m in obj.get("models", []))
        return RecognitionOutcome(obj["verdict"], cert, models, obj.get("reason", ""),
                                  list(obj.get("trace", [])), dict(obj.get("stats", {})), obj.get("method", ""))


# ---------------------------------------------------------------- flags

def orthogonal_space(S: MatSpace, z) -> np.ndarray:
    """Basis of z^{perp S} = {Y : X^T M Y = 0 for all X in z, M in S}."""
    z = np.asarray(z, dtype=DTYPE).reshape(-1, S.n)
    if len(z) == 0 or S.dim == 0:
        return np.eye(S.n, dtype=DTYPE)
    L = S.field.matmul(z[None, :, :], S.basis).reshape(-1, S.n)
    return mx.nullspace(S.field, L)


def flag_condition(S: MatSpace, z, zprime) -> bool:
    """X^T M Y = 0 for all X in z, Y in z', M in S."""
    z = np.asarray(z, dtype=DTYPE).reshape(-1, S.n)
    zp = np.asarray(zprime, dtype=DTYPE).reshape(-1, S.n)
    if len(z) == 0 or len(zp) == 0 or S.dim == 0:
        return True
    F = S.field
    G = F.matmul(F.matmul(z[None], S.basis), zp.T[None])
    return not G.any()


def cert_from_flag(S: MatSpace, model: CompressionModel, z, zprime) -> CongruenceCert:
    """Turn a flag z in z' into a certificate by basis completion.

    Rows of P, from the bottom up: a basis of z, then vectors completing it to
    z', then vectors completing z' to F^n.  In these coordinates the rows past
    s+t span z and the rows past s span z', which is exactly the pattern.
    """
    F = S.field
    n, s, t = model.n, model.s, model.t
    z = mx.row_basis(F, np.asarray(z, dtype=DTYPE).reshape(-1, n))
    zp = mx.row_basis(F, np.asarray(zprime, dtype=DTYPE).reshape(-1, n))
    if len(z) != n - s - t or len(zp) != n - s:
        raise ValueError(f"flag of dimensions ({len(z)}, {len(zp)}), model needs ({n - s - t}, {n - s})")
    mid = mx.complete_basis(F, z, n, pool=zp)[: t]
    top = mx.complete_basis(F, np.vstack([z, mid]), n)
    if len(mid) != t or len(top) != s:
        raise ValueError("z is not contained in z'")
    P = np.vstack([top, mid, z]).astype(DTYPE)
    return CongruenceCert(P, model)


# ---------------------------------------------------------------- certificate file

def dumps_cert(cert: CongruenceCert, q: int) -> str:
    n = cert.model.n
    head = ["%matspace v1", f"field {q}", "kind rect", f"size {n} {n}", "dim 1"]
    m = cert.model
    return "\n".join(head + _matrix_rows(cert.P) + [f"model {m.kind} {m.n} {m.s} {m.t}"]) + "\n"


def loads_cert(text: str) -> tuple[CongruenceCert, Field]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if len(lines) < 6 or lines[0].strip() != "%matspace v1":
        raise FormatError("certificate must start with a matspace header")
    try:
        q = int(lines[1].split()[1])
        size = [int(x) for x in lines[3].split()[1:]]
        n = size[0]
        rows = lines[5:5 + n]
        P = np.array([[int(x) for x in r.split()] for r in rows], dtype=DTYPE)
        tail = lines[5 + n].split()
    except (IndexError, ValueError) as e:
        raise FormatError(f"malformed certificate: {e}") from None
    if P.shape != (n, n) or tail[0] != "model" or len(tail) != 5:
        raise FormatError("certificate needs an n x n matrix followed by 'model <kind> <n> <s> <t>'")
    model = CompressionModel(tail[1], int(tail[2]), int(tail[3]), int(tail[4]))
    return CongruenceCert(P, model), field_make(q)
