"""Linear spaces of matrices, hyperplane machinery and the block compressions.

A :class:`MatSpace` stores a canonical basis: the reduced row echelon form of
the basis matrices written in a fixed coordinate order

* ``sym``  -- entries (i, j) with i <= j, lexicographic,
* ``alt``  -- entries (i, j) with i < j, lexicographic,
* ``rect`` -- all entries, row-major,

so two spaces are equal iff their bases are identical arrays.  A ``sym``
space over a field of characteristic 2 may contain alternating matrices; the
kind records the ambient space, not the finer class of the members.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from typing import Optional

import numpy as np

from . import matrix as mx
from .errors import BudgetExceeded, FormatError, KindMismatch, NoAdaptedHyperplane
from .field import DTYPE, Field, field_make

KINDS = ("sym", "alt", "rect")
DEFAULT_URK_BUDGET = 10 ** 7
_CHUNK = 1 << 15


@lru_cache(maxsize=None)
def _coord_positions(kind: str, n: int, p: int):
    if kind == "sym":
        ri, ci = np.triu_indices(n)
    elif kind == "alt":
        ri, ci = np.triu_indices(n, 1)
    elif kind == "rect":
        ri, ci = np.divmod(np.arange(n * p), p)
    else:
        raise KindMismatch(f"unknown kind {kind!r}")
    ri.setflags(write=False)
    ci.setflags(write=False)
    return ri, ci


def ambient_dim(kind: str, n: int, p: int | None = None) -> int:
    return len(_coord_positions(kind, n, n if p is None else p)[0])


def to_coords(kind: str, M) -> np.ndarray:
    M = np.asarray(M, dtype=DTYPE)
    n, p = M.shape[-2:]
    ri, ci = _coord_positions(kind, n, p)
    return M[..., ri, ci]


def from_coords(F: Field, kind: str, v, n: int, p: int | None = None) -> np.ndarray:
    v = np.asarray(v, dtype=DTYPE)
    p = n if p is None else p
    ri, ci = _coord_positions(kind, n, p)
    M = np.zeros(v.shape[:-1] + (n, p), dtype=DTYPE)
    M[..., ri, ci] = v
    if kind == "sym":
        M[..., ci, ri] = v
    elif kind == "alt":
        M[..., ci, ri] = F.neg(v)
    return M


def _check_kind(F: Field, kind: str, M, n: int, p: int) -> None:
    M = np.asarray(M)
    if M.shape != (n, p):
        raise KindMismatch(f"generator of shape {M.shape}, expected {(n, p)}")
    if np.any((M < 0) | (M >= F.q)):
        raise KindMismatch("generator has entries outside the field")
    if kind == "sym" and not mx.is_symmetric(M):
        raise KindMismatch("generator is not symmetric")
    if kind == "alt" and not mx.is_alternating(F, M):
        raise KindMismatch("generator is not alternating")


@dataclass(frozen=True, eq=False)
class MatSpace:
    """A linear subspace of Mats_n, Mata_n or Mat_{n,p} with canonical basis."""

    field: Field
    kind: str
    n: int
    p: int
    basis: np.ndarray  # shape (dim, n, p)

    @property
    def dim(self) -> int:
        return int(self.basis.shape[0])

    @property
    def q(self) -> int:
        return self.field.q

    def coords(self) -> np.ndarray:
        """Basis as a (dim, ambient) coordinate matrix in reduced echelon form."""
        return to_coords(self.kind, self.basis)

    def combine(self, coeffs) -> np.ndarray:
        """Members sum_i c_i B_i for coefficient rows c (shape (..., dim))."""
        coeffs = np.asarray(coeffs, dtype=DTYPE)
        if self.dim == 0:
            return np.zeros(coeffs.shape[:-1] + (self.n, self.p), dtype=DTYPE)
        v = self.field.matmul(coeffs, self.coords())
        return from_coords(self.field, self.kind, v, self.n, self.p)

    def random_member(self, rng: np.random.Generator, size=None) -> np.ndarray:
        shape = (self.dim,) if size is None else (size, self.dim)
        return self.combine(self.field.random(rng, shape))

    def contains(self, M) -> bool:
        v = to_coords(self.kind, M)
        if self.dim == 0:
            return not v.any()
        return mx.rank(self.field, np.vstack([self.coords(), v[None, :]])) == self.dim

    def contains_space(self, other: "MatSpace") -> bool:
        if other.dim == 0:
            return True
        stacked = np.vstack([self.coords(), to_coords(self.kind, other.basis)])
        return mx.rank(self.field, stacked) == self.dim

    def congruent(self, P) -> "MatSpace":
        """The space P S P^T."""
        if self.kind == "rect":
            raise KindMismatch("congruence needs a square kind")
        B = mx.congruence(self.field, P, self.basis) if self.dim else self.basis
        return space_make(self.field, self.kind, self.n, B, check=False)

    def as_kind(self, kind: str) -> "MatSpace":
        return space_make(self.field, kind, self.n, self.basis, p=self.p)

    def __eq__(self, other):
        return (isinstance(other, MatSpace) and self.field == other.field and self.kind == other.kind
                and self.n == other.n and self.p == other.p and np.array_equal(self.basis, other.basis))

    def __hash__(self):
        return hash((self.field.q, self.kind, self.n, self.p, self.basis.tobytes()))

    def __repr__(self):
        shape = f"{self.n}" if self.kind != "rect" else f"{self.n}x{self.p}"
        return f"MatSpace({self.field}, {self.kind}, {shape}, dim={self.dim})"


def space_make(F: Field, kind: str, n: int, generators=(), p: int | None = None,
               check: bool = True) -> MatSpace:
    """Span of ``generators`` with its canonical reduced basis."""
    if kind not in KINDS:
        raise KindMismatch(f"unknown kind {kind!r}")
    p = n if (p is None or kind != "rect") else p
    gens = np.asarray(generators, dtype=DTYPE).reshape(-1, n, p) if len(generators) else np.zeros((0, n, p), DTYPE)
    if check:
        for M in gens:
            _check_kind(F, kind, M, n, p)
    coords = to_coords(kind, gens)
    if len(coords):
        R, piv = mx.rref(F, coords)
        R = R[: len(piv)]
    else:
        R = coords
    basis = from_coords(F, kind, R, n, p)
    basis.setflags(write=False)
    return MatSpace(F, kind, n, p, basis)


def zero_space(F: Field, kind: str, n: int, p: int | None = None) -> MatSpace:
    return space_make(F, kind, n, [], p=p)


def full_space(F: Field, kind: str, n: int, p: int | None = None) -> MatSpace:
    N = ambient_dim(kind, n, p)
    return space_make(F, kind, n, from_coords(F, kind, np.eye(N, dtype=DTYPE), n, p), p=p, check=False)


# ---------------------------------------------------------------- upper-rank

@dataclass(frozen=True)
class UrkResult:
    value: int
    method: str  # "exact" or "sampled" (the latter is only a lower bound)
    witness: Optional[np.ndarray] = None
    members_checked: int = 0

    @property
    def exact(self) -> bool:
        return self.method == "exact"


def projective_coefficients(q: int, d: int, chunk: int = _CHUNK):
    """Yield chunks of coefficient vectors, one per line of F^d (first nonzero entry 1)."""
    for lead in range(d):
        tail = d - 1 - lead
        total = q ** tail
        for start in range(0, total, chunk):
            idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
            c = np.zeros((len(idx), d), dtype=DTYPE)
            c[:, lead] = 1
            for pos in range(d - 1, lead, -1):
                idx, c[:, pos] = np.divmod(idx, q)
            yield c


def urk(S: MatSpace, mode: str = "exact", budget: int = DEFAULT_URK_BUDGET,
        trials: int = 2000, seed: int = 0, stop_above: int | None = None) -> UrkResult:
    """Upper-rank of S (maximum rank of its members).

    ``mode="exact"`` enumerates one member per line of S, refusing when
    q**dim exceeds ``budget``.  ``mode="sampled"`` evaluates ``trials`` random
    members and returns a lower bound tagged ``sampled``.  With ``stop_above``
    the search returns as soon as a member of larger rank is seen.
    """
    F = S.field
    if S.dim == 0:
        return UrkResult(0, "exact" if mode == "exact" else "sampled", np.zeros((S.n, S.p), DTYPE), 0)
    best, wit, seen = -1, None, 0
    if mode == "exact":
        if F.q ** S.dim > budget:
            raise BudgetExceeded(f"exact upper-rank needs {F.q}^{S.dim} members, budget {budget}")
        chunks = projective_coefficients(F.q, S.dim)
        method = "exact"
    elif mode == "sampled":
        rng = np.random.default_rng(seed)
        chunks = (F.random(rng, (min(_CHUNK, trials - i), S.dim)) for i in range(0, trials, _CHUNK))
        method = "sampled"
    else:
        raise ValueError(f"unknown urk mode {mode!r}")
    cap = min(S.n, S.p)
    for c in chunks:
        Ms = S.combine(c)
        rk = mx.batch_rank(F, Ms)
        seen += len(c)
        i = int(np.argmax(rk))
        if rk[i] > best:
            best, wit = int(rk[i]), Ms[i]
        if best == cap or (stop_above is not None and best > stop_above):
            break
    return UrkResult(best, method, wit, seen)


# ---------------------------------------------------------------- hyperplanes

@dataclass(frozen=True)
class Hyperplane:
    """H = ker(phi) with phi normalised so that its first nonzero entry is 1."""

    phi: tuple

    @property
    def n(self) -> int:
        return len(self.phi)

    def vector(self) -> np.ndarray:
        return np.array(self.phi, dtype=DTYPE)

    def basis(self, F: Field) -> np.ndarray:
        return _hyperplane_basis(np.array(self.phi, dtype=DTYPE), F)

    @staticmethod
    def of(F: Field, phi) -> "Hyperplane":
        phi = np.asarray(phi, dtype=DTYPE) % F.q
        nz = np.flatnonzero(phi)
        if nz.size == 0:
            raise ValueError("zero functional does not define a hyperplane")
        return Hyperplane(tuple(int(x) for x in F.mul(phi, F.inv(phi[nz[0]]))))

    @staticmethod
    def coordinate(n: int, i: int) -> "Hyperplane":
        """The hyperplane x_i = 0 (1-based)."""
        phi = [0] * n
        phi[i - 1] = 1
        return Hyperplane(tuple(phi))


def _hyperplane_basis(phi: np.ndarray, F: Field) -> np.ndarray:
    n = len(phi)
    piv = int(np.flatnonzero(phi)[0])
    rows = []
    for j in range(n):
        if j == piv:
            continue
        v = np.zeros(n, dtype=DTYPE)
        v[j] = 1
        v[piv] = F.neg(phi[j])
        rows.append(v)
    return np.array(rows, dtype=DTYPE).reshape(n - 1, n)


@lru_cache(maxsize=None)
def hyperplane_table(q: int, n: int):
    """All normalised functionals in lexicographic order, with bases of their kernels."""
    F = field_make(q)
    total = q ** n
    digits = np.zeros((total, n), dtype=DTYPE)
    idx = np.arange(total, dtype=np.int64)
    for pos in range(n - 1, -1, -1):
        idx, digits[:, pos] = np.divmod(idx, q)
    first = np.where(digits.any(axis=1), (digits != 0).argmax(axis=1), -1)
    ok = first >= 0
    ok[ok] = digits[ok, first[ok]] == 1
    phis = digits[ok]
    bases = np.stack([_hyperplane_basis(phi, F) for phi in phis]) if len(phis) else np.zeros((0, n - 1, n), DTYPE)
    phis.setflags(write=False)
    bases.setflags(write=False)
    return phis, bases


def _pair_positions(kind: str, m: int):
    if kind == "alt":
        return np.triu_indices(m, 1)
    return np.triu_indices(m)


def _restriction_matrix(S: MatSpace, bases: np.ndarray) -> np.ndarray:
    """For each hyperplane basis, the (dim, #pairs) matrix of X_a^T B_i X_b."""
    F = S.field
    G = F.matmul(F.matmul(bases[:, None], S.basis[None]), np.swapaxes(bases, -1, -2)[:, None])
    ri, ci = _pair_positions(S.kind, bases.shape[1])
    return G[..., ri, ci]


def sh_dims(S: MatSpace, chunk: int = 1024):
    """dim S_H for every hyperplane, in lexicographic order of the functionals."""
    phis, bases = hyperplane_table(S.q, S.n)
    if S.dim == 0:
        return phis, np.zeros(len(phis), dtype=np.int64)
    out = np.empty(len(phis), dtype=np.int64)
    for a in range(0, len(phis), chunk):
        L = _restriction_matrix(S, bases[a:a + chunk])
        out[a:a + chunk] = S.dim - mx.batch_rank(S.field, L)
    return phis, out


def s_sub_h(S: MatSpace, H: Hyperplane) -> MatSpace:
    """{M in S : H is totally singular for M}."""
    F = S.field
    if S.kind == "rect":
        raise KindMismatch("S_H needs a square kind")
    if S.dim == 0:
        return S
    L = _restriction_matrix(S, H.basis(F)[None])[0]
    coeff = mx.left_nullspace(F, L)
    if len(coeff) == 0:
        return zero_space(F, S.kind, S.n)
    return space_make(F, S.kind, S.n, S.combine(coeff), check=False)


def _rank_one_member_mask(S: MatSpace, phis: np.ndarray) -> np.ndarray:
    """True where phi phi^T lies in S (the only possible rank-1 member of S_H)."""
    F = S.field
    R = F.mul(phis[:, :, None], phis[:, None, :])
    v = to_coords(S.kind, R)
    if S.dim == 0:
        return ~v.any(axis=1)
    stacked = np.concatenate([np.broadcast_to(S.coords(), (len(phis),) + S.coords().shape), v[:, None, :]], axis=1)
    return mx.batch_rank(F, stacked) == S.dim


def _quadratic_mask(S: MatSpace, phis: np.ndarray) -> np.ndarray:
    """Char 2: True where some member has a nonzero quadratic form on ker(phi).

    In characteristic 2, X^T M X = (sum_i sqrt(m_ii) x_i)^2, so the condition
    is that one of the square-rooted diagonals is not a multiple of phi.
    """
    F = S.field
    if F.p != 2:
        return np.ones(len(phis), dtype=bool)
    if S.dim == 0:
        return np.zeros(len(phis), dtype=bool)
    psi = F.sqrt(np.diagonal(S.basis, axis1=1, axis2=2))
    psi = psi[psi.any(axis=1)]
    if len(psi) == 0:
        return np.zeros(len(phis), dtype=bool)
    stacked = np.concatenate([phis[:, None, :], np.broadcast_to(psi, (len(phis),) + psi.shape)], axis=1)
    return mx.batch_rank(F, stacked) > 1


def is_adapted(S: MatSpace, H: Hyperplane, method: str = "membership", budget: int = 10 ** 6) -> bool:
    """Whether H is S-adapted.

    (a) S_H has no rank-1 member.  A rank-1 symmetric matrix with H totally
    singular is a multiple of phi phi^T, so ``method="membership"`` tests
    phi phi^T in S; ``method="enumerate"`` enumerates S_H instead.
    (b) in characteristic 2, some member has a nonzero quadratic form on H.
    """
    if S.kind != "sym":
        raise KindMismatch("S-adapted hyperplanes are defined for symmetric spaces")
    phi = H.vector()[None, :]
    if method == "membership":
        cond_a = not bool(_rank_one_member_mask(S, phi)[0])
    elif method == "enumerate":
        SH = s_sub_h(S, H)
        cond_a = True
        if SH.dim:
            if S.q ** SH.dim > budget:
                raise BudgetExceeded(f"S_H has {S.q}^{SH.dim} members, budget {budget}")
            for c in projective_coefficients(S.q, SH.dim):
                if np.any(mx.batch_rank(S.field, SH.combine(c)) == 1):
                    cond_a = False
                    break
    else:
        raise ValueError(f"unknown method {method!r}")
    return cond_a and bool(_quadratic_mask(S, phi)[0])


def adapted_mask(S: MatSpace) -> np.ndarray:
    phis, _ = hyperplane_table(S.q, S.n)
    return ~_rank_one_member_mask(S, phis) & _quadratic_mask(S, phis)


@dataclass
class HyperplaneAnalysis:
    hyperplane: Hyperplane
    s_h: MatSpace
    m: int
    adapted: bool
    t_h: Optional[np.ndarray] = None
    scanned: int = 0


def min_dim_sh(S: MatSpace, adapted: bool = False) -> HyperplaneAnalysis:
    """A hyperplane minimising dim S_H (lexicographically first among ties).

    With ``adapted=True`` only S-adapted hyperplanes compete; raises
    NoAdaptedHyperplane if there are none.
    """
    phis, dims = sh_dims(S)
    if adapted:
        mask = adapted_mask(S)
        if not mask.any():
            raise NoAdaptedHyperplane("no S-adapted hyperplane")
        cand = np.flatnonzero(mask)
        i = int(cand[np.argmin(dims[cand])])
    else:
        i = int(np.argmin(dims))
    H = Hyperplane(tuple(int(x) for x in phis[i]))
    is_ad = adapted or (S.kind == "sym" and is_adapted(S, H))
    return HyperplaneAnalysis(H, s_sub_h(S, H), int(dims[i]), is_ad, None, len(phis))


# ---------------------------------------------------------------- compressions and solves

def compress_p(S: MatSpace) -> MatSpace:
    """Image of S under deletion of the last row and column."""
    n = S.n
    return space_make(S.field, S.kind, n - 1, S.basis[:, : n - 1, : n - 1], check=False)


def compress_k(S: MatSpace, i: int, j: int) -> MatSpace:
    """Image of S under deletion of rows and columns i and j (1-based)."""
    if i == j:
        raise ValueError("compress_k needs two distinct indices")
    B = np.stack([mx.delete_rows_cols(M, {i, j}) for M in S.basis]) if S.dim else np.zeros((0, S.n - 2, S.n - 2), DTYPE)
    return space_make(S.field, S.kind, S.n - 2, B, check=False)


def right_annihilators(T: MatSpace) -> np.ndarray:
    """Reduced basis of {X : N X = 0 for every N in T}."""
    if T.dim == 0:
        return np.eye(T.p, dtype=DTYPE)
    return mx.nullspace(T.field, T.basis.reshape(-1, T.p))


def common_right_annihilator(T: MatSpace) -> Optional[np.ndarray]:
    """First vector of the reduced kernel basis of the stacked basis matrices, or None."""
    K = right_annihilators(T)
    return K[0] if len(K) else None


def solve_local_map(V, C_on_basis, F: Field | None = None) -> Optional[np.ndarray]:
    """Y with N_i Y = C_i for every basis matrix N_i of V, or None if inconsistent.

    V may also be a plain stack of matrices (then pass the field), which is
    how the lifting code hands over possibly dependent blocks.
    """
    if isinstance(V, MatSpace):
        F, stack = V.field, V.basis
    else:
        stack = np.asarray(V, dtype=DTYPE)
    k, m, p = stack.shape
    if k == 0:
        return np.zeros(p, dtype=DTYPE)
    C = np.asarray(C_on_basis, dtype=DTYPE).reshape(k, m)
    return mx.solve(F, stack.reshape(-1, p), C.reshape(-1))


# ---------------------------------------------------------------- file formats

def _matrix_rows(M) -> list[str]:
    return [" ".join(str(int(x)) for x in row) for row in M]


def dumps_space(S: MatSpace) -> str:
    size = f"size {S.n}" if S.kind != "rect" else f"size {S.n} {S.p}"
    head = ["%matspace v1", f"field {S.q}", f"kind {S.kind}", size, f"dim {S.dim}"]
    blocks = ["\n".join(_matrix_rows(M)) for M in S.basis]
    return "\n".join(head) + "\n" + "\n\n".join(blocks) + ("\n" if blocks else "")


def _parse_header(lines: list[str]):
    if not lines or lines[0].strip() != "%matspace v1":
        raise FormatError("missing '%matspace v1' header")
    try:
        q = int(lines[1].split()[1]) if lines[1].split()[0] == "field" else None
        kind = lines[2].split()[1] if lines[2].split()[0] == "kind" else None
        size = lines[3].split()
        dim = lines[4].split()
    except (IndexError, ValueError) as e:
        raise FormatError(f"malformed header: {e}") from None
    if q is None or kind is None or size[0] != "size" or dim[0] != "dim":
        raise FormatError("header lines must be field, kind, size, dim")
    n = int(size[1])
    p = int(size[2]) if len(size) > 2 else n
    return q, kind, n, p, int(dim[1])


def _read_blocks(rows: list[str], count: int, n: int, p: int) -> np.ndarray:
    if count == 0:
        return np.zeros((0, n, p), dtype=DTYPE)
    data = [r.split() for r in rows if r.strip()]
    if len(data) < count * n:
        raise FormatError(f"expected {count * n} matrix rows, found {len(data)}")
    try:
        arr = np.array([[int(x) for x in r] for r in data[: count * n]], dtype=DTYPE)
    except ValueError as e:
        raise FormatError(str(e)) from None
    if arr.shape[1:] != (p,):
        raise FormatError(f"matrix rows must have {p} entries")
    return arr.reshape(count, n, p)


def loads_space(text: str) -> MatSpace:
    lines = text.splitlines()
    q, kind, n, p, d = _parse_header(lines)
    F = field_make(q)
    B = _read_blocks(lines[5:], d, n, p)
    S = space_make(F, kind, n, B, p=p)
    if S.dim != d:
        raise FormatError(f"declared dim {d} but the matrices span dimension {S.dim}")
    return S


def space_to_json(S: MatSpace) -> dict:
    return {"format": "matspace v1", "field": S.q, "kind": S.kind,
            "size": [S.n] if S.kind != "rect" else [S.n, S.p], "dim": S.dim,
            "basis": S.basis.tolist()}


def space_from_json(obj) -> MatSpace:
    if isinstance(obj, str):
        obj = json.loads(obj)
    size = obj["size"]
    n = size[0]
    p = size[1] if len(size) > 1 else n
    F = field_make(int(obj["field"]))
    B = np.asarray(obj["basis"], dtype=DTYPE).reshape(-1, n, p)
    return space_make(F, obj["kind"], n, B, p=p)


def read_space(path) -> MatSpace:
    with open(path) as fh:
        text = fh.read()
    if text.lstrip().startswith("{"):
        return space_from_json(json.loads(text))
    return loads_space(text)


def write_space(S: MatSpace, path) -> None:
    with open(path, "w") as fh:
        if str(path).endswith(".json"):
            json.dump(space_to_json(S), fh)
            fh.write("\n")
        else:
            fh.write(dumps_space(S))
