"""Dense exact matrices over a :class:`~brkit.field.Field`.

Matrices are integer numpy arrays whose entries are field elements; the field
is passed explicitly.  Indices in the public helpers that mirror the
mathematical notation (``delete_rows_cols``, ``elementary``) are 1-based,
everything else is ordinary 0-based numpy indexing.
"""
from __future__ import annotations

import numpy as np

from .errors import IndexOutOfRange, SingularBlock
from .field import DTYPE, Field

SYMMETRIC_NONALTERNATING = "symmetric_nonalternating"
ALTERNATING = "alternating"
GENERAL = "general"


def as_mat(M) -> np.ndarray:
    return np.array(M, dtype=DTYPE, copy=True)


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=DTYPE)


def elementary(n: int, i: int, j: int, p: int | None = None) -> np.ndarray:
    """E_{i,j} (1-based) of shape n x p."""
    E = np.zeros((n, n if p is None else p), dtype=DTYPE)
    E[i - 1, j - 1] = 1
    return E


def rref(F: Field, M) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns.  Pivots are normalised to 1."""
    R = as_mat(M)
    if R.ndim != 2:
        raise ValueError("rref expects a 2-d array")
    rows, cols = R.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(R[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            R[[r, piv]] = R[[piv, r]]
        R[r] = F.mul(R[r], F.inv(R[r, c]))
        f = R[:, c].copy()
        f[r] = 0
        if f.any():
            R = F.sub(R, F.mul(f[:, None], R[r][None, :]))
        pivots.append(c)
        r += 1
    return R, pivots


def rank(F: Field, M) -> int:
    M = np.asarray(M, dtype=DTYPE)
    if M.size == 0:
        return 0
    return len(rref(F, M)[1])


def batch_rank(F: Field, Ms) -> np.ndarray:
    """Ranks of a stack of matrices with shape (..., m, k)."""
    Ms = np.asarray(Ms, dtype=DTYPE)
    lead = Ms.shape[:-2]
    m, k = Ms.shape[-2:]
    X = Ms.reshape((-1, m, k)).copy()
    B = X.shape[0]
    out = np.zeros(B, dtype=np.int64)
    if B == 0 or m == 0 or k == 0:
        return out.reshape(lead)
    used = np.zeros((B, m), dtype=bool)
    idx = np.arange(B)
    for c in range(k):
        col = X[:, :, c]
        cand = (col != 0) & ~used
        has = cand.any(axis=1)
        if not has.any():
            continue
        piv = cand.argmax(axis=1)
        pval = col[idx, piv]
        pval = np.where(has, pval, 1)
        prow = F.mul(X[idx, piv], F.inv(pval)[:, None])
        factor = np.where(has[:, None], col, 0)
        factor[idx, piv] = 0
        X = F.sub(X, F.mul(factor[:, :, None], prow[:, None, :]))
        used[idx[has], piv[has]] = True
        out += has
    return out.reshape(lead)


def nullspace(F: Field, M) -> np.ndarray:
    """Basis of the right kernel {x : M x = 0}, one vector per free column.

    The vectors come out of the reduced echelon form in the usual way (free
    variable set to 1, other free variables 0), so the basis is deterministic.
    """
    M = np.asarray(M, dtype=DTYPE)
    cols = M.shape[1]
    if M.shape[0] == 0:
        return np.eye(cols, dtype=DTYPE)
    R, piv = rref(F, M)
    free = [c for c in range(cols) if c not in piv]
    basis = np.zeros((len(free), cols), dtype=DTYPE)
    for t, fcol in enumerate(free):
        basis[t, fcol] = 1
        for i, pc in enumerate(piv):
            basis[t, pc] = F.neg(R[i, fcol])
    return basis


def left_nullspace(F: Field, M) -> np.ndarray:
    """Basis of {y : y^T M = 0}."""
    return nullspace(F, np.asarray(M, dtype=DTYPE).T)


def solve(F: Field, A, b) -> np.ndarray | None:
    """A particular solution of A x = b (free variables set to 0), or None."""
    A = np.asarray(A, dtype=DTYPE)
    b = np.asarray(b, dtype=DTYPE)
    vec = b.ndim == 1
    if vec:
        b = b[:, None]
    n = A.shape[1]
    if A.shape[0] == 0:
        x = np.zeros((n, b.shape[1]), dtype=DTYPE)
        return x[:, 0] if vec else x
    R, piv = rref(F, np.hstack([A, b]))
    if any(p >= n for p in piv):
        return None
    x = np.zeros((n, b.shape[1]), dtype=DTYPE)
    for i, pc in enumerate(piv):
        x[pc] = R[i, n:]
    return x[:, 0] if vec else x


def inverse(F: Field, M) -> np.ndarray:
    M = np.asarray(M, dtype=DTYPE)
    n = M.shape[0]
    if M.shape != (n, n):
        raise SingularBlock("inverse of a non-square matrix")
    R, piv = rref(F, np.hstack([M, identity(n)]))
    if piv[:n] != list(range(n)):
        raise SingularBlock("matrix is not invertible")
    return R[:, n:]


def is_invertible(F: Field, M) -> bool:
    M = np.asarray(M, dtype=DTYPE)
    return M.ndim == 2 and M.shape[0] == M.shape[1] and rank(F, M) == M.shape[0]


def row_basis(F: Field, rows) -> np.ndarray:
    """Reduced basis of the row space."""
    rows = np.asarray(rows, dtype=DTYPE)
    if rows.size == 0:
        return rows.reshape(0, rows.shape[-1] if rows.ndim == 2 else 0)
    R, piv = rref(F, rows)
    return R[: len(piv)]


def complete_basis(F: Field, rows, n: int, pool=None) -> np.ndarray:
    """Vectors extending the independent ``rows`` to a basis of F^n.

    Candidates are drawn from ``pool`` first (in order), then from the unit
    vectors e_1, ..., e_n.  Only the added vectors are returned.
    """
    rows = np.asarray(rows, dtype=DTYPE).reshape(-1, n)
    cands = [] if pool is None else list(np.asarray(pool, dtype=DTYPE).reshape(-1, n))
    cands += list(identity(n))
    cur = rows.copy()
    r = rank(F, cur) if len(cur) else 0
    added = []
    for v in cands:
        if r == n:
            break
        trial = np.vstack([cur, v[None, :]])
        rt = rank(F, trial)
        if rt > r:
            cur, r = trial, rt
            added.append(v)
    return np.array(added, dtype=DTYPE).reshape(-1, n)


def random_invertible(F: Field, n: int, rng: np.random.Generator) -> np.ndarray:
    while True:
        P = F.random(rng, (n, n))
        if rank(F, P) == n:
            return P


def block(A, C, B, D) -> np.ndarray:
    """Assemble [[A, C], [B, D]]."""
    return np.block([[np.asarray(A, dtype=DTYPE), np.asarray(C, dtype=DTYPE)],
                     [np.asarray(B, dtype=DTYPE), np.asarray(D, dtype=DTYPE)]])


def schur_complement(F: Field, A, B, C, D) -> np.ndarray:
    """D - B A^{-1} C for the block matrix [[A, C], [B, D]] with A invertible.

    Its rank plus rank(A) equals the rank of the assembled block matrix.
    """
    A = np.asarray(A, dtype=DTYPE)
    B = np.asarray(B, dtype=DTYPE)
    C = np.asarray(C, dtype=DTYPE)
    D = np.asarray(D, dtype=DTYPE)
    r = A.shape[0]
    if A.shape != (r, r) or B.shape[1] != r or C.shape[0] != r or D.shape != (B.shape[0], C.shape[1]):
        raise ValueError("incompatible block shapes")
    Ainv = inverse(F, A)
    return F.sub(D, F.matmul(F.matmul(B, Ainv), C))


def congruence(F: Field, P, M, check: bool = True) -> np.ndarray:
    """P M P^T; M may be a stack of matrices."""
    P = np.asarray(P, dtype=DTYPE)
    if check and not is_invertible(F, P):
        raise SingularBlock("congruence by a singular matrix")
    return F.matmul(F.matmul(P, M), P.T)


def is_symmetric(M) -> bool:
    M = np.asarray(M)
    return M.shape[0] == M.shape[1] and np.array_equal(M, M.T)


def is_alternating(F: Field, M) -> bool:
    M = np.asarray(M, dtype=DTYPE)
    return (M.shape[0] == M.shape[1] and not np.diagonal(M).any()
            and np.array_equal(M.T, F.neg(M)))


def classify_form(F: Field, M) -> str:
    if is_alternating(F, M):
        return ALTERNATING
    if is_symmetric(M):
        return SYMMETRIC_NONALTERNATING
    return GENERAL


def delete_rows_cols(M, I) -> np.ndarray:
    """Delete the rows and columns with (1-based) indices in I."""
    M = np.asarray(M, dtype=DTYPE)
    n = M.shape[0]
    I = set(int(i) for i in I)
    if any(i < 1 or i > n for i in I):
        raise IndexOutOfRange(f"indices {sorted(I)} outside [1, {n}]")
    keep = [i for i in range(n) if i + 1 not in I]
    return M[np.ix_(keep, keep)]


def form_eval(F: Field, M, X, Y) -> int:
    """X^T M Y."""
    X = np.asarray(X, dtype=DTYPE)
    Y = np.asarray(Y, dtype=DTYPE)
    return int(F.matmul(X[None, :], F.matmul(M, Y[:, None]))[0, 0])
