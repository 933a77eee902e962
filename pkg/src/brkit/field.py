"""Exact arithmetic over the small finite fields GF(2), GF(3), GF(4), GF(5), GF(7).

Elements are plain integers in ``[0, q-1]``.  For GF(4) the encoding is
``0 -> 0, 1 -> 1, 2 -> w, 3 -> w + 1`` with ``w**2 = w + 1``, so bit 0 holds
the constant coefficient and bit 1 the coefficient of ``w``; addition is XOR.

Every operation is vectorised: it accepts Python ints or integer numpy arrays
and broadcasts like the corresponding numpy ufunc.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import DivisionByZero, UnsupportedCardinality

DTYPE = np.int64

SUPPORTED = (2, 3, 4, 5, 7)


def _gf4_mul(a: int, b: int) -> int:
    # polynomial product of a0 + a1 w and b0 + b1 w, reduced with w^2 = w + 1
    a0, a1 = a & 1, a >> 1
    b0, b1 = b & 1, b >> 1
    c0 = (a0 & b0) ^ (a1 & b1)
    c1 = (a0 & b1) ^ (a1 & b0) ^ (a1 & b1)
    return c0 | (c1 << 1)


class Field:
    """Arithmetic context for GF(q).

    Parameters
    ----------
    q : int
        Field cardinality, one of 2, 3, 4, 5, 7.

    Attributes
    ----------
    q, p, k : int
        Cardinality, characteristic and extension degree (``q = p**k``).
    add_table, mul_table, neg_table, inv_table : ndarray
        Lookup tables.  ``inv_table[0]`` is a 0 placeholder; :meth:`inv`
        refuses zero.
    """

    def __init__(self, q: int):
        if q not in SUPPORTED:
            raise UnsupportedCardinality(f"unsupported field size q={q}; expected one of {SUPPORTED}")
        self.q = q
        self.p = 2 if q == 4 else q
        self.k = 2 if q == 4 else 1
        self.prime = self.k == 1
        els = range(q)
        if self.prime:
            add = [[(a + b) % q for b in els] for a in els]
            mul = [[(a * b) % q for b in els] for a in els]
        else:
            add = [[a ^ b for b in els] for a in els]
            mul = [[_gf4_mul(a, b) for b in els] for a in els]
        self.add_table = np.array(add, dtype=DTYPE)
        self.mul_table = np.array(mul, dtype=DTYPE)
        self.neg_table = np.array([int(np.flatnonzero(self.add_table[a] == 0)[0]) for a in els], dtype=DTYPE)
        inv = [0] * q
        for a in range(1, q):
            inv[a] = int(np.flatnonzero(self.mul_table[a] == 1)[0])
        self.inv_table = np.array(inv, dtype=DTYPE)
        if self.p == 2:
            sq = self.mul_table[np.arange(q), np.arange(q)]
            root = np.zeros(q, dtype=DTYPE)
            root[sq] = np.arange(q)
            self.sqrt_table = root
        else:
            self.sqrt_table = None
        for t in (self.add_table, self.mul_table, self.neg_table, self.inv_table):
            t.setflags(write=False)

    def __repr__(self):
        return f"GF({self.q})"

    def __eq__(self, other):
        return isinstance(other, Field) and other.q == self.q

    def __hash__(self):
        return hash(("GF", self.q))

    # elementwise operations

    def add(self, a, b):
        if self.prime:
            return (np.asarray(a, dtype=DTYPE) + b) % self.p
        return np.bitwise_xor(np.asarray(a, dtype=DTYPE), b)

    def sub(self, a, b):
        if self.prime:
            return (np.asarray(a, dtype=DTYPE) - b) % self.p
        return np.bitwise_xor(np.asarray(a, dtype=DTYPE), b)

    def neg(self, a):
        if self.prime:
            return (-np.asarray(a, dtype=DTYPE)) % self.p
        return np.asarray(a, dtype=DTYPE)

    def mul(self, a, b):
        if self.prime:
            return (np.asarray(a, dtype=DTYPE) * b) % self.p
        return self.mul_table[a, b]

    def inv(self, a):
        a = np.asarray(a, dtype=DTYPE)
        if np.any(a == 0):
            raise DivisionByZero("inverse of zero")
        return self.inv_table[a]

    def sqrt(self, a):
        """Frobenius square root (characteristic 2 only)."""
        if self.sqrt_table is None:
            raise ValueError(f"square roots are only provided in characteristic 2, not for {self}")
        return self.sqrt_table[np.asarray(a, dtype=DTYPE)]

    # linear algebra kernels

    def matmul(self, A, B):
        """Matrix product over the field, broadcasting over leading axes."""
        A = np.asarray(A, dtype=DTYPE)
        B = np.asarray(B, dtype=DTYPE)
        if self.prime:
            return np.matmul(A, B) % self.p
        # split into bit planes: X = X0 + w X1, then multiply out with w^2 = w + 1
        a0, a1 = A & 1, A >> 1
        b0, b1 = B & 1, B >> 1
        p00 = np.matmul(a0, b0)
        p11 = np.matmul(a1, b1)
        p01 = np.matmul(a0, b1) + np.matmul(a1, b0)
        c0 = (p00 + p11) & 1
        c1 = (p01 + p11) & 1
        return c0 | (c1 << 1)

    def elements(self):
        return np.arange(self.q, dtype=DTYPE)

    def random(self, rng: np.random.Generator, shape):
        return rng.integers(0, self.q, size=shape, dtype=DTYPE)


@lru_cache(maxsize=None)
def field_make(q: int) -> Field:
    """Return the (cached) field of cardinality ``q``."""
    return Field(q)


def arith(F: Field, op: str, a, b=None):
    """Single entry point for scalar arithmetic: ``op`` is add, sub, mul, neg or inv."""
    if op == "add":
        r = F.add(a, b)
    elif op == "sub":
        r = F.sub(a, b)
    elif op == "mul":
        r = F.mul(a, b)
    elif op == "neg":
        r = F.neg(a)
    elif op == "inv":
        r = F.inv(a)
    else:
        raise ValueError(f"unknown operation {op!r}")
    return int(r) if np.ndim(r) == 0 else r
