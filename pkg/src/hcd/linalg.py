"""Exact linear algebra over the rationals.

Small dense routines (rank, inverse, solve) plus ``Subspace``: an echelon
basis of sparse vectors keyed by arbitrary sortable keys, used to reduce
modulo images of linear maps (quotients by Im d and similar).
"""
from __future__ import annotations

from fractions import Fraction
from typing import Hashable, Iterable, Mapping


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def row_reduce(rows: list[list]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form; returns (rows, pivot columns)."""
    A = [[_frac(x) for x in r] for r in rows]
    if not A:
        return A, []
    ncols = len(A[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(A)) if A[i][c] != 0), None)
        if pr is None:
            continue
        A[r], A[pr] = A[pr], A[r]
        inv = 1 / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == len(A):
            break
    return A, pivots


def rank(rows: list[list]) -> int:
    return len(row_reduce(rows)[1])


def inverse(M: list[list]) -> list[list[Fraction]]:
    n = len(M)
    if any(len(r) != n for r in M):
        raise ValueError("matrix is not square")
    aug = [list(map(_frac, r)) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(M)]
    R, piv = row_reduce(aug)
    if piv[:n] != list(range(n)):
        raise ValueError("matrix is singular")
    return [r[n:] for r in R[:n]]


def solve(A: list[list], b: list) -> list[Fraction] | None:
    """One solution of A x = b, or None if inconsistent."""
    if not A:
        return [] if all(x == 0 for x in b) else None
    ncols = len(A[0])
    aug = [list(r) + [bi] for r, bi in zip(A, b)]
    R, piv = row_reduce(aug)
    if ncols in piv:
        return None
    x = [Fraction(0)] * ncols
    for row, c in zip(R, piv):
        x[c] = row[ncols]
    return x


class Subspace:
    """Echelon basis of a subspace of the free vector space on sortable keys.

    Vectors are ``dict key -> rational``.  The pivot of a vector is its
    largest key; each basis vector is normalized to pivot coefficient 1 and
    no basis vector contains another's pivot, so ``reduce`` gives a
    canonical representative of a coset.
    """

    def __init__(self, vectors: Iterable[Mapping] = (), key=None):
        self.key = key or (lambda k: k)
        self.basis: dict[Hashable, dict] = {}
        for v in vectors:
            self.add(v)

    def __len__(self):
        return len(self.basis)

    def _pivot(self, v: Mapping):
        return max(v, key=self.key)

    def reduce(self, v: Mapping) -> dict:
        v = {k: _frac(c) for k, c in v.items() if c}
        # eliminate pivots from the largest down; a reduction step never
        # introduces keys larger than the pivot it removes
        while True:
            hits = [k for k in v if k in self.basis]
            if not hits:
                return v
            k = max(hits, key=self.key)
            c = v[k]
            for kk, cc in self.basis[k].items():
                nv = v.get(kk, 0) - c * cc
                if nv:
                    v[kk] = nv
                else:
                    v.pop(kk, None)

    def add(self, v: Mapping) -> bool:
        """Insert a vector; returns False if it was already in the span."""
        r = self.reduce(v)
        if not r:
            return False
        p = self._pivot(r)
        inv = 1 / r[p]
        r = {k: c * inv for k, c in r.items()}
        # keep the basis fully reduced
        for q, b in self.basis.items():
            if p in b:
                c = b[p]
                for kk, cc in r.items():
                    nv = b.get(kk, 0) - c * cc
                    if nv:
                        b[kk] = nv
                    else:
                        b.pop(kk, None)
        self.basis[p] = r
        return True

    def contains(self, v: Mapping) -> bool:
        return not self.reduce(v)
