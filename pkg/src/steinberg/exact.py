"""Exact linear algebra kernels: fraction-free rank, Smith normal form, mod-p elimination.

Everything here is exact: python ints (arbitrary precision), fractions.Fraction,
or numpy int64 arrays holding residues mod a small prime.  No floating point.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np


def rank_int(rows) -> int:
    """Rank over the rationals of an integer matrix, by fraction-free (Bareiss)
    elimination.  Rows may be any iterable of iterables of ints."""
    a = [list(map(int, r)) for r in rows]
    if not a or not a[0]:
        return 0
    nr, nc = len(a), len(a[0])
    r = 0
    prev = 1
    while r < min(nr, nc):
        # smallest nonzero pivot keeps the minors from exploding
        piv = None
        for i in range(r, nr):
            for j in range(r, nc):
                v = a[i][j]
                if v and (piv is None or abs(v) < piv[0]):
                    piv = (abs(v), i, j)
        if piv is None:
            break
        _, pi, pj = piv
        a[r], a[pi] = a[pi], a[r]
        if pj != r:
            for row in a:
                row[r], row[pj] = row[pj], row[r]
        p = a[r][r]
        ar = a[r]
        for i in range(r + 1, nr):
            ai = a[i]
            air = ai[r]
            for j in range(r + 1, nc):
                ai[j] = (ai[j] * p - air * ar[j]) // prev
            ai[r] = 0
        prev = p
        r += 1
    return r


def rank_rational(rows) -> int:
    """Rank of a matrix with int or Fraction entries: clear denominators per row,
    then Bareiss."""
    cleared = []
    for row in rows:
        row = [Fraction(x) for x in row]
        den = 1
        for x in row:
            den = den * x.denominator // _gcd(den, x.denominator)
        cleared.append([int(x * den) for x in row])
    return rank_int(cleared)


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def kernel_dimensions_match(a_rows, b_rows) -> bool:
    """True iff the two matrices (same number of rows) have the same row-kernel,
    i.e. the same linear relations among corresponding rows.

    ker(A) = ker([A|B]) = ker(B) as subspaces of coefficient space iff the three
    ranks agree.
    """
    assert len(a_rows) == len(b_rows)
    ra = rank_int(a_rows)
    rb = rank_int(b_rows)
    stacked = [list(x) + list(y) for x, y in zip(a_rows, b_rows)]
    return ra == rb == rank_int(stacked)


# ---------------------------------------------------------------------------
# mod-p elimination (numpy, vectorized row operations)

def rref_mod(a: np.ndarray, p: int):
    """Reduced row echelon form mod p.  Returns (rref, rank, pivot columns).
    Input is not modified."""
    a = np.array(a, dtype=np.int64) % p
    nr, nc = a.shape
    pivots = []
    r = 0
    for c in range(nc):
        if r >= nr:
            break
        col = a[r:, c]
        nz = np.nonzero(col)[0]
        if len(nz) == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
        inv = pow(int(a[r, c]), -1, p)
        a[r] = (a[r] * inv) % p
        rows = np.nonzero(a[:, c])[0]
        rows = rows[rows != r]
        if len(rows):
            a[rows] = (a[rows] - np.outer(a[rows, c], a[r])) % p
        pivots.append(c)
        r += 1
    return a, r, pivots


def rank_mod(a: np.ndarray, p: int) -> int:
    if a.size == 0:
        return 0
    return rref_mod(a, p)[1]


def nullspace_mod(a: np.ndarray, p: int) -> np.ndarray:
    """Basis (rows) of the right null space {x : a @ x = 0 mod p}."""
    a = np.asarray(a, dtype=np.int64)
    nr, nc = a.shape
    if nc == 0:
        return np.zeros((0, 0), dtype=np.int64)
    red, rank, pivots = rref_mod(a, p)
    free = [c for c in range(nc) if c not in pivots]
    basis = np.zeros((len(free), nc), dtype=np.int64)
    for k, fc in enumerate(free):
        basis[k, fc] = 1
        for r, pc in enumerate(pivots):
            basis[k, pc] = (-int(red[r, fc])) % p
    return basis


# ---------------------------------------------------------------------------
# Smith normal form over the integers

def smith_invariant_factors(rows) -> list[int]:
    """Invariant factors (positive, each dividing the next) of an integer matrix.

    Classic pivot-and-reduce with smallest-pivot selection; exact big-int
    arithmetic throughout.
    """
    a = [list(map(int, r)) for r in rows]
    if not a or not a[0]:
        return []
    nr, nc = len(a), len(a[0])
    t = 0
    diag = []
    while t < min(nr, nc):
        piv = None
        for i in range(t, nr):
            for j in range(t, nc):
                v = a[i][j]
                if v and (piv is None or abs(v) < piv[0]):
                    piv = (abs(v), i, j)
        if piv is None:
            break
        _, pi, pj = piv
        a[t], a[pi] = a[pi], a[t]
        if pj != t:
            for row in a:
                row[t], row[pj] = row[pj], row[t]
        while True:
            if a[t][t] < 0:
                a[t] = [-x for x in a[t]]
            p = a[t][t]
            done = True
            for i in range(t + 1, nr):
                q = a[i][t] // p
                if a[i][t] % p:
                    done = False
                if q or a[i][t] % p:
                    ai, at = a[i], a[t]
                    for j in range(t, nc):
                        ai[j] -= q * at[j]
            for i in range(t + 1, nr):
                if a[i][t]:
                    # remainder became the smaller entry: swap it up and repeat
                    a[t], a[i] = a[i], a[t]
                    done = False
                    break
            if not done:
                continue
            for j in range(t + 1, nc):
                q = a[t][j] // p
                rem = a[t][j] % p
                if q or rem:
                    for row in a:
                        row[j] -= q * row[t]
                if rem:
                    done = False
            if done:
                break
            # a remainder appeared in the pivot row: swap that column in
            for j in range(t + 1, nc):
                if a[t][j]:
                    for row in a:
                        row[t], row[j] = row[j], row[t]
                    break
        diag.append(abs(a[t][t]))
        t += 1
    # enforce the divisibility chain d1 | d2 | ...
    for i in range(len(diag)):
        for j in range(i + 1, len(diag)):
            if diag[j] % diag[i]:
                g = _gcd(diag[i], diag[j])
                diag[j] = diag[i] * diag[j] // g
                diag[i] = g
    return sorted(diag)


# ---------------------------------------------------------------------------
# Rational linear solver with a reusable factorization

class ExactSolver:
    """Solve a @ x = rhs exactly over the rationals for a fixed matrix `a`
    (list of rows, int or Fraction entries) and many right-hand sides.

    Factorizes once: row-reduces [a | I] so each solve is a sparse
    matrix-vector product.  Raises if the system is inconsistent; when the
    columns of `a` are independent the solution is unique.
    """

    def __init__(self, rows):
        nr = len(rows)
        nc = len(rows[0]) if nr else 0
        aug = [[Fraction(x) for x in row] + [Fraction(i == j) for j in range(nr)]
               for i, row in enumerate(rows)]
        pivots = []
        r = 0
        for c in range(nc):
            if r >= nr:
                break
            i = next((i for i in range(r, nr) if aug[i][c]), None)
            if i is None:
                continue
            aug[r], aug[i] = aug[i], aug[r]
            pv = aug[r][c]
            aug[r] = [x / pv for x in aug[r]]
            for i in range(nr):
                if i != r and aug[i][c]:
                    f = aug[i][c]
                    aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
            pivots.append(c)
            r += 1
        self.n_rows = nr
        self.n_cols = nc
        self.pivots = pivots
        self.rank = r
        self.reducer = [row[nc:] for row in aug]  # R with R @ a in rref

    @property
    def columns_independent(self) -> bool:
        return self.rank == self.n_cols

    def solve(self, rhs_sparse: dict[int, Fraction]) -> list[Fraction]:
        """rhs given sparsely as {row index: value}; returns x with a @ x = rhs."""
        red = [Fraction(0)] * self.n_rows
        for i, v in rhs_sparse.items():
            if not v:
                continue
            for r in range(self.n_rows):
                rv = self.reducer[r][i]
                if rv:
                    red[r] += rv * v
        x = [Fraction(0)] * self.n_cols
        for r, c in enumerate(self.pivots):
            x[c] = red[r]
        for r in range(self.rank, self.n_rows):
            if red[r]:
                raise ValueError("inconsistent linear system")
        return x
