"""Exact linear algebra over prime fields F_p.

Dense immutable matrices, canonical (reduced row echelon) subspaces, flags,
and enumeration of GL_n(F_p) with its distinguished subgroups: the Borel
subgroup of upper triangular matrices, permutation matrices, block unipotent
groups, parabolics, and block-diagonal embeddings.  Also the mod-p Stiefel
varieties V_d(F_p^n) of injective n x d matrices.

Matrices are dense numpy int64 arrays with entries reduced mod p; at the
scales this library targets (n <= 4) density costs nothing and hashing by the
raw byte string gives O(1) lookup in group structures.
"""

from __future__ import annotations

import itertools

import numpy as np

from .exact import rref_mod, rank_mod, nullspace_mod


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % d for d in range(2, int(p ** 0.5) + 1))


def check_prime(p: int) -> int:
    if not is_prime(p):
        raise ValueError(f"p = {p} is not prime")
    return p


class GFMatrix:
    """An immutable matrix over F_p, hashable by its entry bytes."""

    __slots__ = ("p", "a", "_hash")

    def __init__(self, a, p: int):
        arr = np.asarray(a, dtype=np.int64) % p
        arr.setflags(write=False)
        self.p = p
        self.a = arr
        self._hash = hash((p, arr.shape, arr.tobytes()))

    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @property
    def cols(self) -> int:
        return self.a.shape[1]

    def __mul__(self, other: "GFMatrix") -> "GFMatrix":
        if self.p != other.p:
            raise ValueError("mixed characteristics")
        return GFMatrix(self.a @ other.a, self.p)

    def __eq__(self, other) -> bool:
        return (isinstance(other, GFMatrix) and self.p == other.p
                and self.a.shape == other.a.shape
                and self.a.tobytes() == other.a.tobytes())

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"GFMatrix({self.a.tolist()}, p={self.p})"

    @property
    def T(self) -> "GFMatrix":
        return GFMatrix(self.a.T, self.p)

    def is_identity(self) -> bool:
        n = self.rows
        return self.cols == n and np.array_equal(self.a, np.eye(n, dtype=np.int64))

    def rank(self) -> int:
        return rank_mod(self.a, self.p)

    def is_invertible(self) -> bool:
        return self.rows == self.cols and self.rank() == self.rows

    def inv(self) -> "GFMatrix":
        n = self.rows
        if self.cols != n:
            raise ValueError("not square")
        aug = np.concatenate([self.a, np.eye(n, dtype=np.int64)], axis=1)
        red, rank, _ = rref_mod(aug, self.p)
        if rank < n:
            raise ValueError("singular matrix")
        return GFMatrix(red[:, n:], self.p)

    def det(self) -> int:
        n = self.rows
        a = np.array(self.a)
        p = self.p
        d = 1
        for c in range(n):
            nz = np.nonzero(a[c:, c])[0]
            if len(nz) == 0:
                return 0
            i = c + int(nz[0])
            if i != c:
                a[[c, i]] = a[[i, c]]
                d = -d
            d = d * int(a[c, c]) % p
            inv = pow(int(a[c, c]), -1, p)
            below = np.arange(c + 1, n)
            if len(below):
                f = (a[below, c] * inv) % p
                a[below] = (a[below] - np.outer(f, a[c])) % p
        return d % p


def identity(n: int, p: int) -> GFMatrix:
    return GFMatrix(np.eye(n, dtype=np.int64), p)


def permutation_matrix(perm, p: int) -> GFMatrix:
    """Matrix sending basis vector e_c to e_{perm[c]} (columns are permuted
    standard basis vectors)."""
    n = len(perm)
    m = np.zeros((n, n), dtype=np.int64)
    for c, r in enumerate(perm):
        m[r, c] = 1
    return GFMatrix(m, p)


def perm_sign(perm) -> int:
    sign = 1
    n = len(perm)
    for i in range(n):
        for j in range(i + 1, n):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


# ---------------------------------------------------------------------------
# Subspaces and flags

class Subspace:
    """A subspace of F_p^n in canonical form: the reduced row echelon basis.

    The zero subspace is the 0 x n matrix.  Canonicalization is injective, so
    equality and hashing work on the basis bytes.
    """

    __slots__ = ("p", "ambient_dim", "basis", "pivots", "_hash")

    def __init__(self, basis: GFMatrix, ambient_dim: int, pivots: tuple[int, ...]):
        self.p = basis.p
        self.ambient_dim = ambient_dim
        self.basis = basis
        self.pivots = pivots
        self._hash = hash((ambient_dim, basis))

    @classmethod
    def span(cls, rows, p: int, ambient_dim: int | None = None) -> "Subspace":
        arr = np.asarray(rows, dtype=np.int64) % p
        if arr.ndim == 1:
            arr = arr.reshape(1, -1)
        n = ambient_dim if ambient_dim is not None else arr.shape[1]
        if arr.size == 0:
            arr = arr.reshape(0, n)
        red, rank, pivots = rref_mod(arr, p)
        return cls(GFMatrix(red[:rank], p), n, tuple(pivots))

    @classmethod
    def zero(cls, n: int, p: int) -> "Subspace":
        return cls(GFMatrix(np.zeros((0, n), dtype=np.int64), p), n, ())

    @classmethod
    def full(cls, n: int, p: int) -> "Subspace":
        return cls(identity(n, p), n, tuple(range(n)))

    @property
    def dim(self) -> int:
        return self.basis.rows

    def __eq__(self, other) -> bool:
        return (isinstance(other, Subspace) and self.ambient_dim == other.ambient_dim
                and self.basis == other.basis)

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, basis={self.basis.a.tolist()}, p={self.p})"

    def sort_key(self):
        return (self.dim, self.basis.a.tobytes())

    def contains_vector(self, v) -> bool:
        v = np.asarray(v, dtype=np.int64) % self.p
        b = self.basis.a
        for r, c in enumerate(self.pivots):
            if v[c]:
                v = (v - v[c] * b[r]) % self.p
        return not v.any()

    def __le__(self, other: "Subspace") -> bool:
        return all(other.contains_vector(row) for row in self.basis.a)

    def __lt__(self, other: "Subspace") -> bool:
        return self.dim < other.dim and self <= other

    def vectors(self):
        """All vectors of the subspace (including zero)."""
        b = self.basis.a
        for coeffs in itertools.product(range(self.p), repeat=self.dim):
            yield (np.asarray(coeffs, dtype=np.int64) @ b) % self.p

    def sum(self, other: "Subspace") -> "Subspace":
        stacked = np.concatenate([self.basis.a, other.basis.a], axis=0)
        return Subspace.span(stacked, self.p, self.ambient_dim)

    def intersect(self, other: "Subspace") -> "Subspace":
        # Zassenhaus would also do; at ambient_dim <= 4 a kernel computation
        # on the stacked bases is simplest.
        if self.dim == 0 or other.dim == 0:
            return Subspace.zero(self.ambient_dim, self.p)
        stacked = np.concatenate([self.basis.a, other.basis.a], axis=0).T
        ker = nullspace_mod(stacked, self.p)  # rows: (x, y) with x.B1 + y.B2 = 0
        rows = (ker[:, : self.dim] @ self.basis.a) % self.p
        return Subspace.span(rows, self.p, self.ambient_dim)

    def apply(self, g: GFMatrix) -> "Subspace":
        """Image under the linear map g (vectors are columns; a row basis v
        maps to v g^T)."""
        return Subspace.span(self.basis.a @ g.a.T, self.p, self.ambient_dim)


def gaussian_binomial(n: int, k: int, p: int) -> int:
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= p ** (n - i) - 1
        den *= p ** (i + 1) - 1
    return num // den


def enumerate_subspaces(n: int, p: int, dim: int | None = None) -> list[Subspace]:
    """All subspaces of F_p^n (of the given dimension, when specified), each in
    canonical RREF form, enumerated directly by pivot-column pattern."""
    check_prime(p)
    if dim is not None:
        if dim < 0 or dim > n:
            raise ValueError(f"dim = {dim} out of range for ambient dimension {n}")
        dims = [dim]
    else:
        dims = list(range(n + 1))
    out = []
    for d in dims:
        if d == 0:
            out.append(Subspace.zero(n, p))
            continue
        for pivs in itertools.combinations(range(n), d):
            pivset = set(pivs)
            free_pos = [(r, c) for r, pc in enumerate(pivs)
                        for c in range(pc + 1, n) if c not in pivset]
            base = np.zeros((d, n), dtype=np.int64)
            for r, pc in enumerate(pivs):
                base[r, pc] = 1
            for vals in itertools.product(range(p), repeat=len(free_pos)):
                m = base.copy()
                for (r, c), v in zip(free_pos, vals):
                    m[r, c] = v
                out.append(Subspace(GFMatrix(m, p), n, pivs))
    out.sort(key=Subspace.sort_key)
    return out


Flag = tuple  # a flag is a tuple of Subspace, strictly increasing in dimension


def complete_flags(n: int, p: int) -> list[Flag]:
    """All complete flags W_1 < ... < W_{n-1} of F_p^n (proper nonzero parts)."""
    by_dim = {d: enumerate_subspaces(n, p, d) for d in range(1, n)}
    flags: list[Flag] = [()]
    for d in range(1, n):
        flags = [f + (w,) for f in flags for w in by_dim[d]
                 if not f or f[-1] <= w]
    return flags


def flag_of_columns(m: GFMatrix, order=None) -> Flag:
    """The flag of spans of column prefixes of an invertible matrix, columns
    taken in the given order (default 0..n-1); n-1 proper subspaces."""
    n = m.rows
    order = list(order) if order is not None else list(range(n))
    cols = m.a.T
    return tuple(Subspace.span(cols[order[: k + 1]], m.p, n) for k in range(n - 1))


# ---------------------------------------------------------------------------
# Groups of matrices

class FiniteGroup:
    """A finite group of GFMatrix elements in a fixed canonical order.

    Multiplication is the on-the-fly matrix product; a full Cayley table is
    never materialized.  Elements returned by mul/inv are the canonical stored
    objects, so identity comparisons and dict lookups stay cheap.
    """

    def __init__(self, elements, p: int, name: str = "", generators=None):
        elems = sorted(elements, key=lambda g: g.a.tobytes())
        self.p = p
        self.name = name
        self.elements = tuple(elems)
        self.index = {g: i for i, g in enumerate(self.elements)}
        self._canon = {g: g for g in self.elements}
        ident = [g for g in self.elements if g.is_identity()]
        if len(ident) != 1:
            raise ValueError("group must contain the identity exactly once")
        self.identity = ident[0]
        self._generators = tuple(generators) if generators else None

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, g) -> bool:
        return g in self.index

    def mul(self, a: GFMatrix, b: GFMatrix) -> GFMatrix:
        return self._canon[a * b]

    def inv(self, a: GFMatrix) -> GFMatrix:
        return self._canon[a.inv()]

    @property
    def generators(self):
        if self._generators is None:
            # greedy: add elements until they generate everything
            gens: list[GFMatrix] = []
            span = {self.identity}
            for g in self.elements:
                if g in span:
                    continue
                gens.append(g)
                span = closure(gens, maxsize=len(self.elements))
                if len(span) == len(self.elements):
                    break
            self._generators = tuple(gens)
        return self._generators

    def verify(self) -> None:
        """Closure and inverse laws on all elements (associativity is free for
        matrix multiplication)."""
        for g in self.elements:
            if g.inv() not in self.index:
                raise AssertionError("inverse not in group")
        for g in self.elements:
            for h in self.elements:
                if g * h not in self.index:
                    raise AssertionError("not closed under multiplication")


def closure(gens, maxsize: int | None = None) -> set:
    """Multiplicative closure of a set of invertible GFMatrix."""
    gens = list(gens)
    if not gens:
        return set()
    n, p = gens[0].rows, gens[0].p
    els = {identity(n, p)}
    boundary = [identity(n, p)]
    while boundary:
        new = []
        for b in boundary:
            for g in gens:
                c = b * g
                if c not in els:
                    els.add(c)
                    new.append(c)
                    if maxsize and len(els) > maxsize:
                        raise ValueError("closure exceeded expected size")
        boundary = new
    return els


def _independent_tuples(n: int, p: int, d: int):
    """All ordered d-tuples of linearly independent vectors in F_p^n, as rows.
    The running span is carried as a dict keyed by vector bytes, extended
    incrementally (span of <S, v> = union of cosets span(S) + c*v)."""
    all_vecs = [np.array(v, dtype=np.int64) for v in itertools.product(range(p), repeat=n)]

    def extend(chosen, span):
        if len(chosen) == d:
            yield list(chosen)
            return
        for v in all_vecs:
            if v.tobytes() in span:
                continue
            new_span = dict(span)
            for s in span.values():
                for c in range(1, p):
                    w = (s + c * v) % p
                    new_span[w.tobytes()] = w
            yield from extend(chosen + [v], new_span)

    zero = np.zeros(n, dtype=np.int64)
    yield from extend([], {zero.tobytes(): zero})


def general_linear(n: int, p: int) -> list[GFMatrix]:
    """All elements of GL_n(F_p), built row by row avoiding the running span;
    the count is prod_{i<n} (p^n - p^i)."""
    check_prime(p)
    if n == 0:
        return [identity(0, p)]
    return [GFMatrix(np.stack(rows), p) for rows in _independent_tuples(n, p, n)]


def stiefel(n: int, d: int, p: int) -> list[GFMatrix]:
    """The mod-p Stiefel variety V_d(F_p^n): all n x d matrices with zero
    nullspace (independent columns).  Empty for d > n.  GL_n acts on the left."""
    check_prime(p)
    if d < 0:
        raise ValueError("d must be nonnegative")
    if d > n:
        return []
    if d == 0:
        return [GFMatrix(np.zeros((n, 0), dtype=np.int64), p)]
    return [GFMatrix(np.stack(cols, axis=1), p) for cols in _independent_tuples(n, p, d)]


def borel(n: int, p: int) -> list[GFMatrix]:
    """Invertible upper triangular matrices."""
    diag_positions = [(i, i) for i in range(n)]
    upper_positions = [(i, j) for i in range(n) for j in range(i + 1, n)]
    out = []
    for diag in itertools.product(range(1, p), repeat=n):
        for upper in itertools.product(range(p), repeat=len(upper_positions)):
            m = np.zeros((n, n), dtype=np.int64)
            for (i, j), v in zip(diag_positions, diag):
                m[i, j] = v
            for (i, j), v in zip(upper_positions, upper):
                m[i, j] = v
            out.append(GFMatrix(m, p))
    return out


def permutation_matrices(n: int, p: int) -> list[GFMatrix]:
    return [permutation_matrix(perm, p) for perm in itertools.permutations(range(n))]


def unipotent_block(i: int, j: int, p: int) -> list[GFMatrix]:
    """The group U_{i,j} of (i+j) x (i+j) matrices [[I_i, *], [0, I_j]]."""
    n = i + j
    out = []
    for vals in itertools.product(range(p), repeat=i * j):
        m = np.eye(n, dtype=np.int64)
        it = iter(vals)
        for r in range(i):
            for c in range(i, n):
                m[r, c] = next(it)
        out.append(GFMatrix(m, p))
    return out


def block_embed(a: GFMatrix, b: GFMatrix) -> GFMatrix:
    """Block-diagonal embedding GL_i x GL_j -> GL_{i+j}."""
    if a.rows != a.cols or b.rows != b.cols:
        raise ValueError("block_embed needs square blocks")
    i, j = a.rows, b.rows
    m = np.zeros((i + j, i + j), dtype=np.int64)
    m[:i, :i] = a.a
    m[i:, i:] = b.a
    return GFMatrix(m, a.p)


def block_diagonal_group(i: int, j: int, p: int) -> list[GFMatrix]:
    return [block_embed(a, b)
            for a in general_linear(i, p) for b in general_linear(j, p)]


def parabolic(w: Subspace) -> list[GFMatrix]:
    """The parabolic subgroup of GL(V) preserving the subspace w."""
    n, p = w.ambient_dim, w.p
    return [g for g in general_linear(n, p) if w.apply(g) == w]


def enumerate_group(kind: str, n: int, p: int, i: int | None = None,
                    j: int | None = None, w: Subspace | None = None) -> FiniteGroup:
    """Distinguished subgroups of GL_n(F_p) by name.

    kind: "GL", "Borel", "PermMatrices", "U" (needs i, j with i+j = n),
    "Parabolic" (needs w), or "BlockGL" (needs i, j with i+j = n).
    """
    check_prime(p)
    if kind == "GL":
        els = general_linear(n, p)
    elif kind == "Borel":
        els = borel(n, p)
    elif kind == "PermMatrices":
        els = permutation_matrices(n, p)
    elif kind == "U":
        if i is None or j is None or i + j != n:
            raise ValueError("U(i,j) needs i + j = n")
        els = unipotent_block(i, j, p)
    elif kind == "Parabolic":
        if w is None or w.ambient_dim != n or w.p != p:
            raise ValueError("Parabolic needs a subspace of F_p^n")
        els = parabolic(w)
    elif kind == "BlockGL":
        if i is None or j is None or i + j != n:
            raise ValueError("BlockGL(i,j) needs i + j = n")
        els = block_diagonal_group(i, j, p)
    else:
        raise ValueError(f"unknown group kind {kind!r}")
    return FiniteGroup(els, p, name=f"{kind}_{n}(F_{p})")


def gl_order(n: int, p: int) -> int:
    out = 1
    for i in range(n):
        out *= p ** n - p ** i
    return out


# ---------------------------------------------------------------------------
# Bruhat factorization

def bruhat_factor(m: GFMatrix):
    """Factor an invertible matrix as m = a @ s @ b with a, b upper triangular
    and s a permutation matrix.

    Row operations adding later rows to earlier ones (left multiplication by
    upper triangulars) and column operations adding earlier columns to later
    ones (right multiplication) reduce m to a permutation matrix; the inverse
    operations accumulate into a and b.
    """
    p = m.p
    n = m.rows
    if not m.is_invertible():
        raise ValueError("bruhat_factor needs an invertible matrix")
    w = np.array(m.a)
    a = np.eye(n, dtype=np.int64)   # invariant: m = a @ w @ b mod p
    b = np.eye(n, dtype=np.int64)
    pivot_of_row: dict[int, int] = {}
    for col in range(n):
        # clear entries sitting in already-pivoted rows using earlier columns
        for r, pc in pivot_of_row.items():
            if w[r, col]:
                f = w[r, col] * pow(int(w[r, pc]), -1, p) % p
                w[:, col] = (w[:, col] - f * w[:, pc]) % p
                b[pc, :] = (b[pc, :] + f * b[col, :]) % p
        free = [r for r in range(n) if r not in pivot_of_row and w[r, col]]
        r = max(free)
        pivot_value = int(w[r, col])
        inv = pow(pivot_value, -1, p)
        w[r, :] = (w[r, :] * inv) % p
        a[:, r] = (a[:, r] * pivot_value) % p
        for rr in range(r):
            if rr not in pivot_of_row and w[rr, col]:
                f = int(w[rr, col])
                w[rr, :] = (w[rr, :] - f * w[r, :]) % p
                a[:, r] = (a[:, r] + f * a[:, rr]) % p
        pivot_of_row[r] = col
    perm = [0] * n
    for r, c in pivot_of_row.items():
        perm[c] = r
    s = permutation_matrix(perm, p)
    ga, gs, gb = GFMatrix(a, p), s, GFMatrix(b, p)
    if ga * gs * gb != m:
        raise AssertionError("bruhat factorization failed to reconstruct input")
    return ga, gs, gb
