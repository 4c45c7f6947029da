"""Graded homology of classifying spaces of elementary abelian p-groups, as
GL_n(F_p)-modules, plus the graded rank bookkeeping used by the fixed-point
dimension checks.

At p = 2 the homology of B(Z/p)^n is a polynomial algebra on n degree-1
generators; at odd p it is an exterior algebra on n degree-1 generators
tensored with a polynomial algebra on n degree-2 generators.  The group acts
by linear substitution in the generators.  Two substitution conventions are
supported:

  "homology":  degree-1 action matrices equal g itself (the natural module);
  "dual":      degree-1 matrices are the inverse transpose (the contragredient,
               i.e. the natural substitution on cohomology).

Both are honest left actions; ranks of Steinberg summands agree under either,
and the fixed-point checks can report the two side by side.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .algebra import (AlgebraElement, FiniteGroup, MatModule, PermModule,
                      PrimeField, act_mod, gl_group, steinberg_constant)
from .exact import rank_mod
from .gf import GFMatrix, check_prime, identity, stiefel

CONVENTIONS = ("homology", "dual")


def _degree_one_matrix(g: GFMatrix, convention: str) -> np.ndarray:
    if convention == "homology":
        return g.a
    if convention == "dual":
        return g.inv().a.T
    raise ValueError(f"unknown convention {convention!r}")


def _monomials_p2(n: int, k: int):
    """Exponent tuples of total degree k in n variables, deg-lex order."""
    if n == 0:
        return [()] if k == 0 else []
    out = []
    for first in range(k, -1, -1):
        for rest in _monomials_p2(n - 1, k - first):
            out.append((first,) + rest)
    return out


def _monomials_odd(n: int, k: int):
    """(exterior subset, polynomial exponents) with |S| + 2|b| = k."""
    out = []
    for size in range(min(n, k) + 1):
        rem = k - size
        if rem % 2:
            continue
        for subset in itertools.combinations(range(n), size):
            for b in _monomials_p2(n, rem // 2):
                out.append((subset, b))
    return out


def _poly_substitute(exps: tuple, bmat: np.ndarray, p: int, n: int) -> dict:
    """Image of the monomial x^exps under x_i -> sum_r B[r,i] x_r, expanded;
    returns {exponent tuple: coefficient mod p}."""
    out = {(0,) * n: 1}
    for i, e in enumerate(exps):
        for _ in range(e):
            new: dict = {}
            for mono, coeff in out.items():
                for r in range(n):
                    c = int(bmat[r, i])
                    if not c:
                        continue
                    m2 = list(mono)
                    m2[r] += 1
                    key = tuple(m2)
                    new[key] = (new.get(key, 0) + coeff * c) % p
            out = {m: c for m, c in new.items() if c}
    return out


def _exterior_substitute(subset: tuple, bmat: np.ndarray, p: int, n: int) -> dict:
    """Image of x_S in the exterior algebra; Koszul signs from sorting the
    wedge factors, zero on repeats."""
    out: dict = {(): 1}
    for i in subset:
        new: dict = {}
        for mono, coeff in out.items():
            for r in range(n):
                c = int(bmat[r, i])
                if not c or r in mono:
                    continue
                pos = sum(1 for t in mono if t < r)
                sign = (-1) ** (len(mono) - pos)
                key = tuple(sorted(mono + (r,)))
                val = (new.get(key, 0) + sign * coeff * c) % p
                new[key] = val
        out = {m: c for m, c in new.items() if c}
    return out


@dataclass
class GradedModule:
    """A degree-graded sequence of modules over one group, mod p."""
    p: int
    group: FiniteGroup
    degrees: list  # ModuleData per degree 0..D
    name: str = ""

    @property
    def truncation(self) -> int:
        return len(self.degrees) - 1

    def dims(self) -> list[int]:
        return [m.dim for m in self.degrees]


def torus_homology(n: int, p: int, max_degree: int = 4,
                   convention: str = "homology") -> GradedModule:
    """H_*(B(Z/p)^n; F_p) as a graded GL_n(F_p)-module up to max_degree."""
    check_prime(p)
    group = gl_group(n, p)
    degrees = []
    for k in range(max_degree + 1):
        if p == 2:
            basis = _monomials_p2(n, k)
            index = {m: t for t, m in enumerate(basis)}
            mats = {}
            for g in group:
                b = _degree_one_matrix(g, convention)
                mat = np.zeros((len(basis), len(basis)), dtype=np.int64)
                for col, mono in enumerate(basis):
                    for img, coeff in _poly_substitute(mono, b, p, n).items():
                        mat[index[img], col] = coeff % p
                mats[g] = mat
        else:
            basis = _monomials_odd(n, k)
            index = {m: t for t, m in enumerate(basis)}
            mats = {}
            for g in group:
                b = _degree_one_matrix(g, convention)
                mat = np.zeros((len(basis), len(basis)), dtype=np.int64)
                for col, (subset, exps) in enumerate(basis):
                    ext = _exterior_substitute(subset, b, p, n)
                    pol = _poly_substitute(exps, b, p, n)
                    for s2, c1 in ext.items():
                        for e2, c2 in pol.items():
                            mat[index[(s2, e2)], col] = (mat[index[(s2, e2)], col]
                                                         + c1 * c2) % p
                mats[g] = mat
        degrees.append(MatModule(group, len(basis), mats, p,
                                 name=f"H_{k}(B(Z/{p})^{n})"))
    return GradedModule(p, group, degrees, name=f"H_*(B(Z/{p})^{n}; {convention})")


def trivial_graded(n: int, p: int, max_degree: int) -> GradedModule:
    """The sphere: one-dimensional trivial module in degree 0, zero above."""
    group = gl_group(n, p)
    degrees = []
    for k in range(max_degree + 1):
        if k == 0:
            mats = {g: np.eye(1, dtype=np.int64) for g in group}
            degrees.append(MatModule(group, 1, mats, p, name="trivial"))
        else:
            mats = {g: np.zeros((0, 0), dtype=np.int64) for g in group}
            degrees.append(MatModule(group, 0, mats, p, name="zero"))
    return GradedModule(p, group, degrees, name="sphere")


def kunneth(m1: GradedModule, m2: GradedModule) -> GradedModule:
    """Graded tensor product over the block-embedded product group; degree-k
    piece is the direct sum over i+j=k of the tensor of the pieces."""
    if m1.p != m2.p:
        raise ValueError("mixed characteristics")
    if m1.truncation != m2.truncation:
        raise ValueError("mismatched truncations")
    p = m1.p
    n1 = m1.group.elements[0].rows
    n2 = m2.group.elements[0].rows
    from .gf import block_embed
    pairs = [(a, b) for a in m1.group for b in m2.group]
    elements = [block_embed(a, b) for a, b in pairs]
    group = FiniteGroup(elements, p, name="product group")
    lookup = {block_embed(a, b): (a, b) for a, b in pairs}
    degrees = []
    for k in range(m1.truncation + 1):
        dim = sum(m1.degrees[i].dim * m2.degrees[k - i].dim for i in range(k + 1))
        mats = {}
        for g in group:
            a, b = lookup[g]
            blocks = []
            for i in range(k + 1):
                ma = m1.degrees[i].matrix_mod(a, p)
                mb = m2.degrees[k - i].matrix_mod(b, p)
                blocks.append(np.kron(ma, mb) % p)
            full = np.zeros((dim, dim), dtype=np.int64)
            off = 0
            for blk in blocks:
                d = blk.shape[0]
                full[off:off + d, off:off + d] = blk
                off += d
            mats[g] = full
        degrees.append(MatModule(group, dim, mats, p, name=f"kunneth_{k}"))
    return GradedModule(p, group, degrees, name=f"({m1.name})(x)({m2.name})")


def permutation_module(group: FiniteGroup, points, act_fn, p: int) -> PermModule:
    """F_p-linearization of a finite group action."""
    return PermModule(group, points, act_fn)


def stiefel_module(n: int, d: int, p: int) -> PermModule:
    """F_p[V_d(F_p^n)] with GL_n acting by left matrix multiplication."""
    group = gl_group(n, p)
    points = stiefel(n, d, p)
    return PermModule(group, points, lambda g, m: GFMatrix(g.a @ m.a, p),
                      name=f"F{p}[V_{d}(F_{p}^{n})]")


def steinberg_dim_series(graded: GradedModule, n: int | None = None,
                         conjugate: bool = False) -> list[int]:
    """Per-degree rank of the mod-p Steinberg projector on the graded module."""
    p = graded.p
    if n is None:
        n = graded.group.elements[0].rows
    from .idempotent import steinberg_idempotent
    e = steinberg_idempotent(n, p, PrimeField(p), conjugate=conjugate).element
    out = []
    for piece in graded.degrees:
        if piece.dim == 0:
            out.append(0)
            continue
        out.append(int(rank_mod(act_mod(e, piece, p), p)))
    return out


def module_rank_mod(n: int, p: int, module) -> int:
    from .idempotent import steinberg_idempotent
    e = steinberg_idempotent(n, p, PrimeField(p)).element
    if module.dim == 0:
        return 0
    return int(rank_mod(act_mod(e, module, p), p))


class TensorPermModule:
    """Permutation module tensored with a matrix module (diagonal action).
    Matrices are built on demand: the full per-element table would not fit in
    memory at GL_3 scale, and the projector only touches its support."""

    def __init__(self, perm: PermModule, piece: MatModule, p: int):
        self.group = perm.group
        self.perm = perm
        self.piece = piece
        self.p = p
        self.dim = perm.dim * piece.dim
        self.name = f"{perm.name}(x){piece.name}"

    def matrix_mod(self, g, p: int) -> np.ndarray:
        return np.kron(self.perm.matrix_mod(g, p),
                       self.piece.matrix_mod(g, p)) % p


def _tensor_with_perm(perm: PermModule, piece: MatModule, p: int) -> TensorPermModule:
    return TensorPermModule(perm, piece, p)


def convolve(a: list[int], b: list[int], upto: int) -> list[int]:
    return [sum(a[i] * b[k - i] for i in range(k + 1) if i < len(a) and k - i < len(b))
            for k in range(upto + 1)]


def graded_functor(kind: str, n: int, p: int, max_degree: int,
                   convention: str = "homology") -> GradedModule:
    """The two coefficient functors used by the rank checks: the sphere and
    the classifying-space homology."""
    if kind == "trivial":
        return trivial_graded(n, p, max_degree)
    if kind == "torus":
        return torus_homology(n, p, max_degree, convention)
    raise ValueError(f"unknown functor kind {kind!r}")


def functor_axioms_check(kind: str, p: int, max_degree: int,
                         convention: str = "homology") -> dict:
    """The graded dimensions are multiplicative under direct sum of vector
    spaces, and the value at 0 is one-dimensional in degree 0."""
    dims0 = graded_functor(kind, 0, p, max_degree, convention).dims()
    unit_ok = dims0 == [1] + [0] * max_degree
    mult_ok = True
    for (a, b) in [(1, 1), (1, 2)]:
        da = graded_functor(kind, a, p, max_degree, convention).dims()
        db = graded_functor(kind, b, p, max_degree, convention).dims()
        dab = graded_functor(kind, a + b, p, max_degree, convention).dims()
        if dab != convolve(da, db, max_degree):
            mult_ok = False
    return {"kind": kind, "p": p, "unit": unit_ok, "multiplicative": mult_ok,
            "ok": unit_ok and mult_ok}


def stiefel_rank_check(n: int, d: int, p: int, functor: str = "trivial",
                       max_degree: int = 4, convention: str = "homology") -> dict:
    """Graded-dimension identity relating the Steinberg summand of the
    Stiefel permutation module tensored with the functor value to the smaller
    Steinberg summand, degree by degree:

      rank e_n on (F_p[V_d(F_p^n)] (x) F(F_p^n))_k
        = p^binom(d,2) * sum_{i+j=k} dim F(F_p^d)_i * rank(e_(n-d) on F(F_p^(n-d))_j)
    """
    if d > n:
        raise ValueError("need d <= n")
    f_n = graded_functor(functor, n, p, max_degree, convention)
    f_d_dims = graded_functor(functor, d, p, max_degree, convention).dims()
    f_small = graded_functor(functor, n - d, p, max_degree, convention)
    small_series = steinberg_dim_series(f_small, n - d)
    factor = p ** (d * (d - 1) // 2)
    lhs = [factor * v for v in convolve(f_d_dims, small_series, max_degree)]
    perm = stiefel_module(n, d, p)
    rhs = []
    for k in range(max_degree + 1):
        piece = f_n.degrees[k]
        if piece.dim == 0:
            rhs.append(0)
            continue
        tens = _tensor_with_perm(perm, piece, p)
        rhs.append(module_rank_mod(n, p, tens))
    ok = lhs == rhs
    out = {"n": n, "d": d, "p": p, "functor": functor, "convention": convention,
           "max_degree": max_degree, "lhs": lhs, "rhs": rhs, "ok": ok}
    if not ok:
        out["first_difference"] = next(k for k in range(max_degree + 1)
                                       if lhs[k] != rhs[k])
    return out
