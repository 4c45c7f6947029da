"""Linear algebra over F_p: canonical forms, enumeration counts, Bruhat."""

import itertools
import random

import numpy as np
import pytest

from steinberg.exact import rref_mod
from steinberg.gf import (GFMatrix, Subspace, block_embed, bruhat_factor,
                          enumerate_group, enumerate_subspaces, flag_of_columns,
                          complete_flags, gaussian_binomial, general_linear,
                          gl_order, identity, permutation_matrices, stiefel,
                          unipotent_block)


def test_rref_examples():
    red, rank, piv = rref_mod(np.eye(2, dtype=np.int64), 2)
    assert rank == 2 and piv == [0, 1]
    red, rank, piv = rref_mod(np.zeros((2, 2), dtype=np.int64), 3)
    assert rank == 0 and piv == []
    red, rank, piv = rref_mod(np.array([[1, 2], [2, 4]]), 5)
    assert rank == 1


def test_rref_idempotent_and_rank_transpose():
    rng = np.random.default_rng(17)
    for p in (2, 3, 5):
        for _ in range(25):
            m = rng.integers(0, p, size=(rng.integers(1, 5), rng.integers(1, 5)))
            red, rank, _ = rref_mod(m, p)
            red2, rank2, _ = rref_mod(red, p)
            assert np.array_equal(red, red2) and rank == rank2
            assert rank == rref_mod(m.T, p)[1]


def brute_force_subspaces(n, p, dim):
    """Oracle: spans of all <= n-tuples of vectors, deduplicated by their
    vector sets."""
    vecs = [np.array(v, dtype=np.int64) for v in itertools.product(range(p), repeat=n)]
    seen = {}
    for k in range(0, n + 1):
        for combo in itertools.combinations(vecs, k):
            span = {tuple(np.zeros(n, dtype=np.int64))}
            for coeffs in itertools.product(range(p), repeat=k):
                v = sum((c * w for c, w in zip(coeffs, combo)),
                        np.zeros(n, dtype=np.int64)) % p
                span.add(tuple(v.tolist()))
            key = frozenset(span)
            seen[key] = len(span)
    target = p ** dim
    return sum(1 for size in seen.values() if size == target)


@pytest.mark.parametrize("n,p", [(2, 2), (2, 3), (3, 2)])
def test_subspace_counts_against_brute_force(n, p):
    for d in range(n + 1):
        subs = enumerate_subspaces(n, p, d)
        assert len(subs) == gaussian_binomial(n, d, p)
        assert len(subs) == brute_force_subspaces(n, p, d)
        assert len(set(subs)) == len(subs)  # canonicalization is injective


def test_subspace_count_examples():
    assert len(enumerate_subspaces(2, 3, 1)) == 4
    assert len(enumerate_subspaces(2, 2, 0)) == 1
    assert len(enumerate_subspaces(3, 2, 1)) == 7
    with pytest.raises(ValueError):
        enumerate_subspaces(2, 2, 3)


def test_subspace_operations():
    a = Subspace.span([[1, 0, 0], [0, 1, 0]], 2)
    b = Subspace.span([[0, 1, 0], [0, 0, 1]], 2)
    assert a.intersect(b) == Subspace.span([[0, 1, 0]], 2)
    assert a.sum(b) == Subspace.full(3, 2)
    assert Subspace.zero(3, 2) <= a <= Subspace.full(3, 2)


def test_group_orders():
    assert len(enumerate_group("GL", 2, 2)) == 6 == gl_order(2, 2)
    assert len(enumerate_group("PermMatrices", 3, 2)) == 6
    assert len(enumerate_group("U", 2, 3, i=1, j=1)) == 3
    assert len(enumerate_group("Borel", 2, 3)) == 12
    assert len(enumerate_group("BlockGL", 3, 2, i=1, j=2)) == 6
    w = Subspace.span([[1, 0]], 2)
    par = enumerate_group("Parabolic", 2, 2, w=w)
    assert len(par) == 2  # the Borel of GL_2(F_2)
    with pytest.raises(ValueError):
        enumerate_group("U", 3, 2, i=1, j=1)
    with pytest.raises(ValueError):
        enumerate_group("nope", 2, 2)


def test_group_closure_verification():
    g = enumerate_group("GL", 2, 3)
    g.verify()
    b = enumerate_group("Borel", 3, 2)
    b.verify()


@pytest.mark.parametrize("n,p", [(2, 2), (2, 3), (3, 2), (3, 3)])
def test_bruhat_exhaustive(n, p):
    for m in general_linear(n, p):
        a, s, b = bruhat_factor(m)
        assert a * s * b == m
        assert np.array_equal(np.triu(a.a), a.a)
        assert np.array_equal(np.triu(b.a), b.a)
        perm_entries = sorted(s.a.sum(axis=0).tolist())
        assert perm_entries == [1] * n


def test_bruhat_identity_and_permutation():
    eye = identity(3, 2)
    a, s, b = bruhat_factor(eye)
    assert a == s == b == eye
    tau = permutation_matrices(2, 2)[1]
    a, s, b = bruhat_factor(tau)
    assert s == tau and a == identity(2, 2) and b == identity(2, 2)
    with pytest.raises(ValueError):
        bruhat_factor(GFMatrix([[1, 1], [1, 1]], 2))


def test_stiefel_counts():
    assert len(stiefel(2, 2, 2)) == 6
    assert len(stiefel(2, 1, 2)) == 3
    assert len(stiefel(1, 0, 3)) == 1
    assert stiefel(2, 3, 2) == []
    for (n, d, p) in [(2, 1, 3), (3, 2, 2)]:
        expected = 1
        for t in range(d):
            expected *= p ** n - p ** t
        assert len(stiefel(n, d, p)) == expected


def test_stiefel_full_frames_biject_with_gl():
    assert set(stiefel(3, 3, 2)) == set(general_linear(3, 2))


def test_stiefel_gl_action_well_defined():
    pts = set(stiefel(2, 1, 3))
    for g in general_linear(2, 3):
        for m in pts:
            assert GFMatrix(g.a @ m.a, 3) in pts


def test_block_embed():
    assert block_embed(identity(1, 2), identity(1, 2)) == identity(2, 2)
    a = GFMatrix([[1]], 2)
    b = GFMatrix([[1, 1], [0, 1]], 2)
    assert block_embed(a, b) == GFMatrix([[1, 0, 0], [0, 1, 1], [0, 0, 1]], 2)
    with pytest.raises(ValueError):
        block_embed(GFMatrix([[1, 0]], 2), identity(1, 2))


def test_block_embed_is_homomorphism_exhaustive():
    gl1 = general_linear(1, 2)
    gl2 = general_linear(2, 2)
    for a1, a2 in itertools.product(gl1, repeat=2):
        for b1, b2 in itertools.product(gl2, repeat=2):
            lhs = block_embed(a1, b1) * block_embed(a2, b2)
            rhs = block_embed(a1 * a2, b1 * b2)
            assert lhs == rhs


def test_unipotent_block_sizes():
    assert len(unipotent_block(1, 1, 3)) == 3
    assert len(unipotent_block(1, 2, 2)) == 4
    assert len(unipotent_block(2, 1, 3)) == 9


def test_complete_flags_count():
    # number of complete flags = |GL_n| / |Borel|
    assert len(complete_flags(3, 2)) == 168 // 8
    assert len(complete_flags(2, 3)) == 4


def test_flag_of_columns_invariance_under_upper_triangular():
    from steinberg.gf import borel
    for m in general_linear(2, 3)[:10]:
        f = flag_of_columns(m)
        for b in borel(2, 3):
            assert flag_of_columns(m * b) == f
