"""Group algebra arithmetic: convolution laws, distinguished elements, ring
discipline, module actions."""

import random
from fractions import Fraction

import numpy as np
import pytest

from steinberg.algebra import (AlgebraElement, Integers, MatModule, PermModule,
                               PLocalRationals, PrimeField, ZZ, act, act_exact,
                               act_mod, block_tensor, borel_sum, gl_group,
                               shuffle_sum, signed_permutation_sum,
                               steinberg_constant, tensor_module,
                               unipotent_block_sum, verify_action_homomorphism)
from steinberg.gf import identity, permutation_matrices


def random_element(group, ring, rng, support=4):
    coeffs = {}
    for _ in range(support):
        g = rng.choice(group.elements)
        coeffs[g] = coeffs.get(g, 0) + rng.randint(-3, 3)
    return AlgebraElement(group, ring, coeffs)


@pytest.mark.parametrize("p", [2, 3])
def test_convolution_unit_and_delta_products(p):
    g = gl_group(2, p)
    rng = random.Random(p)
    q = PLocalRationals(p)
    one = AlgebraElement.delta(g, g.identity, q)
    for _ in range(10):
        x = random_element(g, q, rng)
        assert one * x == x
        assert x * one == x
    perms = permutation_matrices(3, p)
    g3 = gl_group(3, p)
    for a in perms:
        for b in perms:
            da, db = AlgebraElement.delta(g3, a), AlgebraElement.delta(g3, b)
            assert da * db == AlgebraElement.delta(g3, a * b)


@pytest.mark.parametrize("p", [2, 3])
def test_convolution_assoc_distributive_randomized(p):
    g = gl_group(2, p)
    rng = random.Random(31 + p)
    for _ in range(12):
        x = random_element(g, ZZ, rng)
        y = random_element(g, ZZ, rng)
        z = random_element(g, ZZ, rng)
        assert (x * y) * z == x * (y * z)
        assert x * (y + z) == x * y + x * z
        assert (y + z) * x == y * x + z * x


def test_signed_square_of_transposition_sum():
    # the signed permutation sum over two letters squares to twice itself
    g = gl_group(2, 3)
    s = signed_permutation_sum(2, 3, g)
    assert s * s == s.scale(2)


def test_distinguished_supports():
    g1 = gl_group(1, 5)
    assert signed_permutation_sum(1, 5, g1) == AlgebraElement.delta(g1, identity(1, 5))
    assert len(borel_sum(2, 2, gl_group(2, 2)).coeffs) == 2
    assert len(borel_sum(2, 3, gl_group(2, 3)).coeffs) == 12
    assert len(unipotent_block_sum(1, 1, 3, gl_group(2, 3)).coeffs) == 3
    assert len(shuffle_sum(1, 2, 2, gl_group(3, 2)).coeffs) == 3
    g22 = gl_group(2, 2)
    sh = shuffle_sum(1, 1, 2, g22)
    tau = permutation_matrices(2, 2)[1]
    expected = AlgebraElement(g22, ZZ, {identity(2, 2): 1, tau: -1})
    assert sh == expected


def test_steinberg_constants():
    assert steinberg_constant(0, 3) == 1
    assert steinberg_constant(1, 2) == 1
    assert steinberg_constant(2, 3) == 16
    assert steinberg_constant(3, 2) == 21
    for (n, p) in [(2, 2), (3, 2), (2, 3), (3, 3), (2, 5)]:
        assert steinberg_constant(n, p) % p != 0


def _inverse_shuffle_sum(i, j, p, g):
    sh = shuffle_sum(i, j, p, g)
    return AlgebraElement(g, ZZ, {k.inv(): c for k, c in sh.coeffs.items()})


def test_shuffle_borel_identities():
    """Absorption identities between block sums and the full sums.

    The Borel/unipotent identity is two-sided.  The shuffle identity absorbs
    the block sum on the right of the shuffle sum; on the other side the
    inverse shuffles are the correct coset representatives (for (1,2) the
    plain two-sided version is false: products collide)."""
    for p in (2, 3):
        for (i, j) in [(1, 1), (1, 2), (2, 1)]:
            n = i + j
            g = gl_group(n, p)
            u = unipotent_block_sum(i, j, p, g)
            bb = block_tensor(borel_sum(i, p, gl_group(i, p)),
                              borel_sum(j, p, gl_group(j, p)), g)
            ss = block_tensor(signed_permutation_sum(i, p, gl_group(i, p)),
                              signed_permutation_sum(j, p, gl_group(j, p)), g)
            sh = shuffle_sum(i, j, p, g)
            bn = borel_sum(n, p, g)
            sn = signed_permutation_sum(n, p, g)
            assert u * bb == bb * u == bn
            assert sh * ss == sn
            assert ss * _inverse_shuffle_sum(i, j, p, g) == sn
            assert u * ss == ss * u


def test_two_sided_shuffle_identity_fails_at_one_two():
    """Pin the counterexample: the block sum times the plain shuffle sum is
    not the full signed sum when (i,j) = (1,2)."""
    g = gl_group(3, 2)
    ss = block_tensor(signed_permutation_sum(1, 2, gl_group(1, 2)),
                      signed_permutation_sum(2, 2, gl_group(2, 2)), g)
    sh = shuffle_sum(1, 2, 2, g)
    assert ss * sh != signed_permutation_sum(3, 2, g)


def test_plocal_discipline():
    q = PLocalRationals(3)
    with pytest.raises(ValueError):
        q.coerce(Fraction(1, 3))
    assert q.coerce(Fraction(1, 2)) == Fraction(1, 2)
    with pytest.raises(ValueError):
        q.invert(Fraction(3, 2))
    g = gl_group(1, 3)
    with pytest.raises(ValueError):
        AlgebraElement(g, q, {identity(1, 3): Fraction(1, 6)})


def test_integers_ring():
    with pytest.raises(ValueError):
        ZZ.invert(2)
    assert ZZ.invert(-1) == -1
    with pytest.raises(ValueError):
        ZZ.coerce(Fraction(1, 2))


def test_prime_field_coercion():
    f = PrimeField(5)
    assert f.coerce(Fraction(1, 2)) == 3  # inverse of 2 mod 5
    assert f.invert(2) == 3
    with pytest.raises(ValueError):
        f.invert(0)


def test_ring_and_group_mismatch_errors():
    g2, g3 = gl_group(2, 2), gl_group(2, 3)
    x = AlgebraElement.delta(g2, identity(2, 2))
    y = AlgebraElement.delta(g3, identity(2, 3))
    with pytest.raises(ValueError):
        _ = x * y
    z = AlgebraElement.delta(g2, identity(2, 2), PrimeField(2))
    with pytest.raises(ValueError):
        _ = x + z


def test_act_examples():
    g = gl_group(2, 2)
    reg = PermModule.regular(g)
    one = AlgebraElement.delta(g, g.identity, PLocalRationals(2))
    m = act(one, reg)
    assert all(m[i][j] == (1 if i == j else 0) for i in range(6) for j in range(6))
    triv = PermModule.trivial(g)
    s = signed_permutation_sum(2, 2, g, PLocalRationals(2))
    assert act(s, triv) == [[0]]
    # averaging idempotent over GL_1(F_3) has rank one on the regular module
    g13 = gl_group(1, 3)
    e = (signed_permutation_sum(1, 3, g13, PLocalRationals(3))
         * borel_sum(1, 3, g13, PLocalRationals(3))).scale(Fraction(1, 2))
    from steinberg.exact import rank_rational
    assert rank_rational(act(e, PermModule.regular(g13))) == 1


@pytest.mark.parametrize("p", [2, 3])
def test_act_is_multiplicative_randomized(p):
    g = gl_group(2, p)
    reg = PermModule.regular(g)
    rng = random.Random(5 + p)
    for _ in range(6):
        x = random_element(g, ZZ, rng)
        y = random_element(g, ZZ, rng)
        mx = np.array(act_exact(x, reg), dtype=object)
        my = np.array(act_exact(y, reg), dtype=object)
        mxy = np.array(act_exact(x * y, reg), dtype=object)
        assert np.array_equal(mx @ my, mxy)


def test_act_mod_matches_exact_reduction():
    g = gl_group(2, 3)
    reg = PermModule.regular(g)
    rng = random.Random(9)
    x = random_element(g, ZZ, rng)
    exact = np.array(act_exact(x, reg), dtype=np.int64) % 3
    modded = act_mod(x.to_ring(PrimeField(3)), reg, 3)
    assert np.array_equal(exact, modded)


def test_batched_convolution_matches_small_path():
    import steinberg.algebra as alg
    g = gl_group(2, 3)
    rng = random.Random(23)
    x = random_element(g, ZZ, rng, support=12)
    y = random_element(g, ZZ, rng, support=12)
    small = x * y
    old = alg._BATCH_THRESHOLD
    try:
        alg._BATCH_THRESHOLD = 1
        batched = x * y
    finally:
        alg._BATCH_THRESHOLD = old
    assert small == batched


def test_tensor_module_and_action_homomorphism():
    g = gl_group(2, 2)
    reg = PermModule.regular(g)
    triv = PermModule.trivial(g)
    verify_action_homomorphism(reg)
    t = tensor_module(triv, reg, 2)
    assert t.dim == 6
    verify_action_homomorphism(t, p=2)
