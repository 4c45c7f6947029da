"""Exact linear algebra kernels against independent oracles."""

import random
from fractions import Fraction

import numpy as np
import pytest
import sympy

from steinberg.exact import (ExactSolver, kernel_dimensions_match,
                             nullspace_mod, rank_int, rank_mod, rank_rational,
                             rref_mod, smith_invariant_factors)


def fraction_rank_oracle(rows):
    """Plain fraction Gaussian elimination, written independently of Bareiss."""
    m = [[Fraction(x) for x in row] for row in rows]
    rank = 0
    cols = len(m[0]) if m else 0
    for c in range(cols):
        piv = next((i for i in range(rank, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        m[rank] = [x / m[rank][c] for x in m[rank]]
        for i in range(len(m)):
            if i != rank and m[i][c]:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[rank])]
        rank += 1
    return rank


def test_rank_int_matches_fraction_elimination():
    rng = random.Random(7)
    for trial in range(60):
        nr = rng.randint(1, 7)
        nc = rng.randint(1, 7)
        mat = [[rng.randint(-5, 5) for _ in range(nc)] for _ in range(nr)]
        assert rank_int(mat) == fraction_rank_oracle(mat), mat


def test_rank_int_degenerate():
    assert rank_int([]) == 0
    assert rank_int([[0, 0], [0, 0]]) == 0
    assert rank_int([[1, 2], [2, 4]]) == 1


def test_rank_rational_clears_denominators():
    rows = [[Fraction(1, 2), Fraction(1, 3)], [Fraction(1, 2), Fraction(1, 1)]]
    assert rank_rational(rows) == 2
    rows = [[Fraction(1, 2), Fraction(1, 4)], [Fraction(2), Fraction(1)]]
    assert rank_rational(rows) == 1


def test_smith_matches_sympy():
    from sympy.matrices.normalforms import smith_normal_form
    rng = random.Random(11)
    for trial in range(40):
        nr = rng.randint(1, 5)
        nc = rng.randint(1, 5)
        mat = [[rng.randint(-4, 4) for _ in range(nc)] for _ in range(nr)]
        got = [f for f in smith_invariant_factors(mat) if f]
        sm = smith_normal_form(sympy.Matrix(mat))
        expected = sorted(abs(int(sm[t, t])) for t in range(min(sm.shape))
                          if sm[t, t] != 0)
        assert got == expected, (mat, got, expected)


def test_smith_known_values():
    assert smith_invariant_factors([[2, 0], [0, 3]]) == [1, 6]
    assert smith_invariant_factors([[2, 4], [4, 8]]) == [2]
    assert smith_invariant_factors([[0, 0], [0, 0]]) == []


def _rank_oracle_mod(mat, p):
    """Largest k with a nonsingular k x k submatrix mod p."""
    mat = np.asarray(mat) % p
    nr, nc = mat.shape
    import itertools
    best = 0
    for k in range(1, min(nr, nc) + 1):
        found = False
        for rows in itertools.combinations(range(nr), k):
            for cols in itertools.combinations(range(nc), k):
                sub = sympy.Matrix(mat[np.ix_(rows, cols)].tolist())
                if int(sub.det()) % p:
                    found = True
                    break
            if found:
                break
        if found:
            best = k
    return best


def test_rank_mod_matches_determinant_oracle():
    rng = np.random.default_rng(3)
    for p in (2, 3, 5):
        for _ in range(15):
            mat = rng.integers(0, p, size=(4, 4))
            assert rank_mod(mat, p) == _rank_oracle_mod(mat, p)


def test_rref_mod_idempotent_and_pivots():
    rng = np.random.default_rng(5)
    for p in (2, 3, 5):
        for _ in range(20):
            mat = rng.integers(0, p, size=(3, 5))
            red, rank, pivots = rref_mod(mat, p)
            red2, rank2, pivots2 = rref_mod(red, p)
            assert np.array_equal(red, red2)
            assert rank == rank2 and pivots == pivots2
            assert rank == len(pivots)


def test_nullspace_mod():
    a = np.array([[1, 2, 0], [0, 0, 1]])
    basis = nullspace_mod(a, 3)
    assert basis.shape[0] == 1
    assert not ((a @ basis.T) % 3).any()


def test_exact_solver_unique_solution():
    a = [[1, 0], [1, 1], [0, 2]]
    solver = ExactSolver(a)
    assert solver.columns_independent
    x = solver.solve({0: Fraction(3), 1: Fraction(5), 2: Fraction(4)})
    assert x == [Fraction(3), Fraction(2)]
    with pytest.raises(ValueError):
        solver.solve({0: Fraction(1), 1: Fraction(0), 2: Fraction(1)})


def test_kernel_dimensions_match():
    a = [[1, 0], [0, 1], [1, 1]]
    b = [[2, 0], [0, 2], [2, 2]]
    assert kernel_dimensions_match(a, b)
    c = [[1, 0], [0, 1], [0, 0]]
    assert not kernel_dimensions_match(a, c)
