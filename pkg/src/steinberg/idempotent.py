"""The Steinberg idempotent calculus.

Everything revolves around the two group-algebra elements built from the
signed permutation sum S and the Borel sum B of GL_n(F_p):

    e  = (1/c) S B      (the Steinberg idempotent)
    e' = (1/c) B S      (the conjugate idempotent)

with c = c(n, p) the unit making them idempotent.  All checks here are exact:
scaled integer arithmetic wherever a denominator can be cleared, Fractions
otherwise.  Rank-of-summand computations exploit that the trace of a verified
idempotent matrix over the rationals equals its rank.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .algebra import (AlgebraElement, FiniteGroup, Integers, MatModule,
                      PermModule, PLocalRationals, PrimeField, Ring, ZZ, act,
                      act_exact, act_mod, block_tensor, borel_sum, gl_group,
                      shuffle_sum, signed_permutation_sum, steinberg_constant,
                      tensor_module, unipotent_block_sum)
from .exact import ExactSolver, rank_int, rank_mod, rank_rational
from .gf import GFMatrix, identity, permutation_matrix


@dataclass
class SteinbergIdempotent:
    n: int
    p: int
    ring: Ring
    element: AlgebraElement
    conjugate: bool = False


@dataclass
class SummandBasis:
    """An explicit basis of the image of an idempotent acting on a module."""
    rank: int
    basis: list  # columns, each a list of Fractions
    module_dim: int


def steinberg_integer_element(n: int, p: int, conjugate: bool = False,
                              group: FiniteGroup | None = None,
                              ring: Ring = ZZ) -> AlgebraElement:
    """S B (or B S when conjugate), with integer coefficients by default."""
    g = group if group is not None else gl_group(n, p)
    s = signed_permutation_sum(n, p, g, ring)
    b = borel_sum(n, p, g, ring)
    return (b * s) if conjugate else (s * b)


def steinberg_idempotent(n: int, p: int, ring: Ring | None = None,
                         conjugate: bool = False) -> SteinbergIdempotent:
    """The idempotent (1/c) S B in the chosen ring; PrimeField(p) works because
    c is coprime to p.  Integer coefficients are refused: c is not a unit."""
    if ring is None:
        ring = PLocalRationals(p)
    if isinstance(ring, Integers):
        raise ValueError("c(n, p) is not invertible over the integers")
    if isinstance(ring, (PLocalRationals, PrimeField)) and ring.p != p:
        raise ValueError("ring characteristic does not match p")
    c = steinberg_constant(n, p)
    sb = steinberg_integer_element(n, p, conjugate=conjugate, ring=ring)
    elem = sb.scale(ring.invert(c))
    return SteinbergIdempotent(n, p, ring, elem, conjugate)


def conjugate_steinberg_idempotent(n: int, p: int, ring: Ring | None = None) -> SteinbergIdempotent:
    return steinberg_idempotent(n, p, ring, conjugate=True)


def fp_reduction_matches(n: int, p: int) -> bool:
    """Reducing the p-local idempotent mod p gives the idempotent built
    directly in F_p (reduction commutes with construction)."""
    over_q = steinberg_idempotent(n, p, PLocalRationals(p)).element
    over_fp = steinberg_idempotent(n, p, PrimeField(p)).element
    return over_q.to_ring(PrimeField(p)) == over_fp


# ---------------------------------------------------------------------------
# Core identity checks

def _first_difference(x: AlgebraElement, y: AlgebraElement):
    keys = sorted(x.support() | y.support(), key=lambda g: g.a.tobytes())
    for g in keys:
        if x.coeff(g) != y.coeff(g):
            return {"element": g.a.tolist(), "lhs": str(x.coeff(g)), "rhs": str(y.coeff(g))}
    return None


def steinberg_lemma_check(n: int, p: int) -> dict:
    """S B S B = c . S B, exactly, with integer coefficients."""
    sb = steinberg_integer_element(n, p)
    c = steinberg_constant(n, p)
    lhs = sb * sb
    rhs = sb.scale(c)
    ok = lhs == rhs
    witness = {"c": c, "support_size": len(sb.coeffs), "ok": ok}
    if not ok:
        witness["first_difference"] = _first_difference(lhs, rhs)
    return witness


def idempotency_check(n: int, p: int, ring: Ring | None = None) -> dict:
    """e^2 = e computed literally in the given ring (default p-local rationals)."""
    e = steinberg_idempotent(n, p, ring).element
    ok = e * e == e
    out = {"n": n, "p": p, "ring": str(e.ring), "support_size": len(e.coeffs), "ok": ok}
    if not ok:
        out["first_difference"] = _first_difference(e * e, e)
    return out


def _box_int(sizes: list[int], p: int) -> AlgebraElement:
    """(c_{i_1}...c_{i_k}) * (e_{i_1} box ... box e_{i_k}) with int coefficients."""
    out = steinberg_integer_element(sizes[0], p)
    total = sizes[0]
    for s in sizes[1:]:
        piece = steinberg_integer_element(s, p)
        out = block_tensor(out, piece, gl_group(total + s, p))
        total += s
    return out


def shuffle_unipotent_product(i: int, j: int, p: int,
                              group: FiniteGroup | None = None) -> AlgebraElement:
    """The integer element (signed shuffle sum) . (unipotent block sum)."""
    g = group if group is not None else gl_group(i + j, p)
    return shuffle_sum(i, j, p, g) * unipotent_block_sum(i, j, p, g)


def product_identity_check(i: int, j: int, p: int) -> dict:
    """shuffle . U . (e_i box e_j) = (c_{i+j} / (c_i c_j)) e_{i+j}, exactly.

    Verified after clearing denominators: both sides times c_i c_j c_{i+j}
    have integer coefficients.
    """
    n = i + j
    ci, cj, cn = (steinberg_constant(k, p) for k in (i, j, n))
    scalar = Fraction(cn, ci * cj)
    lhs_int = shuffle_unipotent_product(i, j, p) * _box_int([i, j], p)  # = ci cj su (e box e)
    rhs_int = steinberg_integer_element(n, p)                           # = cn e_n
    ok = lhs_int == rhs_int
    out = {"i": i, "j": j, "p": p, "scalar": str(scalar), "ok": ok}
    if not ok:
        out["first_difference"] = _first_difference(lhs_int, rhs_int)
    return out


# ---------------------------------------------------------------------------
# Acting on modules: projectors, ranks, summand bases

_INT64_GUARD = 2 ** 61


def projector_int(n: int, p: int, module, conjugate: bool = False) -> np.ndarray:
    """Integer matrix of (S B) acting on the module (c times the projector)."""
    x = steinberg_integer_element(n, p, conjugate=conjugate)
    m = act_exact(x, module)
    arr = np.array(m, dtype=np.int64)
    if module.dim and abs(int(np.abs(arr).max())) ** 2 * module.dim >= _INT64_GUARD:
        raise OverflowError("projector entries too large for int64 verification")
    return arr


def summand_rank(n: int, p: int, module, conjugate: bool = False) -> int:
    """Rank over the rationals of the Steinberg projector on the module.

    The scaled projector m = c . P is verified idempotent-after-scaling
    (m @ m == c m, exact in int64), hence P is an idempotent matrix over Q and
    rank P = trace P = trace(m) / c.
    """
    c = steinberg_constant(n, p)
    m = projector_int(n, p, module, conjugate=conjugate)
    if module.dim == 0:
        return 0
    if not np.array_equal(m @ m, c * m):
        raise AssertionError("projector failed idempotency; module action is inconsistent")
    tr = int(np.trace(m))
    if tr % c:
        raise AssertionError("idempotent trace is not divisible by c")
    return tr // c


def summand_rank_mod(n: int, p: int, module, conjugate: bool = False) -> int:
    """Rank of the mod-p Steinberg projector on an F_p module."""
    e = steinberg_idempotent(n, p, PrimeField(p), conjugate=conjugate).element
    return int(rank_mod(act_mod(e, module, p), p))


def summand(n: int, p: int, module, conjugate: bool = False) -> SummandBasis:
    """Explicit basis of the image e M, as columns fixed by the projector."""
    c = steinberg_constant(n, p)
    m = projector_int(n, p, module, conjugate=conjugate)
    rank = summand_rank(n, p, module, conjugate=conjugate)
    basis = []
    seen = []
    for col in range(module.dim):
        v = m[:, col]
        if not v.any():
            continue
        cand = seen + [list(map(int, v))]
        if rank_int(cand) > len(seen):
            seen = cand
            basis.append([Fraction(int(x), c) for x in v])
        if len(basis) == rank:
            break
    if len(basis) != rank:
        raise AssertionError("failed to extract a basis of the summand")
    # fixedness: m @ v = c v for each basis column (v in the image of P)
    for v in basis:
        num = np.array([int(x * c) for x in v], dtype=np.int64)
        if not np.array_equal(m @ num, c * num):
            raise AssertionError("summand basis vector not fixed by the idempotent")
    return SummandBasis(rank, basis, module.dim)


def conjugate_iso_check(n: int, p: int, module) -> dict:
    """The map eM -> e'M applies B, the map e'M -> eM applies S; each lands in
    the stated summand, the composites are multiplication by c on each side,
    and the two summands have equal rank."""
    c = steinberg_constant(n, p)
    group = gl_group(n, p)
    ms = np.array(act_exact(signed_permutation_sum(n, p, group), module), dtype=object)
    mb = np.array(act_exact(borel_sum(n, p, group), module), dtype=object)
    m = ms @ mb    # matrix of S B  (c times the Steinberg projector)
    mc = mb @ ms   # matrix of B S
    r = summand_rank(n, p, module)
    rc = summand_rank(n, p, module, conjugate=True)
    bm = mb @ m    # image of the forward map on columns of m
    sm = ms @ mc
    fwd_lands = np.array_equal(mc @ bm, c * bm)   # B.(eM) is fixed by e'
    bwd_lands = np.array_equal(m @ sm, c * sm)    # S.(e'M) is fixed by e
    comp_e = np.array_equal(ms @ bm, c * m)       # S B on eM = c . id
    comp_ec = np.array_equal(mb @ sm, c * mc)     # B S on e'M = c . id
    ok = (r == rc) and fwd_lands and bwd_lands and comp_e and comp_ec
    return {"n": n, "p": p, "rank": r, "conjugate_rank": rc,
            "forward_lands": fwd_lands, "backward_lands": bwd_lands,
            "composite_on_summand": comp_e, "composite_on_conjugate": comp_ec,
            "ok": ok}


# ---------------------------------------------------------------------------
# The Steinberg module St_n = (left ideal generated by e_n), explicitly

def steinberg_module_exact(n: int, p: int) -> MatModule:
    """St_n over the rationals, in a basis chosen from the spanning set
    {g . S B : g in GL_n}.  The left action is expressed in that basis."""
    group = gl_group(n, p)
    sb = steinberg_integer_element(n, p)
    size = len(group)
    vecs = {}
    for g in group:
        row = [0] * size
        for h, coeff in sb.coeffs.items():
            row[group.index[group.mul(g, h)]] += coeff
        vecs[g] = row
    target_rank = p ** (n * (n - 1) // 2)
    basis_elems = []
    basis_rows = []
    for g in group:
        cand = basis_rows + [vecs[g]]
        if rank_int(cand) > len(basis_rows):
            basis_rows = cand
            basis_elems.append(g)
        if len(basis_elems) == target_rank:
            break
    if len(basis_elems) != target_rank:
        raise AssertionError("Steinberg module spanning set has unexpected rank")
    solver = ExactSolver([[basis_rows[t][i] for t in range(target_rank)]
                          for i in range(size)])
    coords = {}
    for g in group:
        rhs = {i: Fraction(v) for i, v in enumerate(vecs[g]) if v}
        coords[g] = solver.solve(rhs)
    mats = {}
    for g in group:
        cols = [coords[group.mul(g, bt)] for bt in basis_elems]
        mats[g] = [[cols[t][i] for t in range(target_rank)] for i in range(target_rank)]
    return MatModule(group, target_rank, mats, None, name=f"St_{n}(F_{p})")


def coinvariants_iso_check(n: int, p: int, module) -> dict:
    """rank(e M) equals the rank of the coinvariants (St (x) M)_{GL_n},
    computed as dim - rank of the span of {g.x - x}."""
    st = steinberg_module_exact(n, p)
    tens = tensor_module(st, module, None)
    group = tens.group
    dim = tens.dim
    rows = []
    for g in group:
        mat = tens.matrix_exact(g)
        for j in range(dim):
            row = [mat[i][j] - (1 if i == j else 0) for i in range(dim)]
            if any(row):
                rows.append(row)
    relations_rank = rank_rational(rows) if rows else 0
    coinv = dim - relations_rank
    r = summand_rank(n, p, module)
    return {"n": n, "p": p, "summand_rank": r, "coinvariants_rank": coinv,
            "ok": r == coinv}


# ---------------------------------------------------------------------------
# Retraction, associativity, commutativity of the product maps

def retraction_check(i: int, j: int, p: int, module) -> dict:
    """Scaling into the box summand and projecting back is the identity on
    e_{i+j} M.  The map into the box summand is (c_i c_j / c_n)(e_i box e_j);
    with integer matrices F1 = matrix of (c_i c_j)(e_i box e_j), F2 = matrix
    of shuffle.U, and E = matrix of c_n e_n, the composite is (1/c_n) F2 F1,
    so the claim is F2 F1 E = c_n . E.
    """
    n = i + j
    cn = steinberg_constant(n, p)
    f1 = np.array(act_exact(_box_int([i, j], p), module), dtype=object)
    f2 = np.array(act_exact(shuffle_unipotent_product(i, j, p), module), dtype=object)
    e = np.array(act_exact(steinberg_integer_element(n, p), module), dtype=object)
    lhs = f2 @ (f1 @ e)
    rhs = cn * e
    ok = np.array_equal(lhs, rhs)
    out = {"i": i, "j": j, "p": p, "module": getattr(module, "name", ""),
           "summand_rank": summand_rank(n, p, module), "ok": ok}
    return out


def assoc_check(i: int, j: int, k: int, p: int, module) -> dict:
    """Both composites from (e_i box e_j box e_k)M to e_{i+j+k}M agree."""
    n = i + j + k
    g_n = gl_group(n, p)
    one = AlgebraElement.delta(gl_group(k, p), identity(k, p))
    one_i = AlgebraElement.delta(gl_group(i, p), identity(i, p))
    w1 = block_tensor(shuffle_unipotent_product(i, j, p), one, g_n)
    w2 = shuffle_unipotent_product(i + j, k, p, g_n)
    w1b = block_tensor(one_i, shuffle_unipotent_product(j, k, p), g_n)
    w2b = shuffle_unipotent_product(i, j + k, p, g_n)
    e3 = np.array(act_exact(_box_int([i, j, k], p), module), dtype=object)
    path1 = np.array(act_exact(w2 * w1, module), dtype=object) @ e3
    path2 = np.array(act_exact(w2b * w1b, module), dtype=object) @ e3
    ok = np.array_equal(path1, path2)
    return {"i": i, "j": j, "k": k, "p": p, "ok": ok}


def rotation_shuffle(i: int, j: int, p: int) -> GFMatrix:
    """The shuffle permutation matrix increasing every position by j mod i+j."""
    n = i + j
    return permutation_matrix([(a + j) % n for a in range(n)], p)


def comm_check(i: int, j: int, p: int, module) -> dict:
    """Commutativity of the product through the rotation shuffle sigma
    (position a goes to a + j mod i+j), verified as exact matrix identities:

    1. conjugation: e_i box e_j = sigma^(-1) (e_j box e_i) sigma;
    2. left multiplication by sigma maps (e_i box e_j)M into (e_j box e_i)M
       and composes with sigma^(-1) to the identity (inverse isomorphisms);
    3. sigma acts on e_{i+j}M as the scalar sign(sigma) = (-1)^(ij), which is
       the canonical identification that makes the triangle close;
    4. the triangle through the summand inclusions: sigma . f_ij = sign . f_ji
       as maps out of e_{i+j}M;
    5. the full composite (project after rotate after include) is sign . c_n
       times the identity on e_{i+j}M.

    Note: the projection triangle with a bare left multiplication by sigma and
    no sign does not close; the sign is forced by identity 3.
    """
    n = i + j
    g_n = gl_group(n, p)
    cn = steinberg_constant(n, p)
    cicj = steinberg_constant(i, p) * steinberg_constant(j, p)
    sigma = rotation_shuffle(i, j, p)
    sign = (-1) ** (i * j)
    d_sigma = AlgebraElement.delta(g_n, sigma)
    d_sigma_inv = AlgebraElement.delta(g_n, sigma.inv())
    box_ij = _box_int([i, j], p)
    box_ji = _box_int([j, i], p)
    element_identity = (d_sigma_inv * box_ji * d_sigma) == box_ij

    bij = np.array(act_exact(box_ij, module), dtype=object)
    bji = np.array(act_exact(box_ji, module), dtype=object)
    sig = np.array(act_exact(d_sigma, module), dtype=object)
    sig_inv = np.array(act_exact(d_sigma_inv, module), dtype=object)
    e = np.array(act_exact(steinberg_integer_element(n, p), module), dtype=object)
    w_ji = np.array(act_exact(shuffle_unipotent_product(j, i, p, g_n), module), dtype=object)

    sigma_image = sig @ bij
    lands = np.array_equal(bji @ sigma_image, cicj * sigma_image)
    inverse_iso = np.array_equal(sig_inv @ sigma_image, bij)
    sign_action = np.array_equal(sig @ e, sign * e)
    incl_triangle = np.array_equal(sig @ (bij @ e), sign * (bji @ e))
    # q_ji . sigma . f_ij = sign . id on the summand; f carries (c_i c_j / c_n)
    # and bij carries c_i c_j, so the cleared identity is W Sig Bij E = sign c_n E
    composite = np.array_equal(w_ji @ (sig @ (bij @ e)), (sign * cn) * e)
    ok = all([element_identity, lands, inverse_iso, sign_action,
              incl_triangle, composite])
    return {"i": i, "j": j, "p": p, "sign": sign,
            "conjugation_identity": element_identity,
            "sigma_maps_summands": lands, "inverse_iso": inverse_iso,
            "sign_action_on_target": sign_action,
            "inclusion_triangle": incl_triangle,
            "retraction_composite": composite, "ok": ok}


def assoc_comm_check(i: int, j: int, k: int | None, p: int, module) -> dict:
    if k is None:
        return comm_check(i, j, p, module)
    out = assoc_check(i, j, k, p, module)
    return out
