"""Flag complexes of F_p^n and their exact integer homology.

The order complex of the poset of proper nonzero subspaces ("B mode") is a
wedge of p^binom(n,2) spheres of dimension n-2; the suspension variant
("BDiamond" mode) allows flags that touch 0 or the whole space but not both
and concentrates the same rank one degree higher.  Homology is computed over
the integers by Smith normal form; reduced homology includes the augmentation
so the empty complex has rank 1 in degree -1.

Also here: the explicit top-degree cycles attached to invertible matrices,
transverse flag bases, the identification of top homology with the span of
the Steinberg elements, the join product on suspension complexes (computed
through the canonical chain-level construction on the product poset), the
parabolic span surjectivity check, and the unipotent fixed-subposet
contractibility checks.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .algebra import AlgebraElement, FiniteGroup, PermModule, ZZ, gl_group
from .exact import (ExactSolver, kernel_dimensions_match, rank_int, rank_mod,
                    nullspace_mod, smith_invariant_factors)
from .gf import (GFMatrix, Subspace, check_prime, enumerate_subspaces,
                 general_linear, identity, parabolic, perm_sign)
from .idempotent import steinberg_constant, steinberg_integer_element


# ---------------------------------------------------------------------------
# Order complexes

class OrderComplex:
    """Simplicial complex of chains in a finite poset of subspaces.

    Simplices are tuples of vertex indices, each a strictly increasing chain,
    ordered by increasing dimension (that fixes the orientation).
    """

    def __init__(self, vertices: list[Subspace], allowed_chain=None, name: str = ""):
        self.vertices = sorted(vertices, key=Subspace.sort_key)
        self.vertex_index = {v: i for i, v in enumerate(self.vertices)}
        self.name = name
        nv = len(self.vertices)
        less = [[False] * nv for _ in range(nv)]
        for i, a in enumerate(self.vertices):
            for k, b in enumerate(self.vertices):
                if a.dim < b.dim and a <= b:
                    less[i][k] = True
        self.less = less
        self.simplices: list[list[tuple[int, ...]]] = []
        self.simplex_index: list[dict[tuple[int, ...], int]] = []
        chains: list[tuple[int, ...]] = [(i,) for i in range(nv)]
        while chains:
            if allowed_chain is not None:
                kept = [c for c in chains if allowed_chain([self.vertices[i] for i in c])]
            else:
                kept = list(chains)
            kept.sort()
            self.simplices.append(kept)
            self.simplex_index.append({c: i for i, c in enumerate(kept)})
            chains = [c + (k,) for c in chains for k in range(nv) if less[c[-1]][k]]

    @property
    def dimension(self) -> int:
        return len(self.simplices) - 1

    def n_simplices(self, k: int) -> int:
        if k < 0 or k > self.dimension:
            return 0
        return len(self.simplices[k])


def build_flag_complex(n: int, p: int, mode: str = "B",
                       fixed_under: list[GFMatrix] | None = None) -> OrderComplex:
    """The flag complex of F_p^n.

    mode "B": vertices are proper nonzero subspaces, simplices all flags.
    mode "BDiamond": vertices also include 0 and the whole space; flags which
    contain both are excluded (the unreduced suspension of the B complex).
    mode "Fixed": like "B" but restricted to subspaces invariant under every
    matrix in fixed_under.
    """
    check_prime(p)
    if n < 1:
        raise ValueError("ambient dimension must be positive")
    proper = [w for w in enumerate_subspaces(n, p) if 0 < w.dim < n]
    if mode == "B":
        return OrderComplex(proper, name=f"B_{n}(F_{p})")
    if mode == "BDiamond":
        verts = [Subspace.zero(n, p)] + proper + [Subspace.full(n, p)]

        def allowed(chain):
            return not (chain[0].dim == 0 and chain[-1].dim == n)

        return OrderComplex(verts, allowed_chain=allowed, name=f"Bdiamond_{n}(F_{p})")
    if mode == "Fixed":
        mats = fixed_under or []
        verts = [w for w in proper
                 if all(w.apply(g) == w for g in mats)]
        return OrderComplex(verts, name=f"B_{n}(F_{p})^fixed")
    raise ValueError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# Chain complexes and homology

@dataclass
class ChainComplex:
    """Boundary matrices over the integers; dims[k] is the rank of C_k.

    boundaries[k] maps C_k -> C_{k-1} and has shape (dims[k-1], dims[k]); for
    reduced complexes boundaries[0] is the augmentation row into C_{-1} = Z.
    """
    dims: list[int]
    boundaries: dict[int, np.ndarray]
    reduced: bool = True

    def verify_boundary_squares_to_zero(self) -> None:
        for k in sorted(self.boundaries):
            if k - 1 in self.boundaries:
                prod = self.boundaries[k - 1] @ self.boundaries[k]
                if prod.size and prod.any():
                    raise AssertionError(f"boundary squared nonzero in degree {k}")


def boundary_of_simplex(simplex: tuple[int, ...]):
    for t in range(len(simplex)):
        yield (-1) ** t, simplex[:t] + simplex[t + 1:]


def chain_complex(complex_: OrderComplex, reduced: bool = True) -> ChainComplex:
    dims = [complex_.n_simplices(k) for k in range(complex_.dimension + 1)]
    boundaries: dict[int, np.ndarray] = {}
    for k in range(1, complex_.dimension + 1):
        mat = np.zeros((dims[k - 1], dims[k]), dtype=np.int64)
        index = complex_.simplex_index[k - 1]
        for col, simplex in enumerate(complex_.simplices[k]):
            for sign, face in boundary_of_simplex(simplex):
                mat[index[face], col] += sign
        boundaries[k] = mat
    if reduced and dims:
        boundaries[0] = np.ones((1, dims[0]), dtype=np.int64)
    cc = ChainComplex(dims, boundaries, reduced=reduced)
    cc.verify_boundary_squares_to_zero()
    return cc


@dataclass
class HomologyResult:
    """free_rank[k] and torsion[k] per degree; degree -1 appears for reduced
    homology of the empty complex."""
    free_rank: dict[int, int]
    torsion: dict[int, list[int]]

    def nonzero_degrees(self):
        return sorted(set(k for k, r in self.free_rank.items() if r)
                      | set(k for k, t in self.torsion.items() if t))


def homology(cc: ChainComplex) -> HomologyResult:
    """Smith-normal-form homology of an integer chain complex."""
    top = len(cc.dims) - 1
    if top < 0:
        # empty complex: reduced homology is Z in degree -1
        if cc.reduced:
            return HomologyResult({-1: 1}, {})
        return HomologyResult({}, {})
    ranks = {}
    factors = {}
    for k, mat in cc.boundaries.items():
        if mat.size == 0:
            ranks[k] = 0
            factors[k] = []
            continue
        inv = smith_invariant_factors(mat.tolist())
        inv = [f for f in inv if f != 0]
        ranks[k] = len(inv)
        factors[k] = inv
    free = {}
    torsion = {}
    low = -1 if cc.reduced else 0
    for k in range(low, top + 1):
        dim_k = cc.dims[k] if k >= 0 else (1 if cc.reduced else 0)
        rank_in = ranks.get(k, 0) if k >= 0 else 0
        rank_out = ranks.get(k + 1, 0)
        free[k] = dim_k - rank_in - rank_out
        tor = [f for f in factors.get(k + 1, []) if abs(f) > 1]
        if tor:
            torsion[k] = tor
    return HomologyResult(free, {k: v for k, v in torsion.items() if v})


def flag_homology(n: int, p: int, mode: str = "B") -> HomologyResult:
    if n == 1 and mode == "B":
        # no proper nonzero subspaces: the empty complex
        return HomologyResult({-1: 1}, {})
    return homology(chain_complex(build_flag_complex(n, p, mode)))


def export_chain_complex(cc: ChainComplex, path) -> None:
    """Plain-text dump: one header line per degree (degree, rows, cols)
    followed by nonzero entry triples (row, col, value)."""
    with open(path, "w", encoding="utf-8") as fh:
        for k in sorted(cc.boundaries):
            mat = cc.boundaries[k]
            fh.write(f"degree {k} rows {mat.shape[0]} cols {mat.shape[1]}\n")
            rows, cols = np.nonzero(mat)
            for r, c in zip(rows.tolist(), cols.tolist()):
                fh.write(f"{r} {c} {int(mat[r, c])}\n")


def read_chain_complex(path) -> dict[int, np.ndarray]:
    """Inverse of export_chain_complex (matrices only)."""
    out: dict[int, np.ndarray] = {}
    current = None
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "degree":
                k, rows, cols = int(parts[1]), int(parts[3]), int(parts[5])
                out[k] = np.zeros((rows, cols), dtype=np.int64)
                current = k
            else:
                r, c, v = int(parts[0]), int(parts[1]), int(parts[2])
                out[current][r, c] = v
    return out


# ---------------------------------------------------------------------------
# Steinberg cycles in the top degree

def flag_simplex(complex_: OrderComplex, flag) -> tuple[int, ...]:
    return tuple(complex_.vertex_index[w] for w in flag)


def steinberg_cycle(complex_: OrderComplex, m: GFMatrix) -> dict[tuple[int, ...], int]:
    """The signed sum of the column-prefix flags of m over all column orders:
    a cycle in the top degree of the B-mode complex."""
    if not m.is_invertible():
        raise ValueError("steinberg_cycle needs an invertible matrix")
    n = m.rows
    chain: dict[tuple[int, ...], int] = {}
    cols = m.a.T
    for perm in itertools.permutations(range(n)):
        flag = tuple(Subspace.span(cols[list(perm[: k + 1])], m.p, n)
                     for k in range(n - 1))
        simplex = flag_simplex(complex_, flag)
        chain[simplex] = chain.get(simplex, 0) + perm_sign(perm)
    return {s: c for s, c in chain.items() if c}


def diamond_steinberg_cycle(complex_: OrderComplex, m: GFMatrix) -> dict[tuple[int, ...], int]:
    """The suspension cycle in the BDiamond complex: (-1)^(n-1) (cone to the
    whole space) minus (cone to 0) over the column-prefix flags of m."""
    if not m.is_invertible():
        raise ValueError("diamond cycle needs an invertible matrix")
    n = m.rows
    p = m.p
    zero = Subspace.zero(n, p)
    full = Subspace.full(n, p)
    chain: dict[tuple[int, ...], int] = {}
    cols = m.a.T
    sign_top = (-1) ** (n - 1)
    for perm in itertools.permutations(range(n)):
        s = perm_sign(perm)
        flag = tuple(Subspace.span(cols[list(perm[: k + 1])], m.p, n)
                     for k in range(n - 1))
        top_simplex = flag_simplex(complex_, flag + (full,))
        bot_simplex = flag_simplex(complex_, (zero,) + flag)
        chain[top_simplex] = chain.get(top_simplex, 0) + sign_top * s
        chain[bot_simplex] = chain.get(bot_simplex, 0) - s
    return {s: c for s, c in chain.items() if c}


def chain_boundary(complex_: OrderComplex, k: int,
                   chain: dict[tuple[int, ...], int]) -> dict[tuple[int, ...], int]:
    out: dict[tuple[int, ...], int] = {}
    for simplex, coeff in chain.items():
        for sign, face in boundary_of_simplex(simplex):
            out[face] = out.get(face, 0) + sign * coeff
    return {s: c for s, c in out.items() if c}


def vertex_permutation(complex_: OrderComplex, g: GFMatrix) -> list[int]:
    """The permutation g induces on the vertex list."""
    return [complex_.vertex_index[v.apply(g)] for v in complex_.vertices]


def apply_group_element(complex_: OrderComplex, g: GFMatrix,
                        chain: dict[tuple[int, ...], int],
                        perm: list[int] | None = None) -> dict[tuple[int, ...], int]:
    """Push a chain forward along the simplicial action of g (dimension is
    preserved, so the chain order is preserved and no signs appear)."""
    if perm is None:
        perm = vertex_permutation(complex_, g)
    out: dict[tuple[int, ...], int] = {}
    for simplex, coeff in chain.items():
        image = tuple(perm[i] for i in simplex)
        out[image] = out.get(image, 0) + coeff
    return out


def chain_vector(complex_: OrderComplex, k: int, chain: dict) -> list[int]:
    vec = [0] * complex_.n_simplices(k)
    index = complex_.simplex_index[k]
    for simplex, coeff in chain.items():
        vec[index[simplex]] = coeff
    return vec


def cycle_span_rank(n: int, p: int) -> int:
    """Rank over Q of the span of all top-degree Steinberg cycles."""
    complex_ = build_flag_complex(n, p, "B")
    rows = [chain_vector(complex_, n - 2, steinberg_cycle(complex_, m))
            for m in general_linear(n, p)]
    return rank_int(rows)


def cycles_check(n: int, p: int, exhaustive_equivariance: bool = True) -> dict:
    """Boundary vanishing, equivariance g.s_m = s_(gm), and span rank of the
    top-degree cycles."""
    group = gl_group(n, p)
    complex_ = build_flag_complex(n, p, "B")
    top = n - 2
    cycles = {m: steinberg_cycle(complex_, m) for m in group}
    for m, ch in cycles.items():
        if chain_boundary(complex_, top, ch):
            return {"ok": False, "failure": "nonzero boundary",
                    "witness": m.a.tolist()}
    gs = group.elements if exhaustive_equivariance else group.generators
    for g in gs:
        perm = vertex_permutation(complex_, g)
        for m in group:
            if apply_group_element(complex_, g, cycles[m], perm) != cycles[group.mul(g, m)]:
                return {"ok": False, "failure": "equivariance",
                        "witness": [g.a.tolist(), m.a.tolist()]}
    rows = [chain_vector(complex_, top, cycles[m]) for m in group]
    rank = rank_int(rows)
    expected = p ** (n * (n - 1) // 2)
    return {"n": n, "p": p, "span_rank": rank, "expected_rank": expected,
            "equivariance": "all elements" if exhaustive_equivariance else "generators",
            "ok": rank == expected}


# ---------------------------------------------------------------------------
# Transverse flags

def is_transverse(flag, reference, n: int) -> bool:
    """W_i meets F_(n-i) trivially for i = 1..n-1 (dimension counting via the
    rank of stacked bases)."""
    for i in range(1, n):
        w = flag[i - 1]
        f = reference[n - i - 1]
        stacked = np.concatenate([w.basis.a, f.basis.a])
        if rank_mod(stacked, w.p) < n:
            return False
    return True


def transverse_flags(reference, n: int, p: int) -> list:
    """All complete flags transverse to the reference complete flag."""
    from .gf import complete_flags
    if len(reference) != n - 1:
        raise ValueError("reference must be a complete flag")
    return [f for f in complete_flags(n, p) if is_transverse(f, reference, n)]


def matrix_from_transverse_flag(flag, reference, n: int, p: int) -> GFMatrix:
    """Pick w_i spanning W_i meet F_(n-i+1), with F_n the whole space; the
    intersection is exactly one-dimensional for a transverse flag.  The matrix
    with columns w_i has column-prefix flag equal to the input flag."""
    full = Subspace.full(n, p)
    ref = list(reference) + [full]
    cols = []
    for i in range(1, n + 1):
        w = flag[i - 1] if i < n else full
        f = ref[n - i]  # dimension n-i+1, 1-indexed F_(n-i+1)
        inter = w.intersect(f)
        if inter.dim != 1:
            raise AssertionError("transverse intersection is not a line")
        cols.append(inter.basis.a[0])
    return GFMatrix(np.stack(cols, axis=1), p)


def transverse_basis_check(n: int, p: int) -> dict:
    """Count of transverse flags is p^binom(n,2), and the cycles built from
    them hit exactly their own flag among the transverse ones (the coordinate
    matrix on transverse flags is the identity)."""
    from .gf import complete_flags
    reference = complete_flags(n, p)[0]
    trans = transverse_flags(reference, n, p)
    expected = p ** (n * (n - 1) // 2)
    complex_ = build_flag_complex(n, p, "B")
    trans_simplices = [flag_simplex(complex_, f) for f in trans]
    ok_count = len(trans) == expected
    ok_triangular = True
    witness = None
    for idx, flag in enumerate(trans):
        m = matrix_from_transverse_flag(flag, reference, n, p)
        cyc = steinberg_cycle(complex_, m)
        row = [cyc.get(s, 0) for s in trans_simplices]
        expected_row = [1 if t == idx else 0 for t in range(len(trans))]
        if row != expected_row:
            ok_triangular = False
            witness = flag_simplex(complex_, flag)
            break
    return {"n": n, "p": p, "count": len(trans), "expected": expected,
            "identity_on_transverse_block": ok_triangular,
            "witness": witness, "ok": ok_count and ok_triangular}


# ---------------------------------------------------------------------------
# Top homology as a module: the span of cycles matches the span of the
# Steinberg elements, with the same linear relations

def _steinberg_vectors(n: int, p: int) -> tuple[FiniteGroup, dict]:
    group = gl_group(n, p)
    sb = steinberg_integer_element(n, p)
    vecs = {}
    for g in group:
        row = [0] * len(group)
        for h, coeff in sb.coeffs.items():
            row[group.index[group.mul(g, h)]] += coeff
        vecs[g] = row
    return group, vecs


def top_homology_module_check(n: int, p: int, diamond: bool = False) -> dict:
    """The correspondence m.SB <-> s_m is a module isomorphism: the two
    spanning sets have identical linear relations (equal row kernels), equal
    rank p^binom(n,2), and the group action matrices agree on generators in
    the corresponding bases."""
    group, alg_vecs = _steinberg_vectors(n, p)
    if diamond:
        complex_ = build_flag_complex(n, p, "BDiamond")
        top = n - 1
        cycles = {m: diamond_steinberg_cycle(complex_, m) for m in group}
    else:
        complex_ = build_flag_complex(n, p, "B")
        top = n - 2
        cycles = {m: steinberg_cycle(complex_, m) for m in group}
    topo_vecs = {m: chain_vector(complex_, top, cycles[m]) for m in group}
    order = list(group.elements)
    a_rows = [alg_vecs[g] for g in order]
    b_rows = [topo_vecs[g] for g in order]
    same_kernel = kernel_dimensions_match(a_rows, b_rows)
    rank = rank_int(a_rows)
    expected = p ** (n * (n - 1) // 2)
    # shared basis: greedy independent subset of the algebra vectors
    basis_elems = []
    basis_rows: list[list[int]] = []
    for g in order:
        cand = basis_rows + [alg_vecs[g]]
        if rank_int(cand) > len(basis_rows):
            basis_rows = cand
            basis_elems.append(g)
        if len(basis_elems) == rank:
            break
    alg_solver = ExactSolver([[alg_vecs[b][i] for b in basis_elems]
                              for i in range(len(group))])
    topo_solver = ExactSolver([[topo_vecs[b][i] for b in basis_elems]
                               for i in range(complex_.n_simplices(top))])
    actions_match = True
    witness = None
    for g in group.generators:
        for b in basis_elems:
            gb = group.mul(g, b)
            ca = alg_solver.solve({i: Fraction(v) for i, v in enumerate(alg_vecs[gb]) if v})
            ct = topo_solver.solve({i: Fraction(v) for i, v in enumerate(topo_vecs[gb]) if v})
            if ca != ct:
                actions_match = False
                witness = (g.a.tolist(), b.a.tolist())
                break
        if not actions_match:
            break
    ok = same_kernel and rank == expected and actions_match
    return {"n": n, "p": p, "rank": rank, "expected": expected,
            "same_relations": same_kernel, "actions_match": actions_match,
            "witness": witness, "diamond": diamond, "ok": ok}


# ---------------------------------------------------------------------------
# Join product on suspension complexes, computed canonically

def _shuffle_interleavings(a: int, b: int):
    """All ways to interleave a+1 'left' steps and b+1 'right' steps ...
    actually: lattice paths from (0,0) to (a,b): sequences of moves, with the
    sign of the corresponding (a,b)-shuffle."""
    for positions in itertools.combinations(range(a + b), a):
        moves = ["L" if t in positions else "R" for t in range(a + b)]
        perm = list(positions) + [t for t in range(a + b) if t not in positions]
        yield moves, perm_sign(perm)


def ez_product(x_simplex: tuple, y_simplex: tuple):
    """Eilenberg-Zilber shuffle product of two poset chains (given as tuples
    of poset elements): the signed staircase chains in the product poset."""
    a = len(x_simplex) - 1
    b = len(y_simplex) - 1
    for moves, sign in _shuffle_interleavings(a, b):
        path = [(x_simplex[0], y_simplex[0])]
        i = j = 0
        for mv in moves:
            if mv == "L":
                i += 1
            else:
                j += 1
            path.append((x_simplex[i], y_simplex[j]))
        yield tuple(path), sign


class ProductDiamond:
    """The chain model for the product of two suspension flag complexes.

    Poset: pairs (U, W), U a subspace of the left factor, W of the right.
    Simplices: chains whose left projection or right projection avoids
    touching both ends of its factor (the union of the two half products).
    The map (U, W) -> U + shifted(W) is simplicial into the big suspension
    complex.
    """

    def __init__(self, i: int, j: int, p: int):
        self.i, self.j, self.p = i, j, p
        n = i + j
        self.n = n
        left = enumerate_subspaces(i, p)
        right = enumerate_subspaces(j, p)
        self.pairs = [(u, w) for u in left for w in right]
        self.pair_index = {pw: t for t, pw in enumerate(self.pairs)}
        self.target = build_flag_complex(n, p, "BDiamond")

        def proj_diamond_ok(chain, side):
            vals = [pw[side] for pw in chain]
            dims = {v.dim for v in vals}
            touches_zero = 0 in dims
            touches_top = (self.i if side == 0 else self.j) in dims
            return not (touches_zero and touches_top)

        # enumerate chains in the product poset belonging to the union
        def leq(pw1, pw2):
            (u1, w1), (u2, w2) = pw1, pw2
            return (u1.dim <= u2.dim and w1.dim <= w2.dim
                    and (u1.dim, w1.dim) != (u2.dim, w2.dim)
                    and u1 <= u2 and w1 <= w2)

        nvp = len(self.pairs)
        self.less = [[leq(self.pairs[s], self.pairs[t]) for t in range(nvp)]
                     for s in range(nvp)]
        self.simplices: list[list[tuple[int, ...]]] = []
        self.simplex_index: list[dict] = []
        chains = [(t,) for t in range(nvp)]
        while chains:
            kept = []
            for c in chains:
                pc = [self.pairs[t] for t in c]
                if proj_diamond_ok(pc, 0) or proj_diamond_ok(pc, 1):
                    kept.append(c)
            kept.sort()
            self.simplices.append(kept)
            self.simplex_index.append({c: t for t, c in enumerate(kept)})
            chains = [c + (t,) for c in kept for t in range(nvp) if self.less[c[-1]][t]]
            if not chains:
                break

        self._in_a = [None] * len(self.simplices)
        self._in_b = [None] * len(self.simplices)
        for k, simps in enumerate(self.simplices):
            in_a = {}
            in_b = {}
            for idx, c in enumerate(simps):
                pc = [self.pairs[t] for t in c]
                in_a[c] = proj_diamond_ok(pc, 1)  # right projection diamond-legal
                in_b[c] = proj_diamond_ok(pc, 0)
            self._in_a[k] = in_a
            self._in_b[k] = in_b

    def embed_pair(self, u: Subspace, w: Subspace) -> Subspace:
        """(U, W) -> U x W inside F_p^(i+j), left block first."""
        rows = []
        for r in u.basis.a:
            rows.append(np.concatenate([r, np.zeros(self.j, dtype=np.int64)]))
        for r in w.basis.a:
            rows.append(np.concatenate([np.zeros(self.i, dtype=np.int64), r]))
        if not rows:
            return Subspace.zero(self.n, self.p)
        return Subspace.span(np.stack(rows), self.p, self.n)

    def push_to_target(self, chain: dict) -> dict:
        out: dict[tuple[int, ...], int] = {}
        for simplex, coeff in chain.items():
            verts = []
            for t in simplex:
                u, w = self.pairs[t]
                verts.append(self.target.vertex_index[self.embed_pair(u, w)])
            key = tuple(verts)
            out[key] = out.get(key, 0) + coeff
        return {s: c for s, c in out.items() if c}

    def _sub_boundary_solver(self, k: int, member) -> ExactSolver:
        """Solver for the boundary map restricted to the k-simplices in one
        half of the union (columns), expressed on (k-1)-simplices (rows)."""
        cols = [c for c in self.simplices[k] if member[k][c]]
        rows_index = self.simplex_index[k - 1]
        mat = [[0] * len(cols) for _ in range(len(self.simplices[k - 1]))]
        for col, simplex in enumerate(cols):
            for sign, face in boundary_of_simplex(simplex):
                mat[rows_index[face]][col] += sign
        solver = ExactSolver(mat)
        solver.column_simplices = cols
        return solver

    def product_cycle(self, x_chain: dict, y_chain: dict) -> dict:
        """The canonical top cycle representing the suspension product of the
        two factor cycles: w = EZ(x,y) bounds uniquely in each half of the
        union; the difference of the two fillers is the product cycle."""
        k = self.i + self.j - 1
        w: dict[tuple[int, ...], int] = {}
        for xs, xc in x_chain.items():
            for ys, yc in y_chain.items():
                for staircase, sign in ez_product(xs, ys):
                    key = tuple(self.pair_index[pw] for pw in staircase)
                    w[key] = w.get(key, 0) + sign * xc * yc
        w = {s: c for s, c in w.items() if c}
        rhs = {self.simplex_index[k - 1][s]: Fraction(c) for s, c in w.items()}
        alpha_solver = self._solver_a(k)
        beta_solver = self._solver_b(k)
        alpha = alpha_solver.solve(rhs)
        beta = beta_solver.solve(rhs)
        out: dict[tuple[int, ...], int] = {}
        for val, simplex in zip(alpha, alpha_solver.column_simplices):
            if val:
                assert val.denominator == 1
                out[simplex] = out.get(simplex, 0) + int(val)
        for val, simplex in zip(beta, beta_solver.column_simplices):
            if val:
                assert val.denominator == 1
                out[simplex] = out.get(simplex, 0) - int(val)
        return {s: c for s, c in out.items() if c}

    def _solver_a(self, k: int) -> ExactSolver:
        if not hasattr(self, "_solver_a_cache"):
            self._solver_a_cache = self._sub_boundary_solver(k, self._in_a)
            if not self._solver_a_cache.columns_independent:
                raise AssertionError("top cycles in the half-product: filler not unique")
        return self._solver_a_cache

    def _solver_b(self, k: int) -> ExactSolver:
        if not hasattr(self, "_solver_b_cache"):
            self._solver_b_cache = self._sub_boundary_solver(k, self._in_b)
            if not self._solver_b_cache.columns_independent:
                raise AssertionError("top cycles in the half-product: filler not unique")
        return self._solver_b_cache


def join_product_check(i: int, j: int, p: int) -> dict:
    """The suspension product of factor cycles equals (a global sign times)
    the cycle of the block-diagonal matrix, for every pair of factor group
    elements.  By the scalar-cleared product identity, the block-diagonal
    cycle is exactly where the algebraic product sends the corresponding
    tensor of Steinberg generators, so this identifies the two products in
    the cycle bases.
    """
    from .gf import block_embed
    prod = ProductDiamond(i, j, p)
    left_cx = build_flag_complex(i, p, "BDiamond")
    right_cx = build_flag_complex(j, p, "BDiamond")
    sign_constant = None
    checked = 0
    for a in general_linear(i, p):
        sa = _as_vertex_chains(left_cx, diamond_steinberg_cycle(left_cx, a))
        for b in general_linear(j, p):
            sb = _as_vertex_chains(right_cx, diamond_steinberg_cycle(right_cx, b))
            cycle = prod.product_cycle(sa, sb)
            pushed = prod.push_to_target(cycle)
            target_cycle = diamond_steinberg_cycle(prod.target, block_embed(a, b))
            ratio = _chain_ratio(pushed, target_cycle)
            if ratio is None:
                return {"i": i, "j": j, "p": p, "ok": False,
                        "witness": [a.a.tolist(), b.a.tolist()]}
            if sign_constant is None:
                sign_constant = ratio
            if ratio != sign_constant:
                return {"i": i, "j": j, "p": p, "ok": False,
                        "failure": "sign not constant",
                        "witness": [a.a.tolist(), b.a.tolist()]}
            checked += 1
    return {"i": i, "j": j, "p": p, "pairs_checked": checked,
            "global_sign": sign_constant, "ok": sign_constant in (1, -1)}


def _as_vertex_chains(factor_cx: OrderComplex, chain: dict) -> dict:
    """Rewrite a chain keyed by vertex-index simplices as one keyed by tuples
    of the actual subspaces."""
    return {tuple(factor_cx.vertices[v] for v in simplex): coeff
            for simplex, coeff in chain.items()}


def _chain_ratio(x: dict, y: dict):
    """x = r*y for an integer r, else None."""
    if set(x) != set(y):
        return None
    ratios = {Fraction(x[s], y[s]) for s in x}
    if len(ratios) != 1:
        return None
    r = ratios.pop()
    return int(r) if r.denominator == 1 else None


# ---------------------------------------------------------------------------
# Parabolic span surjectivity

def parabolic_span_check(n: int, i: int, p: int) -> dict:
    """Three clauses: the complement count p^(i(n-i)); the dimension identity
    binom(i,2) + i(n-i) + binom(n-i,2) = binom(n,2); and the span of
    {g . SB : g in the parabolic of the first-i-coordinates subspace} already
    has full Steinberg rank, over Q and mod p."""
    if not (0 < i < n):
        raise ValueError("need 0 < i < n")
    w = Subspace.span(np.eye(n, dtype=np.int64)[:i], p, n)
    complements = [u for u in enumerate_subspaces(n, p, n - i)
                   if rank_mod(np.concatenate([w.basis.a, u.basis.a]), p) == n]
    count_ok = len(complements) == p ** (i * (n - i))
    dim_ok = (i * (i - 1) // 2 + i * (n - i) + (n - i) * (n - i - 1) // 2
              == n * (n - 1) // 2)
    group, vecs = _steinberg_vectors(n, p)
    par = parabolic(w)
    rows = [vecs[g] for g in par]
    expected = p ** (n * (n - 1) // 2)
    rank_q = rank_int(rows)
    rank_p = int(rank_mod(np.array([[v % p for v in row] for row in rows],
                                   dtype=np.int64), p))
    full_rank_q = rank_int([vecs[g] for g in group])
    full_rank_p = int(rank_mod(np.array([[v % p for v in vecs[g]] for g in group],
                                        dtype=np.int64), p))
    ok = (count_ok and dim_ok and rank_q == expected == full_rank_q
          and rank_p == expected == full_rank_p)
    return {"n": n, "i": i, "p": p, "complement_count": len(complements),
            "complement_expected": p ** (i * (n - i)), "dimension_identity": dim_ok,
            "parabolic_rank_q": rank_q, "parabolic_rank_mod_p": rank_p,
            "full_rank_q": full_rank_q, "full_rank_mod_p": full_rank_p,
            "expected_rank": expected, "ok": ok}


# ---------------------------------------------------------------------------
# Unipotent fixed subposets

def common_fixed_space(mats: list[GFMatrix], n: int, p: int) -> Subspace:
    """The subspace annihilated by (u - 1) for every u."""
    rows = []
    eye = np.eye(n, dtype=np.int64)
    for u in mats:
        rows.append((u.a - eye) % p)
    if not rows:
        return Subspace.full(n, p)
    stacked = np.concatenate(rows)
    basis = nullspace_mod(stacked, p)
    return Subspace.span(basis, p, n)


def invariant_proper_subspaces(mats: list[GFMatrix], n: int, p: int) -> list[Subspace]:
    return [w for w in enumerate_subspaces(n, p) if 0 < w.dim < n
            and all(w.apply(g) == w for g in mats)]


def reduced_homology_vanishes(vertices: list[Subspace]) -> bool:
    if not vertices:
        return False  # empty complex has reduced homology in degree -1
    cx = OrderComplex(vertices)
    hom = homology(chain_complex(cx))
    return not hom.nonzero_degrees()


def subgroups_of(elements: list[GFMatrix], group_mul=None) -> list[frozenset]:
    """All subgroups of a small matrix group, by closure of generator sets."""
    elems = list(elements)
    ident = [g for g in elems if g.is_identity()][0]
    subgroups = {frozenset([ident])}
    frontier = [frozenset([ident])]
    while frontier:
        new = []
        for sg in frontier:
            for g in elems:
                if g in sg:
                    continue
                gen = _close(set(sg) | {g})
                fs = frozenset(gen)
                if fs not in subgroups:
                    subgroups.add(fs)
                    new.append(fs)
        frontier = new
    return sorted(subgroups, key=lambda s: (len(s), sorted(g.a.tobytes() for g in s)))


def _close(gens: set) -> set:
    els = set(gens)
    frontier = list(els)
    while frontier:
        new = []
        for a in frontier:
            for b in list(els):
                for c in (a * b, b * a):
                    if c not in els:
                        els.add(c)
                        new.append(c)
        frontier = new
    return els


def unipotent_fixed_check(u_elements: list[GFMatrix], ambient_group: FiniteGroup | None = None,
                          check_normalizer_subgroups: bool = True) -> dict:
    """For a nontrivial p-power-order subgroup U of GL(V): the common fixed
    space is proper and nonzero; the subposet of U-invariant proper nonzero
    subspaces has vanishing reduced homology; so does the further fixed
    subposet of every subgroup of the normalizer of U; and cutting with the
    common fixed space is well-defined on the fixed subposet."""
    mats = [g for g in u_elements]
    n = mats[0].rows
    p = mats[0].p
    order = len(_close(set(mats)))
    if order != len(set(mats)):
        mats = list(_close(set(mats)))
        order = len(mats)
    if order == 1:
        raise ValueError("U must be nontrivial")
    q = order
    while q % p == 0:
        q //= p
    if q != 1:
        raise ValueError("U must have p-power order")
    fixed_space = common_fixed_space(mats, n, p)
    space_ok = 0 < fixed_space.dim < n
    poset = invariant_proper_subspaces(mats, n, p)
    poset_ok = reduced_homology_vanishes(poset)
    cut_ok = all((fixed_space.intersect(w).dim > 0) and
                 all(fixed_space.intersect(w).apply(g) == fixed_space.intersect(w)
                     for g in mats)
                 for w in poset)
    normalizer_ok = True
    witness = None
    n_checked = 0
    if check_normalizer_subgroups:
        ambient = ambient_group.elements if ambient_group is not None \
            else general_linear(n, p)
        uset = set(mats)
        normalizer = [g for g in ambient
                      if all(GFMatrix(g.a @ u.a @ g.inv().a, p) in uset for u in mats)]
        for gamma in subgroups_of(normalizer):
            sub = [w for w in poset if all(w.apply(g) == w for g in gamma)]
            if not reduced_homology_vanishes(sub):
                normalizer_ok = False
                witness = len(gamma)
                break
            n_checked += 1
    ok = space_ok and poset_ok and cut_ok and normalizer_ok
    return {"n": n, "p": p, "subgroup_order": order,
            "fixed_space_dim": fixed_space.dim, "fixed_space_proper": space_ok,
            "fixed_poset_size": len(poset), "fixed_poset_contractible": poset_ok,
            "cut_map_well_defined": cut_ok,
            "normalizer_subposets_checked": n_checked,
            "normalizer_subposets_contractible": normalizer_ok,
            "witness": witness, "ok": ok}


def sylow_unitriangular(n: int, p: int) -> list[GFMatrix]:
    """The upper unitriangular group: a Sylow p-subgroup of GL_n(F_p)."""
    positions = [(r, c) for r in range(n) for c in range(r + 1, n)]
    out = []
    for vals in itertools.product(range(p), repeat=len(positions)):
        m = np.eye(n, dtype=np.int64)
        for (r, c), v in zip(positions, vals):
            m[r, c] = v
        out.append(GFMatrix(m, p))
    return out


def p_subgroups_up_to_conjugacy(n: int, p: int) -> list[list[GFMatrix]]:
    """Nontrivial p-subgroups of GL_n(F_p) up to conjugacy: every p-subgroup
    is conjugate into the unitriangular Sylow subgroup, so enumerate its
    subgroup lattice and deduplicate by conjugacy in the full group."""
    sylow = sylow_unitriangular(n, p)
    gl = general_linear(n, p)
    classes: list[frozenset] = []
    reps: list[list[GFMatrix]] = []
    for sg in subgroups_of(sylow):
        if len(sg) == 1:
            continue
        if any(_conjugate_subgroups(sg, c, gl, p) for c in classes):
            continue
        classes.append(sg)
        reps.append(sorted(sg, key=lambda g: g.a.tobytes()))
    return reps


def _conjugate_subgroups(a: frozenset, b: frozenset, gl: list[GFMatrix], p: int) -> bool:
    if len(a) != len(b):
        return False
    for g in gl:
        gi = g.inv()
        if all(GFMatrix(g.a @ x.a @ gi.a, p) in b for x in a):
            return True
    return False
