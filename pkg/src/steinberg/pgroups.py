"""Finite p-groups by Cayley table: homomorphism enumeration, graph subgroups
and centralizers, the fixed-point index bookkeeping, the family of normal
subgroups with elementary abelian quotient, the kernel partition of
Hom(G, (Z/p)^n) into Stiefel varieties, and the graded-dimension fixed-point
decomposition checks.

Everything is exhaustive and exact: the groups here have order at most a few
dozen, so homomorphisms are enumerated by generator images and verified on
every pair of elements.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

import numpy as np

from .algebra import FiniteGroup, PermModule, PrimeField, act_mod, gl_group
from .exact import rank_mod
from .gf import GFMatrix, check_prime, identity, stiefel
from .torus import (GradedModule, _tensor_with_perm, convolve,
                    module_rank_mod, steinberg_dim_series, stiefel_module,
                    torus_homology, trivial_graded)


class PGroup:
    """A finite p-group given by labels and a full Cayley table."""

    def __init__(self, labels, table, generators=None, name: str = ""):
        self.labels = list(labels)
        self.table = [list(map(int, row)) for row in table]
        self.order = len(self.labels)
        self.name = name or "pgroup"
        ident = [i for i in range(self.order)
                 if all(self.table[i][j] == j == self.table[j][i]
                        for j in range(self.order))]
        if len(ident) != 1:
            raise ValueError("Cayley table has no unique identity")
        self.identity = ident[0]
        self.inverse = [None] * self.order
        for i in range(self.order):
            for j in range(self.order):
                if self.table[i][j] == self.identity:
                    self.inverse[i] = j
        if any(v is None for v in self.inverse):
            raise ValueError("Cayley table lacks inverses")
        self.p = _prime_power_base(self.order)
        self.generators = list(generators) if generators is not None \
            else self._greedy_generators()

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self.inverse[a]

    def verify(self) -> None:
        """Full associativity, identity, and inverse laws."""
        r = range(self.order)
        for a in r:
            for b in r:
                ab = self.table[a][b]
                for c in r:
                    if self.table[ab][c] != self.table[a][self.table[b][c]]:
                        raise AssertionError("associativity fails")

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != self.identity:
            x = self.mul(x, a)
            k += 1
        return k

    def exponent(self) -> int:
        out = 1
        for a in range(self.order):
            o = self.element_order(a)
            out = out * o // _gcd(out, o)
        return out

    def _greedy_generators(self) -> list[int]:
        gens: list[int] = []
        span = {self.identity}
        for a in range(self.order):
            if a in span:
                continue
            gens.append(a)
            span = self.closure(gens)
            if len(span) == self.order:
                break
        return gens

    def closure(self, gens) -> set[int]:
        els = {self.identity}
        frontier = [self.identity]
        gens = list(gens)
        while frontier:
            new = []
            for a in frontier:
                for g in gens:
                    c = self.mul(a, g)
                    if c not in els:
                        els.add(c)
                        new.append(c)
            frontier = new
        return els

    def subgroups(self) -> list[frozenset[int]]:
        """All subgroups, by closure of extended generator sets."""
        found = {frozenset([self.identity])}
        frontier = [frozenset([self.identity])]
        while frontier:
            new = []
            for sg in frontier:
                for a in range(self.order):
                    if a in sg:
                        continue
                    fs = frozenset(self.closure(list(sg) + [a]))
                    if fs not in found:
                        found.add(fs)
                        new.append(fs)
            frontier = new
        return sorted(found, key=lambda s: (len(s), sorted(s)))

    def is_normal(self, sub: frozenset[int]) -> bool:
        return all(self.mul(self.mul(g, h), self.inv(g)) in sub
                   for g in range(self.order) for h in sub)

    def quotient(self, sub: frozenset[int]) -> tuple["PGroup", list[int]]:
        """The quotient by a normal subgroup; returns (Q, coset id per element)."""
        if not self.is_normal(sub):
            raise ValueError("quotient needs a normal subgroup")
        coset_of = [None] * self.order
        cosets: list[frozenset[int]] = []
        for a in range(self.order):
            if coset_of[a] is not None:
                continue
            coset = frozenset(self.mul(a, h) for h in sub)
            idx = len(cosets)
            cosets.append(coset)
            for x in coset:
                coset_of[x] = idx
        table = [[0] * len(cosets) for _ in range(len(cosets))]
        reps = [min(c) for c in cosets]
        for i, a in enumerate(reps):
            for j, b in enumerate(reps):
                table[i][j] = coset_of[self.mul(a, b)]
        q = PGroup([tuple(sorted(c)) for c in cosets], table,
                   name=f"{self.name}/H")
        return q, coset_of

    def is_elementary_abelian(self) -> bool:
        p = self.p
        for a in range(self.order):
            for b in range(self.order):
                if self.mul(a, b) != self.mul(b, a):
                    return False
        return all(self.element_order(a) in (1, p) for a in range(self.order))

    def subgroup_pgroup(self, sub: frozenset[int]) -> tuple["PGroup", list[int]]:
        """The subgroup as its own PGroup; returns (H, ids into self)."""
        ids = sorted(sub)
        pos = {a: i for i, a in enumerate(ids)}
        table = [[pos[self.mul(a, b)] for b in ids] for a in ids]
        h = PGroup([self.labels[a] for a in ids], table, name=f"{self.name}|sub")
        return h, ids


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def _prime_power_base(order: int) -> int:
    if order == 1:
        return 1
    for p in range(2, order + 1):
        if order % p == 0:
            q = order
            while q % p == 0:
                q //= p
            if q != 1:
                raise ValueError(f"order {order} is not a prime power")
            return p
    raise ValueError


# ---------------------------------------------------------------------------
# Constructors

def cyclic(q: int) -> PGroup:
    return PGroup([i for i in range(q)],
                  [[(i + j) % q for j in range(q)] for i in range(q)],
                  generators=[1] if q > 1 else None, name=f"C{q}")


def elementary_abelian(p: int, k: int) -> PGroup:
    check_prime(p)
    labels = list(itertools.product(range(p), repeat=k))
    index = {v: i for i, v in enumerate(labels)}
    table = [[index[tuple((a + b) % p for a, b in zip(x, y))] for y in labels]
             for x in labels]
    gens = [index[tuple(1 if t == s else 0 for t in range(k))] for s in range(k)]
    return PGroup(labels, table, generators=gens, name=f"(Z/{p})^{k}")


def direct_product(g1: PGroup, g2: PGroup) -> PGroup:
    labels = [(a, b) for a in range(g1.order) for b in range(g2.order)]
    index = {v: i for i, v in enumerate(labels)}
    table = [[index[(g1.mul(a1, b1), g2.mul(a2, b2))] for (b1, b2) in labels]
             for (a1, a2) in labels]
    gens = [index[(a, g2.identity)] for a in g1.generators] + \
           [index[(g1.identity, b)] for b in g2.generators]
    return PGroup(labels, table, generators=gens, name=f"{g1.name}x{g2.name}")


def dihedral8() -> PGroup:
    # r^4 = s^2 = 1, s r s = r^-1; elements (i, e) = r^i s^e
    labels = [(i, e) for e in range(2) for i in range(4)]
    index = {v: t for t, v in enumerate(labels)}

    def mul(x, y):
        (i, e), (j, f) = x, y
        if e == 0:
            return ((i + j) % 4, f)
        return ((i - j) % 4, 1 - f)

    table = [[index[mul(x, y)] for y in labels] for x in labels]
    return PGroup(labels, table, generators=[index[(1, 0)], index[(0, 1)]],
                  name="D8")


def quaternion8() -> PGroup:
    # units {+-1, +-i, +-j, +-k}: encode as (axis, sign): axis 0 = 1, 1 = i, 2 = j, 3 = k
    labels = [(a, s) for s in (1, -1) for a in range(4)]
    index = {v: t for t, v in enumerate(labels)}
    mul_axis = {
        (0, 0): (0, 1), (0, 1): (1, 1), (0, 2): (2, 1), (0, 3): (3, 1),
        (1, 0): (1, 1), (1, 1): (0, -1), (1, 2): (3, 1), (1, 3): (2, -1),
        (2, 0): (2, 1), (2, 1): (3, -1), (2, 2): (0, -1), (2, 3): (1, 1),
        (3, 0): (3, 1), (3, 1): (2, 1), (3, 2): (1, -1), (3, 3): (0, -1),
    }

    def mul(x, y):
        (a, s), (b, t) = x, y
        c, u = mul_axis[(a, b)]
        return (c, s * t * u)

    table = [[index[mul(x, y)] for y in labels] for x in labels]
    return PGroup(labels, table, generators=[index[(1, 1)], index[(2, 1)]],
                  name="Q8")


def heisenberg(p: int) -> PGroup:
    """Upper unitriangular 3x3 matrices over F_p: order p^3."""
    check_prime(p)
    labels = [(a, b, c) for a in range(p) for b in range(p) for c in range(p)]
    index = {v: i for i, v in enumerate(labels)}

    def mul(x, y):
        (a, b, c), (d, e, f) = x, y
        return ((a + d) % p, (b + e) % p, (c + f + a * e) % p)

    table = [[index[mul(x, y)] for y in labels] for x in labels]
    return PGroup(labels, table,
                  generators=[index[(1, 0, 0)], index[(0, 1, 0)]],
                  name=f"Heis{p}")


def from_cayley_dict(data: dict, name: str = "") -> PGroup:
    g = PGroup(list(range(int(data["order"]))), data["table"],
               generators=data.get("generators"), name=name or "cayley")
    g.verify()
    return g


def from_cayley_file(path) -> PGroup:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    return from_cayley_dict(data, name=str(path))


_BUILTIN = {}


def named_group(name: str) -> PGroup:
    """Built-in groups by name: C2, C4, C9, C2xC2, C3xC3, C2xC4, Q8, D8,
    Heis3, trivial, or file:<path> for a Cayley-table JSON."""
    if name.startswith("file:"):
        return from_cayley_file(name[5:])
    if not _BUILTIN:
        _BUILTIN.update({
            "trivial": lambda: cyclic(1),
            "C2": lambda: cyclic(2),
            "C3": lambda: cyclic(3),
            "C4": lambda: cyclic(4),
            "C8": lambda: cyclic(8),
            "C9": lambda: cyclic(9),
            "C2xC2": lambda: elementary_abelian(2, 2),
            "C3xC3": lambda: elementary_abelian(3, 2),
            "C2xC4": lambda: direct_product(cyclic(2), cyclic(4)),
            "Q8": quaternion8,
            "D8": dihedral8,
            "Heis3": lambda: heisenberg(3),
        })
    if name not in _BUILTIN:
        raise ValueError(f"unknown group {name!r}")
    return _BUILTIN[name]()


# ---------------------------------------------------------------------------
# Homomorphism enumeration

class _Target:
    """Uniform wrapper over a PGroup or a matrix FiniteGroup target."""

    def __init__(self, group):
        self.group = group
        if isinstance(group, PGroup):
            self.elements = list(range(group.order))
            self.identity = group.identity
            self.mul = group.mul
            self.inv = group.inv
            self.label = lambda t: group.labels[t]
        else:
            self.elements = list(group.elements)
            self.identity = group.identity
            self.mul = group.mul
            self.inv = group.inv
            self.label = lambda t: t

    @property
    def order(self):
        return len(self.elements)


@dataclass(frozen=True)
class GroupHom:
    """A verified homomorphism from a PGroup; images[i] is the target element
    assigned to source element i."""
    source: PGroup
    images: tuple

    def kernel(self, target: "_Target") -> frozenset[int]:
        return frozenset(i for i, t in enumerate(self.images)
                         if t == target.identity)

    def image(self) -> tuple:
        return tuple(sorted(set(self.images), key=_element_key))

    def is_trivial(self, target: "_Target") -> bool:
        return all(t == target.identity for t in self.images)


def _element_key(t):
    return t.a.tobytes() if isinstance(t, GFMatrix) else t


def _word_table(g: PGroup) -> list[list[int]]:
    """A word in generator indices for every element, by breadth-first search."""
    words = {g.identity: []}
    frontier = [g.identity]
    while frontier:
        new = []
        for a in frontier:
            for t, gen in enumerate(g.generators):
                b = g.mul(a, gen)
                if b not in words:
                    words[b] = words[a] + [t]
                    new.append(b)
        frontier = new
    if len(words) != g.order:
        raise AssertionError("generators do not generate")
    return [words[a] for a in range(g.order)]


def enumerate_homs(g: PGroup, target) -> list[GroupHom]:
    """All homomorphisms from g into the target group, by generator images
    extended along words and verified on every pair of elements."""
    tgt = _Target(target)
    words = _word_table(g)
    homs = []
    ngen = len(g.generators)
    for images in itertools.product(tgt.elements, repeat=ngen):
        full = []
        ok = True
        for a in range(g.order):
            val = tgt.identity
            for t in words[a]:
                val = tgt.mul(val, images[t])
            full.append(val)
        for a in range(g.order):
            fa = full[a]
            row = g.table[a]
            for b in range(g.order):
                if full[row[b]] != tgt.mul(fa, full[b]):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            homs.append(GroupHom(g, tuple(full)))
    return homs


def hom_count_oracle(g: PGroup, p: int, n: int) -> int:
    """|Hom(G, (Z/p)^n)| = p^(n * rank(G/F)) with F the minimal member of the
    elementary-abelian-quotient family."""
    fam = frattini_family(g)
    return p ** (n * fam.d[fam.minimal])


def graph_subgroup(f: GroupHom, target) -> list[tuple[int, object]]:
    """The graph {(h, f(h))} inside source x target."""
    return [(i, f.images[i]) for i in range(f.source.order)]


def centralizer_of_image(f: GroupHom, target) -> list:
    tgt = _Target(target)
    imgs = set(map(_element_key, f.images))
    reps = [t for t in tgt.elements if _element_key(t) in imgs]
    return [t for t in tgt.elements
            if all(tgt.mul(t, x) == tgt.mul(x, t) for x in reps)]


def hom_conjugacy_classes(homs: list[GroupHom], target) -> list[dict]:
    """Orbits of target-conjugation on the homomorphism set, with centralizer
    and orbit-stabilizer accounting."""
    tgt = _Target(target)
    seen = set()
    classes = []
    for f in homs:
        if f.images in seen:
            continue
        orbit = set()
        for t in tgt.elements:
            ti = tgt.inv(t)
            conj = tuple(tgt.mul(t, tgt.mul(x, ti)) for x in f.images)
            orbit.add(conj)
        seen |= orbit
        cent = centralizer_of_image(f, target)
        classes.append({"rep": f, "orbit_size": len(orbit),
                        "centralizer_size": len(cent)})
    return classes


def fixed_point_index(g: PGroup, sub: frozenset[int], target) -> dict:
    """Conjugacy classes of Hom(H, target) with centralizers; orbit sizes must
    sum to |Hom| and each orbit times its centralizer must equal |target|
    (the centralizer of the image is the stabilizer under conjugation)."""
    h, _ = g.subgroup_pgroup(sub)
    homs = enumerate_homs(h, target)
    tgt = _Target(target)
    classes = hom_conjugacy_classes(homs, target)
    total = sum(c["orbit_size"] for c in classes)
    orbit_stab = all(c["orbit_size"] * c["centralizer_size"] == tgt.order
                     for c in classes)
    return {"subgroup_order": len(sub), "hom_count": len(homs),
            "class_count": len(classes),
            "orbit_sizes": sorted(c["orbit_size"] for c in classes),
            "sum_matches": total == len(homs),
            "orbit_stabilizer": orbit_stab,
            "classes": classes,
            "ok": total == len(homs) and orbit_stab}


# ---------------------------------------------------------------------------
# The family of normal subgroups with elementary abelian quotient

@dataclass
class FrattiniFamily:
    group: PGroup
    members: list[frozenset[int]]
    d: dict[frozenset[int], int]
    minimal: frozenset[int]
    intersection_closed: bool
    anti_isomorphism_ok: bool

    @property
    def ok(self) -> bool:
        return self.intersection_closed and self.anti_isomorphism_ok


def frattini_family(g: PGroup) -> FrattiniFamily:
    """All normal subgroups with elementary abelian quotient, found by
    exhaustive subgroup scan; verifies closure under intersection and the
    order-reversing bijection with the subspace lattice of G/F."""
    p = g.p if g.order > 1 else 2
    members = []
    d = {}
    for sub in g.subgroups():
        if not g.is_normal(sub):
            continue
        q, _ = g.quotient(sub)
        if q.order == 1 or q.is_elementary_abelian():
            members.append(sub)
            k = 0
            while p ** k < q.order:
                k += 1
            if p ** k != q.order:
                raise AssertionError("quotient order is not a p power")
            d[sub] = k
    closed = all(frozenset(a & b) in set(members)
                 for a in members for b in members)
    minimal = min(members, key=len)
    anti_ok = _anti_isomorphism_check(g, members, d, minimal, p)
    return FrattiniFamily(g, sorted(members, key=lambda s: (len(s), sorted(s))),
                          d, minimal, closed, anti_ok)


def _quotient_coordinates(g: PGroup, sub: frozenset[int], p: int):
    """Coordinates on the elementary abelian quotient G/H: a deterministic
    basis (first elements extending the span, in coset id order) and the
    coordinate tuple of every element of G."""
    q, coset_of = g.quotient(sub)
    basis: list[int] = []
    span = {q.identity: ()}
    for cand in range(q.order):
        if cand in span:
            continue
        new_span = {}
        for el, coords in span.items():
            new_span[el] = coords + (0,)
            acc = el
            for c in range(1, p):
                acc = q.mul(acc, cand)
                new_span[acc] = coords + (c,)
        span = new_span
        basis.append(cand)
        if len(span) == q.order:
            break
    if len(span) != q.order:
        raise AssertionError("failed to coordinatize the quotient")
    coords_of_element = [span[coset_of[a]] for a in range(g.order)]
    basis_reps = [min(c for c in range(g.order) if coset_of[c] == b) for b in basis]
    return basis_reps, coords_of_element, len(basis)


def _anti_isomorphism_check(g, members, d, minimal, p) -> bool:
    """Map each member H to the annihilator of H/F inside the dual of G/F;
    this must be an order-reversing bijection onto the subspace lattice."""
    from .gf import Subspace, enumerate_subspaces
    if g.order == 1:
        return True
    _, coords, r = _quotient_coordinates(g, minimal, p)
    images = {}
    for h in members:
        rows = [coords[a] for a in h]
        rows = [row for row in rows if any(row)]
        if rows:
            hf = Subspace.span(np.array(rows, dtype=np.int64), p, r)
        else:
            hf = Subspace.zero(r, p)
        # annihilator in coordinates
        if hf.dim == 0:
            ann = Subspace.full(r, p)
        else:
            from .exact import nullspace_mod
            ann = Subspace.span(nullspace_mod(hf.basis.a, p), p, r)
        images[h] = ann
    all_subspaces = set(enumerate_subspaces(r, p))
    bijective = (len(set(images.values())) == len(members)
                 and set(images.values()) == all_subspaces)
    order_reversed = all((images[b] <= images[a]) == (set(a) <= set(b))
                         for a in members for b in members)
    return bijective and order_reversed


# ---------------------------------------------------------------------------
# Kernel partition of Hom(G, (Z/p)^n) into Stiefel varieties

def hom_partition_check(g: PGroup, n: int, p: int) -> dict:
    """Partition Hom(G, (Z/p)^n) by kernel; for each member H of the family
    with d(H) <= n, exhibit the bijection with V_d(F_p^n) given by a fixed
    basis of G/H, verify it is bijective and GL_n-equivariant, and check the
    cardinality identity |Hom| = sum over H of |V_d(F_p^n)|."""
    check_prime(p)
    if g.order > 1 and g.p != p:
        raise ValueError("group is not a p-group for this prime")
    target = elementary_abelian(p, n)
    tgt = _Target(target)
    homs = enumerate_homs(g, target)
    oracle = hom_count_oracle(g, p, n)
    fam = frattini_family(g)
    by_kernel: dict[frozenset[int], list[GroupHom]] = {}
    for f in homs:
        by_kernel.setdefault(f.kernel(tgt), []).append(f)
    kernels_in_family = all(k in set(fam.members) for k in by_kernel)
    total_expected = 0
    per_member = []
    gln = gl_group(n, p)
    bij_ok = True
    equiv_ok = True
    label_index = {lab: i for i, lab in enumerate(target.labels)}
    for h in fam.members:
        dh = fam.d[h]
        vd = stiefel(n, dh, p)
        total_expected += len(vd)
        fs = by_kernel.get(h, [])
        per_member.append({"d": dh, "homs": len(fs), "stiefel": len(vd)})
        if dh > n:
            if fs:
                bij_ok = False
            continue
        if len(fs) != len(vd):
            bij_ok = False
            continue
        basis_reps, _, dim = _quotient_coordinates(g, h, p)
        if dim != dh:
            raise AssertionError("quotient dimension mismatch")
        matrix_of = {}
        for f in fs:
            cols = [np.array(tgt.label(f.images[b]), dtype=np.int64)
                    for b in basis_reps]
            m = GFMatrix(np.stack(cols, axis=1) if cols
                         else np.zeros((n, 0), dtype=np.int64), p)
            matrix_of[f.images] = m
            if m.rank() != dh:
                bij_ok = False
        if len(set(matrix_of.values())) != len(vd) or set(matrix_of.values()) != set(vd):
            bij_ok = False
            continue
        # equivariance: postcomposition by gln matches left multiplication
        gl_elements = gln.elements if len(gln) * max(len(fs), 1) <= 40000 \
            else gln.generators
        for mat in gl_elements:
            for f in fs:
                moved = tuple(label_index[tuple((mat.a @ np.array(tgt.label(t),
                                                                  dtype=np.int64)) % p)]
                              for t in f.images)
                if matrix_of.get(moved) != GFMatrix(mat.a @ matrix_of[f.images].a, p):
                    equiv_ok = False
                    break
            if not equiv_ok:
                break
    counts_ok = len(homs) == total_expected == oracle
    ok = counts_ok and kernels_in_family and bij_ok and equiv_ok
    return {"group": g.name, "n": n, "p": p, "hom_count": len(homs),
            "stiefel_total": total_expected, "oracle": oracle,
            "kernels_in_family": kernels_in_family,
            "bijections": bij_ok, "equivariance": equiv_ok,
            "per_member": per_member, "ok": ok}


# ---------------------------------------------------------------------------
# Fixed-point decomposition: graded dimension checks

def hom_permutation_module(g: PGroup, n: int, p: int,
                           kernel: frozenset[int] | None = None) -> PermModule:
    """F_p[Hom(G, (Z/p)^n)] (or the single-kernel piece) as a GL_n-set via
    postcomposition."""
    target = elementary_abelian(p, n)
    tgt = _Target(target)
    homs = enumerate_homs(g, target)
    if kernel is not None:
        homs = [f for f in homs if f.kernel(tgt) == kernel]
    label_index = {lab: i for i, lab in enumerate(target.labels)}
    points = [f.images for f in homs]

    def act_fn(mat, point):
        return tuple(label_index[tuple((mat.a @ np.array(tgt.label(t), dtype=np.int64)) % p)]
                     for t in point)

    return PermModule(gl_group(n, p), points, act_fn, name=f"F{p}[Hom({g.name})]")


def fixed_point_decomposition_check(g: PGroup, n: int, p: int, max_degree: int = 4,
                                    convention: str = "homology") -> dict:
    """Per-degree dimension identity for the kernel decomposition: for each
    member H with d = d(H),

      rank e_n on (F_p[Hom[H]] (x) H_k((Z/p)^n))
        = p^binom(d,2) * sum_{i+j=k} rank(e_(n-d) on H_i((Z/p)^(n-d))) * dim H_j((Z/p)^d)

    and the per-degree sum over members equals the rank of e_n on the full
    Hom permutation module tensored with H_k.
    """
    check_prime(p)
    fam = frattini_family(g)
    torus = torus_homology(n, p, max_degree, convention)
    per_member = {}
    member_series = []
    all_ok = True
    first_failure = None
    for h in fam.members:
        d = fam.d[h]
        lhs = []
        perm = hom_permutation_module(g, n, p, kernel=h)
        for k in range(max_degree + 1):
            piece = torus.degrees[k]
            if perm.dim == 0 or piece.dim == 0:
                lhs.append(0)
                continue
            tens = _tensor_with_perm(perm, piece, p)
            lhs.append(module_rank_mod(n, p, tens))
        if d > n:
            rhs = [0] * (max_degree + 1)
        else:
            small = torus_homology(n - d, p, max_degree, convention)
            small_series = steinberg_dim_series(small, n - d)
            quo_dims = torus_homology(d, p, max_degree, convention).dims()
            factor = p ** (d * (d - 1) // 2)
            rhs = [factor * v for v in convolve(small_series, quo_dims, max_degree)]
        match = lhs == rhs
        if not match and first_failure is None:
            bad = next(k for k in range(max_degree + 1) if lhs[k] != rhs[k])
            first_failure = {"member_order": len(h), "degree": bad,
                             "lhs": lhs[bad], "rhs": rhs[bad]}
        all_ok = all_ok and match
        key = f"order{len(h)}_d{d}_{sorted(h)}"
        per_member[key] = {"d": d, "lhs": lhs, "rhs": rhs, "match": match}
        member_series.append(lhs)
    full_perm = hom_permutation_module(g, n, p)
    aggregate = []
    for k in range(max_degree + 1):
        piece = torus.degrees[k]
        tens = _tensor_with_perm(full_perm, piece, p)
        aggregate.append(module_rank_mod(n, p, tens))
    summed = [sum(s[k] for s in member_series) for k in range(max_degree + 1)]
    agg_ok = aggregate == summed
    ok = all_ok and agg_ok
    return {"group": g.name, "n": n, "p": p, "max_degree": max_degree,
            "convention": convention, "members": len(fam.members),
            "per_member": per_member, "aggregate": aggregate,
            "member_sum": summed, "aggregate_match": agg_ok,
            "first_failure": first_failure, "ok": ok}


def fixed_point_decomposition_both_conventions(g: PGroup, n: int, p: int,
                                               max_degree: int = 4) -> dict:
    """Run the decomposition check under both substitution conventions and
    report them side by side."""
    res = {conv: fixed_point_decomposition_check(g, n, p, max_degree, conv)
           for conv in ("homology", "dual")}
    return {"group": g.name, "n": n, "p": p, "max_degree": max_degree,
            "by_convention": res,
            "ok": all(r["ok"] for r in res.values())}


# ---------------------------------------------------------------------------
# Product compatibility of the kernel partition

def transverse_members(fam: FrattiniFamily, h: frozenset[int],
                       k: frozenset[int]) -> bool:
    return fam.d[frozenset(h & k)] == fam.d[h] + fam.d[k]


def product_compatibility_check(g: PGroup, m: int, n: int,
                                h: frozenset[int], k: frozenset[int],
                                p: int) -> dict:
    """For transverse members H, K: under the kernel-partition bijections,
    the pairing (f1, f2) -> (f1, f2) componentwise corresponds to block
    inclusion V_dH(F_p^m) x V_dK(F_p^n) -> V_(dH+dK)(F_p^(m+n)), for a basis
    of G/(H cap K) assembled from representatives lying in K and in H."""
    fam = frattini_family(g)
    dh, dk = fam.d[h], fam.d[k]
    meet = frozenset(h & k)
    if not transverse_members(fam, h, k):
        raise ValueError("members are not transverse")
    t_m = elementary_abelian(p, m)
    t_n = elementary_abelian(p, n)
    t_mn = elementary_abelian(p, m + n)
    w_m, w_n, w_mn = _Target(t_m), _Target(t_n), _Target(t_mn)
    homs_h = [f for f in enumerate_homs(g, t_m) if f.kernel(w_m) == h]
    homs_k = [f for f in enumerate_homs(g, t_n) if f.kernel(w_n) == k]
    basis_h, _, _ = _quotient_coordinates(g, h, p)
    basis_k, _, _ = _quotient_coordinates(g, k, p)
    # compatible basis of G/(H&K): representatives in K for the G/H basis
    # cosets and in H for the G/K basis cosets
    _, coset_h = g.quotient(h)
    _, coset_k = g.quotient(k)
    reps = []
    for b in basis_h:
        cand = [x for x in k if coset_h[x] == coset_h[b]]
        if not cand:
            raise AssertionError("transversality failed to produce a representative")
        reps.append(min(cand))
    for c in basis_k:
        cand = [x for x in h if coset_k[x] == coset_k[c]]
        if not cand:
            raise AssertionError("transversality failed to produce a representative")
        reps.append(min(cand))
    index_mn = {lab: i for i, lab in enumerate(t_mn.labels)}
    checked = 0
    for f1 in homs_h:
        m1 = np.stack([np.array(w_m.label(f1.images[b]), dtype=np.int64)
                       for b in basis_h], axis=1) if dh else np.zeros((m, 0), dtype=np.int64)
        for f2 in homs_k:
            m2 = np.stack([np.array(w_n.label(f2.images[c]), dtype=np.int64)
                           for c in basis_k], axis=1) if dk else np.zeros((n, 0), dtype=np.int64)
            pair_images = tuple(
                index_mn[tuple(w_m.label(f1.images[x])) + tuple(w_n.label(f2.images[x]))]
                for x in range(g.order))
            f = GroupHom(g, pair_images)
            if f.kernel(w_mn) != meet:
                return {"ok": False, "failure": "kernel of the pair is not the meet"}
            cols = [np.array(w_mn.label(f.images[r]), dtype=np.int64) for r in reps]
            got = np.stack(cols, axis=1) if cols else np.zeros((m + n, 0), dtype=np.int64)
            expected = np.zeros((m + n, dh + dk), dtype=np.int64)
            expected[:m, :dh] = m1
            expected[m:, dh:] = m2
            if not np.array_equal(got, expected):
                return {"ok": False, "failure": "not block diagonal",
                        "got": got.tolist(), "expected": expected.tolist()}
            checked += 1
    return {"group": g.name, "m": m, "n": n, "d_h": dh, "d_k": dk,
            "pairs_checked": checked, "ok": True}


# ---------------------------------------------------------------------------
# Contractibility of the nontrivial hom summands

def contractible_summand_report(g: PGroup, sub: frozenset[int], n: int, p: int) -> dict:
    """For each conjugacy class of homomorphisms from the subgroup into
    GL_n(F_p): nontrivial classes must have image a nontrivial p-group whose
    fixed subposet of the flag complex has vanishing reduced homology; the
    trivial class carries the surviving summand."""
    from .complexes import invariant_proper_subspaces, reduced_homology_vanishes
    h, _ = g.subgroup_pgroup(sub)
    gln = gl_group(n, p)
    homs = enumerate_homs(h, gln)
    classes = hom_conjugacy_classes(homs, gln)
    tgt = _Target(gln)
    rows = []
    surviving = 0
    ok = True
    for c in classes:
        f = c["rep"]
        if f.is_trivial(tgt):
            surviving += 1
            rows.append({"trivial": True, "orbit_size": c["orbit_size"]})
            continue
        image = set(f.images)
        poset = invariant_proper_subspaces(list(image), n, p)
        vanishes = reduced_homology_vanishes(poset)
        rows.append({"trivial": False, "image_order": len(image),
                     "fixed_poset_size": len(poset),
                     "reduced_homology_vanishes": vanishes,
                     "orbit_size": c["orbit_size"]})
        ok = ok and vanishes
    return {"group": g.name, "subgroup_order": len(sub), "n": n, "p": p,
            "classes": rows, "surviving_trivial_classes": surviving,
            "ok": ok and surviving == 1}
