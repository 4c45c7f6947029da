"""Exact group-algebra arithmetic for finite matrix groups.

Scalars live in one of three rings: the integers, the p-local rationals
(fractions whose denominator is coprime to p), or the prime field F_p.
Elements are sparse maps group element -> scalar; the product is the
convolution sum over support pairs, batched through numpy for large supports.

The distinguished elements: the signed sum over permutation matrices, the sum
over the Borel subgroup, the block unipotent sum, the signed shuffle sum, and
the scalar c(n, p) = prod_{i=1..n} (p^i - 1) that makes the Steinberg element
idempotent after division.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import gf
from .gf import (FiniteGroup, GFMatrix, block_embed, borel, check_prime,
                 identity, perm_sign, permutation_matrix, unipotent_block)

# ---------------------------------------------------------------------------
# Coefficient rings


class Ring:
    def coerce(self, x):
        raise NotImplementedError

    def invert(self, x):
        raise NotImplementedError


@dataclass(frozen=True)
class Integers(Ring):
    def coerce(self, x):
        if isinstance(x, Fraction):
            if x.denominator != 1:
                raise ValueError(f"{x} is not an integer")
            return int(x)
        return int(x)

    def invert(self, x):
        x = self.coerce(x)
        if x not in (1, -1):
            raise ValueError(f"{x} is not a unit in the integers")
        return x

    def __str__(self):
        return "ZZ"


@dataclass(frozen=True)
class PLocalRationals(Ring):
    """Rationals with denominator coprime to p; arithmetic never leaves the ring."""
    p: int

    def coerce(self, x):
        x = Fraction(x)
        if x.denominator % self.p == 0:
            raise ValueError(f"denominator of {x} is divisible by p = {self.p}")
        return x

    def invert(self, x):
        x = self.coerce(x)
        if x == 0 or x.numerator % self.p == 0:
            raise ValueError(f"{x} is not a unit in Z_({self.p})")
        return self.coerce(1 / x)

    def __str__(self):
        return f"Z_({self.p})"


@dataclass(frozen=True)
class PrimeField(Ring):
    p: int

    def coerce(self, x):
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise ValueError(f"{x} has no image in F_{self.p}")
            return x.numerator * pow(x.denominator, -1, self.p) % self.p
        return int(x) % self.p

    def invert(self, x):
        x = self.coerce(x)
        if x == 0:
            raise ValueError("0 is not invertible")
        return pow(x, -1, self.p)

    def __str__(self):
        return f"F_{self.p}"


ZZ = Integers()


# ---------------------------------------------------------------------------
# Algebra elements

_BATCH_THRESHOLD = 40_000


class AlgebraElement:
    """A sparse formal linear combination of group elements.

    Immutable by convention: no method mutates coeffs after construction.
    Zero coefficients are never stored.
    """

    __slots__ = ("group", "ring", "coeffs")

    def __init__(self, group: FiniteGroup, ring: Ring, coeffs: dict | None = None,
                 _normalized: bool = False):
        self.group = group
        self.ring = ring
        if coeffs is None:
            coeffs = {}
        if not _normalized:
            clean = {}
            for g, c in coeffs.items():
                c = ring.coerce(c)
                if c:
                    clean[g] = c
            coeffs = clean
        self.coeffs = coeffs

    @classmethod
    def delta(cls, group: FiniteGroup, g: GFMatrix, ring: Ring = ZZ):
        return cls(group, ring, {g: ring.coerce(1)}, _normalized=True)

    @classmethod
    def zero(cls, group: FiniteGroup, ring: Ring = ZZ):
        return cls(group, ring, {}, _normalized=True)

    def support(self):
        return set(self.coeffs)

    def coeff(self, g):
        return self.coeffs.get(g, self.ring.coerce(0))

    def _check_compatible(self, other: "AlgebraElement"):
        if self.group is not other.group and self.group.elements != other.group.elements:
            raise ValueError("elements live in different group algebras")
        if self.ring != other.ring:
            raise ValueError(f"ring mismatch: {self.ring} vs {other.ring}")

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check_compatible(other)
        out = dict(self.coeffs)
        for g, c in other.coeffs.items():
            v = out.get(g, 0) + c
            if v:
                out[g] = v
            else:
                out.pop(g, None)
        return AlgebraElement(self.group, self.ring, out, _normalized=True)

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement(self.group, self.ring,
                              {g: -c for g, c in self.coeffs.items()}, _normalized=True)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return self + (-other)

    def scale(self, s) -> "AlgebraElement":
        s = self.ring.coerce(s)
        if isinstance(self.ring, PrimeField):
            out = {g: c * s % self.ring.p for g, c in self.coeffs.items()}
            out = {g: c for g, c in out.items() if c}
        else:
            out = {g: c * s for g, c in self.coeffs.items()} if s else {}
        return AlgebraElement(self.group, self.ring, out, _normalized=True)

    def __mul__(self, other: "AlgebraElement") -> "AlgebraElement":
        """Convolution product: coefficient of k is sum over gh = k of x_g y_h."""
        self._check_compatible(other)
        nx, ny = len(self.coeffs), len(other.coeffs)
        if nx * ny > _BATCH_THRESHOLD:
            return self._mul_batched(other)
        p = self.group.p
        modp = isinstance(self.ring, PrimeField)
        acc: dict = {}
        for g, cg in self.coeffs.items():
            ga = g.a
            for h, ch in other.coeffs.items():
                k = GFMatrix(ga @ h.a, p)
                acc[k] = acc.get(k, 0) + cg * ch
        if modp:
            acc = {g: c % p for g, c in acc.items()}
        return AlgebraElement(self.group, self.ring,
                              {g: c for g, c in acc.items() if c}, _normalized=True)

    def _mul_batched(self, other: "AlgebraElement") -> "AlgebraElement":
        p = self.group.p
        modp = isinstance(self.ring, PrimeField)
        ys = list(other.coeffs.items())
        ystack = np.stack([h.a for h, _ in ys])
        ycoeffs = [c for _, c in ys]
        acc: dict[bytes, object] = {}
        shape = None
        for g, cg in self.coeffs.items():
            prods = np.matmul(g.a[None, :, :], ystack) % p
            shape = prods.shape[1:]
            for t in range(len(ys)):
                key = prods[t].tobytes()
                acc[key] = acc.get(key, 0) + cg * ycoeffs[t]
        out = {}
        for key, c in acc.items():
            if modp:
                c = c % p
            if c:
                arr = np.frombuffer(key, dtype=np.int64).reshape(shape)
                out[GFMatrix(arr, p)] = c
        return AlgebraElement(self.group, self.ring, out, _normalized=True)

    def __eq__(self, other) -> bool:
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self.ring == other.ring and self.coeffs == other.coeffs

    def __hash__(self):
        raise TypeError("AlgebraElement is not hashable")

    def __repr__(self):
        terms = sorted(self.coeffs.items(), key=lambda t: t[0].a.tobytes())
        inner = " + ".join(f"{c}*[{g.a.tolist()}]" for g, c in terms[:4])
        more = f" ... ({len(terms)} terms)" if len(terms) > 4 else ""
        return f"AlgebraElement({inner}{more}; ring={self.ring})"

    def to_ring(self, ring: Ring) -> "AlgebraElement":
        """Reinterpret coefficients in another ring (e.g. reduce mod p)."""
        return AlgebraElement(self.group, ring, dict(self.coeffs))

    def dense(self):
        """Coefficient vector in the group's canonical element order."""
        zero = self.ring.coerce(0)
        out = [zero] * len(self.group)
        for g, c in self.coeffs.items():
            out[self.group.index[g]] = c
        return out


# ---------------------------------------------------------------------------
# Distinguished elements

def steinberg_constant(n: int, p: int) -> int:
    """c(n, p) = prod_{i=1..n}(p^i - 1); coprime to p, and the empty product
    at n = 0 is 1."""
    check_prime(p)
    out = 1
    for i in range(1, n + 1):
        out *= p ** i - 1
    return out


def signed_permutation_sum(n: int, p: int, group: FiniteGroup, ring: Ring = ZZ) -> AlgebraElement:
    """Sum over permutation matrices with the sign of the permutation."""
    coeffs = {permutation_matrix(perm, p): perm_sign(perm)
              for perm in itertools.permutations(range(n))}
    return AlgebraElement(group, ring, coeffs)


def borel_sum(n: int, p: int, group: FiniteGroup, ring: Ring = ZZ) -> AlgebraElement:
    """Sum over the Borel subgroup of invertible upper triangular matrices."""
    return AlgebraElement(group, ring, {b: 1 for b in borel(n, p)})


def unipotent_block_sum(i: int, j: int, p: int, group: FiniteGroup,
                        ring: Ring = ZZ) -> AlgebraElement:
    """Sum over U_{i,j}; support size p^(i*j)."""
    return AlgebraElement(group, ring, {u: 1 for u in unipotent_block(i, j, p)})


def shuffle_sum(i: int, j: int, p: int, group: FiniteGroup, ring: Ring = ZZ) -> AlgebraElement:
    """Signed sum over (i,j)-shuffle permutations: those increasing on the
    first i letters and on the last j letters.  Support size C(i+j, i)."""
    n = i + j
    coeffs = {}
    for first_images in itertools.combinations(range(n), i):
        rest = [x for x in range(n) if x not in first_images]
        perm = list(first_images) + rest
        coeffs[permutation_matrix(perm, p)] = perm_sign(perm)
    return AlgebraElement(group, ring, coeffs)


def block_tensor(x: AlgebraElement, y: AlgebraElement, target: FiniteGroup) -> AlgebraElement:
    """Push x (x) y through the block-diagonal embedding GL_i x GL_j -> GL_{i+j}."""
    if x.ring != y.ring:
        raise ValueError("ring mismatch in block_tensor")
    coeffs = {}
    for a, ca in x.coeffs.items():
        for b, cb in y.coeffs.items():
            coeffs[block_embed(a, b)] = ca * cb
    return AlgebraElement(target, x.ring, coeffs)


# ---------------------------------------------------------------------------
# Modules: concrete representations and the action map

class PermModule:
    """Permutation representation: the group permutes a finite basis set."""

    def __init__(self, group: FiniteGroup, points, act_fn, name: str = ""):
        self.group = group
        self.points = list(points)
        self.index = {pt: i for i, pt in enumerate(self.points)}
        self.dim = len(self.points)
        self.name = name
        self.perms = {}
        for g in group:
            img = np.array([self.index[act_fn(g, pt)] for pt in self.points],
                           dtype=np.int64)
            self.perms[g] = img

    @classmethod
    def regular(cls, group: FiniteGroup) -> "PermModule":
        return cls(group, group.elements, lambda g, x: group.mul(g, x), name="regular")

    @classmethod
    def trivial(cls, group: FiniteGroup) -> "PermModule":
        return cls(group, [0], lambda g, x: x, name="trivial")

    def perm(self, g) -> np.ndarray:
        return self.perms[g]

    def matrix_mod(self, g, p: int) -> np.ndarray:
        m = np.zeros((self.dim, self.dim), dtype=np.int64)
        m[self.perms[g], np.arange(self.dim)] = 1
        return m

    def matrix_exact(self, g):
        m = [[0] * self.dim for _ in range(self.dim)]
        for j, i in enumerate(self.perms[g]):
            m[int(i)][j] = 1
        return m


class MatModule:
    """Representation by explicit matrices, either mod p (numpy int64) or exact
    (nested lists of ints/Fractions) when p is None."""

    def __init__(self, group: FiniteGroup, dim: int, mats: dict, p: int | None,
                 name: str = ""):
        self.group = group
        self.dim = dim
        self.mats = mats
        self.p = p
        self.name = name

    def matrix_mod(self, g, p: int) -> np.ndarray:
        if self.p is None:
            m = np.array([[int(x) % p for x in row] for row in self.mats[g]],
                         dtype=np.int64)
            return m
        if p != self.p:
            raise ValueError("characteristic mismatch")
        return self.mats[g]

    def matrix_exact(self, g):
        if self.p is not None:
            raise ValueError("module is defined mod p, not over the integers")
        return self.mats[g]


def tensor_module(m1, m2, p: int | None):
    """Tensor product module with the diagonal action (Kronecker products)."""
    group = m1.group
    if m2.group is not group and m2.group.elements != group.elements:
        raise ValueError("tensor factors must share the group")
    mats = {}
    for g in group:
        if p is not None:
            mats[g] = np.kron(m1.matrix_mod(g, p), m2.matrix_mod(g, p)) % p
        else:
            a = m1.matrix_exact(g)
            b = m2.matrix_exact(g)
            da, db = len(a), len(b)
            k = [[a[i][j] * b[r][s] for j in range(da) for s in range(db)]
                 for i in range(da) for r in range(db)]
            mats[g] = k
    return MatModule(group, m1.dim * m2.dim, mats, p,
                     name=f"({m1.name})x({m2.name})")


def act_mod(x: AlgebraElement, module, p: int) -> np.ndarray:
    """The matrix of x acting on the module, mod p."""
    if not isinstance(x.ring, PrimeField) or x.ring.p != p:
        raise ValueError("act_mod needs PrimeField coefficients of matching p")
    out = np.zeros((module.dim, module.dim), dtype=np.int64)
    cols = np.arange(module.dim)
    for g, c in x.coeffs.items():
        if isinstance(module, PermModule):
            out[module.perm(g), cols] += c
        else:
            out += c * module.matrix_mod(g, p)
    return out % p


def act_exact(x: AlgebraElement, module):
    """The matrix of x acting on the module, over the integers or p-local
    rationals (nested lists, exact arithmetic)."""
    if isinstance(x.ring, PrimeField):
        raise ValueError("use act_mod for prime-field coefficients")
    d = module.dim
    zero = Fraction(0) if isinstance(x.ring, PLocalRationals) else 0
    out = [[zero] * d for _ in range(d)]
    for g, c in x.coeffs.items():
        if isinstance(module, PermModule):
            for j, i in enumerate(module.perm(g)):
                out[int(i)][j] += c
        else:
            m = module.matrix_exact(g)
            for i in range(d):
                mi = m[i]
                oi = out[i]
                for j in range(d):
                    if mi[j]:
                        oi[j] += c * mi[j]
    return out


def act(x: AlgebraElement, module):
    """Dispatch on the coefficient ring: numpy mod-p matrix for PrimeField,
    exact nested lists otherwise."""
    if isinstance(x.ring, PrimeField):
        return act_mod(x, module, x.ring.p)
    return act_exact(x, module)


def verify_action_homomorphism(module, p: int | None = None, pairs=None) -> None:
    """rho(g) rho(h) = rho(gh) on the given pairs (default: generator pairs)."""
    group = module.group
    gens = pairs if pairs is not None else [
        (g, h) for g in group.generators for h in group.generators]
    for g, h in gens:
        gh = group.mul(g, h)
        if isinstance(module, PermModule):
            lhs = module.perm(g)[module.perm(h)]
            if not np.array_equal(lhs, module.perm(gh)):
                raise AssertionError("action is not a homomorphism")
        elif p is not None:
            lhs = module.matrix_mod(g, p) @ module.matrix_mod(h, p) % p
            if not np.array_equal(lhs, module.matrix_mod(gh, p)):
                raise AssertionError("action is not a homomorphism")
        else:
            a, b = module.matrix_exact(g), module.matrix_exact(h)
            d = module.dim
            prod = [[sum(a[i][k] * b[k][j] for k in range(d)) for j in range(d)]
                    for i in range(d)]
            if prod != [list(r) for r in module.matrix_exact(gh)]:
                raise AssertionError("action is not a homomorphism")


def gl_group(n: int, p: int) -> FiniteGroup:
    """GL_n(F_p) with standard generators, cached per (n, p)."""
    return _gl_cache(n, p)


_gl_groups: dict[tuple[int, int], FiniteGroup] = {}


def _gl_cache(n: int, p: int) -> FiniteGroup:
    key = (n, p)
    if key not in _gl_groups:
        _gl_groups[key] = gf.enumerate_group("GL", n, p)
    return _gl_groups[key]
