"""Finite local group rings (Z/p^m)[G] for abelian p-groups G.

A ring element is a coefficient vector indexed by the group elements, which
are ordered lexicographically by their exponent tuples.  Multiplication is
group-ring convolution.  Most solving is done after expanding an element to
its regular representation, the |G| x |G| matrix of multiplication on the
group basis (row convention: ``coeffs(y) @ reg(x) == coeffs(y * x)``).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import linalg

__all__ = [
    "NonPrimeModulus", "NonLocalGroup", "RingMismatch", "SocleNotSimple",
    "DepthExceeded", "GroupSpec", "GorensteinRing", "RingElement", "Ideal",
    "make_ring", "arith", "regular_rep", "socle", "ideal_ops",
    "annihilator_ideal", "quotient_ring", "DEFAULT_BOUND",
]

DEFAULT_BOUND = 65536


class NonPrimeModulus(ValueError):
    pass


class NonLocalGroup(ValueError):
    pass


class RingMismatch(ValueError):
    pass


class SocleNotSimple(ArithmeticError):
    pass


class DepthExceeded(ValueError):
    pass


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    f = 2
    while f * f <= p:
        if p % f == 0:
            return False
        f += 1
    return True


def _is_power_of(n: int, p: int) -> bool:
    if n < 2:
        return False
    while n % p == 0:
        n //= p
    return n == 1


@dataclass(frozen=True)
class GroupSpec:
    cyclic_orders: tuple[int, ...] = ()

    def __init__(self, cyclic_orders=()):
        object.__setattr__(self, "cyclic_orders", tuple(int(c) for c in cyclic_orders))

    @property
    def order(self) -> int:
        out = 1
        for c in self.cyclic_orders:
            out *= c
        return out


class GorensteinRing:
    """The ring (Z/p^m)[G]; immutable, hashable by (p, m, group)."""

    def __init__(self, p: int, m: int, group: GroupSpec):
        self.p = int(p)
        self.m = int(m)
        self.group = group if isinstance(group, GroupSpec) else GroupSpec(group)
        self.N = self.p ** self.m
        self.n = self.group.order
        orders = self.group.cyclic_orders
        self.exponents = list(itertools.product(*[range(c) for c in orders])) or [()]
        index = {e: i for i, e in enumerate(self.exponents)}
        n = self.n

        def idx(e):
            return index[tuple(x % c for x, c in zip(e, orders))]

        add = np.zeros((n, n), dtype=np.intp)
        sub = np.zeros((n, n), dtype=np.intp)
        for i, a in enumerate(self.exponents):
            for j, b in enumerate(self.exponents):
                add[i, j] = idx(tuple(x + y for x, y in zip(a, b)))
                sub[i, j] = idx(tuple(y - x for x, y in zip(a, b)))
        self.add_index = add
        # reg(x)[g, h] = x[h - g]
        self.sub_index = sub
        self._pairs = [(i, j, int(add[i, j])) for i in range(n) for j in range(n)]
        self.generator_indices = []
        for k in range(len(orders)):
            e = [0] * len(orders)
            e[k] = 1
            self.generator_indices.append(index[tuple(e)])

    # identity and hashing -------------------------------------------------
    def key(self):
        return (self.p, self.m, self.group.cyclic_orders)

    def __eq__(self, other):
        return isinstance(other, GorensteinRing) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"GorensteinRing(p={self.p}, m={self.m}, group={list(self.group.cyclic_orders)})"

    def name(self) -> str:
        base = f"Z/{self.N}" if self.m > 1 else f"F_{self.p}"
        if not self.group.cyclic_orders:
            return base
        return base + "[" + "x".join(f"C_{c}" for c in self.group.cyclic_orders) + "]"

    @property
    def cardinality(self) -> int:
        return self.N ** self.n

    def to_json(self) -> dict:
        return {"p": self.p, "m": self.m, "group": list(self.group.cyclic_orders)}

    @classmethod
    def from_json(cls, data: dict) -> "GorensteinRing":
        return make_ring(data["p"], data["m"], GroupSpec(data["group"]), bound=None)

    # raw coefficient arithmetic (numpy vectors of length n) ---------------
    def zero(self) -> np.ndarray:
        return np.zeros(self.n, dtype=np.int64)

    def one(self) -> np.ndarray:
        v = self.zero()
        v[0] = 1
        return v

    def scalar(self, c: int) -> np.ndarray:
        v = self.zero()
        v[0] = c % self.N
        return v

    def group_element(self, i: int) -> np.ndarray:
        v = self.zero()
        v[i] = 1
        return v

    def reg(self, x) -> np.ndarray:
        return np.asarray(x, dtype=np.int64)[self.sub_index]

    def mul(self, x, y) -> np.ndarray:
        return (np.asarray(x, dtype=np.int64) @ self.reg(y)) % self.N

    def mul_t(self, x: tuple, y: tuple) -> tuple:
        """Fast product of coefficient tuples."""
        out = [0] * self.n
        for i, j, k in self._pairs:
            a = x[i]
            if a:
                b = y[j]
                if b:
                    out[k] += a * b
        N = self.N
        return tuple(c % N for c in out)

    def add_t(self, x: tuple, y: tuple) -> tuple:
        N = self.N
        return tuple((a + b) % N for a, b in zip(x, y))

    def sub_t(self, x: tuple, y: tuple) -> tuple:
        N = self.N
        return tuple((a - b) % N for a, b in zip(x, y))

    def neg_t(self, x: tuple) -> tuple:
        N = self.N
        return tuple((-a) % N for a in x)

    def is_unit(self, x) -> bool:
        return int(np.sum(x)) % self.p != 0

    def augmentation(self, x) -> int:
        return int(np.sum(x)) % self.p

    def inverse(self, x) -> np.ndarray:
        if not self.is_unit(x):
            raise ZeroDivisionError("not a unit")
        return linalg.solve(self.reg(x), self.one(), self.N)

    def maximal_generators(self) -> list[np.ndarray]:
        gens = [self.scalar(self.p)]
        for gi in self.generator_indices:
            v = self.group_element(gi)
            v[0] = (v[0] - 1) % self.N
            gens.append(v)
        return gens

    def all_elements(self) -> np.ndarray:
        """Every element as rows of an array (only for small rings)."""
        grids = np.indices([self.N] * self.n).reshape(self.n, -1).T
        return grids.astype(np.int64)

    def element(self, coeffs) -> "RingElement":
        return RingElement(self, coeffs)

    def random_element(self, rng) -> np.ndarray:
        return np.array([rng.below(self.N) for _ in range(self.n)], dtype=np.int64)

    @cached_property
    def socle_generator(self) -> np.ndarray:
        return socle(self).canonical[0].copy()


def make_ring(p: int, m: int, group=(), bound: int | None = DEFAULT_BOUND) -> GorensteinRing:
    if not _is_prime(int(p)):
        raise NonPrimeModulus(f"{p} is not prime")
    if int(m) < 1:
        raise ValueError("m must be positive")
    group = group if isinstance(group, GroupSpec) else GroupSpec(group)
    for c in group.cyclic_orders:
        if not _is_power_of(c, p):
            raise NonLocalGroup(f"cyclic order {c} is not a power of {p}")
    R = GorensteinRing(p, m, group)
    if bound is not None and R.cardinality > bound:
        raise ValueError(f"|R| = {R.cardinality} exceeds the enumeration bound {bound}")
    return R


class RingElement:
    """An element of a GorensteinRing with operator overloading."""

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring: GorensteinRing, coeffs):
        c = np.asarray(coeffs, dtype=np.int64).reshape(-1)
        if c.shape[0] != ring.n:
            raise ValueError("coefficient vector has the wrong length")
        self.ring = ring
        self.coeffs = c % ring.N

    def _check(self, other):
        if isinstance(other, int):
            return RingElement(self.ring, self.ring.scalar(other))
        if not isinstance(other, RingElement) or other.ring != self.ring:
            raise RingMismatch("elements of different rings")
        return other

    def __add__(self, other):
        other = self._check(other)
        return RingElement(self.ring, self.coeffs + other.coeffs)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._check(other)
        return RingElement(self.ring, self.coeffs - other.coeffs)

    def __rsub__(self, other):
        return self._check(other) - self

    def __neg__(self):
        return RingElement(self.ring, -self.coeffs)

    def __mul__(self, other):
        other = self._check(other)
        return RingElement(self.ring, self.ring.mul(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = RingElement(self.ring, self.ring.one())
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, int):
            other = RingElement(self.ring, self.ring.scalar(other))
        return (isinstance(other, RingElement) and other.ring == self.ring
                and bool(np.array_equal(self.coeffs, other.coeffs)))

    def __hash__(self):
        return hash((self.ring, tuple(int(c) for c in self.coeffs)))

    def is_zero(self) -> bool:
        return not self.coeffs.any()

    def is_unit(self) -> bool:
        return self.ring.is_unit(self.coeffs)

    def to_json(self) -> list[int]:
        return [int(c) for c in self.coeffs]

    def __repr__(self):
        terms = []
        for c, e in zip(self.coeffs, self.ring.exponents):
            if c:
                mono = "*".join(f"g{k}^{x}" if x > 1 else f"g{k}"
                                for k, x in enumerate(e) if x)
                terms.append(f"{c}" + (f"*{mono}" if mono else ""))
        return " + ".join(terms) if terms else "0"


def arith(x: RingElement, y: RingElement | None, op: str) -> RingElement:
    if op == "neg":
        return -x
    if y is None or x.ring != y.ring:
        raise RingMismatch("elements of different rings")
    if op == "add":
        return x + y
    if op == "mul":
        return x * y
    raise ValueError(f"unknown op {op!r}")


def regular_rep(x) -> np.ndarray:
    if isinstance(x, RingElement):
        return x.ring.reg(x.coeffs)
    raise TypeError("regular_rep expects a RingElement")


def _as_coeffs(ring: GorensteinRing, x) -> np.ndarray:
    if isinstance(x, RingElement):
        if x.ring != ring:
            raise RingMismatch("element of another ring")
        return x.coeffs
    return np.asarray(x, dtype=np.int64) % ring.N


class Ideal:
    """An ideal, stored as the Howell basis of its Z/p^m-span."""

    def __init__(self, ring: GorensteinRing, generators=(), canonical=None):
        self.ring = ring
        gens = [_as_coeffs(ring, g) for g in generators]
        self.generators = [g for g in gens if g.any()]
        if canonical is None:
            if self.generators:
                rows = np.vstack([ring.reg(g) for g in self.generators])
                canonical = linalg.howell_form(rows, ring.N)
            else:
                canonical = np.zeros((0, ring.n), dtype=np.int64)
        self.canonical = canonical

    @classmethod
    def from_span(cls, ring: GorensteinRing, H: np.ndarray) -> "Ideal":
        """Ideal whose Z/p^m span has Howell basis ``H`` (assumed R-stable)."""
        H = linalg.howell_form(H, ring.N) if len(H) else np.zeros((0, ring.n), dtype=np.int64)
        return cls(ring, list(H), canonical=H)

    @classmethod
    def whole(cls, ring):
        return cls(ring, [ring.one()])

    @classmethod
    def zero(cls, ring):
        return cls(ring, [])

    def contains_element(self, x) -> bool:
        return linalg.in_span(self.canonical, _as_coeffs(self.ring, x), self.ring.N)

    def contains(self, other: "Ideal") -> bool:
        if other.ring != self.ring:
            raise RingMismatch("ideals of different rings")
        return linalg.span_contains(self.canonical, other.canonical, self.ring.N)

    def is_whole(self) -> bool:
        return self.contains_element(self.ring.one())

    def is_zero(self) -> bool:
        return len(self.canonical) == 0

    @property
    def size(self) -> int:
        return linalg.span_size(self.canonical, self.ring.N)

    def __eq__(self, other):
        return (isinstance(other, Ideal) and other.ring == self.ring
                and self.canonical.shape == other.canonical.shape
                and bool(np.array_equal(self.canonical, other.canonical)))

    def __hash__(self):
        return hash((self.ring, self.canonical.tobytes(), self.canonical.shape))

    def __add__(self, other: "Ideal") -> "Ideal":
        return ideal_ops(self, other, "sum")

    def __mul__(self, other: "Ideal") -> "Ideal":
        return ideal_ops(self, other, "product")

    def __and__(self, other: "Ideal") -> "Ideal":
        return ideal_ops(self, other, "intersection")

    def basis_elements(self) -> list[np.ndarray]:
        """Rows of the canonical basis; they generate the ideal."""
        return [row.copy() for row in self.canonical]

    def minimal_generators(self) -> list[np.ndarray]:
        from .modules import minimal_generators
        gens = minimal_generators(self.ring, self.canonical, None, 1)
        return [g[0] for g in gens]

    def image(self, target: GorensteinRing) -> "Ideal":
        """Image under coefficient reduction to a ring with the same group."""
        if target.group != self.ring.group or self.ring.N % target.N:
            raise RingMismatch("no coefficient projection between these rings")
        return Ideal(target, [row % target.N for row in self.canonical])

    def to_json(self) -> list[list[int]]:
        return [[int(c) for c in row] for row in self.canonical]

    def __repr__(self):
        if self.is_zero():
            return "(0)"
        if self.is_whole():
            return "(1)"
        gens = [RingElement(self.ring, g) for g in self.minimal_generators()]
        return "(" + ", ".join(map(repr, gens)) + ")"


def ideal_ops(I: Ideal, J, op: str):
    R = I.ring
    if op == "membership":
        return I.contains_element(J)
    if J.ring != R:
        raise RingMismatch("ideals of different rings")
    if op == "sum":
        rows = np.vstack([I.canonical, J.canonical])
        return Ideal.from_span(R, rows)
    if op == "product":
        gens = [R.mul(a, b) for a in I.canonical for b in J.canonical]
        return Ideal(R, gens)
    if op == "intersection":
        if I.is_zero() or J.is_zero():
            return Ideal.zero(R)
        A = np.vstack([I.canonical, (-J.canonical) % R.N])
        K = linalg.kernel(A, R.N)
        if len(K) == 0:
            return Ideal.zero(R)
        rows = (K[:, :len(I.canonical)] @ I.canonical) % R.N
        return Ideal.from_span(R, rows)
    if op == "equals":
        return I == J
    if op == "contains":
        return I.contains(J)
    raise ValueError(f"unknown op {op!r}")


def annihilator_ideal(I: Ideal) -> Ideal:
    R = I.ring
    if I.is_zero():
        return Ideal.whole(R)
    A = np.hstack([R.reg(g) for g in I.canonical])
    return Ideal.from_span(R, linalg.kernel(A, R.N))


def annihilator_of_elements(R: GorensteinRing, elems) -> Ideal:
    elems = [e for e in elems if np.asarray(e).any()]
    if not elems:
        return Ideal.whole(R)
    A = np.hstack([R.reg(g) for g in elems])
    return Ideal.from_span(R, linalg.kernel(A, R.N))


def socle(R: GorensteinRing) -> Ideal:
    A = np.hstack([R.reg(g) for g in R.maximal_generators()])
    I = Ideal.from_span(R, linalg.kernel(A, R.N))
    # the socle is killed by p, so its size is p^dim
    if I.size != R.p:
        raise SocleNotSimple(f"socle has {I.size} elements, expected {R.p}")
    return I


def quotient_ring(R: GorensteinRing, i: int) -> GorensteinRing:
    if i < 1:
        raise ValueError("depth must be positive")
    if i > R.m:
        raise DepthExceeded(f"depth {i} exceeds m = {R.m}")
    return GorensteinRing(R.p, i, R.group)


def project(x, target: GorensteinRing) -> np.ndarray:
    """Canonical projection of coefficients onto a quotient ring."""
    return np.asarray(x, dtype=np.int64) % target.N
