"""Kolyvagin derivative combinatorics.

Prime symbols are plain labels; a modulus is a tuple of labels in the global
order.  The module W receiving the kappa' values is a free module R^k and
its elements are (k, |G|) arrays.  ``x[(l, q)]`` is the table entry written
x_l^{(q)}.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import linalg
from .fitting import det
from .modules import expand, rmatmul, empty, as_rmatrix, _stack
from .ring import GorensteinRing

__all__ = [
    "MissingDivisor", "CorankNotOne", "PrimeSymbol", "derivative_operator",
    "norm_element", "group_ring_mul", "telescoping_holds", "derivative_product",
    "permutations_with_sign", "kolyvagin_combination", "stabilizer_rearrangement_check",
    "rearranged_combination", "cofactor", "cofactor_iso", "CofactorIso",
]


class MissingDivisor(KeyError):
    pass


class CorankNotOne(ValueError):
    pass


@dataclass(frozen=True)
class PrimeSymbol:
    label: str
    order: int

    def __post_init__(self):
        if self.order < 2:
            raise ValueError("group order must be at least 2")


# ---------------------------------------------------------------------------
# integral group rings of products of cyclic groups (nd integer arrays)

def group_ring_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.zeros_like(a)
    for idx in zip(*np.nonzero(a)):
        out += a[idx] * np.roll(b, shift=idx, axis=tuple(range(a.ndim)))
    return out


def derivative_operator(order: int) -> np.ndarray:
    """D = sum_{j=1}^{order-1} j sigma^j in Z[C_order]."""
    return np.arange(order, dtype=np.int64)


def norm_element(order: int) -> np.ndarray:
    return np.ones(order, dtype=np.int64)


def telescoping_holds(order: int) -> bool:
    """(sigma - 1) D = |G| - N_G in Z[G]."""
    s_minus_1 = np.zeros(order, dtype=np.int64)
    s_minus_1[1 % order] += 1
    s_minus_1[0] -= 1
    lhs = group_ring_mul(s_minus_1, derivative_operator(order))
    rhs = -norm_element(order)
    rhs[0] += order
    return bool(np.array_equal(lhs, rhs))


def derivative_product(orders) -> np.ndarray:
    """D_n = prod D_q in Z[prod C_q]; coefficient at (j_1..j_k) is prod j_i."""
    out = np.zeros(tuple(orders), dtype=np.int64)
    out[(0,) * len(orders)] = 1
    for axis, n in enumerate(orders):
        D = np.zeros(tuple(orders), dtype=np.int64)
        idx = [0] * len(orders)
        for j in range(n):
            idx[axis] = j
            D[tuple(idx)] = j
        out = group_ring_mul(out, D)
    return out


# ---------------------------------------------------------------------------
# permutation sums

def permutations_with_sign(items):
    """All bijections of ``items`` as dicts, with their signs."""
    items = list(items)
    for perm in itertools.permutations(range(len(items))):
        sign = 1
        seen = [False] * len(perm)
        for i in range(len(perm)):
            if seen[i]:
                continue
            j, length = i, 0
            while not seen[j]:
                seen[j] = True
                j = perm[j]
                length += 1
            if length % 2 == 0:
                sign = -sign
        yield {items[i]: items[perm[i]] for i in range(len(items))}, sign


def _key(labels) -> tuple:
    return tuple(sorted(labels))


def _lookup(kappa_prime: dict, labels):
    k = _key(labels)
    if k not in kappa_prime:
        raise MissingDivisor(f"kappa' missing at divisor {k}")
    return kappa_prime[k]


def _xprod(R: GorensteinRing, x: dict, tau: dict, moved) -> np.ndarray:
    acc = R.one()
    for q in moved:
        acc = R.mul(acc, x[(tau[q], q)])
    return acc


def kolyvagin_combination(R: GorensteinRing, kappa_prime: dict, x: dict, n) -> np.ndarray:
    """sum over permutations tau of V(n) of sgn(tau) (prod_{tau(q) != q} x_{tau(q)}^{(q)}) kappa'_{d_tau}."""
    n = _key(n)
    out = None
    for tau, sign in permutations_with_sign(n):
        fixed = [q for q in n if tau[q] == q]
        moved = [q for q in n if tau[q] != q]
        coeff = _xprod(R, x, tau, moved)
        term = (np.asarray(_lookup(kappa_prime, fixed)) @ R.reg(coeff)) % R.N
        out = term * sign if out is None else out + sign * term
    return out % R.N


def _cycles_through(q, support) -> list:
    """Cyclic permutations of subsets of ``support`` that move q (as dicts, with sign)."""
    others = [v for v in support if v != q]
    out = []
    for k in range(1, len(others) + 1):
        for chosen in itertools.combinations(others, k):
            for order in itertools.permutations(chosen):
                cyc = (q,) + order
                rho = {v: v for v in support}
                for i, v in enumerate(cyc):
                    rho[v] = cyc[(i + 1) % len(cyc)]
                sign = -1 if len(cyc) % 2 == 0 else 1
                out.append((rho, sign))
    return out


def rearranged_combination(R: GorensteinRing, kappa_prime: dict, x: dict, n, q) -> np.ndarray:
    """Right-hand side grouped by the stabiliser U_q of q.

    For sigma fixing q, lambda_sigma = kappa'_{d_sigma} plus the sum over the
    cycles rho through q supported on the fixed points of sigma.
    """
    n = _key(n)
    if q not in n:
        raise ValueError("q must divide n")
    out = np.zeros_like(np.asarray(_lookup(kappa_prime, n)))
    for sigma, sign in permutations_with_sign(n):
        if sigma[q] != q:
            continue
        fixed = [v for v in n if sigma[v] == v]
        moved = [v for v in n if sigma[v] != v]
        lam = np.asarray(_lookup(kappa_prime, fixed)).copy()
        for rho, rsign in _cycles_through(q, fixed):
            rfixed = [v for v in fixed if rho[v] == v]
            rmoved = [v for v in fixed if rho[v] != v]
            c = _xprod(R, x, rho, rmoved)
            lam = lam + rsign * (np.asarray(_lookup(kappa_prime, rfixed)) @ R.reg(c))
        coeff = _xprod(R, x, sigma, moved)
        out = out + sign * (lam % R.N) @ R.reg(coeff)
    return out % R.N


def stabilizer_rearrangement_check(R: GorensteinRing, n, q, kappa_prime: dict, x: dict) -> bool:
    lhs = kolyvagin_combination(R, kappa_prime, x, n)
    rhs = rearranged_combination(R, kappa_prime, x, n, q)
    return bool(np.array_equal(lhs, rhs))


# ---------------------------------------------------------------------------
# cofactor map

def cofactor(R: GorensteinRing, f) -> np.ndarray:
    """Adjugate: c[i, j] = (-1)^{i+j} det(f with row j and column i removed)."""
    f = as_rmatrix(R, f)
    k = f.shape[0]
    out = empty(R, k, k)
    if k == 1:
        out[0, 0] = R.one()
        return out
    for i in range(k):
        for j in range(k):
            rows = [a for a in range(k) if a != j]
            cols = [b for b in range(k) if b != i]
            m = det(R, f[rows][:, cols])
            out[i, j] = m if (i + j) % 2 == 0 else (-m) % R.N
    return out


@dataclass
class CofactorIso:
    ring: GorensteinRing
    tau: np.ndarray
    f: np.ndarray            # 1 - tau
    adj: np.ndarray          # cofactor of f: the map x -> x @ adj

    def domain_span(self) -> np.ndarray:
        """Howell basis of (tau - 1)A inside A (the quotient's relations)."""
        return linalg.howell_form(expand(self.ring, self.f), self.ring.N)

    def target_span(self) -> np.ndarray:
        """Howell basis of A^{tau=1} = ker(f)."""
        R = self.ring
        K = linalg.kernel(expand(R, self.f), R.N)
        return K

    def image_span(self) -> np.ndarray:
        return linalg.howell_form(expand(self.ring, self.adj), self.ring.N)

    def kernel_span(self) -> np.ndarray:
        R = self.ring
        K = linalg.kernel(expand(R, self.adj), R.N)
        return K

    def is_bijective(self) -> bool:
        R = self.ring
        dom, tgt = self.domain_span(), self.target_span()
        img, ker = self.image_span(), self.kernel_span()
        lands = linalg.span_contains(tgt, img, R.N)
        onto = linalg.span_contains(img, tgt, R.N)
        injective = (ker.shape == dom.shape and np.array_equal(ker, dom))
        return bool(lands and onto and injective)

    def composition_zero(self) -> bool:
        """(tau - 1) after the cofactor map vanishes."""
        return not rmatmul(self.ring, self.adj, self.f).any()


def cofactor_iso(R: GorensteinRing, tau) -> CofactorIso:
    """The map A/(tau-1)A -> A^{tau=1} induced by the cofactor of f = 1 - tau."""
    tau = as_rmatrix(R, tau)
    k = tau.shape[0]
    f = (-tau) % R.N
    for i in range(k):
        f[i, i] = (f[i, i] + R.one()) % R.N
    residue = f.sum(axis=2) % R.p
    rank = len(linalg.howell_form(residue, R.p)) if k else 0
    if k - rank != 1:
        raise CorankNotOne(f"residual corank is {k - rank}, expected 1")
    if det(R, f).any():
        raise CorankNotOne("det(1 - tau) is nonzero, so A^{tau=1} is not the target")
    return CofactorIso(R, tau, f, cofactor(R, f))
