"""Exterior biduals, rank reduction and the kernel-bidual sequence.

For a presented module M let phi_1..phi_s be the chosen generators of M^*.
An element of the r-th exterior bidual (Lambda^r M^*)^* is determined by its
values on the wedge monomials phi_J (J an r-subset of [s]), so it is stored
as that value vector.  The admissible value vectors are exactly those that
kill the relations of Lambda^r M^*, which is a submodule of a free module;
equality of elements is therefore equality of value vectors.

For a free module R^d the dual generators are the coordinate functionals, so
value vectors are the usual coordinates in Lambda^r R^d.
"""

from __future__ import annotations

from functools import cached_property, lru_cache

import numpy as np

from . import linalg
from .fitting import det
from .modules import (
    ModuleMap, PresentedModule, empty, expand, free_module, kernel_module,
    minimal_generators, present_subquotient, solve_combination, subsets, wedge_sign,
    evaluate, _stack,
)
from .ring import Ideal, annihilator_of_elements

__all__ = [
    "RankTooLarge", "NotExact", "ExteriorBidual", "BidualElement", "exterior_bidual",
    "dual_coordinates", "wedge_coefficients", "rank_reduce", "kernel_bidual_map",
    "KernelBidual", "image_of_element", "annihilator_of_element", "contract_free",
]


class RankTooLarge(ValueError):
    pass


class NotExact(ValueError):
    pass


class ExteriorBidual:
    """The module (Lambda^r M^*)^* with its value-vector realisation."""

    def __init__(self, M: PresentedModule, r: int):
        if r < 0:
            raise ValueError("rank must be non-negative")
        self.module = M
        self.ring = M.ring
        self.r = r
        D = M.dual_data
        self.functionals = D.functionals
        self.s = D.functionals.shape[0]
        self.monomials = subsets(self.s, r)
        self.index = {J: k for k, J in enumerate(self.monomials)}

    @property
    def rank_count(self) -> int:
        return len(self.monomials)

    @cached_property
    def constraints(self) -> np.ndarray:
        """Matrix (monomials x relations) whose kernel is the bidual."""
        R = self.ring
        r = self.r
        syz = self.module.dual_data.presentation.relations
        cols = []
        if r >= 1 and self.monomials:
            for rho in syz:
                for K in subsets(self.s, r - 1):
                    col = np.zeros((len(self.monomials), R.n), dtype=np.int64)
                    for i in range(self.s):
                        if i in K or not rho[i].any():
                            continue
                        col[self.index[tuple(sorted(K + (i,)))]] += wedge_sign((i,) + K) * rho[i]
                    if col.any():
                        cols.append(col % R.N)
        if not cols:
            return empty(R, len(self.monomials), 0)
        return np.stack(cols, axis=1)

    @cached_property
    def span(self) -> np.ndarray:
        R = self.ring
        width = self.rank_count * R.n
        C = self.constraints
        if C.shape[1] == 0:
            return np.eye(width, dtype=np.int64)
        K = linalg.kernel(expand(R, C), R.N)
        if K.shape[0] == 0:
            return np.zeros((0, width), dtype=np.int64)
        return K

    @cached_property
    def generators(self) -> np.ndarray:
        return minimal_generators(self.ring, self.span, None, self.rank_count)

    @cached_property
    def presentation(self) -> PresentedModule:
        return present_subquotient(self.ring, self.span, None, self.rank_count)[1]

    def generator_values(self) -> list[np.ndarray]:
        return [g for g in self.generators]

    def contains(self, values) -> bool:
        v = np.asarray(values, dtype=np.int64).reshape(-1)
        return linalg.in_span(self.span, v, self.ring.N)

    def element(self, values) -> "BidualElement":
        v = np.asarray(values, dtype=np.int64).reshape(self.rank_count, self.ring.n) % self.ring.N
        if not self.contains(v):
            raise ValueError("value vector does not define an element of the bidual")
        return BidualElement(self, v)

    def zero(self) -> "BidualElement":
        return BidualElement(self, np.zeros((self.rank_count, self.ring.n), dtype=np.int64))

    @cached_property
    def canonical_matrix(self) -> np.ndarray:
        """Matrix of Lambda^r M -> bidual on wedge monomials of generators of M."""
        R = self.ring
        b = self.module.gens
        src = subsets(b, self.r)
        out = empty(R, len(src), self.rank_count)
        Phi = self.functionals            # Phi[k, j] = phi_k(e_j)
        for a, I in enumerate(src):
            for c, J in enumerate(self.monomials):
                out[a, c] = det(R, Phi[list(J)][:, list(I)])
        return out

    def canonical_map(self) -> ModuleMap:
        from .modules import exterior_power
        target = self.presentation
        src = exterior_power(self.module, self.r)
        gens = self.generators
        rows = [solve_combination(self.ring, gens, row) for row in self.canonical_matrix]
        mat = np.array(rows, dtype=np.int64).reshape(src.gens, target.gens, self.ring.n) \
            if rows else empty(self.ring, src.gens, target.gens)
        return ModuleMap(src, target, mat)

    def image_of_wedge(self, vectors) -> "BidualElement":
        """Canonical image of m_1 ^ ... ^ m_r for vectors of R^b."""
        R = self.ring
        vals = np.zeros((self.rank_count, R.n), dtype=np.int64)
        vecs = [np.asarray(v, dtype=np.int64).reshape(self.module.gens, R.n) for v in vectors]
        for c, J in enumerate(self.monomials):
            mat = np.zeros((self.r, self.r, R.n), dtype=np.int64)
            for x, k in enumerate(J):
                for y, v in enumerate(vecs):
                    mat[x, y] = evaluate(R, self.functionals[k], v)
            vals[c] = det(R, mat)
        return BidualElement(self, vals)

    def __repr__(self):
        return f"ExteriorBidual(r={self.r}, dual generators={self.s}, |.|={self.presentation.cardinality})"


@lru_cache(maxsize=256)
def _cached_bidual(M: PresentedModule, r: int) -> ExteriorBidual:
    return ExteriorBidual(M, r)


def exterior_bidual(M: PresentedModule, r: int) -> ExteriorBidual:
    return _cached_bidual(M, r)


class BidualElement:
    __slots__ = ("bidual", "values")

    def __init__(self, bidual: ExteriorBidual, values):
        self.bidual = bidual
        self.values = np.asarray(values, dtype=np.int64) % bidual.ring.N

    def __add__(self, other):
        return BidualElement(self.bidual, self.values + other.values)

    def __sub__(self, other):
        return BidualElement(self.bidual, self.values - other.values)

    def __neg__(self):
        return BidualElement(self.bidual, -self.values)

    def scale(self, x):
        R = self.bidual.ring
        x = getattr(x, "coeffs", x)
        return BidualElement(self.bidual, self.values @ R.reg(x))

    def __eq__(self, other):
        return isinstance(other, BidualElement) and np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash(self.values.tobytes())

    def is_zero(self) -> bool:
        return not self.values.any()

    def evaluate(self, functionals) -> np.ndarray:
        """a(f_1 ^ ... ^ f_r) for functionals on M given as (b, n) vectors."""
        B = self.bidual
        R = B.ring
        coeffs = wedge_coefficients(R, dual_coordinates(B.module, functionals), B.r)
        out = R.zero()
        for w, v in zip(coeffs, self.values):
            if w.any() and v.any():
                out = (out + R.mul(w, v)) % R.N
        return out

    def __repr__(self):
        return f"BidualElement({self.values.tolist()})"


def dual_coordinates(M: PresentedModule, functionals) -> np.ndarray:
    """Express functionals on M in terms of the chosen dual generators."""
    R = M.ring
    Phi = M.dual_data.functionals
    fs = [np.asarray(f, dtype=np.int64).reshape(M.gens, R.n) % R.N for f in functionals]
    if not fs:
        return empty(R, 0, Phi.shape[0])
    rows = []
    for f in fs:
        try:
            rows.append(solve_combination(R, Phi, f))
        except linalg.NoSolution:
            raise ValueError("vector is not a functional on the module") from None
    return np.array(rows, dtype=np.int64).reshape(len(fs), Phi.shape[0], R.n)


def wedge_coefficients(ring, D: np.ndarray, k: int | None = None) -> np.ndarray:
    """Coefficients of (sum_j D_1j phi_j) ^ ... ^ (sum_j D_kj phi_j) on phi_K."""
    k0, s, n = D.shape
    mons = subsets(s, k0)
    out = np.zeros((len(mons), n), dtype=np.int64)
    for c, K in enumerate(mons):
        out[c] = det(ring, D[:, list(K)])
    return out


def rank_reduce(a: BidualElement, f, degree: int | None = None) -> BidualElement:
    """The element g -> a(f ^ g) of the (r - s)-th bidual.

    ``f`` is either a list of functionals on M (read as their wedge) or a
    coefficient array over the s-subsets of the dual generators together with
    ``degree = s``.
    """
    B = a.bidual
    R = B.ring
    if degree is None:
        D = dual_coordinates(B.module, f)
        degree = D.shape[0]
        coeffs = wedge_coefficients(R, D)
    else:
        coeffs = np.asarray(f, dtype=np.int64)
    if degree > B.r:
        raise RankTooLarge(f"cannot reduce rank {B.r} by {degree}")
    target = exterior_bidual(B.module, B.r - degree)
    out = np.zeros((target.rank_count, R.n), dtype=np.int64)
    Ks = subsets(B.s, degree)
    for c, L in enumerate(target.monomials):
        acc = R.zero()
        for w, K in zip(coeffs, Ks):
            if not w.any() or set(K) & set(L):
                continue
            v = a.values[B.index[tuple(sorted(K + L))]]
            if not v.any():
                continue
            term = R.mul(w, v)
            acc = acc + term if wedge_sign(K + L) > 0 else acc - term
        out[c] = acc % R.N
    return BidualElement(target, out)


def image_of_element(a: BidualElement) -> Ideal:
    """The ideal {a(f)}; the dual monomials generate Lambda^r M^*."""
    return Ideal(a.bidual.ring, list(a.values))


def annihilator_of_element(a: BidualElement) -> Ideal:
    return annihilator_of_elements(a.bidual.ring, list(a.values))


def contract_free(ring, x: np.ndarray, d: int, r: int, psi: np.ndarray) -> np.ndarray:
    """psi (a functional on R^d) contracted into x in Lambda^r R^d."""
    out = np.zeros((len(subsets(d, r - 1)), ring.n), dtype=np.int64)
    index = {I: k for k, I in enumerate(subsets(d, r))}
    for c, L in enumerate(subsets(d, r - 1)):
        acc = ring.zero()
        for j in range(d):
            if j in L or not psi[j].any():
                continue
            v = x[index[tuple(sorted((j,) + L))]]
            if not v.any():
                continue
            term = ring.mul(psi[j], v)
            acc = acc + term if wedge_sign((j,) + L) > 0 else acc - term
        out[c] = acc % ring.N
    return out


class KernelBidual:
    """Data attached to an exact sequence 0 -> N -> M -> R^s given by f."""

    def __init__(self, M: PresentedModule, f: np.ndarray, N_gens: np.ndarray, N: PresentedModule):
        self.M = M
        self.ring = M.ring
        self.f = f                       # (b, s, n): column i is the functional f_i
        self.N_gens = N_gens             # (c, b, n) generators of N inside M
        self.N = N
        R = self.ring
        PhiM = M.dual_data.functionals   # (sM, b, n)
        psi = N.dual_data.functionals    # (t, c, n)
        sM = PhiM.shape[0]
        C = np.zeros((sM, psi.shape[0], R.n), dtype=np.int64)
        for j in range(sM):
            restricted = np.array([evaluate(R, PhiM[j], u) for u in N_gens], dtype=np.int64)
            restricted = restricted.reshape(N.gens, R.n)
            try:
                C[j] = solve_combination(R, psi, restricted)
            except linalg.NoSolution:
                raise NotExact("restriction of a functional is not a functional on N") from None
        self.restriction = C

    @property
    def s(self) -> int:
        return self.f.shape[1]

    def functionals(self) -> list[np.ndarray]:
        return [self.f[:, i, :] for i in range(self.s)]

    def iota_matrix(self, k: int) -> np.ndarray:
        """Matrix of the injection of k-th biduals, N side to M side."""
        R = self.ring
        BN = exterior_bidual(self.N, k)
        BM = exterior_bidual(self.M, k)
        C = self.restriction
        out = empty(R, BN.rank_count, BM.rank_count)
        for a, L in enumerate(BN.monomials):
            for b, J in enumerate(BM.monomials):
                out[a, b] = det(R, C[list(J)][:, list(L)])
        return out

    def iota(self, a: BidualElement) -> BidualElement:
        R = self.ring
        k = a.bidual.r
        mat = self.iota_matrix(k)
        BM = exterior_bidual(self.M, k)
        vals = (a.values.reshape(1, -1) @ expand(R, mat)) % R.N if mat.size else \
            np.zeros((1, BM.rank_count * R.n), dtype=np.int64)
        return BidualElement(BM, vals.reshape(BM.rank_count, R.n))

    def image_span(self, k: int) -> np.ndarray:
        """Howell basis of the image of the k-th bidual of N inside that of M."""
        R = self.ring
        BN = exterior_bidual(self.N, k)
        BM = exterior_bidual(self.M, k)
        G = BN.generators
        if G.shape[0] == 0 or BM.rank_count == 0:
            return np.zeros((0, BM.rank_count * R.n), dtype=np.int64)
        from .modules import rmatmul
        imgs = rmatmul(R, G.reshape(G.shape[0], BN.rank_count, R.n), self.iota_matrix(k))
        return linalg.howell_form(expand(R, imgs), R.N)

    def lift(self, b: BidualElement) -> BidualElement:
        """The unique element of the bidual of N mapping to ``b``."""
        R = self.ring
        k = b.bidual.r
        BN = exterior_bidual(self.N, k)
        G = BN.generators
        from .modules import rmatmul
        if G.shape[0] == 0:
            if b.values.any():
                raise linalg.NoSolution("element is not in the image")
            return BN.zero()
        imgs = rmatmul(R, G, self.iota_matrix(k))
        c = solve_combination(R, imgs, b.values)
        vals = rmatmul(R, c.reshape(1, -1, R.n), G)[0]
        return BidualElement(BN, vals)

    def reduce(self, a: BidualElement) -> BidualElement:
        """(wedge of the f_i)(a), lifted to the (r - s)-th bidual of N."""
        return self.lift(rank_reduce(a, self.functionals()))

    def diagonal(self, a: BidualElement) -> list[BidualElement]:
        return [rank_reduce(a, [fi]) for fi in self.functionals()]

    def diagonal_kernel_span(self, k: int) -> np.ndarray:
        """Howell basis of the kernel of the diagonal map on the k-th bidual of M."""
        R = self.ring
        BM = exterior_bidual(self.M, k)
        if BM.rank_count == 0:
            return np.zeros((0, 0), dtype=np.int64)
        lower = exterior_bidual(self.M, k - 1)
        # matrix of a -> (f_i(a))_i on value vectors, one block per i
        blocks = []
        for fi in self.functionals():
            coeff = wedge_coefficients(R, dual_coordinates(self.M, [fi]))
            mat = empty(R, BM.rank_count, lower.rank_count)
            for c, L in enumerate(lower.monomials):
                for w, (K,) in zip(coeff, [(x,) for x in subsets(BM.s, 1)]):
                    if not w.any() or K[0] in L:
                        continue
                    sign = wedge_sign(K + L)
                    mat[BM.index[tuple(sorted(K + L))], c] += sign * w
            blocks.append(mat % R.N)
        parts = [expand(R, BM.constraints)] if BM.constraints.shape[1] else []
        parts += [expand(R, m) for m in blocks]
        A = np.hstack(parts) if parts else np.zeros((BM.rank_count * R.n, 0), dtype=np.int64)
        if A.shape[1] == 0:
            return np.eye(BM.rank_count * R.n, dtype=np.int64)
        return linalg.kernel(A, R.N)

    def exactness(self, k: int) -> bool:
        """Kernel of the diagonal equals the image of the bidual of N."""
        R = self.ring
        K = self.diagonal_kernel_span(k)
        I = self.image_span(k)
        return K.shape == I.shape and bool(np.array_equal(K, I))

    def in_image(self, a: BidualElement) -> bool:
        return linalg.in_span(self.image_span(a.bidual.r), a.values.reshape(-1), self.ring.N)

    def criterion(self, a: BidualElement) -> bool:
        """a lies in the image iff every phi_K(a) lies in the image of N^{**}."""
        B = a.bidual
        if B.r == 0:
            return True
        H1 = self.image_span(1)
        for K in subsets(B.s, B.r - 1):
            coeff = np.zeros((len(subsets(B.s, B.r - 1)), self.ring.n), dtype=np.int64)
            coeff[subsets(B.s, B.r - 1).index(K)] = self.ring.one()
            red = rank_reduce(a, coeff, degree=B.r - 1)
            if not linalg.in_span(H1, red.values.reshape(-1), self.ring.N):
                return False
        return True


def kernel_bidual_map(M: PresentedModule, f, inclusion: ModuleMap | None = None) -> KernelBidual:
    """Build the kernel-bidual data for 0 -> N -> M -> R^s.

    ``f`` is the b x s matrix whose column i is the functional f_i.  When an
    inclusion N -> M is supplied it is checked to be injective with image
    ker(f); otherwise N is computed as the kernel.
    """
    R = M.ring
    f = np.asarray(f, dtype=np.int64) % R.N
    s = f.shape[1]
    try:
        fmap = ModuleMap(M, free_module(R, s), f)
    except ValueError:
        raise NotExact("the coordinate maps are not well defined on M") from None
    gens, N = kernel_module(fmap)
    gens_arr = np.array([g.coords for g in gens], dtype=np.int64).reshape(len(gens), M.gens, R.n) \
        if gens else empty(R, 0, M.gens)
    if inclusion is not None:
        if inclusion.target is not M and inclusion.target.rel_span.shape != M.rel_span.shape:
            raise NotExact("inclusion does not land in M")
        if not kernel_module(inclusion)[1].is_zero():
            raise NotExact("inclusion is not injective")
        img = inclusion.image_span()
        from .modules import kernel_span
        ker = kernel_span(fmap)
        if img.shape != ker.shape or not np.array_equal(img, ker):
            raise NotExact("image of the inclusion is not the kernel of f")
        N = inclusion.source
        gens_arr = inclusion.matrix
    return KernelBidual(M, f, gens_arr, N)
