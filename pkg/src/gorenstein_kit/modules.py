"""Finitely presented modules over a GorensteinRing.

A module is ``R^b / (row span of the relation matrix)``.  Matrices over R are
numpy arrays of shape ``(rows, cols, |G|)``.  Submodules of a free module
``R^b`` are handled through their expanded Z/p^m-span: a vector of ``R^b`` is
flattened to length ``b*|G|`` and an R-submodule is a Z/p^m-submodule that is
stable under the group action, stored as a Howell basis.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import linalg
from .ring import GorensteinRing, Ideal, RingElement, RingMismatch

__all__ = [
    "ZeroElement", "NotWellDefined",
    "expand", "rmatmul", "rspan", "act", "minimal_generators", "syzygies",
    "present_subquotient", "solve_combination",
    "PresentedModule", "ModuleElement", "ModuleMap",
    "free_module", "cyclic_module", "quotient_module",
    "kernel_module", "dual", "biduality_map", "exterior_power",
    "socle_multiplier", "direct_sum", "tensor", "hom", "is_bijective",
    "wedge_sign", "subsets",
]


class ZeroElement(ValueError):
    pass


class NotWellDefined(ValueError):
    pass


# ---------------------------------------------------------------------------
# matrices over R

def empty(ring: GorensteinRing, rows: int, cols: int) -> np.ndarray:
    return np.zeros((rows, cols, ring.n), dtype=np.int64)


def as_rmatrix(ring: GorensteinRing, data, rows=None, cols=None) -> np.ndarray:
    a = np.asarray(data, dtype=np.int64)
    if a.size == 0:
        return empty(ring, rows or 0, cols or 0)
    if a.ndim == 2 and ring.n == 1:
        a = a[:, :, None]
    if a.ndim != 3 or a.shape[2] != ring.n:
        raise ValueError(f"expected a matrix of ring elements, got shape {a.shape}")
    return a % ring.N


def expand(ring: GorensteinRing, mat: np.ndarray) -> np.ndarray:
    """Expanded base matrix: row ``(i, g)`` is ``g`` times row ``i``."""
    a, b, n = mat.shape
    if a == 0 or b == 0:
        return np.zeros((a * n, b * n), dtype=np.int64)
    big = mat[:, :, ring.sub_index]            # [i, j, g, h]
    return big.transpose(0, 2, 1, 3).reshape(a * n, b * n)


def rmatmul(ring: GorensteinRing, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    a, b, n = A.shape
    c = B.shape[1]
    if a == 0 or c == 0:
        return empty(ring, a, c)
    if b == 0:
        return empty(ring, a, c)
    out = (A.reshape(a, b * n) @ expand(ring, B)) % ring.N
    return out.reshape(a, c, n)


def act(ring: GorensteinRing, V: np.ndarray, x) -> np.ndarray:
    """Multiply flattened vectors (rows of ``V``) by the ring element ``x``."""
    k = V.shape[0]
    if k == 0:
        return V.copy()
    n = ring.n
    out = V.reshape(k, -1, n) @ ring.reg(x)
    return out.reshape(k, -1) % ring.N


def rspan(ring: GorensteinRing, vecs: np.ndarray, width: int | None = None) -> np.ndarray:
    """Howell basis of the R-span of vectors given as ``(k, rank, n)``."""
    if vecs.shape[0] == 0:
        w = width if width is not None else vecs.shape[1] * ring.n
        return np.zeros((0, w), dtype=np.int64)
    return linalg.howell_form(expand(ring, vecs), ring.N)


def _stack(width: int, *parts) -> np.ndarray:
    parts = [p for p in parts if p is not None and len(p)]
    if not parts:
        return np.zeros((0, width), dtype=np.int64)
    return np.vstack(parts)


def maximal_times(ring: GorensteinRing, S: np.ndarray) -> np.ndarray:
    """Rows spanning m*S for an R-stable span S."""
    parts = [act(ring, S, g) for g in ring.maximal_generators()]
    return _stack(S.shape[1], *parts)


def minimal_generators(ring: GorensteinRing, S: np.ndarray, K: np.ndarray | None,
                       rank: int) -> np.ndarray:
    """Minimal R-generators of the subquotient S/K of R^rank.

    S is a Howell basis of an R-stable span containing K.  A row is kept when
    it is not in m*S + K + (span of rows kept so far); by Nakayama the kept
    rows generate S modulo K and their number is dim (S/K) (x) F_p.
    """
    width = rank * ring.n
    N = ring.N
    T = linalg.howell_form(_stack(width, maximal_times(ring, S), K), N)
    chosen = []
    for row in S:
        if linalg.in_span(T, row, N):
            continue
        chosen.append(row)
        T = linalg.howell_form(_stack(width, T, expand(ring, row.reshape(1, rank, ring.n))), N)
    if not chosen:
        return empty(ring, 0, rank)
    return np.array(chosen).reshape(len(chosen), rank, ring.n)


def syzygies(ring: GorensteinRing, gens: np.ndarray, K: np.ndarray | None) -> np.ndarray:
    """Minimal generators of ``{c in R^k : sum c_i gens_i in K}``."""
    k, rank, n = gens.shape
    if k == 0:
        return empty(ring, 0, 0)
    width = rank * n
    A = _stack(width, expand(ring, gens), K)
    ker = linalg.kernel(A, ring.N)
    if len(ker) == 0:
        return empty(ring, 0, k)
    S = linalg.howell_form(ker[:, :k * n], ring.N)
    return minimal_generators(ring, S, None, k)


def present_subquotient(ring: GorensteinRing, S: np.ndarray, K: np.ndarray | None,
                        rank: int):
    """Generators (as vectors of R^rank) and a presentation of S/K."""
    gens = minimal_generators(ring, S, K, rank)
    rels = syzygies(ring, gens, K)
    if gens.shape[0] == 0:
        rels = empty(ring, 0, 0)
    return gens, PresentedModule(ring, gens.shape[0], rels)


def solve_combination(ring: GorensteinRing, gens: np.ndarray, v, K: np.ndarray | None = None) -> np.ndarray:
    """R-coefficients c with ``sum c_i gens_i = v`` modulo ``K``.

    ``gens`` has shape (k, rank, n); the result has shape (k, n).
    Raises ``linalg.NoSolution`` when v is not in the span.
    """
    k, rank, n = gens.shape
    v = np.asarray(v, dtype=np.int64).reshape(-1)
    A = _stack(rank * n, expand(ring, gens), K)
    if A.shape[0] == 0:
        if v.any():
            raise linalg.NoSolution("empty span")
        return np.zeros((0, n), dtype=np.int64)
    x = linalg.solve(A, v, ring.N)
    # coefficient of row (i, g) is the g-coefficient of c_i
    return x[:k * n].reshape(k, n)


def subsets(n: int, r: int) -> list[tuple[int, ...]]:
    """r-subsets of range(n) in lexicographic order."""
    if r < 0 or r > n:
        return []
    return list(itertools.combinations(range(n), r))


def wedge_sign(seq) -> int:
    """Sign of the permutation sorting ``seq``; 0 if it has a repeat."""
    seq = list(seq)
    if len(set(seq)) != len(seq):
        return 0
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


# ---------------------------------------------------------------------------
# modules

class PresentedModule:
    """``R^gens`` modulo the R-row-span of ``relations``."""

    def __init__(self, ring: GorensteinRing, gens: int, relations=None):
        self.ring = ring
        self.gens = int(gens)
        if relations is None:
            relations = empty(ring, 0, self.gens)
        rel = as_rmatrix(ring, relations, 0, self.gens)
        if rel.shape[0] == 0:
            rel = empty(ring, 0, self.gens)
        if rel.shape[1] != self.gens:
            raise ValueError("relation matrix has the wrong number of columns")
        self.relations = rel

    @property
    def width(self) -> int:
        return self.gens * self.ring.n

    @cached_property
    def rel_span(self) -> np.ndarray:
        return rspan(self.ring, self.relations, self.width)

    @cached_property
    def cardinality(self) -> int:
        return self.ring.N ** self.width // linalg.span_size(self.rel_span, self.ring.N)

    @cached_property
    def min_generators(self) -> int:
        p = self.ring.p
        if self.relations.shape[0] == 0:
            return self.gens
        residue = (self.relations.sum(axis=2) % p)
        return self.gens - len(linalg.howell_form(residue, p))

    def is_zero(self) -> bool:
        return self.cardinality == 1

    def normal_form(self, vec) -> np.ndarray:
        return linalg.reduce_rows(self.rel_span, np.asarray(vec, dtype=np.int64).reshape(-1),
                                  self.ring.N)

    def element(self, coords) -> "ModuleElement":
        return ModuleElement(self, coords)

    def zero(self) -> "ModuleElement":
        return ModuleElement(self, np.zeros(self.width, dtype=np.int64))

    def generator(self, j: int) -> "ModuleElement":
        v = np.zeros((self.gens, self.ring.n), dtype=np.int64)
        v[j, 0] = 1
        return ModuleElement(self, v)

    def elements(self, limit: int = 1 << 16):
        """All elements via canonical coset representatives (small modules)."""
        if self.cardinality > limit:
            raise ValueError("module too large to enumerate")
        N = self.ring.N
        ranges = [range(N)] * self.width
        for c, g in linalg.pivots(self.rel_span):
            ranges[c] = range(g)
        for tup in itertools.product(*ranges):
            yield ModuleElement(self, np.array(tup, dtype=np.int64), reduced=True)

    def to_json(self) -> dict:
        return {"ring": self.ring.to_json(), "gens": self.gens,
                "relations": [[[int(c) for c in e] for e in row] for row in self.relations]}

    @classmethod
    def from_json(cls, data: dict) -> "PresentedModule":
        R = GorensteinRing.from_json(data["ring"])
        rel = np.array(data["relations"], dtype=np.int64).reshape(-1, data["gens"], R.n)
        return cls(R, data["gens"], rel)

    @cached_property
    def dual_data(self):
        return _dual_data(self)

    def __repr__(self):
        return (f"PresentedModule({self.ring.name()}, gens={self.gens}, "
                f"relations={self.relations.shape[0]}, |M|={self.cardinality})")


class ModuleElement:
    __slots__ = ("module", "vec")

    def __init__(self, module: PresentedModule, coords, reduced: bool = False):
        self.module = module
        v = np.asarray(coords, dtype=np.int64).reshape(-1)
        if v.shape[0] != module.width:
            raise ValueError("coordinate vector has the wrong length")
        self.vec = v % module.ring.N if reduced else module.normal_form(v)

    @property
    def coords(self) -> np.ndarray:
        return self.vec.reshape(self.module.gens, self.module.ring.n)

    def _same(self, other):
        if not isinstance(other, ModuleElement) or other.module is not self.module:
            if not (isinstance(other, ModuleElement) and other.module.ring == self.module.ring
                    and other.module.width == self.module.width
                    and np.array_equal(other.module.rel_span, self.module.rel_span)):
                raise RingMismatch("elements of different modules")
        return other

    def __add__(self, other):
        other = self._same(other)
        return ModuleElement(self.module, self.vec + other.vec)

    def __sub__(self, other):
        other = self._same(other)
        return ModuleElement(self.module, self.vec - other.vec)

    def __neg__(self):
        return ModuleElement(self.module, -self.vec)

    def scale(self, x) -> "ModuleElement":
        R = self.module.ring
        x = x.coeffs if isinstance(x, RingElement) else np.asarray(x)
        return ModuleElement(self.module, act(R, self.vec.reshape(1, -1), x)[0])

    __rmul__ = scale

    def __eq__(self, other):
        return isinstance(other, ModuleElement) and np.array_equal(self.vec, other.vec)

    def __hash__(self):
        return hash(self.vec.tobytes())

    def is_zero(self) -> bool:
        return not self.vec.any()

    def __repr__(self):
        return f"ModuleElement({self.coords.tolist()})"


class ModuleMap:
    """R-linear map given on generators: generator j goes to row j of ``matrix``."""

    def __init__(self, source: PresentedModule, target: PresentedModule, matrix, check: bool = True):
        if source.ring != target.ring:
            raise RingMismatch("modules over different rings")
        self.source = source
        self.target = target
        self.matrix = as_rmatrix(source.ring, matrix, source.gens, target.gens)
        if self.matrix.shape[:2] != (source.gens, target.gens):
            raise ValueError("map matrix has the wrong shape")
        if check and not self.is_well_defined():
            raise NotWellDefined("a relation of the source does not map into the target relations")

    def is_well_defined(self) -> bool:
        R = self.source.ring
        img = rmatmul(R, self.source.relations, self.matrix)
        if img.size == 0:
            return True
        flat = img.reshape(img.shape[0], -1)
        return linalg.span_contains(self.target.rel_span, flat, R.N)

    @cached_property
    def expanded(self) -> np.ndarray:
        return expand(self.source.ring, self.matrix)

    def __call__(self, x: ModuleElement) -> ModuleElement:
        R = self.source.ring
        if self.source.gens == 0 or self.target.gens == 0:
            return self.target.zero()
        return ModuleElement(self.target, (x.vec @ self.expanded) % R.N)

    def image_span(self) -> np.ndarray:
        """Howell basis of image + target relations inside R^{b_tgt}."""
        R = self.source.ring
        rows = _stack(self.target.width, self.expanded if self.source.gens else None,
                      self.target.rel_span)
        return linalg.howell_form(rows, R.N)

    def image_size(self) -> int:
        R = self.source.ring
        return (linalg.span_size(self.image_span(), R.N)
                // linalg.span_size(self.target.rel_span, R.N))

    def compose(self, other: "ModuleMap") -> "ModuleMap":
        """``other`` after ``self``."""
        R = self.source.ring
        return ModuleMap(self.source, other.target, rmatmul(R, self.matrix, other.matrix))


def free_module(ring: GorensteinRing, b: int) -> PresentedModule:
    return PresentedModule(ring, b, empty(ring, 0, b))


def cyclic_module(ring: GorensteinRing, ideal_gens) -> PresentedModule:
    """R / (ideal generated by ``ideal_gens``)."""
    gens = [np.asarray(g.coeffs if isinstance(g, RingElement) else g, dtype=np.int64) for g in ideal_gens]
    rel = np.array(gens, dtype=np.int64).reshape(len(gens), 1, ring.n) if gens else empty(ring, 0, 1)
    return PresentedModule(ring, 1, rel)


def quotient_module(M: PresentedModule, extra) -> PresentedModule:
    extra = as_rmatrix(M.ring, extra, 0, M.gens)
    return PresentedModule(M.ring, M.gens, np.concatenate([M.relations, extra], axis=0))


def is_bijective(f: ModuleMap) -> bool:
    return kernel_module(f)[1].is_zero() and f.source.cardinality == f.target.cardinality


def kernel_span(f: ModuleMap) -> np.ndarray:
    """Howell basis of the preimage of the target relations in R^{b_src}."""
    R = f.source.ring
    b = f.source.width
    if f.target.gens == 0:
        return np.eye(b, dtype=np.int64)
    A = _stack(f.target.width, f.expanded if b else None, f.target.rel_span)
    ker = linalg.kernel(A, R.N)
    if len(ker) == 0:
        return np.zeros((0, b), dtype=np.int64)
    S = _stack(b, ker[:, :b], f.source.rel_span)
    return linalg.howell_form(S, R.N)


def kernel_module(f: ModuleMap):
    R = f.source.ring
    S = kernel_span(f)
    gens, pres = present_subquotient(R, S, f.source.rel_span, f.source.gens)
    elems = [ModuleElement(f.source, g) for g in gens]
    return elems, pres


@dataclass
class DualData:
    functionals: np.ndarray          # (s, b, n): values on the generators of M
    presentation: PresentedModule    # presentation of M^* on those s generators


def _dual_data(M: PresentedModule) -> DualData:
    R = M.ring
    b = M.gens
    if M.relations.shape[0] == 0:
        S = np.eye(b * R.n, dtype=np.int64)
    else:
        psi = M.relations.transpose(1, 0, 2)          # (b, a, n)
        S = linalg.kernel(expand(R, psi), R.N)
        if S.shape[1] == 0:
            S = np.zeros((0, b * R.n), dtype=np.int64)
    gens, pres = present_subquotient(R, S, None, b)
    return DualData(gens, pres)


def dual(M: PresentedModule) -> PresentedModule:
    return M.dual_data.presentation


def evaluate(ring: GorensteinRing, functional: np.ndarray, vec: np.ndarray) -> np.ndarray:
    """phi(x) for phi, x in R^b given as (b, n) arrays."""
    out = ring.zero()
    for a, x in zip(functional, vec):
        if a.any() and x.any():
            out = (out + ring.mul(a, x)) % ring.N
    return out


def biduality_map(M: PresentedModule) -> ModuleMap:
    R = M.ring
    D = M.dual_data
    DD = D.presentation.dual_data
    target = DD.presentation
    rows = []
    for j in range(M.gens):
        # evaluation at e_j: phi_k -> phi_k(e_j)
        ev = D.functionals[:, j, :]
        rows.append(solve_combination(R, DD.functionals, ev))
    mat = np.array(rows, dtype=np.int64).reshape(M.gens, target.gens, R.n)
    return ModuleMap(M, target, mat)


def exterior_power(M: PresentedModule, r: int) -> PresentedModule:
    R = M.ring
    b = M.gens
    if r == 0:
        return free_module(R, 1)
    mons = subsets(b, r)
    if not mons:
        return free_module(R, 0)
    pos = {I: k for k, I in enumerate(mons)}
    rows = []
    for rho in M.relations:
        for J in subsets(b, r - 1):
            row = np.zeros((len(mons), R.n), dtype=np.int64)
            for j in range(b):
                if j in J or not rho[j].any():
                    continue
                s = wedge_sign((j,) + J)
                row[pos[tuple(sorted(J + (j,)))]] += s * rho[j]
            if row.any():
                rows.append(row % R.N)
    rel = np.array(rows, dtype=np.int64) if rows else empty(R, 0, len(mons))
    return PresentedModule(R, len(mons), rel)


def socle_multiplier(x: ModuleElement):
    if x.is_zero():
        raise ZeroElement("socle_multiplier needs a nonzero element")
    R = x.module.ring
    r = R.one()
    y = x
    gens = R.maximal_generators()
    while True:
        for g in gens:
            z = y.scale(g)
            if not z.is_zero():
                r = R.mul(r, g)
                y = z
                break
        else:
            return RingElement(R, r)


def direct_sum(M: PresentedModule, N: PresentedModule) -> PresentedModule:
    if M.ring != N.ring:
        raise RingMismatch("modules over different rings")
    R = M.ring
    a1, a2 = M.relations.shape[0], N.relations.shape[0]
    rel = empty(R, a1 + a2, M.gens + N.gens)
    rel[:a1, :M.gens] = M.relations
    rel[a1:, M.gens:] = N.relations
    return PresentedModule(R, M.gens + N.gens, rel)


def tensor(M: PresentedModule, N: PresentedModule) -> PresentedModule:
    if M.ring != N.ring:
        raise RingMismatch("modules over different rings")
    R = M.ring
    b, c = M.gens, N.gens
    rows = []
    for rho in M.relations:
        for k in range(c):
            row = np.zeros((b, c, R.n), dtype=np.int64)
            row[:, k] = rho
            rows.append(row.reshape(b * c, R.n))
    for sig in N.relations:
        for j in range(b):
            row = np.zeros((b, c, R.n), dtype=np.int64)
            row[j, :] = sig
            rows.append(row.reshape(b * c, R.n))
    rel = np.array(rows, dtype=np.int64) if rows else empty(R, 0, b * c)
    return PresentedModule(R, b * c, rel)


def _block_diag_span(S: np.ndarray, copies: int) -> np.ndarray:
    k, w = S.shape
    out = np.zeros((k * copies, w * copies), dtype=np.int64)
    for t in range(copies):
        out[t * k:(t + 1) * k, t * w:(t + 1) * w] = S
    return out


def hom(M: PresentedModule, N: PresentedModule) -> PresentedModule:
    """Hom_R(M, N), realised inside R^{b x c} (matrices of images of generators)."""
    if M.ring != N.ring:
        raise RingMismatch("modules over different rings")
    R = M.ring
    b, c, a = M.gens, N.gens, M.relations.shape[0]
    n = R.n
    width = b * c * n
    K = _block_diag_span(N.rel_span, b)
    if a == 0 or c == 0:
        S = np.eye(width, dtype=np.int64)
    else:
        big = empty(R, b * c, a * c)
        for i in range(a):
            for j in range(b):
                for k in range(c):
                    big[j * c + k, i * c + k] = M.relations[i, j]
        A = _stack(a * c * n, expand(R, big), _block_diag_span(N.rel_span, a))
        ker = linalg.kernel(A, R.N)
        S = linalg.howell_form(_stack(width, ker[:, :width] if len(ker) else None, K), R.N)
    _, pres = present_subquotient(R, S, K, b * c)
    return pres
