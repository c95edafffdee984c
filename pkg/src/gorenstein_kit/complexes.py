"""Two-term free complexes F0 -> F1, their theta maps and Eagon-Northcott complexes.

A QuadraticComplex stores phi as the d x e matrix whose row i is the image of
the i-th basis vector of F0 = R^d in F1 = R^e (row-vector convention).  The
canonical basis of Det(C) is (e_1 ^ ... ^ e_d) (x) (f_1^* ^ ... ^ f_e^*), and a
DeterminantElement is the coefficient on it.

theta sends the basis to (-1)^{r(d-r)} (psi_1 ^ ... ^ psi_e)(e_1 ^ ... ^ e_d),
where psi_i = f_i o phi is the i-th column of phi.  Its coordinate on e_I is
the determinant of the d x d matrix whose rows are psi_1..psi_e followed by
the coordinate functionals of I.  Elements of the r-th bidual of H^0 are
kept as coordinates in Lambda^r F0, which contains that bidual.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import linalg
from .biduals import exterior_bidual, kernel_bidual_map, contract_free, BidualElement
from .fitting import det, fitting_ideal, ideal_of_minors
from .modules import (
    ModuleMap, PresentedModule, as_rmatrix, empty, expand, free_module, kernel_module,
    present_subquotient, rmatmul, solve_combination, subsets, wedge_sign, _stack,
)
from .ring import GorensteinRing, Ideal, RingElement

__all__ = [
    "NonpositiveRank", "QuotientNotFree", "QuadraticComplex", "theta", "theta_coordinates",
    "theta_with_quotient", "evaluation_ideal", "fitting_shift_check", "extend_by_free",
    "pad", "reduce_complex", "add_identity_block", "in_bidual_of_kernel", "bidual_of_kernel_span",
    "EagonNorthcottComplex", "eagon_northcott", "en_annihilation_check", "rank_reduce_free",
]


class NonpositiveRank(ValueError):
    pass


class QuotientNotFree(ValueError):
    pass


class QuadraticComplex:
    def __init__(self, ring: GorensteinRing, d: int, e: int, phi=None):
        self.ring = ring
        self.d = int(d)
        self.e = int(e)
        if phi is None:
            phi = empty(ring, self.d, self.e)
        self.phi = as_rmatrix(ring, phi, self.d, self.e)
        if self.phi.shape[:2] != (self.d, self.e):
            raise ValueError("phi has the wrong shape")

    @property
    def r(self) -> int:
        return self.d - self.e

    chi = r

    @cached_property
    def H0_span(self) -> np.ndarray:
        R = self.ring
        if self.e == 0:
            return np.eye(self.d * R.n, dtype=np.int64)
        K = linalg.kernel(expand(R, self.phi), R.N)
        return K if K.shape[0] else np.zeros((0, self.d * R.n), dtype=np.int64)

    @cached_property
    def _H0(self):
        return present_subquotient(self.ring, self.H0_span, None, self.d)

    @property
    def H0(self) -> PresentedModule:
        return self._H0[1]

    @property
    def H0_generators(self) -> np.ndarray:
        return self._H0[0]

    @cached_property
    def H1(self) -> PresentedModule:
        return PresentedModule(self.ring, self.e, self.phi)

    def image_size(self) -> int:
        return self.ring.N ** (self.e * self.ring.n) // self.H1.cardinality

    def to_json(self) -> dict:
        return {"ring": self.ring.to_json(), "d": self.d, "e": self.e,
                "phi": [[[int(c) for c in x] for x in row] for row in self.phi]}

    @classmethod
    def from_json(cls, data: dict) -> "QuadraticComplex":
        R = GorensteinRing.from_json(data["ring"])
        phi = np.array(data["phi"], dtype=np.int64).reshape(data["d"], data["e"], R.n)
        return cls(R, data["d"], data["e"], phi)

    def __repr__(self):
        return f"QuadraticComplex({self.ring.name()}, d={self.d}, e={self.e})"


def pad(C: QuadraticComplex, k: int) -> QuadraticComplex:
    """Add k free summands to F0 mapping to zero (raises the Euler characteristic)."""
    R = C.ring
    phi = np.concatenate([C.phi, empty(R, k, C.e)], axis=0)
    return QuadraticComplex(R, C.d + k, C.e, phi)


def reduce_complex(C: QuadraticComplex, target: GorensteinRing) -> QuadraticComplex:
    return QuadraticComplex(target, C.d, C.e, C.phi % target.N)


def add_identity_block(C: QuadraticComplex) -> QuadraticComplex:
    """C (+) [R --1--> R]: a second resolution of the same complex."""
    R = C.ring
    phi = empty(R, C.d + 1, C.e + 1)
    phi[:C.d, :C.e] = C.phi
    phi[C.d, C.e] = R.one()
    return QuadraticComplex(R, C.d + 1, C.e + 1, phi)


def theta_coordinates(ring: GorensteinRing, psi_rows: np.ndarray, d: int) -> np.ndarray:
    """Coordinates of (psi_1 ^ ... ^ psi_k)(e_1 ^ ... ^ e_d) in Lambda^{d-k} R^d.

    ``psi_rows`` has shape (k, d, n): functional i evaluated on e_j.
    """
    k = psi_rows.shape[0]
    r = d - k
    mons = subsets(d, r)
    out = np.zeros((len(mons), ring.n), dtype=np.int64)
    for c, I in enumerate(mons):
        mat = np.zeros((d, d, ring.n), dtype=np.int64)
        mat[:k] = psi_rows
        for x, j in enumerate(I):
            mat[k + x, j, 0] = 1
        out[c] = det(ring, mat)
    return out


def _theta_raw(C: QuadraticComplex) -> np.ndarray:
    R = C.ring
    psi = C.phi.transpose(1, 0, 2)          # (e, d, n)
    coords = theta_coordinates(R, psi, C.d)
    if (C.r * (C.d - C.r)) % 2:
        coords = (-coords) % R.N
    return coords


def theta(C: QuadraticComplex, a=None) -> np.ndarray:
    """theta(a) as coordinates in Lambda^r F0 (lexicographic r-subsets)."""
    if C.r <= 0:
        raise NonpositiveRank(f"theta needs r > 0, got r = {C.r}")
    R = C.ring
    coords = _theta_raw(C)
    if a is not None:
        a = getattr(a, "coeffs", a)
        coords = (coords @ R.reg(a)) % R.N
    return coords


def in_bidual_of_kernel(C: QuadraticComplex, x: np.ndarray, rank: int) -> bool:
    """x in Lambda^rank F0 lies in the bidual of H^0 iff every f_i o phi kills it."""
    R = C.ring
    if rank == 0:
        return True
    for i in range(C.e):
        if contract_free(R, x, C.d, rank, C.phi[:, i, :]).any():
            return False
    return True


def bidual_of_kernel_span(C: QuadraticComplex, rank: int) -> np.ndarray:
    """Howell basis of the rank-th bidual of H^0 inside Lambda^rank F0.

    It is the common kernel of the contractions by the columns of phi.
    """
    R = C.ring
    mons = subsets(C.d, rank)
    width = len(mons) * R.n
    if rank == 0 or C.e == 0:
        return np.eye(width, dtype=np.int64)
    lower = subsets(C.d, rank - 1)
    index = {I: c for c, I in enumerate(mons)}
    blocks = []
    for i in range(C.e):
        mat = empty(R, len(mons), len(lower))
        psi = C.phi[:, i, :]
        for c, L in enumerate(lower):
            for j in range(C.d):
                if j in L or not psi[j].any():
                    continue
                mat[index[tuple(sorted((j,) + L))], c] += wedge_sign((j,) + L) * psi[j]
        blocks.append(expand(R, mat % R.N))
    K = linalg.kernel(np.hstack(blocks), R.N)
    return K if len(K) else np.zeros((0, width), dtype=np.int64)


def theta_membership_via_kernel(C: QuadraticComplex, x: np.ndarray, rr: int) -> bool:
    """Membership through the kernel-bidual injection for 0 -> H^0 -> F0 -> F1."""
    R = C.ring
    kb = kernel_bidual_map(free_module(R, C.d), C.phi)
    B = exterior_bidual(free_module(R, C.d), rr)
    a = BidualElement(B, x)
    return kb.in_image(a) and kb.criterion(a)


def evaluation_ideal(C: QuadraticComplex) -> Ideal:
    if C.r <= 0:
        raise NonpositiveRank(f"evaluation ideal needs r > 0, got r = {C.r}")
    return Ideal(C.ring, list(theta(C)))


def rank_reduce_free(ring, x: np.ndarray, d: int, r: int, positions) -> np.ndarray:
    """(e_{p_1}^* ^ ... ^ e_{p_k}^*)(x) for x in Lambda^r R^d, as coordinates on Lambda^{r-k} R^d."""
    positions = tuple(positions)
    k = len(positions)
    index = {I: c for c, I in enumerate(subsets(d, r))}
    lower = subsets(d, r - k)
    out = np.zeros((len(lower), ring.n), dtype=np.int64)
    for c, L in enumerate(lower):
        if set(L) & set(positions):
            continue
        s = wedge_sign(positions + L)
        v = x[index[tuple(sorted(positions + L))]]
        out[c] = v if s > 0 else (-v) % ring.N
    return out


def restrict_coordinates(x: np.ndarray, d_big: int, keep, r: int) -> np.ndarray:
    """Coordinates of x on monomials built only from ``keep`` (renumbered)."""
    keep = list(keep)
    index = {I: c for c, I in enumerate(subsets(d_big, r))}
    out = []
    for J in subsets(len(keep), r):
        out.append(x[index[tuple(keep[j] for j in J)]])
    return np.array(out, dtype=np.int64).reshape(len(out), x.shape[1])


def _free_quotient_check(C: QuadraticComplex, pi: np.ndarray):
    R = C.ring
    rY = pi.shape[1]
    if rY and C.d and rmatmul(R, C.phi, pi).any():
        raise QuotientNotFree("the map to Y does not vanish on the image of phi")
    full = linalg.howell_form(expand(R, pi), R.N) if C.e else np.zeros((0, rY * R.n), dtype=np.int64)
    if rY and linalg.span_size(full, R.N) != R.N ** (rY * R.n):
        raise QuotientNotFree("the map to Y is not surjective")


def theta_with_quotient(C: QuadraticComplex, pi, basis=None, a=None) -> np.ndarray:
    """theta_{C,b} through the free quotient pi: H^1 -> Y = R^{r_Y}.

    ``pi`` is the e x r_Y matrix of the quotient map on F1; ``basis`` is an
    invertible r_Y x r_Y matrix whose rows are the chosen basis b of Y.
    Returns coordinates in Lambda^{r_Y + chi} F0.
    """
    R = C.ring
    pi = as_rmatrix(R, pi, C.e, 0)
    if pi.size == 0:
        pi = empty(R, C.e, 0)
    rY = pi.shape[1]
    r = rY + C.r
    if r <= 0:
        raise NonpositiveRank(f"r_Y + chi must be positive, got {r}")
    _free_quotient_check(C, pi)
    U = np.eye(rY, dtype=np.int64)[:, :, None] * R.one() if basis is None else as_rmatrix(R, basis, rY, rY)
    if rY and not R.is_unit(det(R, U)):
        raise QuotientNotFree("basis matrix is not invertible")
    # basis of ker(pi) inside F1
    if rY:
        K = linalg.kernel(expand(R, pi), R.N)
        if K.shape[0] == 0:
            K = np.zeros((0, C.e * R.n), dtype=np.int64)
    else:
        K = np.eye(C.e * R.n, dtype=np.int64)
    from .modules import minimal_generators
    kb = minimal_generators(R, K, None, C.e)
    if kb.shape[0] != C.e - rY:
        raise QuotientNotFree("kernel of the quotient map is not free of the expected rank")
    lifts = [linalg.solve(expand(R, pi), U[k].reshape(-1), R.N)[:C.e * R.n] for k in range(rY)]
    # row (i, g) of expand(pi) is g times row i, so the solution vector is already coordinates
    T = empty(R, C.e, C.e)
    T[:C.e - rY] = kb
    for k, lv in enumerate(lifts):
        T[C.e - rY + k] = lv.reshape(C.e, R.n)
    dT = det(R, T)
    if not R.is_unit(dT):
        raise QuotientNotFree("kernel basis and lifts do not form a basis of F1")
    from .kolyvagin import cofactor
    Tinv = (cofactor(R, T) @ R.reg(R.inverse(dT))) % R.N
    coords = rmatmul(R, C.phi, Tinv)                  # phi in the new basis
    if rY and C.d and coords[:, C.e - rY:].any():
        raise QuotientNotFree("image of phi is not inside ker(pi)")
    psi = coords[:, :C.e - rY].transpose(1, 0, 2)     # (e - rY, d, n)
    out = theta_coordinates(R, psi, C.d)
    if (r * (C.d - r)) % 2:
        out = -out
    out = (out @ R.reg(dT)) % R.N
    if a is not None:
        out = (out @ R.reg(getattr(a, "coeffs", a))) % R.N
    return out


def fitting_shift_check(C: QuadraticComplex, pi, i: int) -> bool:
    """Fitt^{i+r}(H^0(C)^*) = Fitt^i(X) with X = ker(H^1 -> Y), r = r_Y + chi."""
    from .modules import dual
    R = C.ring
    pi = as_rmatrix(R, pi, C.e, 0)
    if pi.size == 0:
        pi = empty(R, C.e, 0)
    rY = pi.shape[1]
    r = rY + C.r
    if i + r < 0:
        raise ValueError("i + r must be non-negative")
    _free_quotient_check(C, pi)
    X = kernel_module(ModuleMap(C.H1, free_module(R, rY), pi))[1]
    lhs = fitting_ideal(dual(C.H0), i + r)
    rhs = fitting_ideal(X, i)
    return lhs == rhs


def extend_by_free(C: QuadraticComplex, columns):
    """Adjoin generators of F0 mapping to ``columns``; check the theta square.

    The new generators are placed after the old ones.  The identification
    Det(D) -> Det(C) follows the graded sign rule: Lambda^n of the new summand
    moves past (Lambda^e F1)^*, so the canonical basis of Det(D) goes to
    (-1)^{ne} times that of Det(C).  The square then asserts
    (-1)^{rn} (f_{d+1} ^ ... ^ f_{d+n})(theta_D(b_D)) = theta_C(image of b_D).
    """
    R = C.ring
    cols = as_rmatrix(R, columns, 0, C.e)
    if cols.size == 0:
        cols = empty(R, 0, C.e)
    n = cols.shape[0]
    D = QuadraticComplex(R, C.d + n, C.e, np.concatenate([C.phi, cols], axis=0))
    if C.r < 0:
        raise NonpositiveRank("the base complex needs r >= 0")
    tD = _theta_raw(D)
    tC = _theta_raw(C)
    red = rank_reduce_free(R, tD, D.d, D.r, range(C.d, C.d + n))
    if (C.r * n + n * C.e) % 2:
        red = (-red) % R.N
    # red lives on monomials avoiding the new indices; compare on the old ones
    lhs = restrict_coordinates(red, D.d, range(C.d), C.r)
    ok = bool(np.array_equal(lhs % R.N, tC % R.N))
    # everything off the old coordinates must vanish
    total = red.copy()
    index = {I: c for c, I in enumerate(subsets(D.d, C.r))}
    for J in subsets(C.d, C.r):
        total[index[J]] = 0
    ok = ok and not total.any()
    return D, ok


# ---------------------------------------------------------------------------
# Eagon-Northcott

def sym_monomials(e: int, k: int) -> list[tuple[int, ...]]:
    """Exponent vectors of degree k in e variables, degree-lex (x_0 > x_1 > ...)."""
    out = []
    for combo in itertools.combinations_with_replacement(range(e), k):
        v = [0] * e
        for j in combo:
            v[j] += 1
        out.append(tuple(v))
    return out


@dataclass
class EagonNorthcottComplex:
    complex: QuadraticComplex
    terms: list            # list of (label, basis list)
    differentials: list    # matrices over R, rows = source basis
    degrees: list

    def ranks(self) -> list[int]:
        return [len(b) for _, b in self.terms]

    def cohomology(self, k: int):
        """H at term k: (generators, presentation) of ker(d_k) / im(d_{k-1})."""
        R = self.complex.ring
        rank = self.ranks()[k]
        width = rank * R.n
        if k < len(self.differentials):
            dk = self.differentials[k]
            if dk.shape[1] == 0:
                S = np.eye(width, dtype=np.int64)
            else:
                S = linalg.kernel(expand(R, dk), R.N)
                if S.shape[0] == 0:
                    S = np.zeros((0, width), dtype=np.int64)
        else:
            S = np.eye(width, dtype=np.int64)
        if k > 0 and self.ranks()[k - 1]:
            Kim = linalg.howell_form(expand(R, self.differentials[k - 1]), R.N)
        else:
            Kim = np.zeros((0, width), dtype=np.int64)
        return S, Kim


def eagon_northcott(C: QuadraticComplex) -> EagonNorthcottComplex:
    R = C.ring
    d, e, r = C.d, C.e, C.r
    if r < 0:
        raise NonpositiveRank("Eagon-Northcott needs d >= e")
    phi = C.phi
    terms = []
    for i in range(r):
        basis = [(alpha, I) for alpha in sym_monomials(e, r - i) for I in subsets(d, d - i)]
        terms.append((f"Sym{r - i}(F1)^* x L{d - i}(F0)", basis))
    terms.append((f"L{d - r}(F0)", [((0,) * e, I) for I in subsets(d, d - r)]))
    terms.append((f"L{d - r}(F1)", [((0,) * e, J) for J in subsets(e, d - r)]))
    diffs = []
    for i in range(r):
        src = terms[i][1]
        tgt = terms[i + 1][1]
        tindex = {b: k for k, b in enumerate(tgt)}
        mat = empty(R, len(src), len(tgt))
        for a, (alpha, I) in enumerate(src):
            for j in range(e):
                if alpha[j] == 0:
                    continue
                beta = list(alpha)
                beta[j] -= 1
                beta = tuple(beta) if i + 1 < r else (0,) * e
                for t, m in enumerate(I):
                    rest = I[:t] + I[t + 1:]
                    coeff = phi[m, j] if t % 2 == 0 else (-phi[m, j]) % R.N
                    mat[a, tindex[(beta, rest)]] += coeff
        diffs.append(mat % R.N)
    # final map Lambda^{d-r} phi on monomials: e_I -> det(phi[I, J]) f_J
    src = terms[r][1]
    tgt = terms[r + 1][1]
    last = empty(R, len(src), len(tgt))
    for a, (_, I) in enumerate(src):
        for b, (_, J) in enumerate(tgt):
            last[a, b] = det(R, phi[list(I)][:, list(J)])
    diffs.append(last)
    for k in range(len(diffs) - 1):
        if rmatmul(R, diffs[k], diffs[k + 1]).any():
            raise ArithmeticError("Eagon-Northcott differentials do not compose to zero")
    n_terms = len(terms)
    degrees = [k - (n_terms - 1) for k in range(n_terms)]
    return EagonNorthcottComplex(C, terms, diffs, degrees)


def en_annihilation_check(EN: EagonNorthcottComplex) -> bool:
    R = EN.complex.ring
    fitt = fitting_ideal(EN.complex.H1, 0)
    gens = fitt.canonical
    for k in range(len(EN.terms)):
        S, K = EN.cohomology(k)
        if S.shape[0] == 0:
            continue
        for g in gens:
            if not linalg.span_contains(K, _act_rows(R, S, g), R.N):
                return False
    return True


def _act_rows(R, S, g):
    from .modules import act
    return act(R, S, g)


def en_h0_ideal(EN: EagonNorthcottComplex) -> Ideal:
    """The ideal cut out by the last differential (image in Lambda^e F1 = R)."""
    last = EN.differentials[-1]
    return Ideal(EN.complex.ring, [row[0] for row in last]) if last.shape[1] == 1 else None
