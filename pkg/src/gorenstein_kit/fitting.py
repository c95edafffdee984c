"""Determinants, Fitting ideals, characteristic ideals and annihilators."""

from __future__ import annotations

import numpy as np

from . import linalg
from .modules import PresentedModule, expand, rmatmul, empty
from .ring import GorensteinRing, Ideal

__all__ = [
    "det", "det_cofactor", "det_bird", "minors", "fitting_ideal",
    "characteristic_ideal", "annihilator_module", "annihilator_module_bruteforce",
    "ideal_of_minors",
]


def _tuples(M: np.ndarray):
    return [[tuple(int(c) for c in M[i, j]) for j in range(M.shape[1])] for i in range(M.shape[0])]


def det_cofactor(ring: GorensteinRing, M: np.ndarray) -> np.ndarray:
    """Laplace expansion along rows with memoised complementary minors."""
    k = M.shape[0]
    if k == 0:
        return ring.one()
    T = _tuples(M)
    zero = tuple([0] * ring.n)
    memo: dict = {}

    def rec(row: int, cols: tuple) -> tuple:
        if row == k:
            return tuple(ring.one())
        key = cols
        if key in memo:
            return memo[key]
        acc = zero
        for pos, c in enumerate(cols):
            a = T[row][c]
            if not any(a):
                continue
            sub = rec(row + 1, cols[:pos] + cols[pos + 1:])
            term = ring.mul_t(a, sub)
            acc = ring.add_t(acc, term) if pos % 2 == 0 else ring.sub_t(acc, term)
        memo[key] = acc
        return acc

    return np.array(rec(0, tuple(range(k))), dtype=np.int64)


def det_bird(ring: GorensteinRing, M: np.ndarray) -> np.ndarray:
    """Division-free determinant (Bird's algorithm) using matrix products over R."""
    k = M.shape[0]
    if k == 0:
        return ring.one()
    N = ring.N
    F = M % N
    for _ in range(k - 1):
        X = np.zeros_like(F)
        iu = np.triu_indices(k, 1)
        X[iu] = F[iu]
        diag = F[np.arange(k), np.arange(k)]           # (k, n)
        tails = np.cumsum(diag[::-1], axis=0)[::-1]     # tails[i] = sum_{j>=i} diag[j]
        for i in range(k):
            X[i, i] = -(tails[i + 1] if i + 1 < k else 0) % N
        F = rmatmul(ring, X, M)
    d = F[0, 0]
    return (d if (k - 1) % 2 == 0 else -d) % N


def det(ring: GorensteinRing, M: np.ndarray) -> np.ndarray:
    M = np.asarray(M, dtype=np.int64) % ring.N
    if M.shape[0] != M.shape[1]:
        raise ValueError("determinant of a non-square matrix")
    if M.shape[0] <= 4:
        return det_cofactor(ring, M)
    return det_bird(ring, M)


def minors(ring: GorensteinRing, A: np.ndarray, k: int):
    """Yield every k x k minor of A (rows and columns in lexicographic order).

    All minors are expanded along their first row; subminors are shared
    through a cache keyed by (row subset, column subset).
    """
    a, b = A.shape[:2]
    if k == 0:
        yield ring.one()
        return
    if k > a or k > b:
        return
    T = _tuples(A)
    one = tuple(ring.one())
    zero = tuple([0] * ring.n)
    memo: dict = {}

    def rec(rows: tuple, cols: tuple) -> tuple:
        if not rows:
            return one
        key = (rows, cols)
        got = memo.get(key)
        if got is not None:
            return got
        r0 = rows[0]
        rest = rows[1:]
        acc = zero
        for pos, c in enumerate(cols):
            x = T[r0][c]
            if not any(x):
                continue
            sub = rec(rest, cols[:pos] + cols[pos + 1:])
            if not any(sub):
                continue
            term = ring.mul_t(x, sub)
            acc = ring.add_t(acc, term) if pos % 2 == 0 else ring.sub_t(acc, term)
        memo[key] = acc
        return acc

    import itertools
    for rows in itertools.combinations(range(a), k):
        for cols in itertools.combinations(range(b), k):
            yield np.array(rec(rows, cols), dtype=np.int64)


def ideal_of_minors(ring: GorensteinRing, A: np.ndarray, k: int) -> Ideal:
    """Ideal generated by the k x k minors, stopping early once it is R."""
    if k <= 0:
        return Ideal.whole(ring)
    N = ring.N
    H = np.zeros((0, ring.n), dtype=np.int64)
    for m in minors(ring, A, k):
        if not m.any() or linalg.in_span(H, m, N):
            continue
        H = linalg.howell_form(np.vstack([H, ring.reg(m)]), N)
        if linalg.in_span(H, ring.one(), N):
            break
    return Ideal.from_span(ring, H)


def fitting_ideal(M: PresentedModule, i: int) -> Ideal:
    if i < 0:
        raise ValueError("Fitting index must be non-negative")
    k = M.gens - i
    # missing rows count as zero relations, whose minors vanish
    return ideal_of_minors(M.ring, M.relations, k)


def annihilator_module(M: PresentedModule) -> Ideal:
    """Ann_R(M) by linear solving: r e_j must lie in the relation span."""
    R = M.ring
    N = R.N
    n = R.n
    I = Ideal.whole(R)
    for j in range(M.gens):
        E = np.zeros((n, M.width), dtype=np.int64)
        E[:, j * n:(j + 1) * n] = np.eye(n, dtype=np.int64)
        if len(M.rel_span):
            A = np.vstack([E, M.rel_span])
        else:
            A = E
        ker = linalg.kernel(A, N)
        rows = ker[:, :n] if len(ker) else np.zeros((0, n), dtype=np.int64)
        I = I & Ideal.from_span(R, rows)
    return I


def annihilator_module_bruteforce(M: PresentedModule) -> Ideal:
    """Ann_R(M) by enumerating every ring element (oracle)."""
    R = M.ring
    N = R.N
    n = R.n
    elems = R.all_elements()
    good = np.ones(len(elems), dtype=bool)
    for j in range(M.gens):
        V = np.zeros((len(elems), M.width), dtype=np.int64)
        V[:, j * n:(j + 1) * n] = elems
        red = linalg.reduce_rows(M.rel_span, V, N) if len(M.rel_span) else V
        good &= ~red.any(axis=1)
    members = elems[good]
    return Ideal(R, list(members))


def characteristic_ideal(Z: PresentedModule) -> Ideal:
    """Image of the top exterior bidual of N = ker(R^s -> Z) under the coordinates.

    With the surjection R^s -> Z given by the presentation, N is the relation
    module.  Each coordinate functional restricted to N is written in the
    chosen generators psi of N^*, and the wedge of the s restrictions is
    evaluated on generators of the bidual of Lambda^s N^*.
    """
    from .biduals import exterior_bidual
    from .modules import present_subquotient, solve_combination, subsets
    R = Z.ring
    s = Z.gens
    if s == 0:
        return Ideal.whole(R)
    gens, Npres = present_subquotient(R, Z.rel_span, None, s)
    B = exterior_bidual(Npres, s)
    psi = Npres.dual_data.functionals          # (t, c, n)
    t = psi.shape[0]
    if t < s:
        return Ideal.zero(R)
    # f_i restricted to N: its value on generator u_k is the i-th coordinate
    C = np.zeros((s, t, R.n), dtype=np.int64)
    for i in range(s):
        C[i] = solve_combination(R, psi, gens[:, i, :])
    weights = [det(R, C[:, list(L)]) for L in subsets(t, s)]
    images = []
    for a in B.generator_values():
        acc = R.zero()
        for w, v in zip(weights, a):
            if w.any() and v.any():
                acc = (acc + R.mul(w, v)) % R.N
        images.append(acc)
    return Ideal(R, images)
