"""Finite-depth checks for towers R_i = (Z/p^i)[G], i = 1..m.

Modules over the top level are pushed down by reducing their relation
matrices, so M_i = M (x) R_i.  Tor groups against coefficient truncations
S_i = (Z/p^{j_i})[G] are computed from the presentation R^a -phi-> R^b as

    Tor_1(M, R/p^j) = {x : x phi in p^j R^b} / (ker phi + p^j R^a).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .fitting import fitting_ideal
from .modules import PresentedModule, dual, evaluate, expand, present_subquotient, quotient_module, rspan, _stack
from .ring import GorensteinRing, GroupSpec, Ideal, annihilator_of_elements, make_ring

__all__ = [
    "BadEmbedding", "RingTower", "ModuleTower", "TorGroup",
    "fitting_tower_check", "torsion_dual_check", "tor_group", "tor_transition_check",
]


class BadEmbedding(ValueError):
    pass


class RingTower:
    def __init__(self, p: int, m_max: int, group=()):
        top = make_ring(p, m_max, group)
        self.p = top.p
        self.m_max = top.m
        self.group = top.group
        self.levels = {i: GorensteinRing(self.p, i, self.group) for i in range(1, self.m_max + 1)}

    @property
    def top(self) -> GorensteinRing:
        return self.levels[self.m_max]

    def __getitem__(self, i: int) -> GorensteinRing:
        return self.levels[i]

    def project(self, x, i: int) -> np.ndarray:
        return np.asarray(x, dtype=np.int64) % self.levels[i].N


class ModuleTower:
    def __init__(self, tower: RingTower, M: PresentedModule):
        if M.ring != tower.top:
            raise ValueError("module must live over the top level")
        self.tower = tower
        self.top = M

    def level(self, i: int) -> PresentedModule:
        R = self.tower[i]
        return PresentedModule(R, self.top.gens, self.top.relations % R.N)

    def base_change_holds(self, i: int) -> bool:
        """|M_{i+1} / p^i M_{i+1}| = |M_i|."""
        Mi1 = self.level(i + 1)
        R = Mi1.ring
        b = Mi1.gens
        extra = np.zeros((b, b, R.n), dtype=np.int64)
        for k in range(b):
            extra[k, k, 0] = self.tower.p ** i
        return quotient_module(Mi1, extra).cardinality == self.level(i).cardinality


def fitting_tower_check(T: ModuleTower, r: int) -> dict:
    """Containment down the tower and exact base change at every level."""
    m = T.tower.m_max
    fitt = {i: fitting_ideal(T.level(i), r) for i in range(1, m + 1)}
    containment = [fitt[i + 1].image(T.tower[i]) == fitt[i] or fitt[i].contains(fitt[i + 1].image(T.tower[i]))
                   for i in range(1, m)]
    base_change = [fitt[i] == fitt[m].image(T.tower[i]) for i in range(1, m + 1)]
    transitions = [T.base_change_holds(i) for i in range(1, m)]
    return {"ok": all(containment) and all(base_change) and all(transitions),
            "containment": containment, "base_change": base_change, "transitions": transitions}


def _torsion_span(M: PresentedModule, k: int) -> np.ndarray:
    """Howell basis of {v : p^k v in relations} (the preimage of M[p^k])."""
    R = M.ring
    w = M.gens * R.n
    scale = R.p ** k % R.N
    if not len(M.rel_span):
        if scale == 0:
            return np.eye(w, dtype=np.int64)
        return linalg.howell_form((np.eye(w, dtype=np.int64) * (R.N // scale)) % R.N, R.N)
    A = _stack(w, (np.eye(w, dtype=np.int64) * scale) % R.N, M.rel_span)
    K = linalg.kernel(A, R.N)
    return linalg.howell_form(_stack(w, K[:, :w] if len(K) else None, M.rel_span), R.N)


def torsion_dual_check(M: PresentedModule, embedding=None) -> bool:
    """(M[p^n])^* over R_n is isomorphic to M^* / p^n M^* for M over R_{n+1}.

    ``embedding`` is the image of 1 under R_n -> R_{n+1}; it must generate the
    p^n-torsion of R_{n+1}.  The default is p.
    """
    R = M.ring
    if R.m < 2:
        raise BadEmbedding("need at least two levels")
    n_lvl = R.m - 1
    Rn = GorensteinRing(R.p, n_lvl, R.group)
    emb = R.scalar(R.p) if embedding is None else np.asarray(embedding, dtype=np.int64) % R.N
    torsion = annihilator_of_elements(R, [R.scalar(R.p ** n_lvl)])
    if Ideal(R, [emb]) != torsion:
        raise BadEmbedding("embedding does not generate the p^n-torsion")
    E = R.reg(emb)

    def pull_back(v):
        x = linalg.solve(E, v % R.N, R.N)
        return x % Rn.N

    # M[p^n] presented over R_n
    S = _torsion_span(M, n_lvl)
    gens, pres = present_subquotient(R, S, M.rel_span, M.gens)
    Y = PresentedModule(Rn, pres.gens, pres.relations % Rn.N)
    k = Y.gens
    # Y^* as a span of value vectors on the generators of Y
    if k == 0:
        ystar = np.zeros((0, 0), dtype=np.int64)
    elif Y.relations.shape[0] == 0:
        ystar = np.eye(k * Rn.n, dtype=np.int64)
    else:
        ystar = linalg.kernel(expand(Rn, Y.relations.transpose(1, 0, 2)), Rn.N)
    ystar_size = linalg.span_size(ystar, Rn.N) if k else 1
    # M^* via its dual generators, restricted to M[p^n]
    F = M.dual_data.functionals
    if len(F) == 0:
        return ystar_size == 1
    images = []
    for f in F:
        vals = [pull_back(evaluate(R, f, g)) for g in gens]
        images.append(np.concatenate(vals) if vals else np.zeros(0, dtype=np.int64))
    images = np.array(images, dtype=np.int64)
    Mstar = rspan(R, F)
    scaled = linalg.howell_form((Mstar * R.p ** n_lvl) % R.N, R.N)
    quot = linalg.span_size(Mstar, R.N) // linalg.span_size(scaled, R.N)
    if k == 0:
        return quot == 1
    # the images span over R_n (R_{n+1} acts through R_n on Hom into R_n)
    img_span = linalg.howell_form(expand(Rn, images.reshape(len(F), k, Rn.n)), Rn.N)
    if not linalg.same_span(img_span, ystar, Rn.N):
        return False
    return quot == ystar_size


@dataclass
class TorGroup:
    ring: GorensteinRing
    numerator: np.ndarray      # Howell basis in R^a
    denominator: np.ndarray

    @property
    def size(self) -> int:
        return linalg.span_size(self.numerator, self.ring.N) // linalg.span_size(self.denominator, self.ring.N)


def _pad(phi: np.ndarray, ring: GorensteinRing, b: int) -> np.ndarray:
    if phi.shape[0] == 0:
        return np.zeros((1, b, ring.n), dtype=np.int64)
    return phi


def tor_group(ring: GorensteinRing, phi: np.ndarray, j: int) -> TorGroup:
    """Tor_1^R(coker phi, R/p^j) as numerator / denominator spans in R^a."""
    a, b = phi.shape[0], phi.shape[1]
    N = ring.N
    w_a, w_b = a * ring.n, b * ring.n
    big = np.eye(w_a, dtype=np.int64)
    pj = ring.p ** j % N
    if b == 0:
        num = big
        ker = big
    else:
        Phi = expand(ring, phi % N)
        A = np.vstack([Phi, (np.eye(w_b, dtype=np.int64) * pj) % N])
        K = linalg.kernel(A, N)
        num = K[:, :w_a] if len(K) else np.zeros((0, w_a), dtype=np.int64)
        ker = linalg.kernel(Phi, N)
    den = _stack(w_a, ker if len(ker) else None, (big * pj) % N)
    return TorGroup(ring, linalg.howell_form(_stack(w_a, num, den), N), linalg.howell_form(den, N))


def _reduction_cokernel(src: TorGroup, dst: TorGroup):
    """Check that coefficient reduction is well defined and return |coker|."""
    N = dst.ring.N
    num = src.numerator % N
    den = src.denominator % N
    if not linalg.span_contains(dst.numerator, num, N):
        return None
    if not linalg.span_contains(dst.denominator, den, N):
        return None
    image = linalg.howell_form(_stack(dst.numerator.shape[1], num, dst.denominator), N)
    return linalg.span_size(dst.numerator, N) // linalg.span_size(image, N)


def tor_transition_check(T: ModuleTower, truncations: dict) -> dict:
    """Tor transitions against S_i = (Z/p^{j_i})[G], j_i = truncations[i].

    Requires j_i <= i and j_i <= j_{i+1}, so the squares of rings commute and
    the maps R_i -> S_i are surjective.  For each level the reduction map on
    Tor_1 is checked to be well defined (the defining square commutes), its
    cokernel is compared with the cokernel of
    Tor_1^{R_{n+1}}(M_{n+1}, R_n) -> Tor_1^{S_{n+1}}(M_{n+1} (x) S_{n+1}, S_n),
    and Fitt^0(M_i) is checked to kill Tor_1(M_i, S_i).
    """
    m = T.tower.m_max
    for i in range(1, m + 1):
        j = truncations[i]
        if not 1 <= j <= i or (i < m and truncations[i + 1] < j):
            raise ValueError("truncation levels must satisfy 1 <= j_i <= i and j_i <= j_{i+1}")
    b = T.top.gens
    phi_top = _pad(T.top.relations, T.tower.top, b)
    tors = {i: tor_group(T.tower[i], phi_top % T.tower[i].N, truncations[i]) for i in range(1, m + 1)}
    squares, cokernels, annihilated = [], [], []
    for i in range(1, m + 1):
        R = T.tower[i]
        t = tors[i]
        fitt = fitting_ideal(T.level(i), 0)
        annihilated.append(all(_kills(R, g, t) for g in fitt.canonical))
    for n in range(1, m):
        Rn1, Rn = T.tower[n + 1], T.tower[n]
        c = _reduction_cokernel(tors[n + 1], tors[n])
        squares.append(c is not None)
        # alpha: Tor^{R_{n+1}}(M, R_n) -> Tor^{S_{n+1}}(M (x) S_{n+1}, S_n)
        left = tor_group(Rn1, phi_top % Rn1.N, n)
        S1 = T.tower[truncations[n + 1]]
        right = tor_group(S1, phi_top % S1.N, truncations[n])
        c_alpha = _reduction_cokernel(left, right)
        cokernels.append(c is not None and c_alpha is not None and c == c_alpha)
    return {"ok": all(squares) and all(cokernels) and all(annihilated),
            "squares": squares, "cokernels": cokernels, "annihilated": annihilated,
            "sizes": [tors[i].size for i in range(1, m + 1)]}


def _kills(R: GorensteinRing, g, t: TorGroup) -> bool:
    if not len(t.numerator):
        return True
    a = t.numerator.shape[1] // R.n
    moved = (t.numerator.reshape(-1, a, R.n).reshape(-1, R.n) @ R.reg(g)) % R.N
    moved = moved.reshape(len(t.numerator), -1)
    return linalg.span_contains(t.denominator, moved, R.N)
