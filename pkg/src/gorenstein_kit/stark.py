"""Abstract Stark systems over a finite ordered vertex set.

A StarkFamily is realised by column adjunction: C_S has F0 = R^{d0+|S|},
with the base generators first and then one generator per vertex of S in the
vertex order, mapping to h_v.  M_S = H^0(C_S) sits inside F0, f_v is the
coordinate of the generator of v, and Z_S = H^1(C_S).

Elements of the (r+|S|)-th bidual of M_S are coordinates in
Lambda^{r+|S|} F0(C_S).  The transition from S' to S is
sgn(S', S) (wedge of f_v over S' \\ S in vertex order).

Determinant transitions.  Writing a_S = c_S (basis of Det(C_S)), the family
is compatible when c_S = (-1)^{d0 |S'\\S|} c_{S'}.  With the theta
normalisation used here, one step of the transition sends theta_{S+v} to
(-1)^{d0} theta_S, so with this rule the theta images form Stark systems.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import linalg
from .biduals import contract_free
from .complexes import (
    QuadraticComplex, _theta_raw, bidual_of_kernel_span, in_bidual_of_kernel, rank_reduce_free,
    restrict_coordinates,
)
from .fitting import characteristic_ideal, fitting_ideal
from .modules import (
    PresentedModule, act, dual, empty, expand, minimal_generators, present_subquotient, subsets, _stack,
)
from .ring import Ideal

__all__ = [
    "NotASubset", "ShapeMismatch", "IncompatibleFamily", "StarkFamily", "StarkSystem",
    "sign", "transition", "stark_space", "lattice_solve_size", "det_to_stark", "compatible_determinants",
    "regulator", "verify_core", "stabilizing_subset", "CoreReport", "CoreData",
]


class NotASubset(ValueError):
    pass


class ShapeMismatch(ValueError):
    pass


class IncompatibleFamily(ValueError):
    pass


def _powerset(items):
    items = list(items)
    for k in range(len(items) + 1):
        for c in itertools.combinations(items, k):
            yield c


class StarkFamily:
    def __init__(self, base: QuadraticComplex, order, columns):
        self.base = base
        self.ring = base.ring
        self.order = list(order)
        if len(set(self.order)) != len(self.order):
            raise ValueError("vertex labels must be distinct")
        self.columns = {v: np.asarray(columns[v], dtype=np.int64).reshape(base.e, self.ring.n) % self.ring.N
                        for v in self.order}
        self._cache: dict = {}

    def sorted(self, S) -> tuple:
        pos = {v: i for i, v in enumerate(self.order)}
        return tuple(sorted(S, key=pos.__getitem__))

    def subsets(self):
        return [self.sorted(S) for S in _powerset(self.order)]

    def complex_for(self, S) -> QuadraticComplex:
        S = self.sorted(S)
        if S not in self._cache:
            rows = [self.base.phi] + [self.columns[v].reshape(1, self.base.e, self.ring.n) for v in S]
            phi = np.concatenate(rows, axis=0) if self.base.e else empty(self.ring, self.base.d + len(S), 0)
            self._cache[S] = QuadraticComplex(self.ring, self.base.d + len(S), self.base.e, phi)
        return self._cache[S]

    @property
    def r(self) -> int:
        return self.base.r

    def position(self, S, v) -> int:
        """Index of the generator of v in F0(C_S)."""
        S = self.sorted(S)
        return self.base.d + S.index(v)

    # validators -----------------------------------------------------------
    def covering_exact(self, S, v) -> bool:
        """Exactness of 0 -> M_S -> M_S' -> R -> Z_S -> Z_S' -> 0 for S' = S + v."""
        R = self.ring
        N = R.N
        S = self.sorted(S)
        Sp = self.sorted(S + (v,))
        C, Cp = self.complex_for(S), self.complex_for(Sp)
        n = R.n
        keep = [k for k in range(Cp.d) if k != self.position(Sp, v)]
        # M_S -> M_S' inserts a zero coordinate; it is injective and lands in M_S'
        emb = np.zeros((C.d * n, Cp.d * n), dtype=np.int64)
        for a, b in enumerate(keep):
            emb[a * n:(a + 1) * n, b * n:(b + 1) * n] = np.eye(n, dtype=np.int64)
        img = (C.H0_span @ emb) % N if len(C.H0_span) else np.zeros((0, Cp.d * n), dtype=np.int64)
        if not linalg.span_contains(Cp.H0_span, img, N):
            return False
        size_MS = linalg.span_size(C.H0_span, N)
        size_MSp = linalg.span_size(Cp.H0_span, N)
        pv = self.position(Sp, v)
        fv_image = Ideal.from_span(R, Cp.H0_span[:, pv * n:(pv + 1) * n]) if len(Cp.H0_span) else Ideal.zero(R)
        # exact at M_S': ker f_v has size |M_S|
        if size_MSp != size_MS * fv_image.size:
            return False
        # exact at R: ker g = {x : x h_v in im phi_S} equals im f_v
        h = self.columns[v].reshape(1, C.e, n)
        imS = linalg.howell_form(expand(R, C.phi), N) if C.d and C.e else np.zeros((0, C.e * n), dtype=np.int64)
        if C.e:
            A = _stack(C.e * n, expand(R, h), imS)
            K = linalg.kernel(A, N)
            kerg = Ideal.from_span(R, K[:, :n]) if len(K) else Ideal.zero(R)
        else:
            kerg = Ideal.whole(R)
        if kerg != fv_image:
            return False
        # exact at Z_S and Z_S': image of g has size |R|/|ker g| = |Z_S|/|Z_S'|
        if C.H1.cardinality != Cp.H1.cardinality * (R.cardinality // kerg.size):
            return False
        return True

    def validate(self) -> bool:
        for S in self.subsets():
            for v in self.order:
                if v not in S and not self.covering_exact(S, v):
                    return False
        return True

    def to_json(self) -> dict:
        return {"base": self.base.to_json(), "order": list(self.order),
                "columns": {str(v): [[int(c) for c in x] for x in self.columns[v]] for v in self.order}}

    @classmethod
    def from_json(cls, data: dict) -> "StarkFamily":
        base = QuadraticComplex.from_json(data["base"])
        cols = {v: np.array(data["columns"][str(v)], dtype=np.int64).reshape(base.e, base.ring.n)
                for v in data["order"]}
        return cls(base, data["order"], cols)


def sign(F: StarkFamily, Sprime, S) -> int:
    """sgn(S', S): (wedge of S' \\ S) ^ (wedge of S) = sgn * (wedge of S')."""
    S = F.sorted(S)
    Sprime = F.sorted(Sprime)
    if not set(S) <= set(Sprime):
        raise NotASubset(f"{S} is not contained in {Sprime}")
    diff = [v for v in Sprime if v not in S]
    pos = {v: i for i, v in enumerate(F.order)}
    seq = [pos[v] for v in diff] + [pos[v] for v in S]
    s = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                s = -s
    return s


def transition(F: StarkFamily, r: int, Sprime, S, x: np.ndarray) -> np.ndarray:
    """sgn(S', S) (wedge_{v in S'\\S} f_v)(x) for x in Lambda^{r+|S'|} F0(C_S')."""
    R = F.ring
    Sprime = F.sorted(Sprime)
    S = F.sorted(S)
    Cp = F.complex_for(Sprime)
    diff = [v for v in Sprime if v not in S]
    positions = [F.position(Sprime, v) for v in diff]
    red = rank_reduce_free(R, x, Cp.d, r + len(Sprime), positions)
    keep = [k for k in range(Cp.d) if k not in positions]
    out = restrict_coordinates(red, Cp.d, keep, r + len(S))
    if sign(F, Sprime, S) < 0:
        out = -out
    return out % R.N


@dataclass
class StarkSystem:
    family: StarkFamily
    r: int
    values: dict          # sorted subset -> coordinates in Lambda^{r+|S|} F0(C_S)

    def is_compatible(self) -> bool:
        F = self.family
        for S in F.subsets():
            for v in F.order:
                if v in S:
                    continue
                Sp = F.sorted(S + (v,))
                if not np.array_equal(transition(F, self.r, Sp, S, self.values[Sp]), self.values[S]):
                    return False
        return True

    def is_valid(self) -> bool:
        F = self.family
        for S, x in self.values.items():
            if not in_bidual_of_kernel(F.complex_for(S), x, self.r + len(S)):
                return False
        return self.is_compatible()

    def to_json(self) -> dict:
        return {"r": self.r, "values": {"|".join(map(str, S)): x.tolist() for S, x in self.values.items()}}


def _top_span(F: StarkFamily, r: int) -> np.ndarray:
    """Howell basis of the (r+|Q|)-th bidual of M_Q inside Lambda^{r+|Q|} F0."""
    Q = F.sorted(F.order)
    return bidual_of_kernel_span(F.complex_for(Q), r + len(Q))


def _propagate(F: StarkFamily, r: int, top: np.ndarray) -> StarkSystem:
    Q = F.sorted(F.order)
    vals = {}
    for S in F.subsets():
        vals[S] = transition(F, r, Q, S, top)
    return StarkSystem(F, r, vals)


def stark_space(F: StarkFamily, r: int):
    """Generators of SS^r.

    The subset lattice has the top element Q, so the limit is identified with
    the bidual at Q and every system is the family of transitions of its top
    value.  The returned systems are checked for compatibility.
    """
    if r != F.base.r or r < 0:
        raise ShapeMismatch(f"rank {r} does not match d0 - e = {F.base.r}")
    R = F.ring
    Q = F.sorted(F.order)
    C = F.complex_for(Q)
    span = _top_span(F, r)
    gens = minimal_generators(R, span, None, len(subsets(C.d, r + len(Q))))
    systems = [_propagate(F, r, g) for g in gens]
    for s in systems:
        if not s.is_compatible():
            raise IncompatibleFamily("transition maps are not functorial on this family")
    return span, systems


def lattice_solve_size(F: StarkFamily, r: int) -> int:
    """Size of the limit computed from the full compatibility system (oracle)."""
    R = F.ring
    N = R.N
    subs = F.subsets()
    offs = {}
    total = 0
    for S in subs:
        offs[S] = total
        total += len(subsets(F.complex_for(S).d, r + len(S))) * R.n
    cols = []
    # membership in each bidual
    for S in subs:
        C = F.complex_for(S)
        k = r + len(S)
        if k == 0:
            continue
        mons = subsets(C.d, k)
        for i in range(C.e):
            for c in range(len(subsets(C.d, k - 1))):
                for g in range(R.n):
                    col = np.zeros(total, dtype=np.int64)
                    # image of coordinate unit vectors under contraction, coordinate (c, g)
                    for a in range(len(mons)):
                        for h in range(R.n):
                            x = np.zeros((len(mons), R.n), dtype=np.int64)
                            x[a, h] = 1
                            col[offs[S] + a * R.n + h] = contract_free(R, x, C.d, k, C.phi[:, i, :])[c, g]
                    cols.append(col)
    # all pairs S subset S'
    for Sp in subs:
        for S in subs:
            if S == Sp or not set(S) <= set(Sp):
                continue
            Cp = F.complex_for(Sp)
            mons_p = subsets(Cp.d, r + len(Sp))
            mons = subsets(F.complex_for(S).d, r + len(S))
            for c in range(len(mons)):
                for g in range(R.n):
                    col = np.zeros(total, dtype=np.int64)
                    for a in range(len(mons_p)):
                        for h in range(R.n):
                            x = np.zeros((len(mons_p), R.n), dtype=np.int64)
                            x[a, h] = 1
                            col[offs[Sp] + a * R.n + h] = transition(F, r, Sp, S, x)[c, g]
                    col[offs[S] + c * R.n + g] -= 1
                    cols.append(col % N)
    if not cols:
        return N ** total
    K = linalg.kernel(np.array(cols).T, N)
    return linalg.span_size(K, N)


def det_to_stark(F: StarkFamily, a: dict) -> StarkSystem:
    """theta_{phi_S}(a_S) for a family of determinant coefficients a[S]."""
    R = F.ring
    r = F.r
    coeffs = {F.sorted(S): np.asarray(getattr(c, "coeffs", c), dtype=np.int64) % R.N for S, c in a.items()}
    for S in F.subsets():
        if S not in coeffs:
            raise IncompatibleFamily(f"missing determinant element at {S}")
    for Sp in F.subsets():
        for S in F.subsets():
            if set(S) <= set(Sp):
                expect = coeffs[Sp] if (F.base.d * (len(Sp) - len(S))) % 2 == 0 else (-coeffs[Sp]) % R.N
                if not np.array_equal(expect, coeffs[S]):
                    raise IncompatibleFamily(f"determinant elements at {S} and {Sp} do not match")
    vals = {}
    for S in F.subsets():
        t = _theta_raw(F.complex_for(S))
        vals[S] = (t @ R.reg(coeffs[S])) % R.N
    sys_ = StarkSystem(F, r, vals)
    if not sys_.is_compatible():
        raise IncompatibleFamily("theta images are not compatible")
    return sys_


def compatible_determinants(F: StarkFamily, c) -> dict:
    """The compatible family with coefficient c at the empty set."""
    R = F.ring
    c = np.asarray(getattr(c, "coeffs", c), dtype=np.int64) % R.N
    return {S: (c if (F.base.d * len(S)) % 2 == 0 else (-c) % R.N) for S in F.subsets()}


def regulator(F: StarkFamily, psi: dict, eps: StarkSystem) -> dict:
    """(wedge_{v in S} psi_v)(eps_S) for every subset S.

    ``psi[v]`` is a functional on F0(C_Q) (length d0 + |Q|, coordinates in
    the order base, then Q); on F0(C_S) it is restricted to the base and S.
    """
    R = F.ring
    Q = F.sorted(F.order)
    out = {}
    for S in F.subsets():
        C = F.complex_for(S)
        k = eps.r + len(S)
        x = eps.values[S]
        keep = list(range(F.base.d)) + [F.base.d + Q.index(v) for v in S]
        # apply the functionals one at a time: (f ^ g)(a) = g(f(a))
        cur, rank = x, k
        for v in S:
            pv = np.asarray(psi[v], dtype=np.int64).reshape(-1, R.n)[keep]
            cur = contract_free(R, cur, C.d, rank, pv)
            rank -= 1
        out[S] = cur % R.N
    return out


def _submodule_Omega(F: StarkFamily, S) -> np.ndarray:
    """Howell basis of im(phi0) + sum_{v in S} R h_v inside F1."""
    R = F.ring
    C = F.complex_for(S)
    if C.e == 0:
        return np.zeros((0, 0), dtype=np.int64)
    return linalg.howell_form(expand(R, C.phi), R.N) if C.d else np.zeros((0, C.e * R.n), dtype=np.int64)


def stabilizing_subset(F: StarkFamily):
    """Smallest subset (by size, then order) with im(sum g_v) equal to Omega."""
    target = _submodule_Omega(F, F.order)
    for S in sorted(F.subsets(), key=lambda s: (len(s), [F.order.index(v) for v in s])):
        span = _submodule_Omega(F, S)
        if span.shape == target.shape and np.array_equal(span, target):
            return S
    return F.sorted(F.order)


@dataclass
class CoreReport:
    stabilizing: tuple
    kernel_annihilated: bool
    char_containment: bool
    theta_containment: bool
    fitting_containment: bool
    valid: bool = True

    @property
    def ok(self) -> bool:
        return (self.valid and self.kernel_annihilated and self.char_containment
                and self.theta_containment and self.fitting_containment)

    def to_json(self) -> dict:
        return {"stabilizing": list(self.stabilizing), "kernel_annihilated": self.kernel_annihilated,
                "char_containment": self.char_containment, "theta_containment": self.theta_containment,
                "fitting_containment": self.fitting_containment, "valid": self.valid}


class CoreData:
    """Everything in the core checks that does not depend on the system."""

    def __init__(self, F: StarkFamily, r: int):
        R = F.ring
        N, n = R.N, R.n
        self.family = F
        self.r = r
        Q = F.sorted(F.order)
        S = stabilizing_subset(F)
        self.stabilizing = S
        CS = F.complex_for(S)
        C0 = F.complex_for(())
        # kernel of SS^r -> bidual at S, as top values
        top = _top_span(F, r)
        k_top = len(subsets(F.complex_for(Q).d, r + len(Q)))
        ker = top
        if len(top):
            images = np.array([transition(F, r, Q, S, row.reshape(k_top, n)).reshape(-1) for row in top])
            if images.shape[1]:
                y = linalg.kernel(images, N)
                ker = (y @ top) % N if len(y) else np.zeros((0, top.shape[1]), dtype=np.int64)
        self.ss_kernel = ker
        self.fitt_dual = fitting_ideal(dual(CS.H0), r + len(S))
        # Omega = (im phi0 + sum R h_v) / im phi0 inside F1
        if C0.e == 0:
            self.omega = PresentedModule(R, 0)
        else:
            self.omega = present_subquotient(R, _submodule_Omega(F, Q), _submodule_Omega(F, ()), C0.e)[1]
        self.char_omega = characteristic_ideal(self.omega)
        self.fitt_top = fitting_ideal(F.complex_for(Q).H1, 0)
        self.fitt_bottom = fitting_ideal(C0.H1, 0)
        t0 = _theta_raw(C0)
        self.theta_line = linalg.howell_form(expand(R, t0.reshape(1, -1, n)), N)


def verify_core(F: StarkFamily, r: int, eps: StarkSystem, data: CoreData | None = None) -> CoreReport:
    """The collapsed core statements for one system.

    (1) eps is a valid system; (2) Fitt^{r+|S|}(M_S^*) kills the kernel of
    SS^r -> bidual at the stabilising subset S; (3) im(eps_empty) lies in
    char(Omega); (4) Fitt^0(H^1(C_Q)) im(eps_empty) lies in the image of
    theta at the empty set and in Fitt^0(H^1(C_empty)).
    """
    R = F.ring
    N = R.N
    data = CoreData(F, r) if data is None else data
    valid = eps.is_valid()
    killed = all(not act(R, data.ss_kernel, g).any() for g in data.fitt_dual.canonical) \
        if len(data.ss_kernel) else True
    e0 = eps.values[()]
    im_e0 = Ideal(R, list(e0))
    char_ok = data.char_omega.contains(im_e0)
    theta_ok = all(linalg.in_span(data.theta_line, (e0 @ R.reg(g)).reshape(-1) % N, N)
                   for g in data.fitt_top.canonical)
    fitt_ok = data.fitt_bottom.contains(data.fitt_top * im_e0)
    return CoreReport(data.stabilizing, bool(killed), bool(char_ok), bool(theta_ok), bool(fitt_ok), bool(valid))
