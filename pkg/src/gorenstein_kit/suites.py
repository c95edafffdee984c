"""Property registry and suite runner."""

from __future__ import annotations

import itertools
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import instances as gen
from . import linalg
from .biduals import (
    BidualElement, annihilator_of_element, exterior_bidual, image_of_element, kernel_bidual_map, rank_reduce,
)
from .complexes import (
    QuadraticComplex, add_identity_block, eagon_northcott, en_annihilation_check, en_h0_ideal,
    evaluation_ideal, extend_by_free, fitting_shift_check, in_bidual_of_kernel, reduce_complex,
    restrict_coordinates, theta, theta_with_quotient, bidual_of_kernel_span,
)
from .fitting import annihilator_module_bruteforce, characteristic_ideal, det, fitting_ideal
from .kolyvagin import (
    cofactor, cofactor_iso, derivative_product, kolyvagin_combination, stabilizer_rearrangement_check,
    telescoping_holds,
)
from .limits import ModuleTower, RingTower, fitting_tower_check, torsion_dual_check, tor_transition_check
from .modules import (
    ModuleElement, ModuleMap, PresentedModule, biduality_map, direct_sum, dual, exterior_power,
    free_module, is_bijective, kernel_module, present_subquotient, quotient_module, rmatmul, rspan,
    socle_multiplier, _stack,
)
from .ring import (
    GorensteinRing, Ideal, annihilator_ideal, make_ring, project, quotient_ring, socle,
)
from .rng import SplitMix64, derive
from .stark import (
    StarkFamily, compatible_determinants, det_to_stark, lattice_solve_size, regulator, sign, stark_space,
    transition, CoreData, verify_core,
)

__all__ = ["Property", "PROPERTIES", "SUITES", "DEFAULT_GRID", "SuiteConfig", "run_suite",
           "run_property", "replay", "instance_for", "check_instance"]

DEFAULT_GRID = ["p=2,m=2,g=", "p=2,m=3,g=", "p=3,m=1,g=3", "p=2,m=2,g=2", "p=3,m=2,g=3"]
SCHEMA = 1


@dataclass(frozen=True)
class Property:
    name: str
    suite: str
    anchor: str
    generate: Callable
    check: Callable
    oracle: bool = False


PROPERTIES: dict[str, Property] = {}


def prop(suite: str, name: str, anchor: str, oracle: bool = False):
    def wrap(pair):
        generate, check = pair
        full = f"{suite}.{name}"
        PROPERTIES[full] = Property(full, suite, anchor, generate, check, oracle)
        return pair
    return wrap


def _arr(data, R, *shape):
    return np.asarray(data, dtype=np.int64).reshape(*shape, R.n) if np.asarray(data).size else \
        np.zeros((*shape, R.n), dtype=np.int64)


def _ideal_gens(R, rng, k=None):
    k = rng.between(1, 2) if k is None else k
    return [gen.element(R, rng, gen.SCALES[rng.below(3)]).tolist() for _ in range(k)]


# ---------------------------------------------------------------------------
# ring

prop("ring", "locality", "every element is a unit or lies in the maximal ideal")((
    lambda R, rng: {"x": gen.element(R, rng, gen.SCALES[rng.below(3)]).tolist()},
    lambda R, i: R.is_unit(i["x"]) or Ideal(R, R.maximal_generators()).contains_element(i["x"]),
))

prop("ring", "socle_simple", "the socle is one-dimensional over F_p")((
    lambda R, rng: {},
    lambda R, i: socle(R).size == R.p,
))

prop("ring", "double_annihilator", "Ann(Ann(I)) = I")((
    lambda R, rng: {"gens": _ideal_gens(R, rng)},
    lambda R, i: annihilator_ideal(annihilator_ideal(Ideal(R, i["gens"]))) == Ideal(R, i["gens"]),
))


def _reg_hom(R, i):
    x, y = np.array(i["x"]), np.array(i["y"])
    prod_ok = np.array_equal(R.reg(R.mul(x, y)), (R.reg(x) @ R.reg(y)) % R.N)
    sum_ok = np.array_equal(R.reg((x + y) % R.N), (R.reg(x) + R.reg(y)) % R.N)
    return prod_ok and sum_ok and np.array_equal(R.reg(R.one()), np.eye(R.n, dtype=np.int64))


prop("ring", "regular_rep_hom", "the regular representation is a ring homomorphism")((
    lambda R, rng: {"x": gen.element(R, rng).tolist(), "y": gen.element(R, rng).tolist()},
    _reg_hom,
))


def _ideal_chain(R, i):
    I, J = Ideal(R, i["I"]), Ideal(R, i["J"])
    IJ, meet, total = I * J, I & J, I + J
    return meet.contains(IJ) and I.contains(meet) and J.contains(meet) and total.contains(I) and total.contains(J)


prop("ring", "ideal_chain", "IJ is in I meet J, which is in I, which is in I + J")((
    lambda R, rng: {"I": _ideal_gens(R, rng), "J": _ideal_gens(R, rng)},
    _ideal_chain,
))


def _projection_hom(R, i):
    j = i["j"]
    S = quotient_ring(R, j)
    x, y = np.array(i["x"]), np.array(i["y"])
    return np.array_equal(project(R.mul(x, y), S), S.mul(project(x, S), project(y, S)))


prop("ring", "projection_hom", "R -> R/(p^j) is multiplicative")((
    lambda R, rng: {"j": rng.between(1, R.m), "x": gen.element(R, rng).tolist(), "y": gen.element(R, rng).tolist()},
    _projection_hom,
))

# ---------------------------------------------------------------------------
# linalg


def _zmat(R, rng):
    rows, cols = rng.between(1, 4), rng.between(1, 4)
    scale = rng.below(3)
    A = [[rng.below(R.N) * (R.p ** rng.below(R.m + 1) if scale else 1) % R.N for _ in range(cols)]
         for _ in range(rows)]
    return {"N": R.N, "A": A}


def _howell(R, i):
    A, N = np.array(i["A"]), i["N"]
    H = linalg.howell_form(A, N)
    if not np.array_equal(linalg.howell_form(H, N), H) or not linalg.same_span(H, A, N):
        return False
    if N ** A.shape[1] <= 4096:
        brute = linalg.enumerate_span(A, N)
        return brute == linalg.enumerate_span(H, N) and len(brute) == linalg.span_size(H, N)
    return True


prop("linalg", "howell_canonical", "Howell form is idempotent and spans the same module", oracle=True)((_zmat, _howell))


def _double_kernel(R, i):
    A, N = np.array(i["A"]), i["N"]
    Y = linalg.kernel(A.T, N)                  # rows y with A y = 0
    if len(Y) == 0:
        return True
    Z = linalg.kernel(Y.T, N)
    return linalg.span_contains(linalg.howell_form(Z, N), A, N)


prop("linalg", "double_kernel", "the double orthogonal of a row span contains it")((_zmat, _double_kernel))


def _solve_gen(R, rng):
    data = _zmat(R, rng)
    data["c"] = [rng.below(R.N) for _ in range(len(data["A"]))]
    return data


def _solve(R, i):
    A, N = np.array(i["A"]), i["N"]
    b = (np.array(i["c"]) @ A) % N
    x = linalg.solve(A, b, N)
    return np.array_equal((x @ A) % N, b)


prop("linalg", "solve_witness", "solve returns a verified witness for b in the row span")((_solve_gen, _solve))


def _kernel_sound(R, i):
    A, N = np.array(i["A"]), i["N"]
    K = linalg.kernel(A, N)
    if len(K) and ((K @ A) % N).any():
        return False
    # |ker| * |im| = N^rows
    H = linalg.howell_form(A, N)
    return linalg.span_size(K, N) * linalg.span_size(H, N) == N ** A.shape[0]


prop("linalg", "kernel_size", "|ker A| |im A| = N^rows and the kernel is sound")((_zmat, _kernel_sound))

# ---------------------------------------------------------------------------
# modules


def _dual_reflexive(R, i):
    M = gen.decode_module(R, i)
    return dual(M).cardinality == M.cardinality and is_bijective(biduality_map(M))


prop("modules", "dual_reflexive", "|M^*| = |M| and M -> M^** is bijective")((
    lambda R, rng: gen.module(R, rng, 2, 3), _dual_reflexive,
))


def _ext_free(R, i):
    n, r = i["n"], i["r"]
    E = exterior_power(free_module(R, n), r)
    c = math.comb(n, r)
    return E.cardinality == R.cardinality ** c and E.min_generators == c


prop("modules", "exterior_free", "Lambda^r of a free module of rank n is free of rank C(n, r)")((
    lambda R, rng: (lambda n: {"n": n, "r": rng.between(0, n)})(rng.between(1, 3)), _ext_free,
))


def _map_gen(R, rng):
    src = gen.module(R, rng, 2, 2)
    c = rng.between(1, 2)
    f = gen.matrix(R, rng, src["gens"], c)
    rel = np.asarray(src["relations"], dtype=np.int64).reshape(-1, src["gens"], R.n)
    forced = rmatmul(R, rel, f) if len(rel) else np.zeros((0, c, R.n), dtype=np.int64)
    extra = gen.matrix(R, rng, rng.between(0, 1), c)
    tgt = {"gens": c, "relations": np.concatenate([forced, extra]).tolist()}
    return {"source": src, "target": tgt, "f": f.tolist()}


def _kernel_exact(R, i):
    S, T = gen.decode_module(R, i["source"]), gen.decode_module(R, i["target"])
    f = ModuleMap(S, T, _arr(i["f"], R, S.gens, T.gens))
    elems, K = kernel_module(f)
    if any(not f(x).is_zero() for x in elems):
        return False
    return K.cardinality * f.image_size() == S.cardinality


prop("modules", "kernel_exact", "the kernel maps to zero and |ker| |im| = |source|")((_map_gen, _kernel_exact))


def _socle_gen(R, rng):
    data = gen.module(R, rng, 2, 2)
    data["x"] = [gen.element(R, rng).tolist() for _ in range(data["gens"])]
    return data


def _socle_mult(R, i):
    M = gen.decode_module(R, i)
    x = M.element(np.array(i["x"], dtype=np.int64).reshape(-1))
    if x.is_zero():
        return True
    r = socle_multiplier(x).coeffs
    y = x.scale(r)
    return (not y.is_zero()) and all(y.scale(g).is_zero() for g in R.maximal_generators())


prop("modules", "socle_multiplier", "r x is nonzero and killed by the maximal ideal")((_socle_gen, _socle_mult))

# ---------------------------------------------------------------------------
# fitting


def _fit_gen(R, rng):
    return {"M": gen.module(R, rng, 3, 3), "i": rng.between(0, 2)}


def _sub_gen(R, rng):
    """M, a submodule N generated by random elements, and indices."""
    data = gen.module(R, rng, 3, 2)
    k = rng.between(1, 2)
    data_sub = gen.matrix(R, rng, k, data["gens"])
    return {"M": data, "sub": data_sub.tolist(), "i": rng.between(0, 1), "j": rng.between(0, 1)}


def _submodule(R, M, sub):
    sub = np.asarray(sub, dtype=np.int64).reshape(-1, M.gens, R.n)
    S = linalg.howell_form(_stack(M.width, rspan(R, sub), M.rel_span), R.N)
    _, N = present_subquotient(R, S, M.rel_span, M.gens)
    Q = quotient_module(M, sub)
    return N, Q


def _surjection(R, i):
    M = gen.decode_module(R, i["M"])
    Q = quotient_module(M, _arr(i["extra"], R, -1, M.gens)) if i["extra"] else M
    return fitting_ideal(Q, i["i"]).contains(fitting_ideal(M, i["i"]))


prop("fitting", "surjection_monotone", "M onto N gives Fitt^i(M) in Fitt^i(N)")((
    lambda R, rng: (lambda d: {**d, "extra": gen.matrix(R, rng, rng.between(0, 2), d["M"]["gens"]).tolist()})(
        _fit_gen(R, rng)),
    _surjection,
))


def _subquotient(R, i):
    M = gen.decode_module(R, i["M"])
    N, Q = _submodule(R, M, i["sub"])
    lhs = fitting_ideal(N, i["i"]) * fitting_ideal(Q, i["j"])
    return fitting_ideal(M, i["i"] + i["j"]).contains(lhs)


prop("fitting", "subquotient_product", "Fitt^i(N) Fitt^j(M/N) in Fitt^{i+j}(M)")((_sub_gen, _subquotient))


def _direct_sum(R, i):
    M, N = gen.decode_module(R, i["M"]), gen.decode_module(R, i["N"])
    k = i["i"]
    rhs = Ideal.zero(R)
    for a in range(k + 1):
        rhs = rhs + fitting_ideal(M, a) * fitting_ideal(N, k - a)
    return fitting_ideal(direct_sum(M, N), k) == rhs


prop("fitting", "direct_sum", "Fitt^i(M + N) = sum of Fitt^a(M) Fitt^{i-a}(N)")((
    lambda R, rng: {"M": gen.module(R, rng, 2, 2), "N": gen.module(R, rng, 2, 2), "i": rng.between(0, 2)},
    _direct_sum,
))


def _base_change(R, i):
    M = gen.decode_module(R, i["M"])
    S = quotient_ring(R, i["level"])
    MS = PresentedModule(S, M.gens, M.relations % S.N)
    return fitting_ideal(MS, i["i"]) == fitting_ideal(M, i["i"]).image(S)


prop("fitting", "base_change", "Fitt^i(M (x) R/p^j) is the image of Fitt^i(M)")((
    lambda R, rng: {**_fit_gen(R, rng), "level": rng.between(1, R.m)}, _base_change,
))


def _wedge_annihilation(R, i):
    M = gen.decode_module(R, i["M"])
    k = i["k"]
    E = exterior_power(M, k)
    if E.is_zero():
        return True
    V = np.eye(E.width, dtype=np.int64)
    for j in range(k):
        for g in fitting_ideal(M, j).canonical:
            moved = (V.reshape(-1, R.n) @ R.reg(g)) % R.N
            if not linalg.span_contains(E.rel_span, moved.reshape(E.width, -1), R.N):
                return False
    return True


prop("fitting", "wedge_annihilation", "Fitt^j(M) kills Lambda^k M for j < k")((
    lambda R, rng: {"M": gen.module(R, rng, 3, 3), "k": rng.between(1, 2)}, _wedge_annihilation,
))


def _char_ann(R, i):
    M = gen.decode_module(R, i)
    return characteristic_ideal(M) == annihilator_module_bruteforce(M)


prop("fitting", "char_equals_ann", "char(Z) = Ann(Z), against brute-force annihilators", oracle=True)((
    lambda R, rng: gen.module(R, rng, 2, 3), _char_ann,
))


def _fitt_in_char(R, i):
    M = gen.decode_module(R, i)
    c = characteristic_ideal(M)
    if not c.contains(fitting_ideal(M, 0)):
        return False
    # pd <= 1 forces freeness here; then both ideals agree
    if M.relations.shape[0] == 0:
        return c == fitting_ideal(M, 0)
    return True


prop("fitting", "fitt0_in_char", "Fitt^0(Z) in char(Z), with equality for free Z")((
    lambda R, rng: gen.module(R, rng, 2, rng.below(3)), _fitt_in_char,
))


def _char_sub(R, i):
    M = gen.decode_module(R, i["M"])
    N, Q = _submodule(R, M, i["sub"])
    return (characteristic_ideal(N) & characteristic_ideal(Q)).contains(characteristic_ideal(M))


prop("fitting", "char_subobject", "char(M) in char(N) meet char(M/N)")((_sub_gen, _char_sub))

# ---------------------------------------------------------------------------
# biduals


def _bidual_gen(R, rng):
    data = gen.module(R, rng, 2, 2)
    return {"M": data, "r": rng.between(1, 2), "coeffs_seed": rng.next(), "s": rng.between(1, 2)}


def _random_bidual_element(R, B, seed):
    rng = SplitMix64(seed)
    G = B.generators
    vals = np.zeros((B.rank_count, R.n), dtype=np.int64)
    for g in G:
        c = gen.element(R, rng)
        vals = (vals + (g.reshape(B.rank_count, R.n).reshape(-1, R.n) @ R.reg(c))) % R.N
    return BidualElement(B, vals)


def _functionals(R, M, s, seed):
    rng = SplitMix64(seed)
    F = M.dual_data.functionals
    out = np.zeros((M.gens, s, R.n), dtype=np.int64)
    for j in range(s):
        for f in F:
            c = gen.element(R, rng)
            out[:, j] = (out[:, j] + (f @ R.reg(c))) % R.N
    return out


def _ann_im(R, i):
    M = gen.decode_module(R, i["M"])
    B = exterior_bidual(M, i["r"])
    if B.rank_count == 0:
        return True
    a = _random_bidual_element(R, B, i["coeffs_seed"])
    return image_of_element(a) == annihilator_ideal(annihilator_of_element(a))


prop("biduals", "ann_im", "im(a) = Ann(Ann(a))")((_bidual_gen, _ann_im))


def _kb_exact(R, i):
    M = gen.decode_module(R, i["M"])
    f = _functionals(R, M, i["s"], i["coeffs_seed"])
    kb = kernel_bidual_map(M, f)
    return all(kb.exactness(k) for k in range(1, i["r"] + 1))


prop("biduals", "kernel_exactness", "the kernel of the diagonal map is the bidual of the kernel")((
    _bidual_gen, _kb_exact,
))


def _criterion(R, i):
    M = gen.decode_module(R, i["M"])
    f = _functionals(R, M, i["s"], i["coeffs_seed"])
    kb = kernel_bidual_map(M, f)
    B = exterior_bidual(M, i["r"])
    if B.rank_count == 0:
        return True
    a = _random_bidual_element(R, B, i["coeffs_seed"] ^ 1)
    ok = kb.in_image(a) == kb.criterion(a)
    # also an element known to lie in the image
    BN = exterior_bidual(kb.N, i["r"])
    if BN.rank_count:
        b = kb.iota(_random_bidual_element(R, BN, i["coeffs_seed"] ^ 2))
        ok = ok and kb.in_image(b) and kb.criterion(b)
    return ok


prop("biduals", "criterion", "the membership criterion agrees with direct computation")((_bidual_gen, _criterion))


def _wedge_zero(R, i):
    M = gen.decode_module(R, i["M"])
    r = i["r"] + 1
    B = exterior_bidual(M, r)
    if B.rank_count == 0:
        return True
    f = _functionals(R, M, i["s"], i["coeffs_seed"])
    fs = [f[:, j] for j in range(f.shape[1])][:r - 1] or [f[:, 0]]
    a = _random_bidual_element(R, B, i["coeffs_seed"] ^ 3)
    red = rank_reduce(a, fs)
    return all(rank_reduce(red, [g]).is_zero() for g in fs) if red.bidual.r >= 1 else True


prop("biduals", "wedge_square_zero", "f_i applied after the wedge of the f_j vanishes")((_bidual_gen, _wedge_zero))

# ---------------------------------------------------------------------------
# complexes


def _evaluation(R, i):
    C = gen.decode_quadratic(R, i)
    return evaluation_ideal(C) == fitting_ideal(C.H1, 0)


prop("complexes", "evaluation_ideal", "evaluation ideal of theta = Fitt^0(H^1)")((
    lambda R, rng: gen.quadratic(R, rng), _evaluation,
))


def _theta_member(R, i):
    C = gen.decode_quadratic(R, i)
    return in_bidual_of_kernel(C, theta(C), C.r)


prop("complexes", "theta_membership", "theta lands in the r-th bidual of H^0")((
    lambda R, rng: gen.quadratic(R, rng), _theta_member,
))


def _theta_cokernel(R, i):
    C = gen.decode_quadratic(R, i)
    t = theta(C)
    I = fitting_ideal(C.H1, 0)
    # injectivity on Fitt^0(H^1)^* (x) Det: Ann(theta) = Ann(Fitt^0)
    if annihilator_ideal(Ideal(R, list(t))) != annihilator_ideal(I):
        return False
    span = bidual_of_kernel_span(C, C.r)
    line = rspan(R, t[None])
    for g in I.canonical:
        moved = (span.reshape(len(span), -1, R.n) @ R.reg(g)).reshape(len(span), -1) % R.N
        if not linalg.span_contains(line, moved, R.N):
            return False
    return True


prop("complexes", "theta_cokernel", "theta is injective on Fitt^0(H^1)^* and Fitt^0 kills the cokernel")((
    lambda R, rng: gen.quadratic(R, rng, max_d=4, max_e=3), _theta_cokernel,
))


def _en(R, i):
    C = gen.decode_quadratic(R, i)
    EN = eagon_northcott(C)           # raises if the differentials do not compose to zero
    if en_h0_ideal(EN) != fitting_ideal(C.H1, 0):
        return False
    return en_annihilation_check(EN)


prop("complexes", "eagon_northcott", "EN complex: d o d = 0, H^0 = R/Fitt^0, Fitt^0 kills cohomology")((
    lambda R, rng: gen.quadratic(R, rng, r_range=(0, 3), max_d=4, max_e=3), _en,
))


def _extension(R, i):
    C = gen.decode_quadratic(R, i)
    cols = _arr(i["cols"], R, i["n"], C.e)
    return extend_by_free(C, cols)[1]


def _extension_gen(R, rng):
    data = gen.quadratic(R, rng, r_range=(0, 3), max_d=4, max_e=3)
    n = rng.between(1, 2)
    return {**data, "n": n, "cols": gen.matrix(R, rng, n, data["e"]).tolist()}


prop("complexes", "extension_sign", "(-1)^{rn} wedge f_i (theta_D) = theta_C")((_extension_gen, _extension))


def _base_change_theta(R, i):
    C = gen.decode_quadratic(R, i)
    S = quotient_ring(R, i["level"])
    return np.array_equal(theta(reduce_complex(C, S)), theta(C) % S.N)


prop("complexes", "theta_base_change", "theta commutes with reduction to R/p^j")((
    lambda R, rng: {**gen.quadratic(R, rng), "level": rng.between(1, R.m)}, _base_change_theta,
))


def _resolution(R, i):
    from .modules import subsets
    C = gen.decode_quadratic(R, i)
    D = add_identity_block(C)
    tD = theta(D)
    old = set(subsets(C.d, C.r))
    off_zero = all(not tD[k].any() for k, I in enumerate(subsets(D.d, C.r)) if I not in old)
    return off_zero and np.array_equal(restrict_coordinates(tD, D.d, range(C.d), C.r), theta(C))


prop("complexes", "resolution_independence", "adding an identity block leaves theta unchanged")((
    lambda R, rng: gen.quadratic(R, rng, max_d=4, max_e=3), _resolution,
))


def _quotient_gen(R, rng):
    """phi with its last r_Y columns zero, then twisted by an invertible change of basis of F1."""
    data = gen.quadratic(R, rng, r_range=(0, 2), max_d=4, max_e=3)
    d, e = data["d"], data["e"]
    rY = rng.between(0, e)
    if d - e + rY <= 0:
        rY = min(e, 1 - (d - e))
    phi = np.asarray(data["phi"], dtype=np.int64).reshape(d, e, R.n) if d and e else np.zeros((d, e, R.n), dtype=np.int64)
    phi[:, e - rY:] = 0
    T = gen._invertible(R, rng, e) if e else np.zeros((0, 0, R.n), dtype=np.int64)
    twisted = rmatmul(R, phi, T) if e else phi
    # pi = T^{-1} restricted to the last r_Y coordinates
    if e:
        dT = det(R, T)
        Tinv = (cofactor(R, T) @ R.reg(R.inverse(dT))) % R.N
        pi = Tinv[:, e - rY:]
    else:
        pi = np.zeros((0, 0, R.n), dtype=np.int64)
    return {"d": d, "e": e, "phi": twisted.tolist(), "rY": rY, "pi": pi.tolist(), "i": rng.between(0, 1)}


def _fitting_shift(R, i):
    C = gen.decode_quadratic(R, i)
    pi = _arr(i["pi"], R, C.e, i["rY"])
    ok = fitting_shift_check(C, pi, i["i"])
    if ok and i["rY"] == 0 and C.r > 0:
        ok = np.array_equal(theta_with_quotient(C, pi), theta(C))
    return ok


prop("complexes", "fitting_shift", "Fitt^{i+r}(H^0^*) = Fitt^i(ker(H^1 -> Y))")((_quotient_gen, _fitting_shift))

# ---------------------------------------------------------------------------
# stark


def _family(R, i) -> StarkFamily:
    d0, e = i["d0"], i["e"]
    base = QuadraticComplex(R, d0, e, _arr(i["phi"], R, d0, e))
    cols = {v: _arr(i["columns"][v], R, e) if e else np.zeros((0, R.n), dtype=np.int64) for v in i["order"]}
    return StarkFamily(base, i["order"], cols)


def _stark_gen(R, rng):
    data = gen.stark(R, rng)
    data["systems_seed"] = rng.next()
    data["systems"] = 20
    return data


prop("stark", "family_exact", "0 -> M_S -> M_S' -> R -> Z_S -> Z_S' -> 0 is exact on covering pairs")((
    _stark_gen, lambda R, i: _family(R, i).validate(),
))


def _oracle_gen(R, rng):
    data = gen.stark(R, rng, max_q=2, max_d0=2)
    return data


prop("stark", "stark_space_oracle", "the top-down limit matches the full lattice solve", oracle=True)((
    _oracle_gen,
    lambda R, i: (lambda F: linalg.span_size(stark_space(F, F.r)[0], R.N) == lattice_solve_size(F, F.r))(
        _family(R, i)),
))


def _det_stark(R, i):
    F = _family(R, i)
    c = gen.element(R, SplitMix64(i["systems_seed"]))
    return det_to_stark(F, compatible_determinants(F, c)).is_valid()


prop("stark", "det_to_stark", "theta images of compatible determinants form a Stark system")((_stark_gen, _det_stark))


def _systems(R, F, seed, count):
    span, gens = stark_space(F, F.r)
    rng = SplitMix64(seed)
    from .stark import StarkSystem
    out = []
    for _ in range(count):
        vals = {S: np.zeros_like(gens[0].values[S]) for S in F.subsets()} if gens else None
        if vals is None:
            break
        for g in gens:
            c = gen.element(R, rng)
            for S in vals:
                vals[S] = (vals[S] + g.values[S] @ R.reg(c)) % R.N
        out.append(StarkSystem(F, F.r, vals))
    return out


def _core(R, i):
    F = _family(R, i)
    data = CoreData(F, F.r)
    systems = _systems(R, F, i["systems_seed"], i["systems"])
    systems.append(det_to_stark(F, compatible_determinants(F, R.one())))
    return all(verify_core(F, F.r, s, data).ok for s in systems)


prop("stark", "core", "the core statements hold for systems drawn from SS^r")((_stark_gen, _core))


def _wedge_order_sign(F, first, second) -> int:
    """e with (wedge first) ^ (wedge second) = e (wedge of the union)."""
    pos = {v: k for k, v in enumerate(F.order)}
    seq = [pos[v] for v in F.sorted(first)] + [pos[v] for v in F.sorted(second)]
    inv = sum(1 for x in range(len(seq)) for y in range(x + 1, len(seq)) if seq[x] > seq[y])
    return -1 if inv % 2 else 1


def _sign_cocycle(R, i):
    F = _family(R, i)
    subs = F.subsets()
    for A in subs:
        for B in subs:
            if not set(A) <= set(B):
                continue
            for C in subs:
                if not set(B) <= set(C):
                    continue
                eps = _wedge_order_sign(F, [v for v in C if v not in B], [v for v in B if v not in A])
                if sign(F, C, A) != eps * sign(F, C, B) * sign(F, B, A):
                    return False
    return True


prop("stark", "sign_cocycle", "sgn(S'', S) = e sgn(S'', S') sgn(S', S), e the reordering sign")((
    _stark_gen, _sign_cocycle,
))


def _transition_functorial(R, i):
    """Signed transitions compose: S'' -> S' -> S equals S'' -> S."""
    F = _family(R, i)
    Q = F.sorted(F.order)
    C = F.complex_for(Q)
    from .modules import subsets
    k = F.r + len(Q)
    rng = SplitMix64(i["systems_seed"])
    x = np.array([gen.element(R, rng) for _ in subsets(C.d, k)], dtype=np.int64).reshape(-1, R.n)
    for S in F.subsets():
        for Sp in F.subsets():
            if set(S) <= set(Sp):
                two = transition(F, F.r, Sp, S, transition(F, F.r, Q, Sp, x))
                if not np.array_equal(two, transition(F, F.r, Q, S, x)):
                    return False
    return True


prop("stark", "transition_functorial", "signed wedge transitions compose along chains")((
    _stark_gen, _transition_functorial,
))


def _regulator(R, i):
    F = _family(R, i)
    Q = F.sorted(F.order)
    dQ = F.base.d + len(Q)
    psi = {}
    for v in Q:
        f = np.zeros((dQ, R.n), dtype=np.int64)
        f[F.base.d + Q.index(v)] = R.one()
        psi[v] = f
    eps = det_to_stark(F, compatible_determinants(F, gen.element(R, SplitMix64(i["systems_seed"]))))
    reg = regulator(F, psi, eps)
    for S in F.subsets():
        d = F.base.d + len(S)
        if not np.array_equal(restrict_coordinates(reg[S], d, range(F.base.d), F.r), eps.values[()]):
            return False
    return True


prop("stark", "regulator", "the regulator with psi_v = f_v recovers the value at the empty set")((
    _stark_gen, _regulator,
))

# ---------------------------------------------------------------------------
# kolyvagin

prop("kolyvagin", "telescoping", "(sigma - 1) D = |G| - N_G")((
    lambda R, rng: {"order": rng.between(2, 16)}, lambda R, i: telescoping_holds(i["order"]),
))


def _dprod(R, i):
    orders = i["orders"]
    D = derivative_product(orders)
    return all(D[idx] == math.prod(idx) for idx in itertools.product(*[range(o) for o in orders]))


prop("kolyvagin", "derivative_product", "D_n has coefficient prod j_i at (j_1, .., j_k)")((
    lambda R, rng: {"orders": [rng.between(2, 5) for _ in range(rng.between(1, 3))]}, _dprod,
))


def _kappa(R, data, key="kappa"):
    return {tuple(k.split("|")) if k else (): np.array(v, dtype=np.int64) for k, v in data[key].items()}


def _xtable(data):
    return {tuple(k.split("|")): np.array(v, dtype=np.int64) for k, v in data["x"].items()}


def _rearrange(R, i):
    return stabilizer_rearrangement_check(R, i["labels"], i["q"], _kappa(R, i), _xtable(i))


prop("kolyvagin", "rearrangement", "the permutation sum regroups over the stabiliser of q")((
    lambda R, rng: gen.kolyvagin(R, rng), _rearrange,
))


def _linearity(R, i):
    k1, k2 = _kappa(R, i), _kappa(R, i, "kappa2")
    c = np.array(i["c"], dtype=np.int64)
    x = _xtable(i)
    mix = {k: (k1[k] + k2[k] @ R.reg(c)) % R.N for k in k1}
    lhs = kolyvagin_combination(R, mix, x, i["labels"])
    rhs = (kolyvagin_combination(R, k1, x, i["labels"])
           + kolyvagin_combination(R, k2, x, i["labels"]) @ R.reg(c)) % R.N
    return np.array_equal(lhs, rhs)


prop("kolyvagin", "linearity", "the combination is R-linear in kappa'")((
    lambda R, rng: gen.kolyvagin(R, rng, max_nu=3), _linearity,
))


def _cofactor_iso(R, i):
    iso = cofactor_iso(R, _arr(i["tau"], R, i["k"], i["k"]))
    return iso.is_bijective() and iso.composition_zero()


prop("kolyvagin", "cofactor_iso", "the cofactor map A/(tau - 1)A -> A^{tau = 1} is bijective")((
    lambda R, rng: gen.cofactor(R, rng), _cofactor_iso,
))


def _cofactor_identity(R, i):
    k = i["k"]
    f = _arr(i["f"], R, k, k)
    c = cofactor(R, f)
    dI = np.zeros((k, k, R.n), dtype=np.int64)
    for j in range(k):
        dI[j, j] = det(R, f)
    return np.array_equal(rmatmul(R, f, c), dI) and np.array_equal(rmatmul(R, c, f), dI)


prop("kolyvagin", "cofactor_identity", "f c_f = c_f f = det(f) I")((
    lambda R, rng: gen.cofactor(R, rng), _cofactor_identity,
))

# ---------------------------------------------------------------------------
# limits


def _tower(R, i):
    T = RingTower(R.p, i["depth"], R.group.cyclic_orders)
    M = gen.decode_module(T.top, i["module"])
    return T, ModuleTower(T, M)


prop("limits", "fitting_tower", "Fitting ideals: containment down the tower and exact base change")((
    lambda R, rng: gen.tower(R, rng), lambda R, i: fitting_tower_check(_tower(R, i)[1], i["r"])["ok"],
))

prop("limits", "torsion_dual", "(M[p^n])^* = M^* / p^n M^*")((
    lambda R, rng: gen.tower(R, rng), lambda R, i: torsion_dual_check(_tower(R, i)[1].top),
))

prop("limits", "tor_transition", "Tor_1 transition squares commute and the cokernels agree")((
    lambda R, rng: gen.tower(R, rng),
    lambda R, i: tor_transition_check(_tower(R, i)[1], {int(k): v for k, v in i["truncations"].items()})["ok"],
))

SUITES = sorted({p.suite for p in PROPERTIES.values()})

# ---------------------------------------------------------------------------
# runner


@dataclass
class SuiteConfig:
    suite: str
    seed: int = 42
    count: int = 10
    rings: tuple = tuple(DEFAULT_GRID)
    bound: int = 65536
    out: str | None = None
    threads: int = 1

    def properties(self) -> list[Property]:
        if self.suite == "all":
            return [PROPERTIES[k] for k in sorted(PROPERTIES)]
        if self.suite not in SUITES:
            raise KeyError(f"unknown suite {self.suite!r}")
        return [PROPERTIES[k] for k in sorted(PROPERTIES) if PROPERTIES[k].suite == self.suite]


def _ring(label: str) -> GorensteinRing:
    """Rings above the enumeration bound are allowed; only oracle properties skip them."""
    p, m, g = gen.parse_ring(label)
    return make_ring(p, m, g, None)


def instance_for(prop_: Property, R: GorensteinRing, seed: int, index: int) -> dict:
    rng = SplitMix64(derive(seed, prop_.name, gen.ring_label(R), index))
    return prop_.generate(R, rng)


def check_instance(prop_: Property, R: GorensteinRing, inst: dict):
    """(passed, error message)."""
    try:
        return bool(prop_.check(R, inst)), None
    except Exception as exc:  # a crash is a failure with its message recorded
        return False, f"{type(exc).__name__}: {exc}"


def run_property(name: str, label: str, seed: int, count: int, bound: int) -> dict:
    prop_ = PROPERTIES[name]
    R = _ring(label)
    start = time.perf_counter()
    entry = {"property": name, "ring": label, "anchor": prop_.anchor, "instances": 0, "failures": 0,
             "skipped": 0, "counterexample": None}
    for k in range(count):
        if prop_.oracle and R.cardinality > bound:
            entry["skipped"] += 1
            continue
        inst = instance_for(prop_, R, seed, k)
        ok, err = check_instance(prop_, R, inst)
        entry["instances"] += 1
        if not ok:
            entry["failures"] += 1
            if entry["counterexample"] is None:
                entry["counterexample"] = {"property": name, "ring": label, "index": k, "instance": inst,
                                           "error": err}
    entry["_time"] = time.perf_counter() - start
    return entry


def _threads(requested: int) -> int:
    cap = os.environ.get("GORENSTEIN_KIT_THREADS")
    n = requested
    if cap:
        n = min(n, max(1, int(cap)))
    return max(1, n)


def run_suite(cfg: SuiteConfig) -> dict:
    jobs = [(p.name, label) for p in cfg.properties() for label in cfg.rings]
    for label in cfg.rings:
        _ring(label)
    threads = _threads(cfg.threads)
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(run_property, n, label, cfg.seed, cfg.count, cfg.bound) for n, label in jobs]
            entries = [f.result() for f in futures]
    else:
        entries = [run_property(n, label, cfg.seed, cfg.count, cfg.bound) for n, label in jobs]
    entries.sort(key=lambda e: (e["property"], e["ring"]))
    timing = {f'{e["property"]}@{e["ring"]}': round(e.pop("_time"), 4) for e in entries}
    failures = sum(e["failures"] for e in entries)
    report = {
        "schema": SCHEMA,
        "config": {"suite": cfg.suite, "seed": cfg.seed, "count": cfg.count, "rings": list(cfg.rings),
                   "bound": cfg.bound},
        "properties": entries,
        "summary": {"properties": len({e["property"] for e in entries}), "instances": sum(e["instances"] for e in entries),
                    "failures": failures, "ok": failures == 0},
        "timing": {"generated_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()), "seconds": timing},
    }
    if cfg.out:
        with open(cfg.out, "w") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return report


def replay(counterexample: dict, bound: int = 65536):
    """Re-run a dumped counterexample; returns (passed, error)."""
    prop_ = PROPERTIES[counterexample["property"]]
    R = _ring(counterexample["ring"])
    return check_instance(prop_, R, counterexample["instance"])
