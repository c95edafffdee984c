import itertools

import numpy as np
import pytest

from gorenstein_kit import linalg
from gorenstein_kit.complexes import QuadraticComplex, restrict_coordinates, theta
from gorenstein_kit.ring import make_ring
from gorenstein_kit.rng import SplitMix64
from gorenstein_kit.stark import (
    CoreData, IncompatibleFamily, NotASubset, ShapeMismatch, StarkFamily, StarkSystem, compatible_determinants,
    det_to_stark, lattice_solve_size, regulator, sign, stabilizing_subset, stark_space, transition, verify_core,
)

Z4 = make_ring(2, 2)
Z4C2 = make_ring(2, 2, [2])


def family(R, phi0, cols, order=None):
    phi0 = np.asarray(phi0, dtype=np.int64)
    d, e = phi0.shape[0], phi0.shape[1] if phi0.ndim > 1 else 0
    base = QuadraticComplex(R, d, e, phi0.reshape(d, e, R.n))
    order = order or [f"v{k + 1}" for k in range(len(cols))]
    return StarkFamily(base, order, dict(zip(order, cols)))


def random_family(R, rng, d0, e, q):
    phi0 = np.array([[R.random_element(rng) for _ in range(e)] for _ in range(d0)]).reshape(d0, e, R.n)
    base = QuadraticComplex(R, d0, e, phi0)
    order = [f"v{k + 1}" for k in range(q)]
    cols = {v: np.array([R.random_element(rng) for _ in range(e)]).reshape(e, R.n) for v in order}
    return StarkFamily(base, order, cols)


def test_sign_examples():
    F = family(Z4, [[1], [0]], [[[1]], [[0]]])
    assert sign(F, ("v1",), ("v1",)) == 1
    assert sign(F, ("v1", "v2"), ("v1",)) == -1
    assert sign(F, ("v1", "v2"), ("v2",)) == 1
    with pytest.raises(NotASubset):
        sign(F, ("v1",), ("v2",))


def test_sign_is_a_cocycle_not_multiplicative():
    F = family(Z4, [[1], [0]], [[[1]], [[0]], [[0]]])
    top = ("v1", "v2", "v3")
    # plain multiplicativity fails on this chain
    assert sign(F, top, ()) != sign(F, top, ("v2",)) * sign(F, ("v2",), ())
    # the reordering sign of (S''\S') ^ (S'\S) restores it
    for S, Sp in [((), ("v2",)), (("v1",), ("v1", "v3")), ((), ("v1", "v3"))]:
        outer = [v for v in top if v not in Sp]
        inner = [v for v in Sp if v not in S]
        seq = [F.order.index(v) for v in outer + inner]
        eps = (-1) ** sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] > seq[j])
        assert sign(F, top, S) == eps * sign(F, top, Sp) * sign(F, Sp, S)


def test_empty_vertex_set():
    F = family(Z4, [[2], [0]], [])
    span, systems = stark_space(F, 1)
    C = F.complex_for(())
    from gorenstein_kit.complexes import bidual_of_kernel_span
    assert linalg.span_size(span, 4) == linalg.span_size(bidual_of_kernel_span(C, 1), 4)
    assert np.array_equal(det_to_stark(F, {(): [1]}).values[()], theta(C))


def test_shape_mismatch():
    F = family(Z4, [[2], [0]], [[[1]]])
    with pytest.raises(ShapeMismatch):
        stark_space(F, 2)


def _contract(psi, x, d, k):
    """psi contracted into x in Lambda^k Z^d (functional in front), dict form."""
    out = {}
    for I, c in x.items():
        for t, j in enumerate(I):
            if psi[j]:
                J = I[:t] + I[t + 1:]
                out[J] = (out.get(J, 0) + (-1) ** t * psi[j] * c)
    return out


def brute_stark_size(phi0, h, N):
    """Count compatible pairs (x_empty, x_v) over Z/N by enumeration (d0 = 2, e = 1)."""
    phi = [phi0[0], phi0[1], h]
    mons1 = [(0,), (1,)]
    mons2 = list(itertools.combinations(range(3), 2))
    count = 0
    bottoms = [x for x in itertools.product(range(N), repeat=2) if (x[0] * phi0[0] + x[1] * phi0[1]) % N == 0]
    for top in itertools.product(range(N), repeat=3):
        x = dict(zip(mons2, top))
        if any(v % N for v in _contract(phi, x, 3, 2).values()):
            continue
        red = _contract([0, 0, 1], x, 3, 2)
        y = tuple(red.get(I, 0) % N for I in mons1)
        count += y in bottoms
    return count


def test_stark_space_against_enumeration():
    rng = SplitMix64(19)
    for _ in range(12):
        phi0 = [rng.below(4), rng.below(4)]
        h = rng.below(4)
        F = family(Z4, [[phi0[0]], [phi0[1]]], [[[h]]])
        span, systems = stark_space(F, 1)
        size = linalg.span_size(span, 4)
        assert size == brute_stark_size(phi0, h, 4) == lattice_solve_size(F, 1)
        for s in systems:
            assert s.is_valid()


def test_split_family_matches_kernel_bidual():
    # H^1(C_empty) = 0 and all h_v = 0
    F = family(Z4C2, np.array([[[1, 0]], [[0, 0]], [[0, 0]]]), [np.zeros((1, 2)), np.zeros((1, 2))])
    span, _ = stark_space(F, 2)
    from gorenstein_kit.complexes import bidual_of_kernel_span
    assert linalg.span_size(span, 4) == linalg.span_size(bidual_of_kernel_span(F.complex_for(()), 2), 4)


def test_unit_column_single_vertex():
    rng = SplitMix64(23)
    for _ in range(5):
        F = random_family(Z4C2, rng, 2, 1, 0)
        F = StarkFamily(F.base, ["v"], {"v": np.array([[1, 0]])})
        span, systems = stark_space(F, 1)
        assert linalg.span_size(span, 4) == lattice_solve_size(F, 1)
        for s in systems:
            assert np.array_equal(transition(F, 1, ("v",), (), s.values[("v",)]), s.values[()])


def test_det_to_stark_examples():
    rng = SplitMix64(5)
    F = random_family(Z4, rng, 2, 1, 1)
    zero = det_to_stark(F, compatible_determinants(F, [0]))
    assert all(not x.any() for x in zero.values.values())
    eps = det_to_stark(F, compatible_determinants(F, [1]))
    assert eps.is_valid()
    span, _ = stark_space(F, 1)
    Q = F.sorted(F.order)
    assert linalg.in_span(span, eps.values[Q].reshape(-1), 4)
    with pytest.raises(IncompatibleFamily):
        det_to_stark(F, {(): [1], ("v1",): [3]})


def test_regulator_examples():
    rng = SplitMix64(31)
    F = random_family(Z4C2, rng, 3, 1, 2)
    _, systems = stark_space(F, 2)
    eps = systems[0]
    dQ = F.base.d + 2
    # psi_v = f_v, the coordinate functional of v
    psi = {}
    for k, v in enumerate(F.order):
        f = np.zeros((dQ, Z4C2.n), dtype=np.int64)
        f[F.base.d + k, 0] = 1
        psi[v] = f
    reg = regulator(F, psi, eps)
    assert np.array_equal(reg[()], eps.values[()])
    for S in F.subsets():
        # applying the f_v one at a time lands on +-eps at the empty set
        low = restrict_coordinates(reg[S], F.base.d + len(S), range(F.base.d), 2)
        assert np.array_equal(low, eps.values[()]) or np.array_equal(low, (-eps.values[()]) % 4)
    psi[F.order[0]] = np.zeros((dQ, Z4C2.n), dtype=np.int64)
    reg = regulator(F, psi, eps)
    for S in F.subsets():
        if F.order[0] in S:
            assert not reg[S].any()


def test_verify_core_examples():
    F = family(Z4, [[1], [0]], [[[2]]])
    assert F.complex_for(()).H1.is_zero()
    _, systems = stark_space(F, 1)
    assert all(verify_core(F, 1, s).ok for s in systems)
    # one column spans H^1
    F = family(Z4, [[2], [0]], [[[1]], [[0]]])
    assert stabilizing_subset(F) == ("v1",)


def test_core_random_z4c2():
    rng = SplitMix64(42)
    F = random_family(Z4C2, rng, 2, 1, 2)
    span, systems = stark_space(F, 1)
    assert systems
    data = CoreData(F, 1)
    Q = F.sorted(F.order)
    for _ in range(50):
        top = np.zeros_like(systems[0].values[Q])
        for s in systems:
            top = top + s.values[Q] @ Z4C2.reg(Z4C2.random_element(rng))
        eps = StarkSystem(F, 1, {S: transition(F, 1, Q, S, top % 4) for S in F.subsets()})
        assert verify_core(F, 1, eps, data).ok


def test_family_json_roundtrip():
    F = random_family(Z4C2, SplitMix64(2), 3, 2, 2)
    G = StarkFamily.from_json(F.to_json())
    assert G.order == F.order
    assert all(np.array_equal(G.columns[v], F.columns[v]) for v in F.order)
    assert F.validate()
