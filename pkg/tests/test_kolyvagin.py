import itertools

import numpy as np
import pytest

from gorenstein_kit.fitting import det
from gorenstein_kit.kolyvagin import (
    CorankNotOne, MissingDivisor, cofactor, cofactor_iso, derivative_operator, derivative_product,
    kolyvagin_combination, permutations_with_sign, stabilizer_rearrangement_check, telescoping_holds,
)
from gorenstein_kit.modules import rmatmul
from gorenstein_kit.ring import make_ring
from gorenstein_kit.rng import SplitMix64

Z4 = make_ring(2, 2)
Z4C2 = make_ring(2, 2, [2])
F3C3 = make_ring(3, 1, [3])
GRID = [Z4, make_ring(2, 3), F3C3, Z4C2, make_ring(3, 2, [3])]


def perm_sign(p):
    return (-1) ** sum(1 for i in range(len(p)) for j in range(i + 1, len(p)) if p[i] > p[j])


def reference_combination(R, kappa, x, n):
    """Direct sum over permutations with inversion-count signs."""
    n = tuple(sorted(n))
    total = np.zeros_like(kappa[()])
    for p in itertools.permutations(range(len(n))):
        tau = {n[i]: n[p[i]] for i in range(len(n))}
        fixed = tuple(q for q in n if tau[q] == q)
        coeff = R.one()
        for q in n:
            if tau[q] != q:
                coeff = R.mul(coeff, x[(tau[q], q)])
        total = total + perm_sign(p) * (kappa[fixed] @ R.reg(coeff))
    return total % R.N


def random_data(R, rng, primes, width=2):
    kappa = {}
    for k in range(len(primes) + 1):
        for d in itertools.combinations(primes, k):
            kappa[d] = np.array([R.random_element(rng) for _ in range(width)])
    x = {(l, q): R.random_element(rng) for l in primes for q in primes if l != q}
    return kappa, x


@pytest.mark.parametrize("order", range(1, 17))
def test_telescoping(order):
    assert telescoping_holds(order)
    D = derivative_operator(order)
    assert D.tolist() == list(range(order))


def test_derivative_examples():
    assert derivative_operator(2).tolist() == [0, 1]
    assert derivative_operator(4).tolist() == [0, 1, 2, 3]
    P = derivative_product([3, 4])
    for j, k in itertools.product(range(3), range(4)):
        assert P[j, k] == j * k


def test_permutation_signs():
    for k in range(5):
        items = list(range(k))
        for tau, s in permutations_with_sign(items):
            assert s == perm_sign([tau[i] for i in items])


def test_combination_small_cases():
    rng = SplitMix64(1)
    kappa, x = random_data(Z4C2, rng, ["a", "b"])
    assert np.array_equal(kolyvagin_combination(Z4C2, kappa, x, []), kappa[()])
    assert np.array_equal(kolyvagin_combination(Z4C2, kappa, x, ["a"]), kappa[("a",)])
    swap = kappa[()] @ Z4C2.reg(Z4C2.mul(x[("b", "a")], x[("a", "b")]))
    assert np.array_equal(kolyvagin_combination(Z4C2, kappa, x, ["a", "b"]), (kappa[("a", "b")] - swap) % 4)
    del kappa[()]
    with pytest.raises(MissingDivisor):
        kolyvagin_combination(Z4C2, kappa, x, ["a", "b"])


@pytest.mark.parametrize("R", GRID, ids=lambda R: R.name())
def test_combination_and_rearrangement(R):
    rng = SplitMix64(99)
    for nu in range(5):
        primes = [f"q{k}" for k in range(nu)]
        kappa, x = random_data(R, rng, primes)
        assert np.array_equal(kolyvagin_combination(R, kappa, x, primes), reference_combination(R, kappa, x, primes))
        for q in primes:
            assert stabilizer_rearrangement_check(R, primes, q, kappa, x)


def test_cofactor_examples():
    I = np.eye(3, dtype=np.int64)[:, :, None]
    assert np.array_equal(cofactor(Z4, I), I)
    a, b, c, d = 1, 2, 3, 1
    adj = cofactor(Z4, np.array([[a, b], [c, d]]).reshape(2, 2, 1))
    assert adj[:, :, 0].tolist() == [[d, (-b) % 4], [(-c) % 4, a]]
    rng = SplitMix64(7)
    for _ in range(5):
        f = np.array([[F3C3.random_element(rng) for _ in range(3)] for _ in range(3)])
        adj = cofactor(F3C3, f)
        dI = np.zeros_like(f)
        for i in range(3):
            dI[i, i] = det(F3C3, f)
        assert np.array_equal(rmatmul(F3C3, f, adj), dI)
        assert np.array_equal(rmatmul(F3C3, adj, f), dI)


def test_cofactor_iso_examples():
    assert cofactor_iso(Z4, [[[1]]]).is_bijective()
    tau = np.array([[1, 1], [0, 1]]).reshape(2, 2, 1)
    iso = cofactor_iso(Z4, tau)
    assert iso.is_bijective() and iso.composition_zero()
    # enumerate both 4-element sides
    f = iso.f[:, :, 0]
    adj = iso.adj[:, :, 0]
    vecs = list(itertools.product(range(4), repeat=2))
    rel = {tuple(np.array(v) @ f % 4) for v in vecs}
    fixed = {v for v in vecs if not (np.array(v) @ f % 4).any()}
    assert len(vecs) // len(rel) == len(fixed) == 4
    images = {}
    for v in vecs:
        images.setdefault(tuple(np.array(v) @ adj % 4), set()).add(v)
    assert set(images) == fixed
    for preimage in images.values():
        base = next(iter(preimage))
        assert {tuple((np.array(w) - base) % 4) for w in preimage} == rel
    with pytest.raises(CorankNotOne):
        cofactor_iso(Z4, np.eye(2, dtype=np.int64)[:, :, None])
