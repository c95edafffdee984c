import itertools
from math import comb

import numpy as np
import pytest

from gorenstein_kit.biduals import (
    RankTooLarge, annihilator_of_element, exterior_bidual, image_of_element, kernel_bidual_map, rank_reduce,
)
from gorenstein_kit.modules import (
    PresentedModule, cyclic_module, dual, exterior_power, free_module, is_bijective,
)
from gorenstein_kit.ring import Ideal, annihilator_ideal, make_ring
from gorenstein_kit.rng import SplitMix64

import oracles

Z4 = make_ring(2, 2)
Z4C2 = make_ring(2, 2, [2])
F3C3 = make_ring(3, 1, [3])


def unit(R, b, k):
    v = np.zeros((b, R.n), dtype=np.int64)
    v[k, 0] = 1
    return v


def test_free_bidual_is_exterior_power():
    for n in range(4):
        for r in range(n + 1):
            B = exterior_bidual(free_module(Z4C2, n), r)
            assert B.rank_count == comb(n, r)
            assert B.presentation.cardinality == 16 ** comb(n, r)


def test_rank_zero_and_cyclic_examples():
    half = cyclic_module(Z4, [[2]])
    assert exterior_bidual(half, 0).presentation.cardinality == 4
    B = exterior_bidual(half, 1)
    assert B.presentation.cardinality == 2
    assert is_bijective(B.canonical_map())


def test_bidual_size_is_size_of_exterior_power_of_dual():
    rng = SplitMix64(12)
    for R in (Z4C2, F3C3):
        for _ in range(3):
            rel = np.array([[R.random_element(rng) for _ in range(2)]])
            M = PresentedModule(R, 2, rel)
            assert exterior_bidual(M, 1).presentation.cardinality == oracles.module_size(
                R, 2, [tuple(rel[0].reshape(-1))])
            assert exterior_bidual(M, 2).presentation.cardinality == exterior_power(dual(M), 2).cardinality


def test_rank_reduce_examples():
    R2 = free_module(Z4, 2)
    B = exterior_bidual(R2, 2)
    a = B.image_of_wedge([unit(Z4, 2, 0), unit(Z4, 2, 1)])
    assert rank_reduce(a, [unit(Z4, 2, 0), unit(Z4, 2, 1)]).values.tolist() == [[1]]
    assert rank_reduce(a, [np.zeros((2, 1), dtype=np.int64)]).is_zero()
    red = rank_reduce(a.scale([2]), [unit(Z4, 2, 0)])
    assert red.values.tolist() == [[0], [2]]
    with pytest.raises(RankTooLarge):
        rank_reduce(exterior_bidual(R2, 1).image_of_wedge([unit(Z4, 2, 0)]), [unit(Z4, 2, 0), unit(Z4, 2, 1)])


def test_rank_reduce_composes_with_f_in_front():
    rng = SplitMix64(6)
    R = Z4C2
    M = free_module(R, 3)
    B = exterior_bidual(M, 3)
    a = B.image_of_wedge([unit(R, 3, k) for k in range(3)]).scale(R.random_element(rng))
    for _ in range(5):
        f = np.array([R.random_element(rng) for _ in range(3)])
        g = np.array([R.random_element(rng) for _ in range(3)])
        assert rank_reduce(rank_reduce(a, [f]), [g]) == rank_reduce(a, [f, g])


def test_image_is_double_annihilator():
    B = exterior_bidual(free_module(Z4, 1), 1)
    a = B.image_of_wedge([[[2]]])
    assert image_of_element(a) == Ideal(Z4, [[2]])
    assert oracles.ideal_of(annihilator_ideal(annihilator_of_element(a))) == {(0,), (2,)}
    assert image_of_element(B.zero()).is_zero()
    assert image_of_element(B.image_of_wedge([[[1]]])).is_whole()
    Bc = exterior_bidual(free_module(F3C3, 2), 1)
    for x in oracles.elements(F3C3):
        a = Bc.image_of_wedge([np.array([x, (0, 0, 0)])])
        assert oracles.ideal_of(image_of_element(a)) == oracles.principal(F3C3, x)
        assert image_of_element(a) == annihilator_ideal(annihilator_of_element(a))


def test_kernel_bidual_examples():
    M = free_module(Z4, 2)
    kb = kernel_bidual_map(M, np.zeros((2, 0, 1), dtype=np.int64))
    assert kb.N.cardinality == M.cardinality
    # split case: N = ker(e_2^*)
    f = np.array([[[0]], [[1]]])
    kb = kernel_bidual_map(M, f)
    a = exterior_bidual(M, 2).image_of_wedge([unit(Z4, 2, 0), unit(Z4, 2, 1)])
    assert kb.reduce(a).bidual.r == 1
    assert kb.exactness(1) and kb.exactness(2)
    # f_1 = (2, 0): image of the wedge on the first bidual is (2)
    f = np.array([[[2]], [[0]]])
    kb = kernel_bidual_map(M, f)
    B1 = exterior_bidual(M, 1)
    values = set()
    for x, y in itertools.product(range(4), repeat=2):
        a = B1.image_of_wedge([np.array([[x], [y]])])
        values.add(int(rank_reduce(a, kb.functionals()).values[0, 0]))
    assert values == {0, 2}
    assert kb.exactness(1)
