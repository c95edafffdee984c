import numpy as np
import pytest

from gorenstein_kit.ring import (
    DepthExceeded, Ideal, NonLocalGroup, NonPrimeModulus, RingMismatch, annihilator_ideal, arith,
    ideal_ops, make_ring, project, quotient_ring, regular_rep, socle,
)
from gorenstein_kit.rng import SplitMix64

import oracles

Z4 = make_ring(2, 2)
Z4C2 = make_ring(2, 2, [2])
F3C3 = make_ring(3, 1, [3])


def el(R, *c):
    return R.element(list(c) + [0] * (R.n - len(c)))


def test_arith_examples():
    assert arith(el(Z4, 2), el(Z4, 2), "add").is_zero()
    s1 = el(F3C3, 2, 1)  # sigma - 1
    cube = arith(arith(s1, s1, "mul"), s1, "mul")
    assert cube.is_zero()
    assert arith(el(Z4C2, 1, 1), el(Z4C2, 1, 3), "mul").is_zero()
    assert arith(el(Z4, 1), None, "neg").to_json() == [3]


def test_arith_ring_mismatch():
    with pytest.raises(RingMismatch):
        arith(el(Z4, 1), el(Z4C2, 1), "add")


@pytest.mark.parametrize("R", [Z4C2, F3C3, make_ring(2, 1, [2, 2]), make_ring(2, 2, [4])])
def test_mul_matches_convolution(R):
    rng = SplitMix64(7)
    for _ in range(20):
        x, y = R.random_element(rng), R.random_element(rng)
        assert tuple(R.mul(x, y)) == oracles.conv(R, x, y)
        assert np.array_equal(R.mul(x, y), R.mul(y, x))


def test_regular_rep_examples():
    assert np.array_equal(regular_rep(el(Z4C2, 1)), np.eye(2, dtype=np.int64))
    assert regular_rep(el(Z4C2, 0, 1)).tolist() == [[0, 1], [1, 0]]
    A = regular_rep(el(F3C3, 2, 1))
    assert (np.linalg.matrix_power(A, 2) % 3).any()
    assert not (np.linalg.matrix_power(A, 3) % 3).any()


def test_regular_rep_multiplicative():
    rng = SplitMix64(3)
    for _ in range(10):
        x, y = Z4C2.random_element(rng), Z4C2.random_element(rng)
        lhs = regular_rep(Z4C2.element(Z4C2.mul(x, y)))
        rhs = regular_rep(Z4C2.element(x)) @ regular_rep(Z4C2.element(y)) % 4
        assert np.array_equal(lhs, rhs)


def _socle_oracle(R):
    gens = [tuple(g) for g in R.maximal_generators()]
    return {x for x in oracles.elements(R) if all(not any(oracles.conv(R, x, g)) for g in gens)}


@pytest.mark.parametrize("R,gen", [(Z4, (2,)), (Z4C2, (2, 2)), (F3C3, (1, 1, 1))])
def test_socle_examples(R, gen):
    # (sigma - 1)^2 = 1 - 2 sigma + sigma^2 = (1, 1, 1) over F_3
    S = socle(R)
    assert oracles.ideal_of(S) == _socle_oracle(R) == oracles.principal(R, gen)
    assert S.size == R.p


def test_ideal_examples():
    two = Ideal(Z4, [[2]])
    assert ideal_ops(two, two, "product").is_zero()
    assert ideal_ops(two, two, "equals")
    a = Ideal(Z4C2, [[1, 1]])
    b = Ideal(Z4C2, [[1, 3]])
    inter = ideal_ops(a, b, "intersection")
    assert oracles.ideal_of(inter) == oracles.principal(Z4C2, (1, 1)) & oracles.principal(Z4C2, (1, 3))
    assert inter == Ideal(Z4C2, [[2, 2]])
    assert oracles.ideal_of(ideal_ops(a, b, "sum")) == oracles.ideal_set(Z4C2, [(1, 1), (1, 3)])
    assert ideal_ops(a, [2, 2], "membership")
    assert not ideal_ops(a, [1, 0], "membership")


def test_annihilator_examples():
    assert annihilator_ideal(Ideal.zero(Z4)).is_whole()
    two = Ideal(Z4, [[2]])
    assert annihilator_ideal(two) == two
    assert annihilator_ideal(annihilator_ideal(two)) == two
    s1 = Ideal(F3C3, [[2, 1, 0]])
    assert annihilator_ideal(s1) == Ideal(F3C3, [[1, 1, 1]])


def test_double_annihilator_all_principal_ideals():
    for R in (Z4C2, F3C3):
        for x in oracles.elements(R):
            I = Ideal(R, [x])
            assert annihilator_ideal(annihilator_ideal(I)) == I


def test_quotient_ring_examples():
    assert quotient_ring(Z4, 1) == make_ring(2, 1)
    assert quotient_ring(make_ring(2, 3, [2]), 2) == Z4C2
    with pytest.raises(DepthExceeded):
        quotient_ring(Z4, 3)
    F2 = quotient_ring(Z4, 1)
    for x in oracles.elements(Z4):
        if Z4.is_unit(x):
            assert F2.is_unit(project(x, F2))


def test_make_ring_errors():
    with pytest.raises(NonPrimeModulus):
        make_ring(4, 1)
    with pytest.raises(NonLocalGroup):
        make_ring(2, 1, [3])
    with pytest.raises(ValueError):
        make_ring(2, 8, [2, 2, 2], bound=65536)
    assert make_ring(2, 8, [2, 2, 2], bound=None).cardinality == 2 ** 64


def test_json_roundtrip():
    assert Z4C2.from_json(Z4C2.to_json()) == Z4C2
    x = el(F3C3, 1, 2)
    assert x.to_json() == [1, 2, 0]
