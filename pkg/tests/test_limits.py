import numpy as np
import pytest

from gorenstein_kit.limits import (
    BadEmbedding, ModuleTower, RingTower, fitting_tower_check, tor_group, tor_transition_check,
    torsion_dual_check,
)
from gorenstein_kit.modules import PresentedModule, cyclic_module, free_module
from gorenstein_kit.ring import make_ring
from gorenstein_kit.rng import SplitMix64

import oracles


def test_fitting_tower_examples():
    T = RingTower(2, 3, [2])
    res = fitting_tower_check(ModuleTower(T, free_module(T.top, 2)), 0)
    assert res["ok"]
    M = cyclic_module(T.top, [[2, 0]])
    for r in (0, 1):
        assert fitting_tower_check(ModuleTower(T, M), r)["ok"]
    assert all(ModuleTower(T, M).base_change_holds(i) for i in (1, 2))


def test_fitting_tower_random():
    rng = SplitMix64(4)
    for p, group in [(2, [2]), (3, [3])]:
        T = RingTower(p, 3, group)
        R = T.top
        for _ in range(3):
            M = PresentedModule(R, 2, np.array([[R.random_element(rng) for _ in range(2)] for _ in range(2)]))
            for r in range(3):
                assert fitting_tower_check(ModuleTower(T, M), r)["ok"]


def test_module_tower_rejects_wrong_ring():
    T = RingTower(2, 2)
    with pytest.raises(ValueError):
        ModuleTower(T, free_module(make_ring(2, 3), 1))


def test_torsion_dual_examples():
    Z4 = make_ring(2, 2)
    assert torsion_dual_check(free_module(Z4, 2))
    assert torsion_dual_check(cyclic_module(Z4, [[2]]))
    assert torsion_dual_check(PresentedModule(Z4, 0))
    with pytest.raises(BadEmbedding):
        torsion_dual_check(cyclic_module(Z4, [[2]]), embedding=[1])
    with pytest.raises(BadEmbedding):
        torsion_dual_check(free_module(make_ring(2, 1), 1))


def test_torsion_dual_random():
    rng = SplitMix64(8)
    for R in (make_ring(2, 3), make_ring(2, 2, [2]), make_ring(3, 2, [3])):
        for _ in range(3):
            M = PresentedModule(R, 2, np.array([[R.random_element(rng) for _ in range(2)]]))
            assert torsion_dual_check(M)


def tor_size_oracle(R, a, j):
    """|Tor_1(R/(a), R/p^j)| = |{x : xa in p^j R}| / |ann(a) + p^j R| by enumeration."""
    pj = tuple(R.scalar(R.p ** j % R.N))
    PJ = oracles.principal(R, pj)
    num = {x for x in oracles.elements(R) if oracles.conv(R, x, a) in PJ}
    ann = {x for x in oracles.elements(R) if not any(oracles.conv(R, x, a))}
    den = {oracles.add(R, u, v) for u in ann for v in PJ}
    return len(num) // len(den)


def test_tor_example_z4():
    Z4 = make_ring(2, 2)
    assert tor_group(Z4, np.array([[[2]]]), 1).size == 2
    T = RingTower(2, 2)
    res = tor_transition_check(ModuleTower(T, cyclic_module(T.top, [[2]])), {1: 1, 2: 1})
    assert res["ok"] and res["sizes"] == [1, 2]
    free = tor_transition_check(ModuleTower(T, free_module(T.top, 1)), {1: 1, 2: 2})
    assert free["ok"] and free["sizes"] == [1, 1]


@pytest.mark.parametrize("R", [make_ring(2, 3), make_ring(2, 2, [2]), make_ring(3, 1, [3])])
def test_tor_matches_enumeration(R):
    for a in oracles.elements(R)[:: max(1, R.N ** R.n // 40)]:
        for j in range(1, R.m + 1):
            assert tor_group(R, np.array(a).reshape(1, 1, R.n), j).size == tor_size_oracle(R, a, j)


def test_tor_transition_random():
    rng = SplitMix64(12)
    T = RingTower(2, 3, [2])
    R = T.top
    for _ in range(4):
        M = PresentedModule(R, 1, np.array([[R.random_element(rng)]]))
        for trunc in ({1: 1, 2: 1, 3: 1}, {1: 1, 2: 2, 3: 2}, {1: 1, 2: 2, 3: 3}):
            assert tor_transition_check(ModuleTower(T, M), trunc)["ok"]
    with pytest.raises(ValueError):
        tor_transition_check(ModuleTower(T, M), {1: 1, 2: 2, 3: 1})
