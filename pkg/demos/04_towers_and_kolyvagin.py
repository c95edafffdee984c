"""Finite towers of coefficient rings, and Kolyvagin derivative combinatorics.

Run: python3 demos/04_towers_and_kolyvagin.py
"""

import numpy as np

from gorenstein_kit import ModuleTower, RingTower, cofactor_iso, fitting_tower_check, tor_transition_check, torsion_dual_check
from gorenstein_kit.kolyvagin import derivative_operator, kolyvagin_combination, stabilizer_rearrangement_check, telescoping_holds
from gorenstein_kit.modules import cyclic_module
from gorenstein_kit.ring import make_ring

T = RingTower(2, 3, [2])
M = cyclic_module(T.top, [[2, 0]])
print("tower Z/8[C_2] -> Z/4[C_2] -> Z/2[C_2], M = R/(2)")
print("  Fitting base change and containment:", fitting_tower_check(ModuleTower(T, M), 0)["ok"])
print("  torsion dual (M[4])^* = M^*/4M^*:", torsion_dual_check(M))
res = tor_transition_check(ModuleTower(T, M), {1: 1, 2: 1, 3: 1})
print("  |Tor_1(M_i, Z/2[C_2])| by level:", res["sizes"], " squares commute:", all(res["squares"]))

print("\nD = sum j sigma^j:", derivative_operator(5).tolist())
print("(sigma - 1) D = |G| - N_G for orders 1..16:", all(telescoping_holds(k) for k in range(1, 17)))

R = make_ring(2, 2, [2])
rng = np.random.default_rng(1)
primes = ["a", "b", "c"]
kappa = {}
for mask in range(8):
    d = tuple(q for k, q in enumerate(primes) if mask >> k & 1)
    kappa[d] = rng.integers(0, 4, size=(1, 2))
x = {(l, q): rng.integers(0, 4, size=2) for l in primes for q in primes if l != q}
print("\nkappa_abc =", kolyvagin_combination(R, kappa, x, primes).tolist())
print("rearranged around each q agrees:", all(stabilizer_rearrangement_check(R, primes, q, kappa, x) for q in primes))

tau = np.array([[1, 1], [0, 1]]).reshape(2, 2, 1)
iso = cofactor_iso(make_ring(2, 2), tau)
print("\ncofactor map A/(tau - 1)A -> A^{tau=1} for tau = (1 1; 0 1) over Z/4 is bijective:", iso.is_bijective())
