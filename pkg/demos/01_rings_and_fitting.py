"""Socles, annihilators and Fitting ideals over small group rings.

Run: python3 demos/01_rings_and_fitting.py
"""

import numpy as np

from gorenstein_kit import Ideal, PresentedModule, characteristic_ideal, cyclic_module, fitting_ideal, make_ring
from gorenstein_kit.fitting import annihilator_module
from gorenstein_kit.ring import annihilator_ideal, socle


def show(label, ideal):
    gens = [g.tolist() for g in ideal.minimal_generators()]
    print(f"  {label:<28} {ideal.size:>4} elements, generated by {gens}")


R = make_ring(2, 2, [2])            # Z/4[C_2], basis (1, tau)
print(f"{R.name()}: {R.cardinality} elements")
show("socle", socle(R))

# Every ideal is its own double annihilator: the ring is self-injective.
one_minus_tau = Ideal(R, [[1, 3]])
show("(1 - tau)", one_minus_tau)
show("Ann(1 - tau)", annihilator_ideal(one_minus_tau))
show("Ann(Ann(1 - tau))", annihilator_ideal(annihilator_ideal(one_minus_tau)))

# R/(1 - tau) is Z/4 through the augmentation, so 2 does not kill it.
M = cyclic_module(R, [[1, 3]])
show("Ann(R/(1 - tau))", annihilator_module(M))
show("char(R/(1 - tau))", characteristic_ideal(M))

# Fitting ideals grow with the index and reach R at the generator count.
rel = np.array([[[2, 0], [1, 1]], [[0, 0], [1, 3]]])
N = PresentedModule(R, 2, rel)
print(f"\nM = R^2 / rows {rel.tolist()}: |M| = {N.cardinality}")
for i in range(3):
    show(f"Fitt^{i}(M)", fitting_ideal(N, i))
show("Ann(M)", annihilator_module(N))
print("  Fitt^0 inside Ann:", annihilator_module(N).contains(fitting_ideal(N, 0)))
