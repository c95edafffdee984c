"""A family of complexes over a vertex set, its Stark systems and the core checks.

Run: python3 demos/03_stark_systems.py
"""

import numpy as np

from gorenstein_kit import QuadraticComplex, StarkFamily, make_ring, stark_space, verify_core
from gorenstein_kit.linalg import span_size
from gorenstein_kit.stark import CoreData, compatible_determinants, det_to_stark, sign

R = make_ring(2, 2, [2])
base = QuadraticComplex(R, 2, 1, np.array([[[2, 0]], [[1, 3]]]))
F = StarkFamily(base, ["v1", "v2"], {"v1": [[1, 1]], "v2": [[1, 0]]})
print(f"base complex over {R.name()}: |H^1| = {base.H1.cardinality}, r = {base.r}")
print("sgn({v1,v2}, {v1}) =", sign(F, ("v1", "v2"), ("v1",)), " sgn({v1,v2}, {v2}) =", sign(F, ("v1", "v2"), ("v2",)))

span, systems = stark_space(F, 1)
print(f"\nStark systems of rank 1: {span_size(span, R.N)} elements, {len(systems)} generators")
for S in F.subsets():
    print(f"  complex at {list(S) or '{}'}: |H^1| = {F.complex_for(S).H1.cardinality}")

# The determinant family with coefficient 1 at the empty set gives a system.
eps = det_to_stark(F, compatible_determinants(F, R.one()))
print("\nsystem from determinants is valid:", eps.is_valid())

data = CoreData(F, 1)
print("stabilising subset:", list(data.stabilizing))
for k, s in enumerate(systems):
    rep = verify_core(F, 1, s, data)
    print(f"  generator {k}: {rep.to_json()}")
