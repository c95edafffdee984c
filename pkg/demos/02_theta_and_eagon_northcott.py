"""The determinant map of a two-term complex and its Eagon-Northcott complex.

Run: python3 demos/02_theta_and_eagon_northcott.py
"""

import numpy as np

from gorenstein_kit import QuadraticComplex, eagon_northcott, evaluation_ideal, extend_by_free, fitting_ideal, make_ring, theta
from gorenstein_kit.complexes import en_annihilation_check, in_bidual_of_kernel
from gorenstein_kit.linalg import span_size

R = make_ring(2, 2)
C = QuadraticComplex(R, 2, 1, np.array([[[2]], [[0]]]))
t = theta(C)
print("phi = (2, 0)^T over Z/4")
print("  theta(basis) =", t[:, 0].tolist(), " i.e. -2 e_2")
print("  lies in the first bidual of ker(phi):", in_bidual_of_kernel(C, t, 1))
print("  evaluation ideal == Fitt^0(H^1):", evaluation_ideal(C) == fitting_ideal(C.H1, 0))

# Adjoining a generator that hits the unit column kills H^1; the square with
# the coordinate functional commutes once the graded sign is included.
D, ok = extend_by_free(C, [[[1]]])
print(f"\nextended complex: |H^1| = {D.H1.cardinality}, square commutes: {ok}")

S = make_ring(3, 1, [3])
# sigma - 1 = (2, 1, 0) sits in the maximal ideal, so the cohomology is not trivial
s1 = [2, 1, 0]
phi = np.array([[s1, [0, 0, 0]], [[0, 0, 0], s1], [s1, s1]])
E = QuadraticComplex(S, 3, 2, phi)
EN = eagon_northcott(E)
print(f"\nEagon-Northcott complex over {S.name()} with entries in the maximal ideal")
print("  ranks:", EN.ranks())
for k in range(len(EN.terms)):
    Z, B = EN.cohomology(k)
    print(f"  degree {EN.degrees[k]:>2}: |H| = {span_size(Z, S.N) // span_size(B, S.N)}")
print("  Fitt^0(coker phi) kills every H:", en_annihilation_check(EN))
