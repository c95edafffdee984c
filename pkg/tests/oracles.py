"""Brute-force reference computations used by the tests.

Everything here works on plain tuples and enumerates whole rings or modules,
so it shares no code path with the package beyond ring construction.
"""

import itertools

import numpy as np


def conv(R, x, y):
    """Group ring product by summing over pairs of group elements."""
    out = [0] * R.n
    for i, a in enumerate(R.exponents):
        for j, b in enumerate(R.exponents):
            e = tuple((u + v) % c for u, v, c in zip(a, b, R.group.cyclic_orders))
            out[R.exponents.index(e)] += int(x[i]) * int(y[j])
    return tuple(c % R.N for c in out)


def elements(R):
    return [tuple(t) for t in itertools.product(range(R.N), repeat=R.n)]


def add(R, x, y):
    return tuple((a + b) % R.N for a, b in zip(x, y))


def principal(R, g):
    return {conv(R, r, g) for r in elements(R)}


def ideal_set(R, gens):
    out = {tuple([0] * R.n)}
    for g in gens:
        P = principal(R, g)
        out = {add(R, a, b) for a in out for b in P}
    return out


def ideal_of(I):
    """Element set of a package Ideal, via its canonical Z-span."""
    R = I.ring
    rows = [tuple(int(c) for c in r) for r in I.canonical]
    out = {tuple([0] * R.n)}
    for r in rows:
        out = {add(R, a, tuple(k * c % R.N for c in r)) for a in out for k in range(R.N)}
    return out


def vectors(R, b):
    return [tuple(itertools.chain.from_iterable(v)) for v in itertools.product(elements(R), repeat=b)]


def vec_mul(R, v, b, x):
    """Scale a flattened R^b vector by x."""
    n = R.n
    return tuple(itertools.chain.from_iterable(conv(R, v[k * n:(k + 1) * n], x) for k in range(b)))


def submodule(R, b, gens):
    """R-span of flattened vectors in R^b."""
    out = {tuple([0] * (b * R.n))}
    for g in gens:
        multiples = {vec_mul(R, g, b, r) for r in elements(R)}
        out = {tuple((u + w) % R.N for u, w in zip(a, c)) for a in out for c in multiples}
    return out


def module_size(R, b, relations):
    return (R.N ** (R.n * b)) // len(submodule(R, b, relations))


def annihilator(R, b, relations):
    """Ann of R^b / span(relations) by enumeration."""
    S = submodule(R, b, relations)
    basis = []
    for k in range(b):
        e = [0] * (b * R.n)
        e[k * R.n] = 1
        basis.append(tuple(e))
    return {x for x in elements(R) if all(vec_mul(R, e, b, x) in S for e in basis)}
