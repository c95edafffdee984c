"""Seeded instance generation.

Every instance is a plain JSON-ready dict built from a SplitMix64 stream, so
the same seed gives byte-identical instances.  Matrix entries are uniform
over one of three ideals chosen per matrix: R itself, the ideal (p) or the
augmentation multiple (g - 1)R (falling back to (p) for trivial groups).
Uniform entries over R alone would almost always produce units and hence
trivial cohomology.

Shape ranges: d <= 5, e <= 4, |Q| <= 3, nu(n) <= 4.
"""

from __future__ import annotations

import numpy as np

from .complexes import QuadraticComplex
from .modules import PresentedModule
from .ring import GorensteinRing
from .rng import SplitMix64

__all__ = [
    "parse_ring", "ring_label", "element", "matrix", "module", "quadratic",
    "stark", "kolyvagin", "cofactor", "tower", "to_array", "decode_module", "decode_quadratic",
]

SCALES = ("unit", "p", "aug")


def parse_ring(text: str):
    """'p=3,m=2,g=3:3' -> (3, 2, (3, 3))."""
    fields = {}
    for part in text.split(","):
        if "=" not in part:
            raise ValueError(f"bad ring field {part!r}")
        k, v = part.split("=", 1)
        fields[k.strip()] = v.strip()
    if set(fields) - {"p", "m", "g"} or "p" not in fields or "m" not in fields:
        raise ValueError(f"ring description needs p and m: {text!r}")
    group = tuple(int(c) for c in fields.get("g", "").split(":") if c)
    return int(fields["p"]), int(fields["m"]), group


def ring_label(R: GorensteinRing) -> str:
    return f"p={R.p},m={R.m},g=" + ":".join(str(c) for c in R.group.cyclic_orders)


def _scale_element(R: GorensteinRing, scale: str) -> np.ndarray:
    if scale == "unit":
        return R.one()
    if scale == "aug" and R.generator_indices:
        x = R.group_element(R.generator_indices[0]).copy()
        x[0] = (x[0] - 1) % R.N
        return x
    return R.scalar(R.p)


def element(R: GorensteinRing, rng: SplitMix64, scale: str = "unit") -> np.ndarray:
    x = R.random_element(rng)
    return R.mul(x, _scale_element(R, scale)) if scale != "unit" else x


def matrix(R: GorensteinRing, rng: SplitMix64, rows: int, cols: int, scale: str | None = None) -> np.ndarray:
    if scale is None:
        scale = SCALES[rng.below(3)]
    out = np.zeros((rows, cols, R.n), dtype=np.int64)
    for i in range(rows):
        for j in range(cols):
            out[i, j] = element(R, rng, scale)
    return out


def to_array(data, R: GorensteinRing, rows: int, cols: int) -> np.ndarray:
    arr = np.asarray(data, dtype=np.int64)
    return arr.reshape(rows, cols, R.n) if rows and cols else np.zeros((rows, cols, R.n), dtype=np.int64)


def _tolist(a: np.ndarray):
    return np.asarray(a, dtype=np.int64).tolist()


def module(R: GorensteinRing, rng: SplitMix64, max_gens: int = 3, max_rels: int = 3, min_gens: int = 1) -> dict:
    b = rng.between(min_gens, max_gens)
    a = rng.between(0, max_rels)
    rel = matrix(R, rng, a, b)
    # occasionally make a relation a unit multiple of a generator
    if a and rng.below(4) == 0:
        rel[0] = 0
        rel[0, rng.below(b)] = R.one()
    return {"gens": b, "relations": _tolist(rel)}


def decode_module(R: GorensteinRing, data: dict) -> PresentedModule:
    b = data["gens"]
    rel = np.asarray(data["relations"], dtype=np.int64)
    a = rel.shape[0] if rel.size else 0
    return PresentedModule(R, b, to_array(rel, R, a, b))


def quadratic(R: GorensteinRing, rng: SplitMix64, r_range=(1, 3), max_d: int = 5, max_e: int = 4) -> dict:
    lo, hi = r_range
    while True:
        d = rng.between(1, max_d)
        e = rng.between(0, max_e)
        if lo <= d - e <= hi:
            break
    return {"d": d, "e": e, "phi": _tolist(matrix(R, rng, d, e))}


def decode_quadratic(R: GorensteinRing, data: dict) -> QuadraticComplex:
    d, e = data["d"], data["e"]
    return QuadraticComplex(R, d, e, to_array(data["phi"], R, d, e))


def stark(R: GorensteinRing, rng: SplitMix64, max_q: int = 3, max_d0: int = 3) -> dict:
    d0 = rng.between(1, max_d0)
    e = rng.between(0, d0)
    q = rng.between(1, max_q)
    order = [f"v{i}" for i in range(q)]
    base = _tolist(matrix(R, rng, d0, e))
    cols = {v: _tolist(matrix(R, rng, 1, e)[0]) if e else [] for v in order}
    return {"d0": d0, "e": e, "phi": base, "order": order, "columns": cols}


def kolyvagin(R: GorensteinRing, rng: SplitMix64, max_nu: int = 4) -> dict:
    import itertools
    nu = rng.between(1, max_nu)
    labels = [f"q{i}" for i in range(nu)]
    k = rng.between(1, 2)
    kappa = {}
    for size in range(nu + 1):
        for sub in itertools.combinations(labels, size):
            kappa["|".join(sub)] = _tolist(matrix(R, rng, 1, k, "unit")[0])
    x = {f"{l}|{q}": _tolist(element(R, rng)) for l in labels for q in labels if l != q}
    return {"labels": labels, "kappa": kappa, "x": x, "q": labels[rng.below(nu)],
            "c": _tolist(element(R, rng)),
            "kappa2": {key: _tolist(matrix(R, rng, 1, k, "unit")[0]) for key in kappa}}


def _invertible(R: GorensteinRing, rng: SplitMix64, k: int) -> np.ndarray:
    from .fitting import det
    while True:
        A = matrix(R, rng, k, k, "unit")
        if R.is_unit(det(R, A)):
            return A


def cofactor(R: GorensteinRing, rng: SplitMix64, max_k: int = 3) -> dict:
    """tau with 1 - tau = P diag(1, .., 1, 0) Q, so the residual corank is one."""
    from .modules import rmatmul
    k = rng.between(1, max_k)
    P, Q = _invertible(R, rng, k), _invertible(R, rng, k)
    D = np.zeros((k, k, R.n), dtype=np.int64)
    for i in range(k - 1):
        D[i, i] = R.one()
    f = rmatmul(R, rmatmul(R, P, D), Q)
    tau = (-f) % R.N
    for i in range(k):
        tau[i, i] = (tau[i, i] + R.one()) % R.N
    return {"k": k, "tau": _tolist(tau), "f": _tolist(matrix(R, rng, k, k))}


def tower(R: GorensteinRing, rng: SplitMix64, depth: int = 3) -> dict:
    """A module over (Z/p^depth)[G] plus Tor truncation levels."""
    top = GorensteinRing(R.p, depth, R.group)
    data = module(top, rng, max_gens=2, max_rels=3)
    levels = {}
    prev = 1
    for i in range(1, depth + 1):
        prev = rng.between(prev, i)
        levels[str(i)] = prev
    return {"depth": depth, "module": data, "truncations": levels, "r": rng.between(0, 1)}
