"""Exact linear algebra over Z/p^m.

Everything is row-vector based: a matrix ``A`` with ``r`` rows and ``c``
columns acts by ``x -> x @ A``.  Row spans are normalised with the Howell
form, which is the canonical echelon form over Z/N and has the closure
property needed for membership tests and kernels.

Only prime-power moduli are supported.  In Z/p^m every column has an entry
of minimal valuation that divides all the others, so the elimination never
needs extended gcd combinations of two rows.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "BaseMatrix",
    "NoSolution",
    "howell_form",
    "pivots",
    "reduce_rows",
    "in_span",
    "span_contains",
    "same_span",
    "span_size",
    "kernel",
    "solve",
    "enumerate_span",
]


class NoSolution(ValueError):
    """The right-hand side is outside the row span."""


class BaseMatrix:
    """Thin serialisable wrapper around an integer matrix modulo ``modulus``."""

    def __init__(self, entries, modulus: int):
        a = np.asarray(entries, dtype=np.int64)
        if a.ndim != 2:
            raise ValueError("BaseMatrix needs a 2-d array")
        self.modulus = int(modulus)
        self.entries = a % self.modulus

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    def to_json(self) -> dict:
        return {"rows": self.rows, "cols": self.cols,
                "entries": [int(v) for v in self.entries.ravel()]}

    @classmethod
    def from_json(cls, data: dict, modulus: int) -> "BaseMatrix":
        a = np.array(data["entries"], dtype=np.int64).reshape(data["rows"], data["cols"])
        return cls(a, modulus)

    def howell(self) -> "BaseMatrix":
        return BaseMatrix(howell_form(self.entries, self.modulus), self.modulus)

    def __eq__(self, other) -> bool:
        return (isinstance(other, BaseMatrix) and self.modulus == other.modulus
                and self.entries.shape == other.entries.shape
                and bool(np.array_equal(self.entries, other.entries)))

    def __repr__(self) -> str:
        return f"BaseMatrix({self.entries.tolist()}, mod {self.modulus})"


def _gcd_table(N: int) -> np.ndarray:
    return np.gcd(np.arange(N, dtype=np.int64), N)


def howell_form(A, N: int) -> np.ndarray:
    """Howell normal form of the row span of ``A`` over Z/N (N a prime power).

    Pivots are divisors of N, entries above a pivot are reduced into
    ``[0, pivot)``, and for a pivot ``g != 1`` the row ``(N // g) * row`` is fed
    back so that the span of the rows below any column is closed.
    """
    A = np.asarray(A, dtype=np.int64)
    nrows, ncols = A.shape if A.ndim == 2 else (0, 0)
    if nrows == 0 or ncols == 0:
        return np.zeros((0, ncols), dtype=np.int64)
    W = np.zeros((nrows + ncols, ncols), dtype=np.int64)
    W[:nrows] = A % N
    total = nrows
    gtab = _gcd_table(N)
    r = 0
    for j in range(ncols):
        if r >= total:
            break
        col = W[r:total, j]
        nz = np.flatnonzero(col)
        if nz.size == 0:
            continue
        gs = gtab[col[nz]]
        k = nz[int(np.argmin(gs))]
        g = int(gtab[col[k]])
        if k != 0:
            W[[r, r + k]] = W[[r + k, r]]
        v = int(W[r, j])
        if v != g:
            u = pow(v // g, -1, N)
            W[r] = (W[r] * u) % N
        below = W[r + 1:total, j]
        if below.any():
            f = below // g
            W[r + 1:total] = (W[r + 1:total] - f[:, None] * W[r]) % N
        if r:
            above = W[:r, j]
            if above.any():
                q = above // g
                if q.any():
                    W[:r] = (W[:r] - q[:, None] * W[r]) % N
        if g != 1:
            extra = (W[r] * (N // g)) % N
            if extra.any():
                W[total] = extra
                total += 1
        r += 1
    return W[:r].copy()


def pivots(H: np.ndarray) -> list[tuple[int, int]]:
    """(column, pivot value) of each row of a Howell form."""
    out = []
    for row in H:
        nz = np.flatnonzero(row)
        out.append((int(nz[0]), int(row[nz[0]])))
    return out


def reduce_rows(H: np.ndarray, V, N: int) -> np.ndarray:
    """Reduce each row of ``V`` against the Howell form ``H``.

    The result is the canonical coset representative: two vectors differ by
    an element of the span exactly when their reductions coincide.
    """
    V = np.array(V, dtype=np.int64, copy=True) % N
    single = V.ndim == 1
    if single:
        V = V[None, :]
    for row, (c, g) in zip(H, pivots(H)):
        q = V[:, c] // g
        if q.any():
            V = (V - q[:, None] * row) % N
    return V[0] if single else V


def in_span(H: np.ndarray, v, N: int) -> bool:
    return not reduce_rows(H, v, N).any()


def span_contains(H: np.ndarray, B, N: int) -> bool:
    """True if every row of ``B`` lies in the span of the Howell form ``H``."""
    B = np.asarray(B, dtype=np.int64)
    if B.size == 0:
        return True
    return not reduce_rows(H, B, N).any()


def same_span(A, B, N: int) -> bool:
    HA = howell_form(A, N)
    HB = howell_form(B, N)
    return HA.shape == HB.shape and bool(np.array_equal(HA, HB))


def span_size(H: np.ndarray, N: int) -> int:
    """Number of elements in the span of a Howell form."""
    size = 1
    for _, g in pivots(H):
        size *= N // g
    return size


def kernel(A, N: int) -> np.ndarray:
    """Howell basis of ``{x : x @ A = 0 mod N}``."""
    A = np.asarray(A, dtype=np.int64) % N
    nrows, ncols = A.shape
    if nrows == 0:
        return np.zeros((0, 0), dtype=np.int64)
    if ncols == 0:
        return np.eye(nrows, dtype=np.int64)
    H = howell_form(np.hstack([A, np.eye(nrows, dtype=np.int64)]), N)
    zero = ~H[:, :ncols].any(axis=1)
    return howell_form(H[zero, ncols:], N)


def solve(A, b, N: int) -> np.ndarray:
    """Some ``x`` with ``x @ A = b mod N``; raises NoSolution otherwise."""
    A = np.asarray(A, dtype=np.int64) % N
    b = np.asarray(b, dtype=np.int64) % N
    nrows, ncols = A.shape
    if nrows == 0:
        if b.any():
            raise NoSolution("empty row span")
        return np.zeros(0, dtype=np.int64)
    H = howell_form(np.hstack([A, np.eye(nrows, dtype=np.int64)]), N)
    v = np.concatenate([b, np.zeros(nrows, dtype=np.int64)])
    red = reduce_rows(H, v, N)
    if red[:ncols].any():
        raise NoSolution("vector is not in the row span")
    # v - sum c_i H_i = (0 | y) with H_i = (h_i | t_i), h_i = t_i A, so x = -y.
    return (-red[ncols:]) % N


def enumerate_span(A, N: int, limit: int = 1 << 16) -> set[tuple[int, ...]]:
    """Brute-force set of all vectors in the row span (oracle use only)."""
    A = np.asarray(A, dtype=np.int64) % N
    ncols = A.shape[1]
    span = {tuple([0] * ncols)}
    for row in A:
        mults = [tuple(int(x) for x in (k * row) % N) for k in range(N)]
        new = set()
        for s in span:
            for mvec in mults:
                new.add(tuple((a + b) % N for a, b in zip(s, mvec)))
        span = new
        if len(span) > limit:
            raise ValueError("span too large to enumerate")
    return span
