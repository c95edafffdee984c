"""SplitMix64, the only randomness used by instance generation.

State update and output, all arithmetic mod 2^64:

    state += 0x9E3779B97F4A7C15
    z = state
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    out = z ^ (z >> 31)

``below(k)`` draws uniformly from [0, k) by rejection on the top of the
64-bit range.  Independent streams are keyed by hashing labels into the seed
with 64-bit FNV-1a.
"""

from __future__ import annotations

MASK = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3


def fnv1a(data: bytes, h: int = FNV_OFFSET) -> int:
    for b in data:
        h = ((h ^ b) * FNV_PRIME) & MASK
    return h


def derive(seed: int, *labels) -> int:
    """A child seed for the stream named by ``labels``."""
    h = fnv1a(int(seed & MASK).to_bytes(8, "little"))
    for label in labels:
        h = fnv1a(b"\x00" + str(label).encode(), h)
    return h


class SplitMix64:
    def __init__(self, seed: int):
        self.state = int(seed) & MASK

    def next(self) -> int:
        self.state = (self.state + GOLDEN) & MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
        return z ^ (z >> 31)

    def below(self, k: int) -> int:
        if k <= 0:
            raise ValueError("bound must be positive")
        limit = (1 << 64) - ((1 << 64) % k)
        while True:
            x = self.next()
            if x < limit:
                return x % k

    def between(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi]."""
        return lo + self.below(hi - lo + 1)

    def choice(self, items):
        items = list(items)
        return items[self.below(len(items))]

    def shuffle(self, items) -> list:
        items = list(items)
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]
        return items

    def child(self, *labels) -> "SplitMix64":
        return SplitMix64(derive(self.next(), *labels))
