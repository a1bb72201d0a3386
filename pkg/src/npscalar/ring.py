"""Exact modular arithmetic and the diagonal-vector encoding.

A party's data is conceptually a diagonal matrix, but a diagonal matrix is
fully described by its diagonal: products of diagonal matrices multiply
entrywise, and the trace of such a product is the sum of the entrywise
products. So everything here is a fixed-length vector over Z_modulus.

The default modulus is 2**64 (native wrap-around). A small prime modulus
is supported so statistical tests can exercise the full ring.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import InputShapeError

DEFAULT_MODULUS = 1 << 64


@dataclass(frozen=True)
class Ring:
    """The ring Z_modulus all protocol arithmetic lives in."""

    modulus: int = DEFAULT_MODULUS

    def __post_init__(self):
        if self.modulus < 2:
            raise ValueError("modulus must be at least 2")

    def reduce(self, x: int) -> int:
        return x % self.modulus

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.modulus

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.modulus

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.modulus

    def neg(self, a: int) -> int:
        return (-a) % self.modulus


class ModVector:
    """Fixed-length vector of ring elements (a diagonal matrix's diagonal)."""

    __slots__ = ("entries", "ring")

    def __init__(self, entries: Iterable[int], ring: Ring):
        m = ring.modulus
        self.entries = tuple(e % m for e in entries)
        self.ring = ring
        if not self.entries:
            raise InputShapeError("vectors must have length >= 1")

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, i: int) -> int:
        return self.entries[i]

    def __iter__(self):
        return iter(self.entries)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ModVector)
            and self.entries == other.entries
            and self.ring == other.ring
        )

    def __hash__(self) -> int:
        return hash((self.entries, self.ring.modulus))

    def __repr__(self) -> str:
        return f"ModVector({list(self.entries)}, mod={self.ring.modulus})"

    def _check(self, other: "ModVector") -> None:
        if len(self.entries) != len(other.entries):
            raise InputShapeError(
                f"length mismatch: {len(self.entries)} vs {len(other.entries)}"
            )

    def add(self, other: "ModVector") -> "ModVector":
        self._check(other)
        m = self.ring.modulus
        return ModVector(
            ((a + b) % m for a, b in zip(self.entries, other.entries)), self.ring
        )

    def sub(self, other: "ModVector") -> "ModVector":
        self._check(other)
        m = self.ring.modulus
        return ModVector(
            ((a - b) % m for a, b in zip(self.entries, other.entries)), self.ring
        )

    def hadamard(self, other: "ModVector") -> "ModVector":
        """Entrywise product (the product of two diagonal matrices)."""
        self._check(other)
        m = self.ring.modulus
        return ModVector(
            ((a * b) % m for a, b in zip(self.entries, other.entries)), self.ring
        )


def product_trace(vectors: Sequence[ModVector], ring: Ring) -> int:
    """Trace of the product of the diagonal matrices encoded by `vectors`.

    Equals the n-way inner product sum_j prod_i vectors[i][j] mod modulus.
    """
    if not vectors:
        raise InputShapeError("product_trace needs at least one vector")
    length = len(vectors[0])
    for v in vectors[1:]:
        if len(v) != length:
            raise InputShapeError("length mismatch in product_trace")
    m = ring.modulus
    total = 0
    for j in range(length):
        p = 1
        for v in vectors:
            p = (p * v.entries[j]) % m
        total += p
    return total % m


def mask(v: ModVector, r: ModVector) -> ModVector:
    """Additively blind `v` with the one-time mask `r`."""
    return v.add(r)


def unmask(v: ModVector, r: ModVector) -> ModVector:
    """Invert `mask`: recover the plaintext from a masked vector."""
    return v.sub(r)
