"""Trusted-initializer material: masks, additive shares, seedable randomness.

The generator here is a seeded Mersenne Twister, NOT a cryptographically
secure RNG. This package is a protocol simulator: determinism and replay
matter, cryptographic strength does not. Do not reuse this module for
production secret sharing.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import InstanceShapeError
from .parties import PartyId
from .ring import ModVector, Ring, product_trace


class Rng:
    """Deterministic seeded randomness: same seed, same stream."""

    def __init__(self, seed: int):
        self.seed = seed
        self._r = random.Random(seed)

    def element(self, ring: Ring) -> int:
        return self._r.randrange(ring.modulus)

    def vector(self, ring: Ring, length: int) -> ModVector:
        if length < 1:
            raise InstanceShapeError("vector length must be >= 1")
        return ModVector((self._r.randrange(ring.modulus) for _ in range(length)), ring)


class MaskIdAllocator:
    """Hands out run-unique mask identifiers; masks are never reused."""

    def __init__(self):
        self._counter = itertools.count()

    def fresh(self) -> int:
        return next(self._counter)


@dataclass(frozen=True)
class ShareBundle:
    """One party's correlated randomness: a mask vector and a scalar share.

    Across one instance's bundles the scalar shares sum to the trace of the
    product of the mask vectors.
    """

    mask: ModVector
    share: int
    mask_id: int
    holder: Optional[PartyId] = None


@dataclass(frozen=True)
class OutputMask:
    """The final-result blinding value; held by exactly one party."""

    value: int
    holder: PartyId


def split_value(value: int, n: int, ring: Ring, rng: Rng) -> list[int]:
    """Additively split `value` into n shares; the first n-1 are uniform."""
    if n < 1:
        raise InstanceShapeError("cannot split into zero shares")
    shares = [rng.element(ring) for _ in range(n - 1)]
    shares.append(ring.reduce(value - sum(shares)))
    return shares


def generate_share_bundles(
    n: int,
    length: int,
    ring: Ring,
    rng: Rng,
    ids: Optional[MaskIdAllocator] = None,
    holders: Optional[Sequence[PartyId]] = None,
) -> list[ShareBundle]:
    """Fresh correlated randomness for an n-position instance.

    Mask vectors are uniform; scalar shares additively split the trace of
    the product of all masks. Every bundle gets a fresh mask id.
    """
    if n < 2:
        raise InstanceShapeError("share generation needs at least 2 positions")
    if length < 1:
        raise InstanceShapeError("vector length must be >= 1")
    if holders is not None and len(holders) != n:
        raise InstanceShapeError("holders list must match the position count")
    ids = ids if ids is not None else MaskIdAllocator()
    masks = [rng.vector(ring, length) for _ in range(n)]
    shares = split_value(product_trace(masks, ring), n, ring, rng)
    return [
        ShareBundle(
            mask=masks[i],
            share=shares[i],
            mask_id=ids.fresh(),
            holder=holders[i] if holders is not None else None,
        )
        for i in range(n)
    ]
