"""Oracles and adversarial analysis.

Four independent lenses on the protocol:

  * a plaintext oracle that recomputes the scalar product with no protocol
    machinery at all;
  * a symbolic expansion over monomial classes (each position contributes
    either its data vector or its mask) validating the chain algebra;
  * a syntactic knowledge closure plus the semi-honest TTP reconstruction
    attack it enables under the FLAWED policy;
  * an instance census capturing the exponential sub-protocol growth.

The knowledge closure is deliberately id-based, not information-theoretic:
it decides exactly the mask-reuse attack class, nothing more.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .errors import InputShapeError, InstanceShapeError
from .parties import PartyId
from .ring import ModVector, Ring
from .simnet import MessageKind, Transcript, View

# ---------------------------------------------------------------------------
# plaintext oracle


def plaintext_oracle(vectors: Sequence[Sequence[int]], ring: Ring) -> int:
    """Direct sum-of-products computation; shares nothing with the engine."""
    if not vectors:
        raise InputShapeError("oracle needs at least one vector")
    length = len(vectors[0])
    for v in vectors[1:]:
        if len(v) != length:
            raise InputShapeError("length mismatch in oracle input")
    total = 0
    for j in range(length):
        term = 1
        for v in vectors:
            term *= v[j]
        total += term
    return total % ring.modulus


# ---------------------------------------------------------------------------
# symbolic expansion oracle


def _phi_expansion(n: int, plain: frozenset, randoms: frozenset) -> dict:
    """Expand the trace of a product where `plain` positions contribute
    data, `randoms` contribute masks, and the rest contribute data+mask.

    Returns {frozenset of data positions: coefficient}."""
    masked = [i for i in range(1, n + 1) if i not in plain and i not in randoms]
    out: dict[frozenset, int] = {}
    for r in range(len(masked) + 1):
        for choice in itertools.combinations(masked, r):
            key = frozenset(plain) | frozenset(choice)
            out[key] = out.get(key, 0) + 1
    return out


def masked_product_coefficients(n: int) -> dict:
    """Class coefficients of the all-masked product trace: 1 on every
    subset, i.e. the decomposition into all mixed terms."""
    if not 2 <= n <= 8:
        raise InstanceShapeError("symbolic expansion supports 2..8 positions")
    return _phi_expansion(n, frozenset(), frozenset())


def chain_residual_coefficients(n: int) -> dict:
    """Class coefficients of (last chain value + output mask), after
    substituting the share-sum identity.

    Expected: +1 on the full-data class, 0 on the all-random class and on
    classes of size n-1, and -(n-1-t) on classes of size t in [1, n-2].
    """
    if not 2 <= n <= 8:
        raise InstanceShapeError("symbolic expansion supports 2..8 positions")
    coeff: dict[frozenset, int] = {}

    def accumulate(terms: dict, sign: int) -> None:
        for key, c in terms.items():
            coeff[key] = coeff.get(key, 0) + sign * c

    # first chain value: position 1 plaintext, everyone else masked
    accumulate(_phi_expansion(n, frozenset({1}), frozenset()), +1)
    share_coefficients = {1: n - 1}
    # each later step subtracts (others masked) x (own mask), adds shares
    for i in range(2, n + 1):
        accumulate(_phi_expansion(n, frozenset(), frozenset({i})), -1)
        share_coefficients[i] = n - 1
    # share substitution: the shares sum to the all-random mixed term
    assert all(c == n - 1 for c in share_coefficients.values())
    empty = frozenset()
    coeff[empty] = coeff.get(empty, 0) + (n - 1)
    # the output mask subtracted in the first step cancels the one re-added
    return {
        frozenset(s): coeff.get(frozenset(s), 0)
        for r in range(n + 1)
        for s in itertools.combinations(range(1, n + 1), r)
    }


def mixed_term(
    kept, data: Sequence[ModVector], masks: Sequence[ModVector], ring: Ring
) -> int:
    """Trace of the product taking data at `kept` positions, masks elsewhere."""
    n = len(data)
    vectors = [data[i - 1] if i in kept else masks[i - 1] for i in range(1, n + 1)]
    from .ring import product_trace

    return product_trace(vectors, ring)


def evaluate_coefficients(
    coeffs: dict, data: Sequence[ModVector], masks: Sequence[ModVector], ring: Ring
) -> int:
    """Numeric value of a class-coefficient map on concrete vectors."""
    total = 0
    for kept, c in coeffs.items():
        total += c * mixed_term(kept, data, masks, ring)
    return ring.reduce(total)


# ---------------------------------------------------------------------------
# knowledge closure and the reconstruction attack


@dataclass
class KnowledgeSet:
    """Identifiers a party holds or can derive from its view."""

    party: PartyId
    atoms: set


def _mask_atom(mask_id: int) -> str:
    return f"mask:{mask_id}"


def _input_atom(party: str) -> str:
    return f"input:{party}"


def knowledge_closure(view: View) -> KnowledgeSet:
    """Fixpoint of the syntactic derivation rule over one party's view.

    Seed atoms: own inputs, masks the party generated, masks it received.
    A masked vector reveals its subject iff the blinding mask's id is
    already in the set; a collapsed product is derivable iff every factor
    mask is known.
    """
    atoms: set[str] = set()
    for rec in view.own_inputs:
        atoms.add(_input_atom(rec["party"]))
    for rec in view.generated_randomness:
        if rec["kind"] == "bundle":
            atoms.add(_mask_atom(rec["mask_id"]))
    for msg in view.received_messages:
        if msg.kind is MessageKind.SHARE_DISTRIBUTION:
            atoms.add(_mask_atom(msg.meta["mask_id"]))
    for msg in view.received_messages:
        if msg.kind is not MessageKind.MASKED_MATRIX:
            continue
        if _mask_atom(msg.meta["mask_id"]) not in atoms:
            continue
        subject = msg.meta["subject"]
        if subject["kind"] == "input":
            atoms.add(_input_atom(subject["party"]))
        elif all(_mask_atom(m) in atoms for m in subject["masks"]):
            atoms.add("prod:" + ",".join(str(m) for m in sorted(subject["masks"])))
    return KnowledgeSet(party=view.party, atoms=atoms)


def _known_mask_values(view: View) -> dict:
    """Mask values present in the view: generated by the party or received."""
    values: dict[int, tuple] = {}
    for rec in view.generated_randomness:
        if rec["kind"] == "bundle":
            values[rec["mask_id"]] = tuple(rec["mask"])
    for msg in view.received_messages:
        if msg.kind is MessageKind.SHARE_DISTRIBUTION:
            values[msg.meta["mask_id"]] = tuple(msg.payload["mask"])
    return values


def reconstruct_inputs(view: View) -> dict:
    """The semi-honest reconstruction attack run from one party's view.

    For every received masked vector whose blinding mask the party holds,
    subtract the mask; parties whose data is never exposed that way are
    absent from the returned map. Under the SECURE policy a TTP's map is
    empty; under FLAWED it recovers every data party's vector exactly.
    """
    modulus = view.ring.modulus
    masks = _known_mask_values(view)
    claimed: dict[PartyId, tuple] = {}
    for msg in view.received_messages:
        if msg.kind is not MessageKind.MASKED_MATRIX:
            continue
        subject = msg.meta["subject"]
        if subject["kind"] != "input":
            continue
        mask_value = masks.get(msg.meta["mask_id"])
        if mask_value is None:
            continue
        values = msg.payload["values"]
        claimed[PartyId.from_str(subject["party"])] = tuple(
            (v - m) % modulus for v, m in zip(values, mask_value)
        )
    return claimed


def forced_guess_inputs(view: View) -> dict:
    """What the attack yields if the adversary wrongly assumes sub-instance
    masks are the ones it already holds for the same party.

    For each received masked input vector with an unknown mask, subtract a
    mask the viewer generated for that party in some other instance. The
    guesses mismatch the true data except with vanishing probability.
    """
    modulus = view.ring.modulus
    by_holder: dict[str, tuple] = {}
    for rec in view.generated_randomness:
        if rec["kind"] == "bundle" and rec["holder"] not in by_holder:
            by_holder[rec["holder"]] = tuple(rec["mask"])
    known = _known_mask_values(view)
    guesses: dict[PartyId, tuple] = {}
    for msg in view.received_messages:
        if msg.kind is not MessageKind.MASKED_MATRIX:
            continue
        subject = msg.meta["subject"]
        if subject["kind"] != "input" or msg.meta["mask_id"] in known:
            continue
        stale = by_holder.get(subject["party"])
        if stale is None:
            continue
        values = msg.payload["values"]
        guesses[PartyId.from_str(subject["party"])] = tuple(
            (v - m) % modulus for v, m in zip(values, stale)
        )
    return guesses


# ---------------------------------------------------------------------------
# transcript invariant scans


def scan_ttp_rotation(transcript: Transcript) -> list[str]:
    """Violations of the rotation rule: a share generator that also holds
    a position in the instance it generated for."""
    recipients: dict[int, set] = {}
    generators: dict[int, PartyId] = {}
    for msg in transcript:
        if msg.kind is MessageKind.SHARE_DISTRIBUTION:
            recipients.setdefault(msg.instance_id, set()).add(msg.recipient)
            generators[msg.instance_id] = msg.sender
    return [
        f"instance {iid}: generator {generators[iid]} is a participant"
        for iid, parts in sorted(recipients.items())
        if generators[iid] in parts
    ]


def scan_mask_safety(transcript: Transcript) -> list[str]:
    """Violations of mask-recipient safety: a message referencing mask m
    delivered to a party that already knows m and is not m's holder."""
    holder: dict[int, PartyId] = {}
    generator: dict[int, PartyId] = {}
    received_at: dict[tuple, int] = {}
    for msg in transcript:
        if msg.kind is MessageKind.SHARE_DISTRIBUTION:
            mid = msg.meta["mask_id"]
            holder[mid] = msg.recipient
            generator[mid] = msg.sender
            received_at[(msg.recipient, mid)] = msg.seq

    def knows(party: PartyId, mid: int, before_seq: int) -> bool:
        if generator.get(mid) == party:
            return True
        at = received_at.get((party, mid))
        return at is not None and at < before_seq

    violations = []
    for msg in transcript:
        if msg.kind is not MessageKind.MASKED_MATRIX:
            continue
        mid = msg.meta["mask_id"]
        if msg.recipient != holder.get(mid) and knows(msg.recipient, mid, msg.seq):
            violations.append(
                f"seq {msg.seq}: mask {mid} reached knowing party {msg.recipient}"
            )
    return violations


def scan_mask_freshness(transcript: Transcript) -> list[str]:
    """Mask ids appearing in more than one share distribution."""
    seen: set[int] = set()
    repeats = []
    for msg in transcript:
        if msg.kind is MessageKind.SHARE_DISTRIBUTION:
            mid = msg.meta["mask_id"]
            if mid in seen:
                repeats.append(f"mask {mid} distributed twice")
            seen.add(mid)
    return repeats


# ---------------------------------------------------------------------------
# instance census


@dataclass(frozen=True)
class InstanceCensus:
    n: int
    direct_children: int
    total_instances: int
    messages: int
    per_depth: tuple


@lru_cache(maxsize=None)
def _total_instances(m: int) -> int:
    if m == 2:
        return 1
    return 1 + sum(
        math.comb(m, t) * _total_instances(t + 1) for t in range(1, m - 1)
    )


@lru_cache(maxsize=None)
def _inner_messages(m: int) -> int:
    # shares + masked broadcasts + chain values (+ 1 report per child)
    if m == 2:
        return 6
    own = m + m * (m - 1) + m
    return own + sum(
        math.comb(m, t) * (_inner_messages(t + 1) + 1) for t in range(1, m - 1)
    )


@lru_cache(maxsize=None)
def _per_depth(m: int) -> tuple:
    if m == 2:
        return (1,)
    acc: dict[int, int] = {0: 1}
    for t in range(1, m - 1):
        for d, c in enumerate(_per_depth(t + 1)):
            acc[d + 1] = acc.get(d + 1, 0) + math.comb(m, t) * c
    return tuple(acc[d] for d in range(max(acc) + 1))


def count_instances(n: int) -> InstanceCensus:
    """Closed-form census of one run: counts by enumeration, no arithmetic."""
    if n < 2:
        raise InstanceShapeError("census needs at least 2 parties")
    direct = (1 << n) - n - 2 if n >= 3 else 0
    return InstanceCensus(
        n=n,
        direct_children=direct,
        total_instances=_total_instances(n),
        messages=_inner_messages(n) + n,
        per_depth=_per_depth(n),
    )


# ---------------------------------------------------------------------------
# mask uniformity


def masked_samples(value: int, count: int, modulus: int, seed: int) -> list[int]:
    """`count` maskings of one fixed value under fresh uniform masks."""
    r = random.Random(seed)
    return [(value + r.randrange(modulus)) % modulus for _ in range(count)]


def uniformity_pvalue(samples: Sequence[int], modulus: int) -> float:
    """Chi-square p-value against the uniform distribution on Z_modulus."""
    from scipy import stats

    counts = [0] * modulus
    for s in samples:
        counts[s] += 1
    return float(stats.chisquare(counts).pvalue)
