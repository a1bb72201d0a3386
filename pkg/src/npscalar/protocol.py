"""Protocol state machines for the masked n-party scalar product.

An instance consists of m ordered *positions*. Each position holds one
vector: either a party's plaintext data or the collapsed product of the
masks a sub-instance replaces. The flow for m >= 3:

  1. the instance's TTP distributes fresh correlated randomness
     (mask vector + additive scalar share) to every position;
  2. every position broadcasts its masked vector to the other positions
     (the TTP receives no protocol traffic: commodity-server discipline);
  3. position 1 draws the output mask, folds it into the first chain
     value, and the chain value walks positions 2..m and back to 1;
  4. each proper subset of positions that keeps 1..m-2 vectors as data
     spawns a sub-instance computing the corresponding mixed term, with
     the remaining positions' masks collapsed into a single vector held
     by this instance's TTP;
  5. position 1 combines the final chain value, the coefficient-weighted
     sub-results and the output mask into the published result.

m == 2 instances run the classic commodity-server two-party exchange.

TTP assignment policy:
  SECURE  - each instance's randomness comes from the lowest-ordered party
            not participating in that instance;
  FLAWED  - sub-instances reuse the parent's TTP even when it participates,
            which is exactly the configuration the attack harness breaks.

Under FLAWED a party can own several positions of one instance (and even
be the instance's TTP); the machinery is written per-position so the
message flow, and therefore the instance census, is identical under both
policies.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

from .errors import (
    InputShapeError,
    InstanceShapeError,
    ProtocolStateError,
    TtpAssignmentError,
)
from .parties import PartyId
from .ring import ModVector, Ring, product_trace
from .shares import MaskIdAllocator, Rng, ShareBundle, generate_share_bundles
from .simnet import MessageKind, Network, View


class Policy(Enum):
    SECURE = "secure"
    FLAWED = "flawed"


class Lifecycle(Enum):
    AWAITING_SHARES = "awaiting-shares"
    MASKING = "masking"
    CHAIN = "chain"
    SUB_PROTOCOLS = "sub-protocols"
    AGGREGATING = "aggregating"
    DONE = "done"


@dataclass(frozen=True)
class SubInstanceSpec:
    """One sub-instance: which parent positions stay plaintext, and the
    multiplicity its result carries in the parent's aggregation."""

    kept: frozenset
    coefficient: int

    def __post_init__(self):
        if not self.kept:
            raise InstanceShapeError("a sub-instance must keep at least one position")
        if self.coefficient < 1:
            raise InstanceShapeError("sub-instance coefficient must be >= 1")


def enumerate_sub_instances(n: int) -> list[SubInstanceSpec]:
    """All sub-instances of an n-position instance, in deterministic order.

    Subsets of size 1..n-2 are kept as data; a kept subset of size t has
    coefficient n-1-t. There are exactly 2**n - n - 2 of them.
    """
    if n < 2:
        raise InstanceShapeError("instances need at least 2 positions")
    specs = []
    for t in range(1, n - 1):
        for combo in itertools.combinations(range(1, n + 1), t):
            specs.append(SubInstanceSpec(frozenset(combo), n - 1 - t))
    return specs


def assign_ttp(
    participants: Sequence[PartyId],
    policy: Policy,
    parent_ttp: PartyId,
    pool: Sequence[PartyId],
) -> PartyId:
    """Pick the share generator for a sub-instance.

    SECURE rotates to the lowest-ordered pool member not participating;
    FLAWED always keeps the parent's TTP, participant or not.
    """
    if policy is Policy.FLAWED:
        return parent_ttp
    involved = set(participants)
    for party in sorted(pool, key=lambda p: p.sort_key):
        if party not in involved:
            return party
    raise TtpAssignmentError("no eligible trusted third party")


def chain_init(
    own_vector: ModVector,
    masked_others: Sequence[ModVector],
    own_share: int,
    output_mask: int,
    ring: Ring,
) -> int:
    """First chain value: trace of (all other masked vectors times own
    plaintext), plus (m-1) times the own share, minus the output mask."""
    if not masked_others:
        raise ProtocolStateError("chain start requires every other masked vector")
    m = len(masked_others) + 1
    t = product_trace([*masked_others, own_vector], ring)
    return ring.reduce(t + (m - 1) * own_share - output_mask)


def chain_step(
    prev: int,
    own_mask: ModVector,
    masked_others: Sequence[ModVector],
    own_share: int,
    ring: Ring,
) -> int:
    """Next chain value: subtract the trace of (all other masked vectors
    times the own mask), add (m-1) times the own share."""
    if not masked_others:
        raise ProtocolStateError("chain step requires every other masked vector")
    m = len(masked_others) + 1
    t = product_trace([*masked_others, own_mask], ring)
    return ring.reduce(prev - t + (m - 1) * own_share)


def aggregate_final(
    chain_last: int,
    sub_results: Sequence[tuple[SubInstanceSpec, int]],
    output_mask: int,
    ring: Ring,
) -> int:
    """Combine the last chain value, the weighted sub-results and the
    output mask into the scalar product."""
    total = chain_last
    for spec, value in sub_results:
        if value is None:
            raise ProtocolStateError(f"missing sub-result for {sorted(spec.kept)}")
        total += spec.coefficient * value
    return ring.reduce(total + output_mask)


def two_party_response(
    masked_first: ModVector,
    own_vector: ModVector,
    own_share: int,
    output_mask: int,
    ring: Ring,
) -> int:
    """Second party's transfer value in the two-party exchange."""
    return ring.reduce(
        product_trace([masked_first, own_vector], ring) + own_share - output_mask
    )


def two_party_combine(
    transfer: int,
    own_mask: ModVector,
    masked_second: ModVector,
    own_share: int,
    output_mask: int,
    ring: Ring,
) -> int:
    """First party's half plus the revealed output mask: the scalar product."""
    half = ring.reduce(
        transfer - product_trace([own_mask, masked_second], ring) + own_share
    )
    return ring.reduce(half + output_mask)


# ---------------------------------------------------------------------------
# runtime state


class _Position:
    __slots__ = (
        "owner",
        "vector",
        "subject",
        "bundle",
        "masked",
        "chain_prev",
        "chain_sent",
        "output_mask",
        "revealed_mask",
    )

    def __init__(self, owner: PartyId, vector: ModVector, subject: tuple):
        self.owner = owner
        self.vector = vector
        self.subject = subject  # ("input", PartyId) or ("prod", frozenset of mask ids)
        self.bundle: Optional[ShareBundle] = None
        self.masked: dict[int, ModVector] = {}
        self.chain_prev: Optional[int] = None
        self.chain_sent = False
        self.output_mask: Optional[int] = None
        self.revealed_mask: Optional[int] = None


class ProtocolInstance:
    __slots__ = (
        "instance_id",
        "parent_id",
        "spec",
        "positions",
        "ttp",
        "ring",
        "depth",
        "state",
        "sub_results",
        "coefficients",
        "chain_final",
        "result",
        "shares_delivered",
        "masked_delivered",
        "final_deliveries",
        "ttp_bundles",
    )

    def __init__(self, instance_id, positions, ttp, ring, parent_id=None, spec=None, depth=0):
        self.instance_id = instance_id
        self.positions: list[_Position] = positions
        self.ttp = ttp
        self.ring = ring
        self.parent_id = parent_id
        self.spec: Optional[SubInstanceSpec] = spec
        self.depth = depth
        self.state = Lifecycle.AWAITING_SHARES
        self.sub_results: dict[frozenset, Optional[int]] = {}
        self.coefficients: dict[frozenset, int] = {}
        self.chain_final: Optional[int] = None
        self.result: Optional[int] = None
        self.shares_delivered = 0
        self.masked_delivered = 0
        self.final_deliveries = 0
        self.ttp_bundles: list[ShareBundle] = []

    @property
    def n(self) -> int:
        return len(self.positions)

    @property
    def participants(self) -> tuple[PartyId, ...]:
        return tuple(p.owner for p in self.positions)


def _subject_meta(subject: tuple) -> dict:
    if subject[0] == "input":
        return {"kind": "input", "party": str(subject[1])}
    return {"kind": "prod", "masks": sorted(subject[1])}


class ProtocolEngine:
    """Drives every instance of one run over a shared network."""

    def __init__(self, ring: Ring, rng: Rng, policy: Policy, net: Network, pool):
        self.ring = ring
        self.rng = rng
        self.policy = policy
        self.net = net
        self.pool = list(pool)
        self.instances: dict[int, ProtocolInstance] = {}
        self._ids = itertools.count()
        self.mask_ids = MaskIdAllocator()
        # mask_id -> {"value", "holder", "generator", "instance", "position"}
        self.mask_registry: dict[int, dict] = {}

    # -- construction ------------------------------------------------------

    def new_instance(self, positions, ttp, parent_id=None, spec=None, depth=0):
        inst = ProtocolInstance(
            next(self._ids), positions, ttp, self.ring, parent_id, spec, depth
        )
        self.instances[inst.instance_id] = inst
        return inst

    def start(self, inst: ProtocolInstance) -> None:
        m = inst.n
        if m < 2:
            raise InstanceShapeError("instances need at least 2 positions")
        if self.policy is Policy.SECURE and inst.ttp in inst.participants:
            raise TtpAssignmentError(
                f"{inst.ttp} cannot generate shares for an instance it joins"
            )
        length = len(inst.positions[0].vector)
        for pos in inst.positions:
            if len(pos.vector) != length:
                raise InputShapeError("instance vectors must share one length")
        bundles = generate_share_bundles(
            m,
            length,
            self.ring,
            self.rng,
            ids=self.mask_ids,
            holders=[p.owner for p in inst.positions],
        )
        inst.ttp_bundles = bundles
        for i, (pos, bundle) in enumerate(zip(inst.positions, bundles), start=1):
            self.mask_registry[bundle.mask_id] = {
                "value": bundle.mask,
                "holder": pos.owner,
                "generator": inst.ttp,
                "instance": inst.instance_id,
                "position": i,
            }
            self.net.record_local(
                inst.ttp,
                "bundle",
                {
                    "instance": inst.instance_id,
                    "position": i,
                    "mask_id": bundle.mask_id,
                    "holder": str(pos.owner),
                    "mask": list(bundle.mask.entries),
                    "share": bundle.share,
                },
            )
            self.net.send(
                inst.ttp,
                pos.owner,
                inst.instance_id,
                MessageKind.SHARE_DISTRIBUTION,
                {
                    "position": i,
                    "mask": list(bundle.mask.entries),
                    "share": bundle.share,
                },
                {"mask_id": bundle.mask_id, "holder": str(pos.owner)},
            )
        if m > 2:
            for spec in enumerate_sub_instances(m):
                self.start(self.spawn_sub_instance(inst, spec))

    def spawn_sub_instance(
        self, parent: ProtocolInstance, spec: SubInstanceSpec
    ) -> ProtocolInstance:
        """Build the child instance for one kept subset of parent positions.

        Kept positions carry their vectors over unchanged; the remaining
        positions' masks collapse into one product vector held by the
        parent's TTP (the only party that knows all of them).
        """
        kept = sorted(spec.kept)
        dropped = [j for j in range(1, parent.n + 1) if j not in spec.kept]
        positions = [
            _Position(
                parent.positions[i - 1].owner,
                parent.positions[i - 1].vector,
                parent.positions[i - 1].subject,
            )
            for i in kept
        ]
        collapsed = parent.ttp_bundles[dropped[0] - 1].mask
        collapsed_ids = {parent.ttp_bundles[dropped[0] - 1].mask_id}
        for j in dropped[1:]:
            collapsed = collapsed.hadamard(parent.ttp_bundles[j - 1].mask)
            collapsed_ids.add(parent.ttp_bundles[j - 1].mask_id)
        subject = ("prod", frozenset(collapsed_ids))
        positions.append(_Position(parent.ttp, collapsed, subject))
        self.net.record_local(
            parent.ttp,
            "collapsed_input",
            {
                "instance": parent.instance_id,
                "kept": kept,
                "subject": _subject_meta(subject),
                "values": list(collapsed.entries),
            },
        )
        ttp = assign_ttp([p.owner for p in positions], self.policy, parent.ttp, self.pool)
        child = self.new_instance(
            positions,
            ttp,
            parent_id=parent.instance_id,
            spec=spec,
            depth=parent.depth + 1,
        )
        parent.sub_results[spec.kept] = None
        parent.coefficients[spec.kept] = spec.coefficient
        return child

    # -- dispatch ----------------------------------------------------------

    def dispatch(self, msg) -> None:
        inst = self.instances[msg.instance_id]
        kind = msg.kind
        if kind is MessageKind.SHARE_DISTRIBUTION:
            self._on_share(inst, msg)
        elif kind is MessageKind.MASKED_MATRIX:
            self._on_masked(inst, msg)
        elif kind is MessageKind.CHAIN_VALUE:
            self._on_chain(inst, msg)
        elif kind is MessageKind.SUB_RESULT:
            self._on_sub_result(inst, msg)
        elif kind is MessageKind.OUTPUT_MASK_REVEAL:
            self._on_reveal(inst, msg)
        elif kind is MessageKind.FINAL_RESULT:
            inst.final_deliveries += 1
            if inst.final_deliveries == inst.n:
                inst.state = Lifecycle.DONE

    def _on_share(self, inst: ProtocolInstance, msg) -> None:
        i = msg.payload["position"]
        pos = inst.positions[i - 1]
        if pos.bundle is not None:
            raise ProtocolStateError("duplicate share distribution")
        pos.bundle = inst.ttp_bundles[i - 1]
        inst.shares_delivered += 1
        if inst.shares_delivered == inst.n:
            inst.state = Lifecycle.MASKING
        if inst.n == 2:
            if i == 1:
                self._send_masked(inst, 1, [2])
            else:
                self._maybe_respond(inst)
        else:
            self._send_masked(inst, i, [j for j in range(1, inst.n + 1) if j != i])
            if i == 1:
                self._maybe_start_chain(inst)
            else:
                self._maybe_step(inst, i)

    def _send_masked(self, inst: ProtocolInstance, i: int, to_positions) -> None:
        pos = inst.positions[i - 1]
        masked = pos.vector.add(pos.bundle.mask)
        meta = {"mask_id": pos.bundle.mask_id, "subject": _subject_meta(pos.subject)}
        payload_values = list(masked.entries)
        for j in to_positions:
            self.net.send(
                pos.owner,
                inst.positions[j - 1].owner,
                inst.instance_id,
                MessageKind.MASKED_MATRIX,
                {"from_pos": i, "to_pos": j, "values": payload_values},
                meta,
            )

    def _on_masked(self, inst: ProtocolInstance, msg) -> None:
        i = msg.payload["from_pos"]
        j = msg.payload["to_pos"]
        pos = inst.positions[j - 1]
        pos.masked[i] = ModVector(msg.payload["values"], self.ring)
        inst.masked_delivered += 1
        if inst.n > 2 and inst.masked_delivered == inst.n * (inst.n - 1):
            inst.state = Lifecycle.CHAIN
        if inst.n == 2:
            if j == 2:
                self._maybe_respond(inst)
            else:
                self._maybe_complete_pair(inst)
        elif j == 1:
            self._maybe_start_chain(inst)
        else:
            self._maybe_step(inst, j)

    # -- chain (m >= 3) ----------------------------------------------------

    def _maybe_start_chain(self, inst: ProtocolInstance) -> None:
        pos = inst.positions[0]
        m = inst.n
        if pos.chain_sent or pos.bundle is None or len(pos.masked) < m - 1:
            return
        pos.output_mask = self.rng.element(self.ring)
        self.net.record_local(
            pos.owner,
            "output_mask",
            {"instance": inst.instance_id, "value": pos.output_mask},
        )
        first = chain_init(
            pos.vector,
            [pos.masked[x] for x in range(2, m + 1)],
            pos.bundle.share,
            pos.output_mask,
            self.ring,
        )
        pos.chain_sent = True
        self.net.send(
            pos.owner,
            inst.positions[1].owner,
            inst.instance_id,
            MessageKind.CHAIN_VALUE,
            {"index": 1, "to_pos": 2, "value": first},
        )

    def _maybe_step(self, inst: ProtocolInstance, i: int) -> None:
        pos = inst.positions[i - 1]
        m = inst.n
        if (
            pos.chain_sent
            or pos.bundle is None
            or pos.chain_prev is None
            or len(pos.masked) < m - 1
        ):
            return
        value = chain_step(
            pos.chain_prev,
            pos.bundle.mask,
            [pos.masked[x] for x in range(1, m + 1) if x != i],
            pos.bundle.share,
            self.ring,
        )
        pos.chain_sent = True
        nxt = i + 1 if i < m else 1
        self.net.send(
            pos.owner,
            inst.positions[nxt - 1].owner,
            inst.instance_id,
            MessageKind.CHAIN_VALUE,
            {"index": i, "to_pos": nxt, "value": value},
        )

    def _on_chain(self, inst: ProtocolInstance, msg) -> None:
        to_pos = msg.payload["to_pos"]
        index = msg.payload["index"]
        if inst.n == 2:
            if to_pos != 1 or index != 2:
                raise ProtocolStateError("unexpected transfer value")
            inst.chain_final = msg.payload["value"]
            self._maybe_complete_pair(inst)
            return
        if to_pos == 1:
            if index != inst.n:
                raise ProtocolStateError(
                    f"chain closed with index {index}, expected {inst.n}"
                )
            inst.chain_final = msg.payload["value"]
            inst.state = (
                Lifecycle.SUB_PROTOCOLS if inst.sub_results else Lifecycle.AGGREGATING
            )
            self._maybe_finalize(inst)
        else:
            pos = inst.positions[to_pos - 1]
            if index != to_pos - 1 or pos.chain_prev is not None:
                raise ProtocolStateError(
                    f"out-of-order chain value {index} at position {to_pos}"
                )
            pos.chain_prev = msg.payload["value"]
            self._maybe_step(inst, to_pos)

    # -- two-party exchange ------------------------------------------------

    def _maybe_respond(self, inst: ProtocolInstance) -> None:
        pos = inst.positions[1]
        if pos.chain_sent or pos.bundle is None or 1 not in pos.masked:
            return
        pos.output_mask = self.rng.element(self.ring)
        self.net.record_local(
            pos.owner,
            "output_mask",
            {"instance": inst.instance_id, "value": pos.output_mask},
        )
        transfer = two_party_response(
            pos.masked[1], pos.vector, pos.bundle.share, pos.output_mask, self.ring
        )
        pos.chain_sent = True
        first_owner = inst.positions[0].owner
        self._send_masked(inst, 2, [1])
        self.net.send(
            pos.owner,
            first_owner,
            inst.instance_id,
            MessageKind.CHAIN_VALUE,
            {"index": 2, "to_pos": 1, "value": transfer},
        )
        self.net.send(
            pos.owner,
            first_owner,
            inst.instance_id,
            MessageKind.OUTPUT_MASK_REVEAL,
            {"to_pos": 1, "value": pos.output_mask},
        )

    def _on_reveal(self, inst: ProtocolInstance, msg) -> None:
        inst.positions[0].revealed_mask = msg.payload["value"]
        self._maybe_complete_pair(inst)

    def _maybe_complete_pair(self, inst: ProtocolInstance) -> None:
        pos = inst.positions[0]
        if (
            inst.result is not None
            or pos.bundle is None
            or 2 not in pos.masked
            or inst.chain_final is None
            or pos.revealed_mask is None
        ):
            return
        result = two_party_combine(
            inst.chain_final,
            pos.bundle.mask,
            pos.masked[2],
            pos.bundle.share,
            pos.revealed_mask,
            self.ring,
        )
        inst.result = result
        self._publish(inst)

    # -- aggregation -------------------------------------------------------

    def _on_sub_result(self, inst: ProtocolInstance, msg) -> None:
        kept = frozenset(msg.payload["kept"])
        if kept not in inst.sub_results:
            raise ProtocolStateError(f"unexpected sub-result for {sorted(kept)}")
        if inst.sub_results[kept] is not None:
            raise ProtocolStateError(f"duplicate sub-result for {sorted(kept)}")
        inst.sub_results[kept] = msg.payload["value"]
        self._maybe_finalize(inst)

    def _maybe_finalize(self, inst: ProtocolInstance) -> None:
        if inst.result is not None or inst.chain_final is None:
            return
        if any(v is None for v in inst.sub_results.values()):
            return
        inst.state = Lifecycle.AGGREGATING
        subs = [
            (SubInstanceSpec(kept, inst.coefficients[kept]), value)
            for kept, value in sorted(
                inst.sub_results.items(), key=lambda kv: (len(kv[0]), sorted(kv[0]))
            )
        ]
        inst.result = aggregate_final(
            inst.chain_final, subs, inst.positions[0].output_mask, self.ring
        )
        self._publish(inst)

    def _publish(self, inst: ProtocolInstance) -> None:
        first_owner = inst.positions[0].owner
        if inst.parent_id is None:
            for j, pos in enumerate(inst.positions, start=1):
                self.net.send(
                    first_owner,
                    pos.owner,
                    inst.instance_id,
                    MessageKind.FINAL_RESULT,
                    {"to_pos": j, "value": inst.result},
                )
        else:
            parent = self.instances[inst.parent_id]
            inst.state = Lifecycle.DONE
            self.net.send(
                first_owner,
                parent.positions[0].owner,
                parent.instance_id,
                MessageKind.SUB_RESULT,
                {
                    "to_pos": 1,
                    "child": inst.instance_id,
                    "kept": sorted(inst.spec.kept),
                    "value": inst.result,
                },
            )


# ---------------------------------------------------------------------------
# run driver


@dataclass
class RunResult:
    """Everything a completed run exposes to analysis and reporting."""

    result: int
    ring: Ring
    seed: int
    policy: Policy
    data_parties: tuple[PartyId, ...]
    ttp: PartyId
    net: Network
    engine: ProtocolEngine

    @property
    def transcript(self):
        return self.net.transcript

    @property
    def instance_count(self) -> int:
        return len(self.engine.instances)

    @property
    def message_count(self) -> int:
        return len(self.net.transcript)

    @property
    def max_depth(self) -> int:
        return max(i.depth for i in self.engine.instances.values())

    def per_depth_counts(self) -> list[int]:
        depths = [i.depth for i in self.engine.instances.values()]
        return [depths.count(d) for d in range(max(depths) + 1)]

    def view_of(self, party: PartyId) -> View:
        return self.net.view_of(party, self.ring)


def run_protocol(
    vectors: Sequence[Sequence[int]],
    *,
    modulus: int = None,
    seed: int = 0,
    policy: Policy = Policy.SECURE,
    ttp_label: str = "ttp",
) -> RunResult:
    """Execute one full run over the given plaintext vectors.

    Returns the published scalar product together with the transcript,
    per-party views and all instance metadata.
    """
    if len(vectors) < 2:
        raise InstanceShapeError("a run needs at least 2 data parties")
    ring = Ring(modulus) if modulus is not None else Ring()
    length = len(vectors[0])
    if length < 1:
        raise InstanceShapeError("vectors must have length >= 1")
    for v in vectors[1:]:
        if len(v) != length:
            raise InputShapeError("all parties' vectors must share one length")

    data_parties = tuple(PartyId.data(i) for i in range(1, len(vectors) + 1))
    ttp = PartyId.ttp(ttp_label)
    net = Network()
    for party in (*data_parties, ttp):
        net.register(party)
    rng = Rng(seed)
    engine = ProtocolEngine(ring, rng, policy, net, [*data_parties, ttp])

    positions = []
    for party, vec in zip(data_parties, vectors):
        mv = ModVector(vec, ring)
        positions.append(_Position(party, mv, ("input", party)))
        net.record_local(
            party,
            "input",
            {"party": str(party), "values": list(mv.entries)},
        )
    top = engine.new_instance(positions, ttp)
    engine.start(top)

    while (msg := net.deliver_next()) is not None:
        engine.dispatch(msg)

    for inst in engine.instances.values():
        if inst.result is None or inst.state is not Lifecycle.DONE:
            raise ProtocolStateError(
                f"instance {inst.instance_id} finished in state {inst.state.value}"
            )
    return RunResult(
        result=top.result,
        ring=ring,
        seed=seed,
        policy=policy,
        data_parties=data_parties,
        ttp=ttp,
        net=net,
        engine=engine,
    )
