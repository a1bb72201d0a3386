"""Deterministic in-process message bus with a total-order transcript.

One global sequence number orders all traffic; delivery pops the lowest
sequence number still pending, which trivially preserves per-channel FIFO.
Every delivered message is appended to an append-only transcript, and each
party's view (received messages plus locally generated values) can be
projected out after the run.

The `meta` sidecar on a message carries mask/share identifiers so that
invariants can be checked without parsing payload semantics. Adversary
arithmetic must only use values that actually appear in a party's view;
meta exists for the analysis harness.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Optional

from .errors import RoutingError
from .parties import PartyId
from .ring import Ring


class MessageKind(Enum):
    SHARE_DISTRIBUTION = "ShareDistribution"
    MASKED_MATRIX = "MaskedMatrixBroadcast"
    CHAIN_VALUE = "ChainValue"
    SUB_RESULT = "SubResult"
    OUTPUT_MASK_REVEAL = "OutputMaskReveal"
    FINAL_RESULT = "FinalResult"


class Message:
    __slots__ = ("seq", "sender", "recipient", "instance_id", "kind", "payload", "meta")

    def __init__(self, seq, sender, recipient, instance_id, kind, payload, meta):
        self.seq = seq
        self.sender = sender
        self.recipient = recipient
        self.instance_id = instance_id
        self.kind = kind
        self.payload = payload
        self.meta = meta

    def record(self) -> dict:
        return {
            "seq": self.seq,
            "from": str(self.sender),
            "to": str(self.recipient),
            "instance": self.instance_id,
            "kind": self.kind.value,
            "payload": self.payload,
            "meta": self.meta,
        }

    def __repr__(self) -> str:
        return f"Message(seq={self.seq}, {self.sender}->{self.recipient}, {self.kind.value})"


class Transcript:
    """Append-only, totally ordered log of every delivered message."""

    def __init__(self):
        self._messages: list[Message] = []

    def append(self, msg: Message) -> None:
        self._messages.append(msg)

    def __len__(self) -> int:
        return len(self._messages)

    def __iter__(self) -> Iterator[Message]:
        return iter(self._messages)

    def __getitem__(self, i):
        return self._messages[i]

    def export_jsonl(self) -> str:
        """Line-delimited records, bit-exact across replays with one seed."""
        return "\n".join(
            json.dumps(m.record(), sort_keys=True, separators=(",", ":"))
            for m in self._messages
        )


@dataclass
class View:
    """Everything one party legitimately sees during a run."""

    party: PartyId
    ring: Ring
    own_inputs: list = field(default_factory=list)
    generated_randomness: list = field(default_factory=list)
    received_messages: list = field(default_factory=list)


class Network:
    """Single-owner bus: send enqueues, deliver_next pops in seq order."""

    def __init__(self):
        self._seq = 0
        self._pending: deque[Message] = deque()
        self.transcript = Transcript()
        self._parties: set[PartyId] = set()
        self._local: dict[PartyId, list] = {}

    def register(self, party: PartyId) -> None:
        self._parties.add(party)
        self._local.setdefault(party, [])

    @property
    def parties(self) -> frozenset:
        return frozenset(self._parties)

    def send(
        self,
        sender: PartyId,
        recipient: PartyId,
        instance_id: int,
        kind: MessageKind,
        payload: dict,
        meta: Optional[dict] = None,
    ) -> Message:
        if recipient not in self._parties:
            raise RoutingError(f"unknown recipient {recipient}")
        if sender not in self._parties:
            raise RoutingError(f"unknown sender {sender}")
        msg = Message(self._seq, sender, recipient, instance_id, kind, payload, meta or {})
        self._seq += 1
        self._pending.append(msg)
        return msg

    def deliver_next(self) -> Optional[Message]:
        if not self._pending:
            return None
        msg = self._pending.popleft()
        self.transcript.append(msg)
        return msg

    @property
    def quiescent(self) -> bool:
        return not self._pending

    def record_local(self, party: PartyId, kind: str, data: dict) -> None:
        if party not in self._parties:
            raise RoutingError(f"unknown party {party}")
        self._local[party].append({"kind": kind, **data})

    def view_of(self, party: PartyId, ring: Ring) -> View:
        if party not in self._parties:
            raise RoutingError(f"unknown party {party}")
        local = self._local.get(party, [])
        return View(
            party=party,
            ring=ring,
            own_inputs=[r for r in local if r["kind"] == "input"],
            generated_randomness=[r for r in local if r["kind"] != "input"],
            received_messages=[m for m in self.transcript if m.recipient == party],
        )
