"""Wire schema for the teleoperation service.

JSON text frames over a websocket. Every frame carries a kind tag, a
session id, and a per-direction sequence number that must increase
strictly; unknown kinds and malformed frames are rejected with a
ProtocolError (the server answers those with an ``error`` frame instead
of dropping the connection).
"""

from __future__ import annotations

import dataclasses
import json

SCHEMA_VERSION = 1

KINDS = frozenset({
    "state_update", "latent_input", "correction_push", "correction_pop",
    "gripper_toggle", "session_start", "session_end", "subtask_update",
    "error",
})


class ProtocolError(ValueError):
    pass


@dataclasses.dataclass(frozen=True)
class WireMessage:
    kind: str
    payload: dict
    seq: int
    session_id: str

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ProtocolError(f"unknown message kind {self.kind!r}")
        if not isinstance(self.seq, int) or self.seq < 0:
            raise ProtocolError(f"bad sequence number {self.seq!r}")
        if not isinstance(self.payload, dict):
            raise ProtocolError("payload must be an object")

    def to_json(self) -> str:
        return json.dumps({
            "v": SCHEMA_VERSION,
            "kind": self.kind,
            "payload": self.payload,
            "seq": self.seq,
            "session_id": self.session_id,
        }, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "WireMessage":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as err:
            raise ProtocolError(f"frame is not valid JSON: {err}") from err
        if not isinstance(d, dict):
            raise ProtocolError("frame must be a JSON object")
        if d.get("v") != SCHEMA_VERSION:
            raise ProtocolError(f"unsupported schema version {d.get('v')!r}")
        missing = {"kind", "payload", "seq", "session_id"} - set(d)
        if missing:
            raise ProtocolError(f"missing fields: {sorted(missing)}")
        return cls(kind=d["kind"], payload=d["payload"], seq=d["seq"],
                   session_id=d["session_id"])


class SequenceCounter:
    """Outbound sequence numbers, strictly increasing per direction."""

    def __init__(self):
        self._next = 0

    def take(self) -> int:
        value = self._next
        self._next += 1
        return value


class SequenceChecker:
    """Validates inbound sequence numbers."""

    def __init__(self):
        self._last = -1

    def check(self, seq: int):
        if seq <= self._last:
            raise ProtocolError(
                f"sequence number {seq} not greater than {self._last}")
        self._last = seq
