"""Transcript events and state-change deltas."""

from dataclasses import dataclass, asdict
from enum import Enum


class EventKind(str, Enum):
    PARTIAL = "partial"
    FINAL = "final"


class DeltaReason(str, Enum):
    PARTIAL_UPDATE = "partial_update"
    FINALIZED = "finalized"
    RETRACTED = "retracted"
    EXPIRED = "expired"
    CONFIG_CHANGED = "config_changed"
    REJECTED_STALE = "rejected_stale"
    CLEARED = "cleared"


@dataclass(frozen=True)
class TranscriptEvent:
    """One streaming hypothesis update from a speech source.

    ``seq`` must strictly increase across accepted events of one
    utterance; a ``final`` is the last accepted event for its utterance.
    ``source_ts`` is informational only and never drives state.
    """

    session_id: str
    utterance_id: str
    seq: int
    kind: EventKind
    text: str
    recv_ts: int
    source_ts: int | None = None
    confidence: float | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["kind"] = self.kind.value
        if d["source_ts"] is None:
            del d["source_ts"]
        if d["confidence"] is None:
            del d["confidence"]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "TranscriptEvent":
        return cls(
            session_id=d["session_id"],
            utterance_id=d["utterance_id"],
            seq=d["seq"],
            kind=EventKind(d["kind"]),
            text=d["text"],
            recv_ts=d["recv_ts"],
            source_ts=d.get("source_ts"),
            confidence=d.get("confidence"),
        )


@dataclass(frozen=True)
class StateDelta:
    changed: bool
    reason: DeltaReason

    def __post_init__(self):
        if self.reason is DeltaReason.REJECTED_STALE and self.changed:
            raise ValueError("rejected_stale delta cannot report a change")
