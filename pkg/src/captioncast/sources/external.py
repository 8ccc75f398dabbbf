"""Adapter for external streaming-ASR result messages.

The message shape mirrors the interim/final result model of
browser-style streaming recognizers, generalized to any provider: each
message carries a complete hypothesis for one result id, not a diff.
"""

import logging
from dataclasses import dataclass

from ..core.events import EventKind, TranscriptEvent
from ..core.text import normalize_text

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExternalAsrMessage:
    result_id: str
    is_final: bool
    transcript: str
    confidence: float | None = None
    stability: float | None = None

    @classmethod
    def from_dict(cls, d: dict) -> "ExternalAsrMessage":
        return cls(
            result_id=str(d["result_id"]),
            is_final=bool(d["is_final"]),
            transcript=str(d["transcript"]),
            confidence=d.get("confidence"),
            stability=d.get("stability"),
        )


class AsrMessageMapper:
    """Turn provider messages into transcript events, one utterance per
    result id, seq assigned 1..n by a per-utterance counter. Messages
    arriving after a final for the same result id are dropped."""

    def __init__(self, session_id: str, clock):
        self.session_id = session_id
        self.clock = clock
        self._counters: dict[str, int] = {}
        self._finalized: set[str] = set()

    def map(self, msg: ExternalAsrMessage) -> TranscriptEvent | None:
        if not msg.result_id:
            logger.warning("dropping ASR message with empty result_id")
            return None
        if msg.result_id in self._finalized:
            logger.warning("dropping ASR message after final for result %r", msg.result_id)
            return None
        text = normalize_text(msg.transcript)
        if msg.is_final and not text:
            logger.warning("dropping empty final ASR message for result %r", msg.result_id)
            return None
        seq = self._counters.get(msg.result_id, 0) + 1
        self._counters[msg.result_id] = seq
        if msg.is_final:
            self._finalized.add(msg.result_id)
        return TranscriptEvent(
            session_id=self.session_id,
            utterance_id=msg.result_id,
            seq=seq,
            kind=EventKind.FINAL if msg.is_final else EventKind.PARTIAL,
            text=text,
            recv_ts=self.clock.now_ms(),
            confidence=msg.confidence,
        )
