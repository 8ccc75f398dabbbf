"""Single-writer session runtime.

Every mutation (transcript event, control command, config patch, prune
tick) runs synchronously through one SessionRuntime, which gives the
session its total order. After each effective mutation the runtime
rebuilds both face payloads, stamps a strictly increasing frame_ts,
appends to the session log (persistence before broadcast), and records
the intake-to-broadcast processing span for the latency budget.
Broadcasting the prebuilt payloads is the hub's job.
"""

import math
import time
from collections import deque
from dataclasses import dataclass

from ..core.config import CaptionConfig, validate_config
from ..core.events import StateDelta, TranscriptEvent
from ..core.frames import Face, broadcast_digest, frame_payload, layout_frame, mirror_frame
from ..core.state import (
    SessionState,
    clear_session,
    has_unrevealed,
    ingest_event,
    next_deadline,
    prune_expired,
    resolve_retract_last,
    retract_utterance,
)
from ..errors import MalformedEvent
from .logstore import LogRecord, SessionLogWriter


@dataclass(frozen=True)
class Broadcast:
    """Latest per-face payloads; immutable, safe to share."""

    seq: int
    frame_ts: int
    dhh: dict
    hearing: dict
    digest: str


class SessionRuntime:
    def __init__(
        self,
        session_id: str,
        config: CaptionConfig,
        clock,
        log_path=None,
    ):
        self.session_id = session_id
        self.config = config
        self.clock = clock
        self.state = SessionState(session_id=session_id)
        self.log: SessionLogWriter | None = None
        if log_path is not None:
            self.log = SessionLogWriter(log_path, session_id, config, start_ts=clock.now_ms())
        self.latest: Broadcast | None = None
        self._seq = 0
        self._last_frame_ts = -1
        self.processing_ms: deque[float] = deque(maxlen=20000)

    # -- mutations -----------------------------------------------------

    def submit_event(self, event: TranscriptEvent) -> StateDelta:
        """Ingest one transcript event; raises MalformedEvent.

        Every received event is logged, accepted or stale, so the log
        is a verbatim audit of the upstream recognizer stream.
        """
        t0 = time.perf_counter()
        now = self.clock.now_ms()
        self._log("event", event.to_dict(), now)
        try:
            delta = ingest_event(self.state, event, now, self.config)
        except MalformedEvent:
            self.processing_ms.append((time.perf_counter() - t0) * 1000)
            raise
        if delta.changed:
            self._rebuild()
        self.processing_ms.append((time.perf_counter() - t0) * 1000)
        return delta

    def retract_last(self) -> str:
        """Retract the most recent final utterance; returns its id."""
        now = self.clock.now_ms()
        target = resolve_retract_last(self.state)
        retract_utterance(self.state, target, now)
        self._log("command", {"action": "retract_last", "args": {"resolved": target}}, now)
        self._rebuild()
        return target

    def retract_id(self, utterance_id: str) -> None:
        now = self.clock.now_ms()
        retract_utterance(self.state, utterance_id, now)
        self._log("command", {"action": "retract_id", "args": {"utterance_id": utterance_id}}, now)
        self._rebuild()

    def patch_config(self, patch: dict) -> CaptionConfig:
        now = self.clock.now_ms()
        self.config = validate_config(patch, self.config)
        self._log("config", {"patch": patch}, now)
        self._rebuild()
        return self.config

    def clear(self) -> None:
        now = self.clock.now_ms()
        clear_session(self.state)
        self._log("command", {"action": "clear", "args": {}}, now)
        self._rebuild()

    def prune_tick(self) -> bool:
        """Expire overdue utterances; logged only when effective."""
        now = self.clock.now_ms()
        delta = prune_expired(self.state, self.config, now)
        if delta.changed:
            self._log("command", {"action": "prune", "args": {}}, now)
            self._rebuild()
        return delta.changed

    # -- broadcast bookkeeping ------------------------------------------

    def ensure_broadcast(self) -> Broadcast:
        if self.latest is None:
            self._rebuild()
        return self.latest

    def _rebuild(self) -> None:
        now = self.clock.now_ms()
        frame_ts = max(now, self._last_frame_ts + 1)
        self._last_frame_ts = frame_ts
        dhh = layout_frame(self.state, self.config, Face.DHH, frame_ts)
        hearing = mirror_frame(dhh, self.config)
        dhh_payload = frame_payload(dhh)
        hearing_payload = frame_payload(hearing)
        digest = broadcast_digest(dhh_payload, hearing_payload)
        self._seq += 1
        self.latest = Broadcast(
            seq=self._seq,
            frame_ts=frame_ts,
            dhh=dhh_payload,
            hearing=hearing_payload,
            digest=digest,
        )
        self._log("frame_digest", {"digest": digest, "frame_ts": frame_ts}, now)

    def _log(self, kind: str, body: dict, ts: int) -> None:
        if self.log is not None:
            self.log.append(LogRecord(ts=ts, kind=kind, body=body))

    # -- timing ----------------------------------------------------------

    def overdue_deadline(self) -> bool:
        deadline = next_deadline(self.state, self.config)
        return deadline is not None and self.clock.now_ms() >= math.ceil(deadline)

    def is_active(self) -> bool:
        """True while a reveal is in flight or an expiry is pending."""
        now = self.clock.now_ms()
        return has_unrevealed(self.state, now) or next_deadline(self.state, self.config) is not None

    def intake_p99_ms(self) -> float | None:
        if not self.processing_ms:
            return None
        ordered = sorted(self.processing_ms)
        index = max(0, math.ceil(len(ordered) * 0.99) - 1)
        return ordered[index]

    def close(self) -> None:
        if self.log is not None:
            self.log.close()
