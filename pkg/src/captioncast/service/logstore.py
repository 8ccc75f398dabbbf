"""Append-only session log and log replay.

One JSONL record per line: ``{ts, kind, body}`` with kind in
{event, command, config, frame_digest} and non-decreasing ts. The first
record is a full config snapshot so a replay starts from the same
parameters the live session did. Replaying a log through the state
machine reproduces the final state and every frame digest, which is how
a session is audited after the fact.
"""

import json
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path

from ..core.config import CaptionConfig, validate_config
from ..core.events import TranscriptEvent
from ..core.frames import Face, broadcast_digest, frame_payload, layout_frame, mirror_frame
from ..core.state import (
    SessionState,
    clear_session,
    ingest_event,
    prune_expired,
    resolve_retract_last,
    retract_utterance,
)
from ..errors import CaptioncastError, CorruptLog, MalformedEvent

logger = logging.getLogger(__name__)

LOG_KINDS = ("event", "command", "config", "frame_digest")


@dataclass(frozen=True)
class LogRecord:
    ts: int
    kind: str
    body: dict

    def to_dict(self) -> dict:
        return {"ts": self.ts, "kind": self.kind, "body": self.body}


class SessionLogWriter:
    """Appends records to one JSONL file, enforcing the ts order."""

    def __init__(self, path: str | Path, session_id: str, config: CaptionConfig, start_ts: int = 0):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._last_ts = start_ts
        self._f = open(self.path, "w", encoding="utf-8")
        self.append(
            LogRecord(
                ts=start_ts,
                kind="config",
                body={"full": config.to_dict(), "session_id": session_id},
            )
        )

    def append(self, record: LogRecord) -> None:
        if record.kind not in LOG_KINDS:
            raise ValueError(f"unknown log kind {record.kind!r}")
        if record.ts < self._last_ts:
            raise ValueError(f"log ts went backwards: {record.ts} < {self._last_ts}")
        self._last_ts = record.ts
        self._f.write(json.dumps(record.to_dict(), ensure_ascii=False) + "\n")
        self._f.flush()

    def close(self) -> None:
        self._f.close()


@dataclass
class LogReplayResult:
    session_id: str
    state: SessionState
    config: CaptionConfig
    records_applied: int = 0
    # (ts, digest recorded in the log, digest recomputed by this replay)
    digests: list[tuple[int, str, str]] = field(default_factory=list)
    corrupt: CorruptLog | None = None

    @property
    def digests_match(self) -> bool:
        return all(recorded == recomputed for _, recorded, recomputed in self.digests)


def _parse_record(line: str, line_no: int) -> LogRecord:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise CorruptLog(line_no, f"invalid JSON: {exc}") from exc
    if not isinstance(obj, dict) or not {"ts", "kind", "body"} <= set(obj):
        raise CorruptLog(line_no, "record must have ts, kind, body")
    if obj["kind"] not in LOG_KINDS:
        raise CorruptLog(line_no, f"unknown kind {obj['kind']!r}")
    if not isinstance(obj["body"], dict):
        raise CorruptLog(line_no, "body must be an object")
    return LogRecord(ts=obj["ts"], kind=obj["kind"], body=obj["body"])


def replay_log(path: str | Path) -> LogReplayResult:
    """Reconstruct a session from its log.

    Stops at the last good line on corruption: the result carries the
    state built so far plus the CorruptLog describing the bad line.
    """
    result = LogReplayResult(
        session_id="default", state=SessionState(session_id="default"), config=CaptionConfig()
    )
    with open(path, encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            stripped = line.strip()
            if not stripped:
                continue
            try:
                record = _parse_record(stripped, line_no)
                _apply_record(result, record)
            except CorruptLog as exc:
                result.corrupt = exc
                break
            result.records_applied += 1
    return result


def _apply_record(result: LogReplayResult, record: LogRecord) -> None:
    state, config = result.state, result.config
    if record.kind == "config":
        if "full" in record.body:
            snapshot = dict(record.body["full"])
            session_id = record.body.get("session_id", result.session_id)
            rev = snapshot.pop("config_rev", 0)
            cfg = validate_config(snapshot, CaptionConfig())
            result.config = replace(cfg, config_rev=rev)
            result.session_id = session_id
            result.state = SessionState(session_id=session_id)
        else:
            try:
                result.config = validate_config(record.body.get("patch", {}), config)
            except CaptioncastError as exc:
                logger.warning("log line skipped: config patch failed (%s)", exc)
    elif record.kind == "event":
        try:
            event = TranscriptEvent.from_dict(record.body)
            ingest_event(state, event, record.ts, config)
        except (MalformedEvent, KeyError, ValueError) as exc:
            logger.warning("log line skipped: bad event (%s)", exc)
    elif record.kind == "command":
        _apply_command_record(result, record)
    elif record.kind == "frame_digest":
        ts = record.body.get("frame_ts", record.ts)
        dhh = layout_frame(state, config, Face.DHH, ts)
        hearing = mirror_frame(dhh, config)
        recomputed = broadcast_digest(frame_payload(dhh), frame_payload(hearing))
        result.digests.append((ts, record.body.get("digest", ""), recomputed))


def _apply_command_record(result: LogReplayResult, record: LogRecord) -> None:
    action = record.body.get("action")
    args = record.body.get("args", {})
    try:
        if action == "retract_last":
            retract_utterance(result.state, resolve_retract_last(result.state), record.ts)
        elif action == "retract_id":
            retract_utterance(result.state, args.get("utterance_id", ""), record.ts)
        elif action == "clear":
            clear_session(result.state)
        elif action == "prune":
            prune_expired(result.state, result.config, record.ts)
        else:
            logger.warning("log line skipped: unknown command %r", action)
    except CaptioncastError as exc:
        logger.warning("log line skipped: command %r failed (%s)", action, exc)
