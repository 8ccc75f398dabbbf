"""Scripted transcript replay.

Script files are JSON Lines, UTF-8, one entry per line with fields
exactly ``at_ms, utterance_id, seq, kind, text`` and kind in
{"partial", "final"}. Entries must be sorted by at_ms and per-utterance
seq must strictly increase.
"""

import json
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

from ..core.events import EventKind, TranscriptEvent
from ..errors import MalformedScript

SCRIPT_FIELDS = ("at_ms", "utterance_id", "seq", "kind", "text")


@dataclass(frozen=True)
class ScriptEntry:
    at_ms: int
    utterance_id: str
    seq: int
    kind: EventKind
    text: str

    def to_dict(self) -> dict:
        return {
            "at_ms": self.at_ms,
            "utterance_id": self.utterance_id,
            "seq": self.seq,
            "kind": self.kind.value,
            "text": self.text,
        }


def parse_entry(obj: dict, line_no: int = 0) -> ScriptEntry:
    where = f" (line {line_no})" if line_no else ""
    if not isinstance(obj, dict):
        raise MalformedScript(f"script entry must be a JSON object{where}")
    missing = [k for k in SCRIPT_FIELDS if k not in obj]
    extra = [k for k in obj if k not in SCRIPT_FIELDS]
    if missing:
        raise MalformedScript(f"script entry missing fields {missing}{where}")
    if extra:
        raise MalformedScript(f"script entry has unknown fields {extra}{where}")
    if obj["kind"] not in ("partial", "final"):
        raise MalformedScript(f"kind must be 'partial' or 'final', got {obj['kind']!r}{where}")
    if not isinstance(obj["at_ms"], int) or obj["at_ms"] < 0:
        raise MalformedScript(f"at_ms must be a non-negative integer{where}")
    if not isinstance(obj["seq"], int):
        raise MalformedScript(f"seq must be an integer{where}")
    return ScriptEntry(
        at_ms=obj["at_ms"],
        utterance_id=str(obj["utterance_id"]),
        seq=obj["seq"],
        kind=EventKind(obj["kind"]),
        text=str(obj["text"]),
    )


def validate_script(entries: list[ScriptEntry]) -> None:
    """Check ordering invariants; raises MalformedScript."""
    last_at = None
    last_seq: dict[str, int] = {}
    finals: set[str] = set()
    for i, e in enumerate(entries):
        if last_at is not None and e.at_ms < last_at:
            raise MalformedScript(f"entries not sorted by at_ms at index {i}")
        last_at = e.at_ms
        prev = last_seq.get(e.utterance_id)
        if prev is not None and e.seq <= prev:
            raise MalformedScript(
                f"seq {e.seq} not above {prev} for utterance {e.utterance_id!r} at index {i}"
            )
        if e.utterance_id in finals:
            raise MalformedScript(
                f"entry after final for utterance {e.utterance_id!r} at index {i}"
            )
        last_seq[e.utterance_id] = e.seq
        if e.kind is EventKind.FINAL:
            finals.add(e.utterance_id)


def load_script(path: str | Path) -> list[ScriptEntry]:
    entries = []
    with open(path, encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedScript(f"invalid JSON at line {line_no}: {exc}") from exc
            entries.append(parse_entry(obj, line_no))
    validate_script(entries)
    return entries


def save_script(entries: list[ScriptEntry], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for e in entries:
            f.write(json.dumps(e.to_dict(), ensure_ascii=False) + "\n")


def entry_to_event(entry: ScriptEntry, session_id: str) -> TranscriptEvent:
    return TranscriptEvent(
        session_id=session_id,
        utterance_id=entry.utterance_id,
        seq=entry.seq,
        kind=entry.kind,
        text=entry.text,
        recv_ts=entry.at_ms,
        source_ts=entry.at_ms,
    )


def open_replay_source(
    script: list[ScriptEntry],
    mode: str = "fast",
    session_id: str = "replay",
) -> Iterator[TranscriptEvent]:
    """Emit the script as transcript events.

    ``fast`` emits immediately with recv_ts stamped from the script's
    virtual clock, so replays are byte-deterministic. ``realtime``
    additionally sleeps to honor the at_ms spacing.
    """
    if mode not in ("fast", "realtime"):
        raise ValueError(f"mode must be 'fast' or 'realtime', got {mode!r}")
    validate_script(script)

    def generate() -> Iterator[TranscriptEvent]:
        start = time.monotonic()
        for entry in script:
            if mode == "realtime":
                delay = entry.at_ms / 1000.0 - (time.monotonic() - start)
                if delay > 0:
                    time.sleep(delay)
            yield entry_to_event(entry, session_id)

    return generate()
