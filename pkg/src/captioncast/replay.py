"""Deterministic session replay: scripts with commands, frame emission.

A session script is JSON Lines where each line is either a transcript
entry (``at_ms, utterance_id, seq, kind, text``) or a command record
discriminated by a ``cmd`` field (retract_last, retract_id,
config_patch, clear). A plain transcript script is a valid session
script.

Emission contract (what makes replays byte-identical): ops are applied
in at_ms order; at each processing instant the driver first prunes
expired utterances, then applies every op sharing that timestamp, then
emits one frame pair. Between and after ops, every expiry deadline gets
its own emission (at the first integer millisecond at or past the
deadline), until the session is quiescent. frame_ts strictly increases;
same-instant collisions are stamped one millisecond apart.
"""

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Union

from .core.config import CaptionConfig, validate_config
from .core.events import TranscriptEvent
from .core.frames import (
    Face,
    broadcast_digest,
    canonical_json,
    frame_payload,
    layout_frame,
    mirror_frame,
)
from .core.state import (
    SessionState,
    clear_session,
    ingest_event,
    next_deadline,
    prune_expired,
    resolve_retract_last,
    retract_utterance,
)
from .errors import CaptioncastError, MalformedScript
from .sources.inject import inject_errors
from .sources.script import SCRIPT_FIELDS, ScriptEntry, entry_to_event, parse_entry

COMMANDS = ("retract_last", "retract_id", "config_patch", "clear")


@dataclass(frozen=True)
class CommandEntry:
    at_ms: int
    cmd: str
    utterance_id: str | None = None
    patch: dict | None = None

    def to_dict(self) -> dict:
        d: dict = {"at_ms": self.at_ms, "cmd": self.cmd}
        if self.utterance_id is not None:
            d["utterance_id"] = self.utterance_id
        if self.patch is not None:
            d["patch"] = self.patch
        return d


SessionOp = Union[ScriptEntry, CommandEntry]


@dataclass(frozen=True)
class Emission:
    """One broadcast instant: both face payloads plus their digest."""

    at: int
    dhh: dict
    hearing: dict
    digest: str

    def to_dict(self) -> dict:
        return {"at": self.at, "dhh": self.dhh, "hearing": self.hearing, "digest": self.digest}


def parse_session_line(obj: dict, line_no: int = 0) -> SessionOp:
    where = f" (line {line_no})" if line_no else ""
    if not isinstance(obj, dict):
        raise MalformedScript(f"session entry must be a JSON object{where}")
    if "cmd" not in obj:
        return parse_entry(obj, line_no)
    cmd = obj["cmd"]
    if cmd not in COMMANDS:
        raise MalformedScript(f"unknown command {cmd!r}{where}")
    allowed = {"at_ms", "cmd", "utterance_id", "patch"}
    extra = [k for k in obj if k not in allowed]
    if extra:
        raise MalformedScript(f"command has unknown fields {extra}{where}")
    if not isinstance(obj.get("at_ms"), int) or obj["at_ms"] < 0:
        raise MalformedScript(f"at_ms must be a non-negative integer{where}")
    if cmd == "retract_id" and not obj.get("utterance_id"):
        raise MalformedScript(f"retract_id needs an utterance_id{where}")
    if cmd == "config_patch" and not isinstance(obj.get("patch"), dict):
        raise MalformedScript(f"config_patch needs a patch object{where}")
    return CommandEntry(
        at_ms=obj["at_ms"],
        cmd=cmd,
        utterance_id=obj.get("utterance_id"),
        patch=obj.get("patch"),
    )


def load_session_script(path: str | Path) -> list[SessionOp]:
    ops: list[SessionOp] = []
    with open(path, encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedScript(f"invalid JSON at line {line_no}: {exc}") from exc
            ops.append(parse_session_line(obj, line_no))
    last_at = None
    for i, op in enumerate(ops):
        if last_at is not None and op.at_ms < last_at:
            raise MalformedScript(f"session ops not sorted by at_ms at index {i}")
        last_at = op.at_ms
    return ops


def save_session_script(ops: Iterable[SessionOp], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for op in ops:
            f.write(json.dumps(op.to_dict(), ensure_ascii=False) + "\n")


def transcript_events(ops: Iterable[SessionOp]) -> list[ScriptEntry]:
    return [op for op in ops if isinstance(op, ScriptEntry)]


def _apply_command(
    state: SessionState, config: CaptionConfig, op: CommandEntry, strict: bool
) -> CaptionConfig:
    try:
        if op.cmd == "retract_last":
            retract_utterance(state, resolve_retract_last(state), op.at_ms)
        elif op.cmd == "retract_id":
            retract_utterance(state, op.utterance_id, op.at_ms)
        elif op.cmd == "config_patch":
            config = validate_config(op.patch or {}, config)
        elif op.cmd == "clear":
            clear_session(state)
    except CaptioncastError:
        if strict:
            raise
    return config


def replay_session(
    ops: list[SessionOp],
    config: CaptionConfig | None = None,
    session_id: str = "replay",
    error_rate: float = 0.0,
    seed: int = 0,
    strict_commands: bool = True,
    on_emit: Callable[[Emission], None] | None = None,
) -> list[Emission]:
    """Run a session script through the state machine, fast-clock.

    Returns the full emission sequence. ``error_rate``/``seed`` pass the
    transcript sub-stream through the error injector first; commands are
    untouched. With ``strict_commands`` off, failing commands (e.g.
    retract on an empty session) are no-ops, as on the live server.
    """
    config = config or CaptionConfig()
    state = SessionState(session_id=session_id)

    events = [entry_to_event(e, session_id) for e in transcript_events(ops)]
    if error_rate > 0.0:
        events = list(inject_errors(iter(events), error_rate, seed))
    event_iter = iter(events)
    timeline: list[tuple[int, SessionOp, TranscriptEvent | None]] = [
        (op.at_ms, op, next(event_iter) if isinstance(op, ScriptEntry) else None) for op in ops
    ]

    emissions: list[Emission] = []
    last_ts = -1

    def emit(t: int) -> None:
        nonlocal last_ts
        ts = max(t, last_ts + 1)
        last_ts = ts
        dhh = layout_frame(state, config, Face.DHH, ts)
        hearing = mirror_frame(dhh, config)
        dhh_payload = frame_payload(dhh)
        hearing_payload = frame_payload(hearing)
        emission = Emission(
            at=ts,
            dhh=dhh_payload,
            hearing=hearing_payload,
            digest=broadcast_digest(dhh_payload, hearing_payload),
        )
        emissions.append(emission)
        if on_emit is not None:
            on_emit(emission)

    index = 0
    while True:
        deadline = next_deadline(state, config)
        next_op_at = timeline[index][0] if index < len(timeline) else None
        if next_op_at is None and deadline is None:
            break
        if deadline is not None and (next_op_at is None or math.ceil(deadline) < next_op_at):
            t = math.ceil(deadline)
            prune_expired(state, config, t)
            emit(t)
            continue
        t = next_op_at
        prune_expired(state, config, t)
        while index < len(timeline) and timeline[index][0] == t:
            _, op, event = timeline[index]
            if isinstance(op, ScriptEntry):
                ingest_event(state, event, t, config)
            else:
                config = _apply_command(state, config, op, strict_commands)
            index += 1
        emit(t)

    return emissions


def emissions_to_jsonl(emissions: Iterable[Emission]) -> str:
    return "".join(canonical_json(e.to_dict()) + "\n" for e in emissions)
