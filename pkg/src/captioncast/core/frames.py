"""Per-face caption frames: layout, scroll, and the mirror transform.

Mirroring is strictly render-side metadata. The hearing-face frame
carries the same line content as the DHH-face frame; only face,
mirrored, and scale differ. Text is never reversed in the data.
"""

import hashlib
import json
from dataclasses import dataclass, replace
from enum import Enum

from ..errors import InvalidFace
from .config import CaptionConfig
from .state import SessionState, UtteranceStatus, is_expired
from .text import wrap_text


class Face(str, Enum):
    DHH = "dhh"
    HEARING = "hearing"


@dataclass(frozen=True)
class Line:
    graphemes: tuple[str, ...]
    reveal_times: tuple[float, ...]
    utterance_id: str
    retracted: bool


@dataclass(frozen=True)
class CaptionFrame:
    face: Face
    mirrored: bool
    scale: float
    lines: tuple[Line, ...]
    frame_ts: int
    config_rev: int


def layout_frame(
    state: SessionState,
    config: CaptionConfig,
    face: Face,
    now: int,
) -> CaptionFrame:
    """Lay the visible utterances out as wrapped lines, oldest first.

    Word-break spaces are consumed at line boundaries (their reveal
    slots are skipped). When the total exceeds ``max_lines`` the oldest
    whole lines are dropped, so the newest content always shows. The
    hearing face is the dhh layout passed through ``mirror_frame``.
    """
    lines: list[Line] = []
    for utterance in state.utterances.values():
        if is_expired(utterance, config, now):
            continue
        if not utterance.graphemes:
            continue
        retracted = utterance.status is UtteranceStatus.RETRACTED
        cursor = 0
        for wrapped in wrap_text(utterance.graphemes, config.line_width):
            # A word-wrap break swallows exactly the space grapheme
            # sitting at the cursor.
            if cursor < len(utterance.graphemes) and utterance.graphemes[cursor] == " ":
                cursor += 1
            times = utterance.reveal_times[cursor : cursor + len(wrapped)]
            lines.append(
                Line(
                    graphemes=wrapped,
                    reveal_times=times,
                    utterance_id=utterance.utterance_id,
                    retracted=retracted,
                )
            )
            cursor += len(wrapped)

    if len(lines) > config.max_lines:
        lines = lines[-config.max_lines :]

    frame = CaptionFrame(
        face=Face.DHH,
        mirrored=False,
        scale=1.0,
        lines=tuple(lines),
        frame_ts=now,
        config_rev=config.config_rev,
    )
    if face is Face.HEARING:
        return mirror_frame(frame, config)
    return frame


def mirror_frame(frame: CaptionFrame, config: CaptionConfig) -> CaptionFrame:
    """Derive the hearing-face frame: same lines, flipped metadata."""
    if frame.face is not Face.DHH:
        raise InvalidFace("can only mirror a dhh-face frame")
    return replace(frame, face=Face.HEARING, mirrored=True, scale=config.mirror_scale)


def frame_payload(frame: CaptionFrame) -> dict:
    """Wire form of a frame.

    Reveal times are rewritten as offsets relative to ``frame_ts`` so
    clients only need a steady local clock; an offset <= 0 means the
    grapheme is already visible.
    """
    return {
        "face": frame.face.value,
        "mirrored": frame.mirrored,
        "scale": frame.scale,
        "frame_ts": frame.frame_ts,
        "config_rev": frame.config_rev,
        "lines": [
            {
                "utterance_id": line.utterance_id,
                "retracted": line.retracted,
                "graphemes": list(line.graphemes),
                "reveal_offsets_ms": [t - frame.frame_ts for t in line.reveal_times],
            }
            for line in frame.lines
        ],
    }


def canonical_json(obj) -> str:
    """Deterministic JSON: sorted keys, compact separators, raw UTF-8."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def broadcast_digest(dhh_payload: dict, hearing_payload: dict) -> str:
    """Content hash over one broadcast instant (both faces)."""
    blob = canonical_json({"dhh": dhh_payload, "hearing": hearing_payload})
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()
