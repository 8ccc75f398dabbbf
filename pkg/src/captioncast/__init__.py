"""captioncast: real-time captioning sessions for dual-face displays.

Ingests streaming speech-transcript events, maintains a deterministic
caption state machine (partial/final/retracted utterances with
per-grapheme reveal schedules), lays out per-face caption frames (full
size for the DHH reader, mirrored and scaled for the hearing speaker),
and fans them out to display clients over a JSON wire protocol.
"""

from .core import (
    CaptionConfig,
    CaptionFrame,
    DeltaReason,
    EventKind,
    Face,
    Line,
    SessionState,
    StateDelta,
    TranscriptEvent,
    Utterance,
    UtteranceStatus,
    frame_payload,
    ingest_event,
    layout_frame,
    mirror_frame,
    normalize_text,
    prune_expired,
    retract_utterance,
    validate_config,
    wrap_text,
)

__version__ = "0.1.0"

__all__ = [
    "CaptionConfig",
    "CaptionFrame",
    "DeltaReason",
    "EventKind",
    "Face",
    "Line",
    "SessionState",
    "StateDelta",
    "TranscriptEvent",
    "Utterance",
    "UtteranceStatus",
    "frame_payload",
    "ingest_event",
    "layout_frame",
    "mirror_frame",
    "normalize_text",
    "prune_expired",
    "retract_utterance",
    "validate_config",
    "wrap_text",
    "__version__",
]
