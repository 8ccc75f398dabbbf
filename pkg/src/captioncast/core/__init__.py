"""Deterministic caption state machine and layout/timing engine."""

from .config import CaptionConfig, load_config_file, validate_config
from .events import DeltaReason, EventKind, StateDelta, TranscriptEvent
from .frames import (
    CaptionFrame,
    Face,
    Line,
    broadcast_digest,
    canonical_json,
    frame_payload,
    layout_frame,
    mirror_frame,
)
from .schedule import common_prefix_len, compute_reveal_schedule
from .state import (
    SessionState,
    Utterance,
    UtteranceStatus,
    clear_session,
    expiry_deadline,
    has_unrevealed,
    ingest_event,
    is_expired,
    next_deadline,
    prune_expired,
    resolve_retract_last,
    retract_utterance,
)
from .text import grapheme_count, graphemes, normalize_text, wrap_text

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
    "broadcast_digest",
    "canonical_json",
    "clear_session",
    "common_prefix_len",
    "compute_reveal_schedule",
    "expiry_deadline",
    "frame_payload",
    "grapheme_count",
    "graphemes",
    "has_unrevealed",
    "ingest_event",
    "is_expired",
    "layout_frame",
    "load_config_file",
    "mirror_frame",
    "next_deadline",
    "normalize_text",
    "prune_expired",
    "resolve_retract_last",
    "retract_utterance",
    "validate_config",
    "wrap_text",
]
