"""Deterministic caption state machine.

Single-writer: every mutation (event, retraction, prune, clear) is
applied through one total order per session. Status transitions are
partial -> partial, partial -> final, final -> retracted; retracted is
terminal. Stale deliveries (seq not above the last accepted, or any
event after final/retracted) are rejected without side effects, so
permuting stale deliveries can never change state.
"""

from dataclasses import dataclass, field
from enum import Enum

from ..errors import InvalidState, MalformedEvent, NotFound, NothingToRetract
from .config import CaptionConfig
from .events import DeltaReason, EventKind, StateDelta, TranscriptEvent
from .schedule import compute_reveal_schedule
from .text import graphemes, normalize_text


class UtteranceStatus(str, Enum):
    PARTIAL = "partial"
    FINAL = "final"
    RETRACTED = "retracted"


@dataclass
class Utterance:
    """Accumulated state of one spoken unit."""

    utterance_id: str
    status: UtteranceStatus
    graphemes: tuple[str, ...]
    reveal_times: tuple[float, ...]
    last_seq: int
    finalized_at: int | None = None
    retracted_at: int | None = None

    def reveal_end(self) -> float | None:
        """Time the last grapheme becomes visible; None when empty."""
        return self.reveal_times[-1] if self.reveal_times else None


@dataclass
class SessionState:
    """All utterances of one session, in first-accepted order."""

    session_id: str
    utterances: dict[str, Utterance] = field(default_factory=dict)

    def snapshot(self) -> dict:
        """Plain-data view of the full state, for comparison and logs."""
        return {
            "session_id": self.session_id,
            "utterances": [
                {
                    "utterance_id": u.utterance_id,
                    "status": u.status.value,
                    "graphemes": list(u.graphemes),
                    "reveal_times": list(u.reveal_times),
                    "last_seq": u.last_seq,
                    "finalized_at": u.finalized_at,
                    "retracted_at": u.retracted_at,
                }
                for u in self.utterances.values()
            ],
        }


def ingest_event(
    state: SessionState,
    event: TranscriptEvent,
    now: int,
    config: CaptionConfig,
) -> StateDelta:
    """Apply one transcript event.

    Raises MalformedEvent for contract violations (caller drops and
    logs); returns a rejected_stale delta for out-of-order or
    post-final deliveries.
    """
    if not event.utterance_id:
        raise MalformedEvent("empty utterance_id")
    if event.seq < 0:
        raise MalformedEvent(f"negative seq {event.seq}")
    if event.session_id != state.session_id:
        raise MalformedEvent(
            f"event for session {event.session_id!r} delivered to {state.session_id!r}"
        )

    text = normalize_text(event.text)
    if event.kind is EventKind.FINAL and not text:
        raise MalformedEvent("final event with empty text")

    existing = state.utterances.get(event.utterance_id)
    if existing is not None:
        if existing.status is not UtteranceStatus.PARTIAL:
            return StateDelta(changed=False, reason=DeltaReason.REJECTED_STALE)
        if event.seq <= existing.last_seq:
            return StateDelta(changed=False, reason=DeltaReason.REJECTED_STALE)

    new_graphemes = graphemes(text)
    if existing is None:
        times = compute_reveal_schedule(None, None, new_graphemes, now, config.reveal_rate)
        utterance = Utterance(
            utterance_id=event.utterance_id,
            status=UtteranceStatus.PARTIAL,
            graphemes=new_graphemes,
            reveal_times=times,
            last_seq=event.seq,
        )
        state.utterances[event.utterance_id] = utterance
    else:
        utterance = existing
        utterance.reveal_times = compute_reveal_schedule(
            utterance.graphemes, utterance.reveal_times, new_graphemes, now, config.reveal_rate
        )
        utterance.graphemes = new_graphemes
        utterance.last_seq = event.seq

    if event.kind is EventKind.FINAL:
        utterance.status = UtteranceStatus.FINAL
        utterance.finalized_at = now
        return StateDelta(changed=True, reason=DeltaReason.FINALIZED)
    return StateDelta(changed=True, reason=DeltaReason.PARTIAL_UPDATE)


def retract_utterance(state: SessionState, utterance_id: str, now: int) -> StateDelta:
    """Flag a finalized caption as misrecognized.

    The caption stays visible with its retracted flag until
    ``retracted_at + retract_linger_ms`` and then expires.
    """
    utterance = state.utterances.get(utterance_id)
    if utterance is None:
        raise NotFound(f"unknown utterance {utterance_id!r}")
    if utterance.status is UtteranceStatus.RETRACTED:
        raise InvalidState(f"utterance {utterance_id!r} already retracted")
    if utterance.status is UtteranceStatus.PARTIAL:
        raise InvalidState(f"utterance {utterance_id!r} is partial; partials self-correct")
    utterance.status = UtteranceStatus.RETRACTED
    utterance.retracted_at = now
    return StateDelta(changed=True, reason=DeltaReason.RETRACTED)


def resolve_retract_last(state: SessionState) -> str:
    """Pick the most recently finalized, non-retracted utterance.

    Greatest ``finalized_at`` wins; insertion order breaks ties.
    """
    best: str | None = None
    best_key: tuple[int, int] | None = None
    for index, u in enumerate(state.utterances.values()):
        if u.status is not UtteranceStatus.FINAL:
            continue
        key = (u.finalized_at if u.finalized_at is not None else 0, index)
        if best_key is None or key >= best_key:
            best, best_key = u.utterance_id, key
    if best is None:
        raise NothingToRetract("no final, non-retracted utterance")
    return best


def expiry_deadline(utterance: Utterance, config: CaptionConfig) -> float | None:
    """When the utterance disappears; None for live partials.

    Finals expire a linger interval after their last reveal time,
    retracted captions a (shorter) linger after retraction. The
    boundary is inclusive: expired when now >= deadline.
    """
    if utterance.status is UtteranceStatus.FINAL:
        end = utterance.reveal_end()
        if end is None:
            return float(utterance.finalized_at or 0) + config.linger_ms
        return end + config.linger_ms
    if utterance.status is UtteranceStatus.RETRACTED:
        return float(utterance.retracted_at or 0) + config.retract_linger_ms
    return None


def is_expired(utterance: Utterance, config: CaptionConfig, now: int) -> bool:
    deadline = expiry_deadline(utterance, config)
    return deadline is not None and now >= deadline


def prune_expired(state: SessionState, config: CaptionConfig, now: int) -> StateDelta:
    """Drop every utterance past its expiry deadline."""
    expired = [uid for uid, u in state.utterances.items() if is_expired(u, config, now)]
    for uid in expired:
        del state.utterances[uid]
    return StateDelta(changed=bool(expired), reason=DeltaReason.EXPIRED)


def clear_session(state: SessionState) -> StateDelta:
    """Expire every utterance immediately."""
    had_any = bool(state.utterances)
    state.utterances.clear()
    return StateDelta(changed=had_any, reason=DeltaReason.CLEARED)


def next_deadline(state: SessionState, config: CaptionConfig) -> float | None:
    """Earliest pending expiry deadline, if any."""
    deadlines = [
        d for u in state.utterances.values() if (d := expiry_deadline(u, config)) is not None
    ]
    return min(deadlines) if deadlines else None


def has_unrevealed(state: SessionState, now: int) -> bool:
    """True while any scheduled grapheme is still hidden."""
    return any(
        u.reveal_times and u.reveal_times[-1] > now for u in state.utterances.values()
    )
