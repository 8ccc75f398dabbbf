"""Per-grapheme reveal scheduling with common-prefix stability.

A hypothesis revision keeps the reveal times of every grapheme in the
longest common prefix with the previous text, so already-visible
characters never flicker or re-animate; only the changed tail is
rescheduled.
"""


def common_prefix_len(a: tuple[str, ...], b: tuple[str, ...]) -> int:
    n = min(len(a), len(b))
    for i in range(n):
        if a[i] != b[i]:
            return i
    return n


def compute_reveal_schedule(
    prev_graphemes: tuple[str, ...] | None,
    prev_times: tuple[float, ...] | None,
    new_graphemes: tuple[str, ...],
    now: int,
    reveal_rate: float,
) -> tuple[float, ...]:
    """Schedule one reveal time per grapheme of the new text.

    With no previous text the first grapheme reveals at ``now`` and the
    rest follow at 1000/rate spacing. On a revision, the common-prefix
    times are copied unchanged and the tail is scheduled at
    ``max(now, last kept time) + k * (1000 / rate)``.
    """
    if reveal_rate <= 0:
        raise ValueError(f"reveal_rate must be positive, got {reveal_rate}")
    step = 1000.0 / reveal_rate

    if prev_graphemes is None or prev_times is None:
        return tuple(now + k * step for k in range(len(new_graphemes)))

    keep = common_prefix_len(prev_graphemes, new_graphemes)
    kept = prev_times[:keep]
    remaining = len(new_graphemes) - keep
    if remaining == 0:
        return kept
    base = max(float(now), kept[-1]) if kept else float(now)
    return kept + tuple(base + k * step for k in range(1, remaining + 1))
