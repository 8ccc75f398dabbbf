"""Deterministic recognition-error injection.

Produces the misrecognized-caption condition on demand so the
flag-and-respeak correction workflow can be exercised in tests and
demos. Final events get each word independently replaced with a
scrambled variant with the given probability; partials pass through
untouched. Pure function of (stream, rate, seed).
"""

import random
from dataclasses import replace
from typing import Iterable, Iterator

from ..core.events import EventKind, TranscriptEvent
from ..core.text import graphemes

_SUBSTITUTES = "aeioumnrst"


def scramble_word(word: str, rng: random.Random) -> str:
    """Return a deterministically garbled variant, always != word.

    Long words get their interior graphemes shuffled; short ones get a
    grapheme substituted.
    """
    cells = list(graphemes(word))
    if len(cells) >= 4:
        interior = cells[1:-1]
        for _ in range(8):
            rng.shuffle(interior)
            candidate = "".join([cells[0], *interior, cells[-1]])
            if candidate != word:
                return candidate
        # Degenerate interiors (all-equal graphemes) fall through.
    index = rng.randrange(len(cells))
    pool = [c for c in _SUBSTITUTES if c != cells[index]]
    cells[index] = pool[rng.randrange(len(pool))]
    return "".join(cells)


def perturb_text(text: str, rate: float, rng: random.Random) -> str:
    words = text.split(" ")
    out = []
    for word in words:
        if word and rng.random() < rate:
            out.append(scramble_word(word, rng))
        else:
            out.append(word)
    return " ".join(out)


def inject_errors(
    stream: Iterable[TranscriptEvent],
    substitution_rate: float,
    seed: int,
) -> Iterator[TranscriptEvent]:
    if not 0.0 <= substitution_rate <= 1.0:
        raise ValueError(f"substitution_rate must be in [0, 1], got {substitution_rate}")
    rng = random.Random(seed)
    for event in stream:
        if event.kind is EventKind.FINAL and substitution_rate > 0.0:
            yield replace(event, text=perturb_text(event.text, substitution_rate, rng))
        else:
            yield event
