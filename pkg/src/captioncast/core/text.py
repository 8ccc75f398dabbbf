"""Text normalization, grapheme segmentation, and caption line wrapping.

The unit of caption width, reveal scheduling, and wrapping is the
extended grapheme cluster, never the code point: deployment text is
mixed-script (kana, kanji, emoji with ZWJ sequences, combining marks)
and a caption must not split a user-perceived character.
"""

from functools import lru_cache

import regex

_GRAPHEME = regex.compile(r"\X")


def normalize_text(raw: str) -> str:
    """Collapse whitespace runs to single spaces and strip the ends.

    Total function: any string in, normalized string out. All Unicode
    whitespace (tabs, newlines, ideographic space) collapses to U+0020.
    """
    return " ".join(raw.split())


@lru_cache(maxsize=4096)
def graphemes(text: str) -> tuple[str, ...]:
    """Split text into extended grapheme clusters.

    Cached: caption pipelines re-segment the same hypothesis text many
    times (scheduling, wrapping, layout).
    """
    if not text:
        return ()
    return tuple(_GRAPHEME.findall(text))


def grapheme_count(text: str) -> int:
    return len(graphemes(text))


def wrap_text(cells: tuple[str, ...] | list[str], line_width: int) -> list[tuple[str, ...]]:
    """Greedy word wrap over a grapheme sequence.

    Tokens are maximal runs of non-space graphemes. A token longer than
    ``line_width`` is broken at grapheme boundaries. Every output line
    has at most ``line_width`` graphemes, and no line is empty.

    The wrap is lossless: concatenating the lines and restoring a single
    space at each word-wrap break point reproduces the input exactly.
    Input is expected to be normalized (single interior spaces).
    """
    if line_width < 1:
        raise ValueError(f"line_width must be >= 1, got {line_width}")
    cells = tuple(cells)
    if not cells:
        return []

    lines: list[tuple[str, ...]] = []
    current: list[str] = []

    def flush():
        if current:
            lines.append(tuple(current))
            current.clear()

    for token in _tokens(cells):
        if len(token) > line_width:
            # Oversized tokens start on a fresh line and break at
            # grapheme boundaries; the tail chunk stays open for joins.
            flush()
            for start in range(0, len(token), line_width):
                chunk = token[start : start + line_width]
                if len(chunk) == line_width:
                    lines.append(chunk)
                else:
                    current.extend(chunk)
        elif not current:
            current.extend(token)
        elif len(current) + 1 + len(token) <= line_width:
            current.append(" ")
            current.extend(token)
        else:
            flush()
            current.extend(token)
    flush()
    return lines


def _tokens(cells: tuple[str, ...]):
    """Yield space-separated token slices of a grapheme sequence."""
    token: list[str] = []
    for g in cells:
        if g == " ":
            if token:
                yield tuple(token)
                token = []
        else:
            token.append(g)
    if token:
        yield tuple(token)
