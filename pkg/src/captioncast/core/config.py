"""Caption design parameters and atomic config patching."""

import json
from dataclasses import dataclass, replace, fields as dc_fields
from pathlib import Path

from ..errors import OutOfRange, UnknownField

# field -> (lo, hi), inclusive unless noted; None entries are validated ad hoc.
_NUMERIC_RANGES = {
    "char_size_pt": (8, 96),
    "opacity": (0.0, 1.0),
    "reveal_rate": (1, 120),
    "max_lines": (1, 8),
    "line_width": (8, 80),
    "linger_ms": (500, 60000),
    "retract_linger_ms": (0, 10000),
}

_INT_FIELDS = {"max_lines", "line_width", "linger_ms", "retract_linger_ms"}


@dataclass(frozen=True)
class CaptionConfig:
    """Display and timing parameters for one captioning session.

    ``mirror_scale`` is the hearing-face shrink factor; ``reveal_rate``
    is in graphemes per second; ``linger_ms`` is how long a fully
    revealed final caption stays up, ``retract_linger_ms`` how long a
    retracted caption stays visible with its flag.
    """

    char_size_pt: float = 36.0
    color_rgba: tuple[int, int, int, int] = (255, 255, 255, 255)
    opacity: float = 1.0
    font_id: str = "sans-serif"
    reveal_rate: float = 15.0
    max_lines: int = 3
    line_width: int = 24
    linger_ms: int = 4000
    retract_linger_ms: int = 1500
    mirror_scale: float = 0.5
    config_rev: int = 0

    def to_dict(self) -> dict:
        return {
            "char_size_pt": self.char_size_pt,
            "color_rgba": list(self.color_rgba),
            "opacity": self.opacity,
            "font_id": self.font_id,
            "reveal_rate": self.reveal_rate,
            "max_lines": self.max_lines,
            "line_width": self.line_width,
            "linger_ms": self.linger_ms,
            "retract_linger_ms": self.retract_linger_ms,
            "mirror_scale": self.mirror_scale,
            "config_rev": self.config_rev,
        }


_FIELD_NAMES = {f.name for f in dc_fields(CaptionConfig)}


def validate_config(patch: dict, current: CaptionConfig) -> CaptionConfig:
    """Merge ``patch`` over ``current``, atomically.

    Returns a new config with ``config_rev`` incremented iff every
    patched field exists and is within range; otherwise raises and
    ``current`` stays untouched (no partial application). ``config_rev``
    in the patch is accepted and ignored so a dumped config round-trips.
    """
    unknown = [k for k in patch if k not in _FIELD_NAMES]
    if unknown:
        raise UnknownField(unknown)

    bad: dict[str, str] = {}
    cleaned: dict[str, object] = {}
    for key, value in patch.items():
        if key == "config_rev":
            continue
        if key == "font_id":
            if not isinstance(value, str) or not value:
                bad[key] = "must be a non-empty string"
            else:
                cleaned[key] = value
        elif key == "color_rgba":
            ok = (
                isinstance(value, (list, tuple))
                and len(value) == 4
                and all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in value)
                and all(0 <= c <= 255 for c in value)
            )
            if ok:
                cleaned[key] = tuple(int(c) for c in value)
            else:
                bad[key] = "must be four channels in [0, 255]"
        elif key == "mirror_scale":
            if isinstance(value, (int, float)) and not isinstance(value, bool) and 0 < value <= 1:
                cleaned[key] = float(value)
            else:
                bad[key] = "must be in (0, 1]"
        else:
            lo, hi = _NUMERIC_RANGES[key]
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                bad[key] = "must be a number"
            elif not lo <= value <= hi:
                bad[key] = f"must be in [{lo}, {hi}]"
            elif key in _INT_FIELDS:
                if isinstance(value, float) and not value.is_integer():
                    bad[key] = "must be an integer"
                else:
                    cleaned[key] = int(value)
            else:
                cleaned[key] = float(value)
    if bad:
        raise OutOfRange(bad)

    return replace(current, config_rev=current.config_rev + 1, **cleaned)


def load_config_file(path: str | Path, base: CaptionConfig | None = None) -> CaptionConfig:
    """Load a JSON config file (full or partial) over ``base``."""
    with open(path, encoding="utf-8") as f:
        patch = json.load(f)
    if not isinstance(patch, dict):
        raise OutOfRange({"<root>": "config file must hold a JSON object"})
    cfg = validate_config(patch, base or CaptionConfig())
    return replace(cfg, config_rev=(base.config_rev if base else 0))
