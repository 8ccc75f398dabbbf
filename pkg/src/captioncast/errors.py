"""Exception types shared across the package."""


class CaptioncastError(Exception):
    """Base class for all captioncast errors."""


class MalformedEvent(CaptioncastError):
    """Transcript event violates the event contract; the event is dropped."""


class NotFound(CaptioncastError):
    """Referenced utterance does not exist."""


class InvalidState(CaptioncastError):
    """Operation not allowed for the utterance's current status."""


class InvalidFace(CaptioncastError):
    """Frame transform applied to the wrong display face."""


class OutOfRange(CaptioncastError):
    """Config patch has fields outside their allowed ranges."""

    def __init__(self, fields: dict[str, str]):
        self.fields = fields
        detail = "; ".join(f"{k}: {v}" for k, v in sorted(fields.items()))
        super().__init__(f"config fields out of range: {detail}")


class UnknownField(CaptioncastError):
    """Config patch names fields that do not exist."""

    def __init__(self, fields: list[str]):
        self.fields = sorted(fields)
        super().__init__(f"unknown config fields: {', '.join(self.fields)}")


class MalformedScript(CaptioncastError):
    """Replay script violates the script contract."""


class CorruptLog(CaptioncastError):
    """Session log has an unreadable record."""

    def __init__(self, line_no: int, reason: str):
        self.line_no = line_no
        self.reason = reason
        super().__init__(f"corrupt log record at line {line_no}: {reason}")


class NothingToRetract(CaptioncastError):
    """No final, non-retracted utterance exists."""


class Forbidden(CaptioncastError):
    """Sender's role may not perform this action."""


class BadHello(CaptioncastError):
    """Client registration with an unknown role or session."""
