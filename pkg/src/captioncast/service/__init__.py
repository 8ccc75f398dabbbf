"""Network face of a captioning session: WebSocket fan-out, HTTP
control surface, JSONL persistence."""

from .logstore import LogRecord, LogReplayResult, SessionLogWriter, replay_log
from .runtime import Broadcast, SessionRuntime

__all__ = [
    "Broadcast",
    "LogRecord",
    "LogReplayResult",
    "SessionLogWriter",
    "SessionRuntime",
    "replay_log",
]
