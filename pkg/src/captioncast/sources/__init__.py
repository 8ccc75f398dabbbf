"""Pluggable transcript sources: scripted replay, external-ASR mapping,
and deterministic error injection."""

from .external import AsrMessageMapper, ExternalAsrMessage
from .inject import inject_errors, perturb_text, scramble_word
from .script import (
    ScriptEntry,
    entry_to_event,
    load_script,
    open_replay_source,
    parse_entry,
    save_script,
    validate_script,
)

__all__ = [
    "AsrMessageMapper",
    "ExternalAsrMessage",
    "ScriptEntry",
    "entry_to_event",
    "inject_errors",
    "load_script",
    "open_replay_source",
    "parse_entry",
    "perturb_text",
    "save_script",
    "scramble_word",
    "validate_script",
]
