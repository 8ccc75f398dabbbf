"""Millisecond clocks.

All state-machine timestamps are server monotonic milliseconds. The
virtual clock backs fast replay and tests; it only moves when told to.
"""

import time


class MonotonicClock:
    """Wall monotonic clock, milliseconds since an arbitrary origin."""

    def __init__(self):
        self._origin = time.monotonic()

    def now_ms(self) -> int:
        return int((time.monotonic() - self._origin) * 1000)


class VirtualClock:
    """Manually advanced clock; never moves backwards."""

    def __init__(self, start_ms: int = 0):
        self._now = start_ms

    def now_ms(self) -> int:
        return self._now

    def advance_to(self, t_ms: int) -> None:
        if t_ms > self._now:
            self._now = t_ms

    def advance_by(self, delta_ms: int) -> None:
        self.advance_to(self._now + delta_ms)
