"""Injectable wall-clock so schedule and window logic is testable.

All time-dependent decisions (reservation windows, calendar rendering,
lab gating) read the clock they were handed, never the system time
directly; tests use ManualClock to travel.
"""

from __future__ import annotations

import threading
from datetime import datetime, timedelta


class Clock:
    def now(self) -> datetime:
        raise NotImplementedError


class SystemClock(Clock):
    def now(self) -> datetime:
        return datetime.now()


class ManualClock(Clock):
    def __init__(self, start: datetime | str):
        self._now = datetime.fromisoformat(start) if isinstance(start, str) else start
        self._lock = threading.Lock()

    def now(self) -> datetime:
        with self._lock:
            return self._now

    def set(self, value: datetime | str) -> None:
        with self._lock:
            self._now = datetime.fromisoformat(value) if isinstance(value, str) else value

    def advance(self, seconds: float) -> None:
        with self._lock:
            self._now += timedelta(seconds=seconds)
