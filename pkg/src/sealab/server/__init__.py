"""Application server: sessions, prelab, scheduling, lab orchestration,
streaming, and archives behind an HTTP + newline-delimited-JSON API.
"""

from .config import ServerConfig
from .clock import Clock, ManualClock, SystemClock
from .core import LabServer

__all__ = ["ServerConfig", "Clock", "ManualClock", "SystemClock", "LabServer"]
