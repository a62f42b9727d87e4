"""Server configuration document.

One JSON document configures the whole deployment (port, data directory,
stream rates, scheduler windows); per-experiment physics lives in the
experiment catalog in the data directory.  SEALAB_PORT and
SEALAB_DATA_DIR environment variables override the document.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field


@dataclass
class SchedulerConfig:
    day_start: str = "09:00"      # earliest selectable cell
    last_start: str = "16:30"     # latest selectable cell
    day_end: str = "18:30"        # the 2h block must end by this time
    slot_minutes: int = 30
    duration_minutes: int = 120
    cooldown_minutes: int = 30


@dataclass
class StreamConfig:
    decimate_hz: float = 20.0     # frame rate sent to browsers
    backfill_seconds: float = 10.0
    client_queue: int = 4096      # per-client buffer; oldest dropped beyond
    pace: float = 0.0             # simulated seconds per wall second; 0 = flat out


@dataclass
class ServerConfig:
    port: int = 8000
    data_dir: str = "./sealab-data"
    scheduler: SchedulerConfig = field(default_factory=SchedulerConfig)
    stream: StreamConfig = field(default_factory=StreamConfig)

    @staticmethod
    def load(path=None) -> "ServerConfig":
        doc = {}
        if path is not None:
            with open(path) as fh:
                doc = json.load(fh)
        cfg = ServerConfig(
            port=int(doc.get("port", 8000)),
            data_dir=str(doc.get("data_dir", "./sealab-data")),
            scheduler=SchedulerConfig(**doc.get("scheduler", {})),
            stream=StreamConfig(**doc.get("stream", {})),
        )
        if os.environ.get("SEALAB_PORT"):
            cfg.port = int(os.environ["SEALAB_PORT"])
        if os.environ.get("SEALAB_DATA_DIR"):
            cfg.data_dir = os.environ["SEALAB_DATA_DIR"]
        return cfg
