"""Write-once experiment archives.

Each archive directory holds the raw record (CSV + metadata), the measured
and ideal Bode diagrams, margin annotations, the design-state snapshot for
feedback runs, and the session's event log.  Archives are immutable after
finalize: reads return the stored bytes verbatim, so contents survive
restarts byte-identically.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from ..errors import NotFoundError
from ..plant import ExperimentRecord, record_from_csv
from ..sysid import BodeData
from .store import Store


@dataclass
class ArchiveHandle:
    archive_id: str
    summary: dict

    @property
    def user_id(self) -> str:
        return self.summary["user_id"]


class ArchiveStore:
    def __init__(self, store: Store):
        self.store = store

    def _dir(self, archive_id: str) -> str:
        return f"archives/{archive_id}"

    def exists(self, archive_id: str) -> bool:
        return self.store.path(self._dir(archive_id), "archive.json").exists()

    def next_id(self, experiment: str, stamp: str) -> str:
        base = f"{experiment}-{stamp}"
        n = 0
        candidate = base
        while self.exists(candidate):
            n += 1
            candidate = f"{base}-{n}"
        return candidate

    def write(
        self,
        archive_id: str,
        summary: dict,
        record: ExperimentRecord,
        record_meta: dict,
        measured: BodeData,
        ideal: BodeData,
    ) -> ArchiveHandle:
        d = self._dir(archive_id)
        if self.exists(archive_id):
            raise ValueError(f"archive '{archive_id}' already exists (archives are immutable)")
        self.store.write_text(f"{d}/record.csv", record.to_csv())
        self.store.write_json(f"{d}/record.meta.json", record_meta)
        self.store.write_text(f"{d}/bode.csv", measured.to_csv())
        self.store.write_text(f"{d}/bode_ideal.csv", ideal.to_csv())
        self.store.write_json(f"{d}/archive.json", summary)
        return ArchiveHandle(archive_id=archive_id, summary=summary)

    def summary(self, archive_id: str) -> dict:
        doc = self.store.read_json(f"{self._dir(archive_id)}/archive.json")
        if doc is None:
            raise NotFoundError(f"no archive '{archive_id}'")
        return doc

    def record_csv(self, archive_id: str) -> str:
        self.summary(archive_id)
        return self.store.read_text(f"{self._dir(archive_id)}/record.csv")

    def bode_csv(self, archive_id: str) -> str:
        self.summary(archive_id)
        return self.store.read_text(f"{self._dir(archive_id)}/bode.csv")

    def ideal_bode_csv(self, archive_id: str) -> str:
        self.summary(archive_id)
        return self.store.read_text(f"{self._dir(archive_id)}/bode_ideal.csv")

    def record(self, archive_id: str) -> ExperimentRecord:
        meta = self.store.read_json(f"{self._dir(archive_id)}/record.meta.json")
        return record_from_csv(self.record_csv(archive_id), meta)

    def list_ids(self) -> list:
        root = self.store.path("archives")
        if not root.exists():
            return []
        return sorted(p.name for p in root.iterdir() if (p / "archive.json").exists())
