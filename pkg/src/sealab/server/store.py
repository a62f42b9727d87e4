"""File-backed persistence: JSON documents in a data directory.

Writes go through a temp file + atomic rename so a crash never leaves a
half-written document.  Archives are directories written once and then
only read.
"""

from __future__ import annotations

import json
import os
from pathlib import Path


class Store:
    def __init__(self, data_dir):
        self.root = Path(data_dir)
        self.root.mkdir(parents=True, exist_ok=True)

    def path(self, *parts) -> Path:
        return self.root.joinpath(*parts)

    def exists(self, name: str) -> bool:
        return self.path(name).exists()

    def read_json(self, name: str, default=None):
        p = self.path(name)
        if not p.exists():
            return default
        with open(p) as fh:
            return json.load(fh)

    def write_json(self, name: str, doc) -> None:
        p = self.path(name)
        p.parent.mkdir(parents=True, exist_ok=True)
        tmp = p.with_suffix(p.suffix + ".tmp")
        with open(tmp, "w") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
        os.replace(tmp, p)

    def write_text(self, name: str, text: str) -> None:
        p = self.path(name)
        p.parent.mkdir(parents=True, exist_ok=True)
        tmp = p.with_suffix(p.suffix + ".tmp")
        with open(tmp, "w") as fh:
            fh.write(text)
        os.replace(tmp, p)

    def read_text(self, name: str) -> str:
        with open(self.path(name)) as fh:
            return fh.read()
