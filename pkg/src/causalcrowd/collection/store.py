"""Embedded persistence for the collection service.

A single append-only JSON-lines journal records a full snapshot per event;
replay keeps the last snapshot per session plus the latest admin state. No
external database is needed at desk-study scale.
"""

from __future__ import annotations

import json
import os
import threading
from pathlib import Path
from typing import Optional


class JournalStore:
    """Append-only journal; pass data_dir=None for an in-memory store."""

    def __init__(self, data_dir: Optional[Path] = None):
        self.data_dir = Path(data_dir) if data_dir is not None else None
        self._lock = threading.Lock()
        self._handle = None
        if self.data_dir is not None:
            self.data_dir.mkdir(parents=True, exist_ok=True)
            self._handle = open(self.journal_path, "a")

    @property
    def journal_path(self) -> Path:
        return self.data_dir / "journal.jsonl"

    def append(self, event: dict) -> None:
        if self._handle is None:
            return
        line = json.dumps(event, sort_keys=True)
        with self._lock:
            self._handle.write(line + "\n")
            self._handle.flush()
            os.fsync(self._handle.fileno())

    def replay(self) -> tuple[dict[str, dict], Optional[dict]]:
        """Latest session snapshots keyed by id, and the latest admin state."""
        sessions: dict[str, dict] = {}
        admin: Optional[dict] = None
        if self.data_dir is None or not self.journal_path.exists():
            return sessions, admin
        with open(self.journal_path) as handle:
            for line in handle:
                line = line.strip()
                if not line:
                    continue
                event = json.loads(line)
                if event["type"] == "session":
                    sessions[event["state"]["id"]] = event["state"]
                elif event["type"] == "admin":
                    admin = event["state"]
        return sessions, admin

    def close(self) -> None:
        if self._handle is not None:
            self._handle.close()
            self._handle = None
