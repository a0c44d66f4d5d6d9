"""File-backed document store with atomic writes and version counters.

Documents live under ``<data_dir>/<kind>/<id>.json`` as canonical JSON
(sorted keys, LF terminated). Writes go to a temp file in the same
directory followed by an atomic rename, so readers never observe a partial
document; a crash between the two leaves the previous version intact.
"""

from __future__ import annotations

import json
import os
import tempfile
import uuid
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .errors import NotFoundError, StorageError

KINDS = ("model", "session", "matrix")


def canonical_json(payload: dict[str, Any]) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"


@dataclass(frozen=True)
class StoredDocument:
    kind: str
    id: str
    version: int
    payload: dict[str, Any]


class DocumentStore:
    def __init__(self, data_dir: str | Path):
        self.root = Path(data_dir)
        for kind in KINDS:
            (self.root / kind).mkdir(parents=True, exist_ok=True)

    def _path(self, kind: str, doc_id: str) -> Path:
        if kind not in KINDS:
            raise StorageError(f"unknown document kind '{kind}'")
        if not doc_id or "/" in doc_id or doc_id.startswith("."):
            raise StorageError(f"invalid document id '{doc_id}'")
        return self.root / kind / f"{doc_id}.json"

    def new_id(self) -> str:
        return uuid.uuid4().hex[:12]

    def exists(self, kind: str, doc_id: str) -> bool:
        return self._path(kind, doc_id).exists()

    def save(self, kind: str, doc_id: str, payload: dict[str, Any]) -> StoredDocument:
        """Persist a new version (previous version + 1, or 1)."""
        path = self._path(kind, doc_id)
        version = 1
        if path.exists():
            version = self._read(path)["version"] + 1
        document = {"kind": kind, "id": doc_id, "version": version, "payload": payload}
        data = canonical_json(document)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{doc_id}.", suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as handle:
                handle.write(data)
                handle.flush()
                os.fsync(handle.fileno())
            os.replace(tmp, path)
        except OSError as exc:
            raise StorageError(f"failed to persist {kind}/{doc_id}: {exc}") from exc
        finally:
            if os.path.exists(tmp):
                os.unlink(tmp)
        return StoredDocument(kind, doc_id, version, payload)

    def load(self, kind: str, doc_id: str) -> StoredDocument:
        path = self._path(kind, doc_id)
        if not path.exists():
            raise NotFoundError(f"no {kind} with id '{doc_id}'")
        raw = self._read(path)
        return StoredDocument(raw["kind"], raw["id"], raw["version"], raw["payload"])

    def _read(self, path: Path) -> dict[str, Any]:
        try:
            with open(path, encoding="utf-8") as handle:
                return json.load(handle)
        except (OSError, json.JSONDecodeError) as exc:
            raise StorageError(f"cannot read document {path.name}: {exc}") from exc

    def list_ids(self, kind: str) -> list[str]:
        directory = self.root / kind
        if kind not in KINDS:
            raise StorageError(f"unknown document kind '{kind}'")
        return sorted(p.stem for p in directory.glob("*.json"))
