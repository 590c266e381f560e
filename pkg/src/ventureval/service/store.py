"""Embedded persistence for the validation service.

A single append-only ``events.jsonl`` acts as both write-ahead log and the
knowledge repository: every committed write is one fsynced JSON line, and
state is rebuilt by replay on startup. Trained model blobs live next to
the log (atomic rename) and are referenced from a ``model_trained`` event
by path and content hash.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable


@dataclass
class VersionedModel:
    version: int
    choices: dict[str, list[str]]
    free_text: dict[str, str]
    created_at: float


@dataclass
class VentureRecord:
    venture_id: str
    tags: list[str]
    versions: list[VersionedModel] = field(default_factory=list)

    @property
    def latest(self) -> VersionedModel:
        return self.versions[-1]


@dataclass
class MentorRecord:
    mentor_id: str
    token: str
    static_tags: list[str]
    bio: str = ""


@dataclass
class AssignmentRecord:
    assignment_id: str
    round_id: str
    mentor_id: str
    match_score: float


@dataclass
class RoundRecord:
    round_id: str
    venture_id: str
    model_version: int
    schema_name: str
    m: int
    assignments: list[AssignmentRecord]
    sheets: dict[str, dict] = field(default_factory=dict)  # mentor_id -> sheet
    status: str = "open"
    created_at: float = 0.0
    closed_at: float | None = None
    aggregate: dict | None = None  # filled at close


@dataclass
class TrainedModelRecord:
    version: int
    path: str
    sha256: str
    manifest: dict
    holdout_mcc: float | None
    crowd_mcc: float | None


class Store:
    """Replayed in-memory state over an append-only event log."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        (self.root / "models").mkdir(exist_ok=True)
        self.log_path = self.root / "events.jsonl"
        self.lock = threading.RLock()
        self._seq = 0
        self.ventures: dict[str, VentureRecord] = {}
        self.mentors: dict[str, MentorRecord] = {}
        self.rounds: dict[str, RoundRecord] = {}
        self.labels: dict[str, dict] = {}
        self.trained: list[TrainedModelRecord] = []
        self._log_file = None
        self._replay()
        self._log_file = open(self.log_path, "a", encoding="utf-8")

    # -- event log ------------------------------------------------------

    def _replay(self) -> None:
        if not self.log_path.exists():
            return
        with open(self.log_path, encoding="utf-8") as f:
            for line in f:
                line = line.strip()
                if not line:
                    continue
                event = json.loads(line)
                self._apply(event)
                self._seq = event["seq"]

    def append(self, kind: str, data: dict[str, Any]) -> dict:
        with self.lock:
            self._seq += 1
            event = {"seq": self._seq, "kind": kind, "ts": time.time(), "data": data}
            self._log_file.write(json.dumps(event) + "\n")
            self._log_file.flush()
            os.fsync(self._log_file.fileno())
            self._apply(event)
            return event

    def events(self) -> Iterable[dict]:
        """Committed events, oldest first (the knowledge repository view)."""
        if not self.log_path.exists():
            return []
        out = []
        with open(self.log_path, encoding="utf-8") as f:
            for line in f:
                line = line.strip()
                if line:
                    out.append(json.loads(line))
        return out

    def close(self) -> None:
        if self._log_file is not None:
            self._log_file.close()
            self._log_file = None

    # -- state transitions ------------------------------------------------

    def _apply(self, event: dict) -> None:
        kind = event["kind"]
        d = event["data"]
        if kind == "venture_created":
            self.ventures[d["venture_id"]] = VentureRecord(
                venture_id=d["venture_id"], tags=d.get("tags", [])
            )
        elif kind == "model_saved":
            v = self.ventures[d["venture_id"]]
            v.versions.append(
                VersionedModel(
                    version=d["version"],
                    choices=d["choices"],
                    free_text=d.get("free_text", {}),
                    created_at=event["ts"],
                )
            )
        elif kind == "mentor_registered":
            self.mentors[d["mentor_id"]] = MentorRecord(
                mentor_id=d["mentor_id"],
                token=d["token"],
                static_tags=d.get("static_tags", []),
                bio=d.get("bio", ""),
            )
        elif kind == "round_opened":
            self.rounds[d["round_id"]] = RoundRecord(
                round_id=d["round_id"],
                venture_id=d["venture_id"],
                model_version=d["model_version"],
                schema_name=d["schema_name"],
                m=d["m"],
                assignments=[
                    AssignmentRecord(**a) for a in d["assignments"]
                ],
                created_at=event["ts"],
            )
        elif kind == "sheet_saved":
            r = self.rounds[d["round_id"]]
            r.sheets[d["mentor_id"]] = d["sheet"]
        elif kind == "round_closed":
            r = self.rounds[d["round_id"]]
            r.status = "closed"
            r.closed_at = event["ts"]
            r.aggregate = d.get("aggregate")
        elif kind == "label_saved":
            self.labels[d["venture_id"]] = {
                k: v for k, v in d.items() if k != "venture_id"
            }
        elif kind == "model_trained":
            self.trained.append(
                TrainedModelRecord(
                    version=d["version"],
                    path=d["path"],
                    sha256=d["sha256"],
                    manifest=d["manifest"],
                    holdout_mcc=d.get("holdout_mcc"),
                    crowd_mcc=d.get("crowd_mcc"),
                )
            )
        elif kind == "guidance_served":
            pass  # repository record only, no state change
        else:
            raise ValueError(f"unknown event kind {kind!r}")

    # -- model blobs ------------------------------------------------------

    def write_model_blob(self, version: int, payload: dict) -> tuple[str, str]:
        """Atomically write a trained-model document; returns (path, sha256)."""
        text = json.dumps(payload)
        digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
        final = self.root / "models" / f"model_v{version}.json"
        tmp = final.with_suffix(".tmp")
        tmp.write_text(text, encoding="utf-8")
        os.replace(tmp, final)
        return str(final), digest

    def read_model_blob(self, record: TrainedModelRecord) -> dict:
        return json.loads(Path(record.path).read_text(encoding="utf-8"))

    # -- queries ----------------------------------------------------------

    def labeled_snapshots(self) -> list[tuple[str, dict[str, list[str]], int]]:
        """(venture_id, latest choices, label) for every labeled venture."""
        out = []
        for vid, label in self.labels.items():
            venture = self.ventures.get(vid)
            if venture and venture.versions and "series_a" in label:
                out.append((vid, venture.latest.choices, int(label["series_a"])))
        return out

    def rounds_for(self, venture_id: str) -> list[RoundRecord]:
        return sorted(
            (r for r in self.rounds.values() if r.venture_id == venture_id),
            key=lambda r: r.created_at,
        )

    def latest_trained(self) -> TrainedModelRecord | None:
        return self.trained[-1] if self.trained else None
