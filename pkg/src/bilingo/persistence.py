"""File-backed storage for course packs and student states.

One JSON snapshot plus an append-only JSON-lines journal per store
directory. A commit appends the journal entry first, then replaces the
snapshot atomically (temp file + rename), so a crash at any point leaves
either the old or the new state on disk, never garbage; on load, journal
entries newer than the snapshot are folded back in.
"""
from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass, field
from pathlib import Path

from .course_builder import SCHEMA_VERSION, CoursePack, pack_to_json
from .game_engine import GameConfig, StudentState, new_state

SNAPSHOT_NAME = "students.json"
JOURNAL_NAME = "journal.jsonl"


class ParseError(Exception):
    """Unreadable document, with location where available."""


class SchemaMismatch(Exception):
    pass


class StorageFailure(Exception):
    pass


class InvalidState(Exception):
    """A state violating engine invariants was offered for commit."""


def load_pack(path: str | Path) -> CoursePack:
    """Load and schema-check a serialized course pack."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ParseError(f"{path}: top level must be an object")
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaMismatch(f"{path}: schema_version {version!r} not supported")
    try:
        return CoursePack.from_dict(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}: malformed pack: {exc}") from exc


def save_pack(pack: CoursePack, path: str | Path) -> None:
    _atomic_write(Path(path), pack_to_json(pack).encode("utf-8"))


def validate_state(state: StudentState) -> None:
    if not 0 <= state.gems.current <= state.gems.max:
        raise InvalidState(f"gems {state.gems.current}/{state.gems.max} out of range")
    if state.lockout_until is not None and state.gems.current != 0:
        raise InvalidState("lockout requires zero gems")
    if state.cursor[0] < 0 or state.cursor[1] < 0:
        raise InvalidState(f"negative cursor {state.cursor}")
    if state.quest.lessons_completed_today < 0 or state.streak.days < 0:
        raise InvalidState("negative counters")


@dataclass
class StateStore:
    """Student states under one directory; one writer at a time."""

    path: Path
    defaults: GameConfig = field(default_factory=GameConfig)

    def __post_init__(self) -> None:
        self.path = Path(self.path)
        self.path.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._students: dict[str, dict[str, StudentState]] = {}
        self._seq = 0
        self._load()

    @property
    def snapshot_path(self) -> Path:
        return self.path / SNAPSHOT_NAME

    @property
    def journal_path(self) -> Path:
        return self.path / JOURNAL_NAME

    def _load(self) -> None:
        if self.snapshot_path.exists():
            try:
                doc = json.loads(self.snapshot_path.read_text(encoding="utf-8"))
            except json.JSONDecodeError as exc:
                raise ParseError(f"{self.snapshot_path}: {exc.msg} at line {exc.lineno}") from exc
            self._seq = doc.get("seq", 0)
            for student_id, courses in doc.get("students", {}).items():
                self._students[student_id] = {
                    course_id: StudentState.from_dict(s) for course_id, s in courses.items()
                }
        # Fold in journal entries the snapshot missed (crash between the
        # journal append and the snapshot rename).
        for entry in self.journal_entries():
            if entry["seq"] > self._seq:
                state = StudentState.from_dict(entry["state"])
                self._students.setdefault(state.student_id, {})[state.course_id] = state
                self._seq = entry["seq"]

    def journal_entries(self) -> list[dict]:
        if not self.journal_path.exists():
            return []
        entries = []
        with self.journal_path.open(encoding="utf-8") as handle:
            for line in handle:
                line = line.strip()
                if line:
                    entries.append(json.loads(line))
        return entries

    def get(self, student_id: str, course_id: str) -> StudentState | None:
        with self._lock:
            return self._students.get(student_id, {}).get(course_id)

    def get_or_create(self, student_id: str, course_id: str) -> StudentState:
        """Return the stored state or persist a fresh one exactly once."""
        with self._lock:
            existing = self._students.get(student_id, {}).get(course_id)
            if existing is not None:
                return existing
            state = new_state(student_id, course_id, self.defaults)
            self._commit_locked(state, {"kind": "create"})
            return state

    def commit(self, state: StudentState, transition_record: dict) -> None:
        """Durably record a transition: journal line, then snapshot swap."""
        with self._lock:
            self._commit_locked(state, transition_record)

    def _commit_locked(self, state: StudentState, transition_record: dict) -> None:
        validate_state(state)
        seq = self._seq + 1
        entry = {
            "seq": seq,
            "student_id": state.student_id,
            "course_id": state.course_id,
            "record": transition_record,
            "state": state.to_dict(),
        }
        try:
            with self.journal_path.open("a", encoding="utf-8") as handle:
                handle.write(json.dumps(entry, ensure_ascii=False, sort_keys=True) + "\n")
                handle.flush()
                os.fsync(handle.fileno())
            self._seq = seq
            self._students.setdefault(state.student_id, {})[state.course_id] = state
            self._write_snapshot()
        except OSError as exc:
            raise StorageFailure(str(exc)) from exc

    def _write_snapshot(self) -> None:
        doc = {
            "seq": self._seq,
            "students": {
                student_id: {course_id: s.to_dict() for course_id, s in courses.items()}
                for student_id, courses in self._students.items()
            },
        }
        _atomic_write(
            self.snapshot_path,
            (json.dumps(doc, ensure_ascii=False, sort_keys=True, indent=2) + "\n").encode("utf-8"),
        )


def _atomic_write(path: Path, payload: bytes) -> None:
    """Write-temp + fsync + rename; readers never observe a partial file."""
    tmp = path.with_name(path.name + ".tmp")
    with tmp.open("wb") as handle:
        handle.write(payload)
        handle.flush()
        os.fsync(handle.fileno())
    os.replace(tmp, path)
