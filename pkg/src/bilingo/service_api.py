"""HTTP facade over course packs, the game engine, and the state store.

Endpoints live under /api; an optional static directory (the built web
player) is mounted at the root. Lesson payloads never include answers:
TS exercises ship prompt + shuffled bank, CM exercises ship prompt +
option cards. Server time is authoritative for lockout and streaks;
clients only ever see remaining seconds.

Per-student mutations are serialized with an in-process lock, matching
the engine's single-writer contract.
"""
from __future__ import annotations

import threading
import time
from pathlib import Path
from typing import Any, Callable

from fastapi import FastAPI
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .course_builder import CM, CoursePack, Exercise, Lesson
from .game_engine import ShapeMismatch, StudentState, attempt, complete_lesson
from .persistence import StateStore, load_pack


class ApiError(Exception):
    def __init__(self, code: str, message: str, status: int, retry_after_s: int | None = None):
        super().__init__(message)
        self.code = code
        self.message = message
        self.status = status
        self.retry_after_s = retry_after_s

    def body(self) -> dict:
        body: dict[str, Any] = {"code": self.code, "message": self.message}
        if self.retry_after_s is not None:
            body["retry_after_s"] = self.retry_after_s
        return body


class SectionSummary(BaseModel):
    subject: str
    lessons: int


class CourseSummary(BaseModel):
    id: str
    language: str
    sections: list[SectionSummary]


class AnswerRequest(BaseModel):
    student: str
    exercise_id: str
    payload: Any
    nonce: str | None = None


def load_packs(path: str | Path) -> dict[str, CoursePack]:
    """Load a single pack file or every *.json pack in a directory."""
    path = Path(path)
    files = sorted(path.glob("*.json")) if path.is_dir() else [path]
    packs: dict[str, CoursePack] = {}
    for file in files:
        pack = load_pack(file)
        if pack.course_id in packs:
            raise ValueError(f"duplicate course_id {pack.course_id!r} in {file}")
        packs[pack.course_id] = pack
    return packs


def public_state(state: StudentState, now: int) -> dict:
    """Learner-visible projection; never carries answer material."""
    remaining = 0
    if state.lockout_until is not None:
        remaining = max(0, state.lockout_until - now)
    run = state.lesson_run
    return {
        "student_id": state.student_id,
        "course_id": state.course_id,
        "cursor": {"section": state.cursor[0], "lesson": state.cursor[1]},
        "lesson_run": None if run is None else {"exercise_index": run.exercise_index},
        "gems": {"current": state.gems.current, "max": state.gems.max},
        "streak": {"days": state.streak.days, "last_active_date": state.streak.last_active_date},
        "quest": {
            "done": state.quest.lessons_completed_today,
            "target": state.quest.target,
            "date": state.quest.date,
        },
        "completed": state.completed,
        "lockout_remaining_s": remaining,
    }


def _exercise_payload(exercise: Exercise, glossary: dict) -> dict:
    if exercise.kind == CM:
        return {
            "id": exercise.id,
            "kind": exercise.kind,
            "prompt": exercise.prompt,
            "options": [
                {"concept_id": c, "gloss": glossary.get(c, c.lower())} for c in exercise.bank
            ],
        }
    return {
        "id": exercise.id,
        "kind": exercise.kind,
        "prompt": exercise.prompt,
        "bank": list(exercise.bank),
    }


def create_app(
    packs: dict[str, CoursePack],
    store: StateStore,
    clock: Callable[[], float] = time.time,
    ui_dir: str | Path | None = None,
) -> FastAPI:
    app = FastAPI(title="bilingo", docs_url=None, redoc_url=None)
    student_locks: dict[str, threading.Lock] = {}
    locks_guard = threading.Lock()
    # Retried answer POSTs (same student/exercise/nonce) replay the stored
    # response instead of mutating state twice.
    answer_cache: dict[tuple[str, str, str], dict] = {}

    def student_lock(student_id: str) -> threading.Lock:
        with locks_guard:
            return student_locks.setdefault(student_id, threading.Lock())

    def now_s() -> int:
        return int(clock())

    def pack_or_404(course_id: str) -> CoursePack:
        pack = packs.get(course_id)
        if pack is None:
            raise ApiError("NOT_FOUND", f"unknown course {course_id!r}", 404)
        return pack

    def reject_if_locked(state: StudentState, now: int) -> None:
        if state.lockout_until is not None and now < state.lockout_until:
            raise ApiError(
                "LOCKED_OUT",
                "out of red gems; wait before trying a lesson again",
                429,
                retry_after_s=state.lockout_until - now,
            )

    @app.exception_handler(ApiError)
    async def api_error_handler(_request, exc: ApiError):
        return JSONResponse(exc.body(), status_code=exc.status)

    @app.get("/api/courses", response_model=list[CourseSummary])
    def list_courses() -> list[CourseSummary]:
        return [
            CourseSummary(
                id=pack.course_id,
                language=pack.language,
                sections=[
                    SectionSummary(subject=s.spec.subject, lessons=len(s.lessons))
                    for s in pack.sections
                ],
            )
            for _, pack in sorted(packs.items())
        ]

    @app.get("/api/courses/{course_id}/sections/{section}/lessons/{lesson}")
    def get_lesson(course_id: str, section: int, lesson: int, student: str) -> dict:
        pack = pack_or_404(course_id)
        if not (0 <= section < len(pack.sections)):
            raise ApiError("NOT_FOUND", f"no section {section}", 404)
        course_section = pack.sections[section]
        if not (0 <= lesson < len(course_section.lessons)):
            raise ApiError("NOT_FOUND", f"no lesson {lesson} in section {section}", 404)
        now = now_s()
        with student_lock(student):
            state = store.get_or_create(student, course_id)
        reject_if_locked(state, now)
        if not state.completed and (section, lesson) > state.cursor:
            raise ApiError("LESSON_LOCKED", "complete earlier lessons first", 403)
        body = _lesson_payload(pack, course_section.lessons[lesson], section, lesson)
        return body

    def _lesson_payload(pack: CoursePack, lesson: Lesson, section_i: int, lesson_i: int) -> dict:
        glossary = dict(pack.glossary)
        return {
            "course_id": pack.course_id,
            "section_index": section_i,
            "subject": pack.sections[section_i].spec.subject,
            "lesson_index": lesson_i,
            "exercise_count": len(lesson.exercises),
            "exercises": [_exercise_payload(e, glossary) for e in lesson.exercises],
        }

    @app.post("/api/courses/{course_id}/answers")
    def post_answer(course_id: str, body: AnswerRequest) -> dict:
        pack = pack_or_404(course_id)
        now = now_s()
        with student_lock(body.student):
            if body.nonce is not None:
                cached = answer_cache.get((body.student, body.exercise_id, body.nonce))
                if cached is not None:
                    return cached
            state = store.get_or_create(body.student, course_id)
            reject_if_locked(state, now)
            if state.completed:
                raise ApiError("NOT_FOUND", "course already completed", 404)
            section_i, lesson_i = state.cursor
            lesson = pack.sections[section_i].lessons[lesson_i]
            exercise = next((e for e in lesson.exercises if e.id == body.exercise_id), None)
            if exercise is None:
                raise ApiError(
                    "NOT_FOUND", f"exercise {body.exercise_id!r} is not in the current lesson", 404
                )
            try:
                new_state, result = attempt(state, exercise, body.payload, now, course_id=course_id)
            except ShapeMismatch as exc:
                raise ApiError("SHAPE_MISMATCH", str(exc), 400) from exc
            lesson_done = (
                result.correct
                and new_state.lesson_run is not None
                and new_state.lesson_run.exercise_index >= len(lesson.exercises)
            )
            if lesson_done:
                new_state = complete_lesson(
                    new_state,
                    now,
                    lesson_size=len(lesson.exercises),
                    section_sizes=[len(s.lessons) for s in pack.sections],
                )
            store.commit(
                new_state,
                {
                    "kind": "attempt",
                    "student_id": body.student,
                    "course_id": course_id,
                    "exercise_id": body.exercise_id,
                    "payload": body.payload,
                    "nonce": body.nonce,
                    "now": now,
                    "completed_lesson": lesson_done,
                },
            )
            expected = result.expected
            response = {
                "correct": result.correct,
                "expected": list(expected) if isinstance(expected, tuple) else expected,
                "gem_delta": result.gem_delta,
                "locked_out": result.locked_out,
                "lockout_remaining_s": result.lockout_remaining_s,
                "lesson_completed": lesson_done,
                "state": public_state(new_state, now),
            }
            if body.nonce is not None:
                answer_cache[(body.student, body.exercise_id, body.nonce)] = response
            return response

    @app.get("/api/students/{student_id}/progress")
    def get_progress(student_id: str, course: str) -> dict:
        pack_or_404(course)
        now = now_s()
        with student_lock(student_id):
            state = store.get_or_create(student_id, course)
        return public_state(state, now)

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
