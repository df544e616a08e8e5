"""Pure state machine for grading and learner progression.

Rules: linear lesson progression; one red gem lost per mistake; running
out of gems locks the learner out for five minutes and resets the lesson
in progress; when the lockout has expired at the next attempt, gems
refill; a daily streak counts consecutive completion days; a daily quest
counts lessons completed today.

Every transition takes the current time as an argument and returns a new
state, so identical inputs always produce identical outputs. Callers
persist states and serialize transitions per student.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from datetime import date, datetime, timedelta, timezone
from typing import Sequence

from .course_builder import CM, Exercise
from .textnorm import normalize_form

LOCKOUT_SECONDS = 300  # five minutes


class ShapeMismatch(Exception):
    """Submission payload does not match the exercise kind."""


class WrongCourse(Exception):
    pass


class LessonIncomplete(Exception):
    pass


@dataclass(frozen=True)
class GameConfig:
    max_gems: int = 3
    quest_lessons: int = 2  # daily quest: complete this many lessons


@dataclass(frozen=True)
class Gems:
    current: int
    max: int


@dataclass(frozen=True)
class Streak:
    days: int
    last_active_date: str | None  # ISO date, UTC


@dataclass(frozen=True)
class Quest:
    lessons_completed_today: int
    date: str | None  # ISO date, UTC
    target: int


@dataclass(frozen=True)
class LessonRun:
    exercise_index: int
    mistakes: int


@dataclass(frozen=True)
class StudentState:
    student_id: str
    course_id: str
    cursor: tuple[int, int]  # (section_index, lesson_index)
    lesson_run: LessonRun | None
    gems: Gems
    lockout_until: int | None  # UTC seconds
    streak: Streak
    quest: Quest
    completed: bool = False

    def to_dict(self) -> dict:
        return {
            "student_id": self.student_id,
            "course_id": self.course_id,
            "cursor": list(self.cursor),
            "lesson_run": (
                None
                if self.lesson_run is None
                else {"exercise_index": self.lesson_run.exercise_index, "mistakes": self.lesson_run.mistakes}
            ),
            "gems": {"current": self.gems.current, "max": self.gems.max},
            "lockout_until": self.lockout_until,
            "streak": {"days": self.streak.days, "last_active_date": self.streak.last_active_date},
            "quest": {
                "lessons_completed_today": self.quest.lessons_completed_today,
                "date": self.quest.date,
                "target": self.quest.target,
            },
            "completed": self.completed,
        }

    @staticmethod
    def from_dict(data: dict) -> "StudentState":
        run = data["lesson_run"]
        return StudentState(
            student_id=data["student_id"],
            course_id=data["course_id"],
            cursor=(data["cursor"][0], data["cursor"][1]),
            lesson_run=None if run is None else LessonRun(run["exercise_index"], run["mistakes"]),
            gems=Gems(data["gems"]["current"], data["gems"]["max"]),
            lockout_until=data["lockout_until"],
            streak=Streak(data["streak"]["days"], data["streak"]["last_active_date"]),
            quest=Quest(
                data["quest"]["lessons_completed_today"],
                data["quest"]["date"],
                data["quest"]["target"],
            ),
            completed=data["completed"],
        )


@dataclass(frozen=True)
class GradeResult:
    correct: bool
    expected: tuple[str, ...] | str | None  # answer echo for the UI reveal
    gem_delta: int  # 0 or -1
    locked_out: bool
    lockout_remaining_s: int


def new_state(student_id: str, course_id: str, cfg: GameConfig = GameConfig()) -> StudentState:
    return StudentState(
        student_id=student_id,
        course_id=course_id,
        cursor=(0, 0),
        lesson_run=None,
        gems=Gems(current=cfg.max_gems, max=cfg.max_gems),
        lockout_until=None,
        streak=Streak(days=0, last_active_date=None),
        quest=Quest(lessons_completed_today=0, date=None, target=cfg.quest_lessons),
    )


def grade(exercise: Exercise, submission) -> bool:
    """TS: order- and length-sensitive normalized token comparison.
    CM: exact concept id equality."""
    if exercise.kind == CM:
        if not isinstance(submission, str):
            raise ShapeMismatch(f"{exercise.id}: CM submission must be a concept id string")
        return submission == exercise.answer
    if not isinstance(submission, (list, tuple)) or not all(
        isinstance(t, str) for t in submission
    ):
        raise ShapeMismatch(f"{exercise.id}: TS submission must be a list of tokens")
    expected = [normalize_form(t) for t in exercise.answer]
    got = [normalize_form(t) for t in submission]
    return got == expected


def attempt(
    state: StudentState,
    exercise: Exercise,
    submission,
    now: int,
    course_id: str | None = None,
) -> tuple[StudentState, GradeResult]:
    """Grade one submission and evolve the state.

    During an active lockout the attempt is rejected and the state is
    untouched; at or past the deadline gems refill and the lockout
    clears before grading. A mistake burns a gem; the mistake that
    empties the gems starts the lockout and wipes the lesson run.
    """
    if course_id is not None and course_id != state.course_id:
        raise WrongCourse(f"state is for course {state.course_id!r}, not {course_id!r}")
    if state.lockout_until is not None:
        if now < state.lockout_until:
            return state, GradeResult(
                correct=False,
                expected=None,
                gem_delta=0,
                locked_out=True,
                lockout_remaining_s=state.lockout_until - now,
            )
        state = replace(state, gems=Gems(state.gems.max, state.gems.max), lockout_until=None)

    run = state.lesson_run or LessonRun(exercise_index=0, mistakes=0)
    if grade(exercise, submission):
        next_state = replace(state, lesson_run=LessonRun(run.exercise_index + 1, run.mistakes))
        return next_state, GradeResult(
            correct=True, expected=exercise.answer, gem_delta=0, locked_out=False, lockout_remaining_s=0
        )

    remaining = state.gems.current - 1
    if remaining <= 0:
        locked = replace(
            state,
            gems=Gems(0, state.gems.max),
            lockout_until=now + LOCKOUT_SECONDS,
            lesson_run=None,  # lesson must be retried after the wait
        )
        return locked, GradeResult(
            correct=False,
            expected=exercise.answer,
            gem_delta=-1,
            locked_out=True,
            lockout_remaining_s=LOCKOUT_SECONDS,
        )
    bruised = replace(
        state,
        gems=Gems(remaining, state.gems.max),
        lesson_run=LessonRun(run.exercise_index, run.mistakes + 1),
    )
    return bruised, GradeResult(
        correct=False, expected=exercise.answer, gem_delta=-1, locked_out=False, lockout_remaining_s=0
    )


def complete_lesson(
    state: StudentState,
    now: int,
    lesson_size: int,
    section_sizes: Sequence[int],
) -> StudentState:
    """Advance the cursor after a fully passed lesson; update streak and quest."""
    run = state.lesson_run
    if run is None or run.exercise_index < lesson_size:
        done = 0 if run is None else run.exercise_index
        raise LessonIncomplete(f"{done}/{lesson_size} exercises passed")

    today = _utc_date(now)
    streak = _advance_streak(state.streak, today)
    quest = _advance_quest(state.quest, today)

    section, lesson = state.cursor
    completed = state.completed
    if lesson + 1 < section_sizes[section]:
        cursor = (section, lesson + 1)
    elif section + 1 < len(section_sizes):
        cursor = (section + 1, 0)
    else:
        cursor = state.cursor
        completed = True
    return replace(
        state, cursor=cursor, lesson_run=None, streak=streak, quest=quest, completed=completed
    )


def lockout_remaining(state: StudentState, now: int) -> int:
    if state.lockout_until is None:
        return 0
    return max(0, state.lockout_until - now)


def _utc_date(now: int) -> date:
    return datetime.fromtimestamp(now, tz=timezone.utc).date()


def _advance_streak(streak: Streak, today: date) -> Streak:
    last = date.fromisoformat(streak.last_active_date) if streak.last_active_date else None
    if last == today:
        return streak
    if last is not None and today - last == timedelta(days=1):
        return Streak(days=streak.days + 1, last_active_date=today.isoformat())
    return Streak(days=1, last_active_date=today.isoformat())


def _advance_quest(quest: Quest, today: date) -> Quest:
    done = quest.lessons_completed_today if quest.date == today.isoformat() else 0
    return Quest(lessons_completed_today=done + 1, date=today.isoformat(), target=quest.target)
