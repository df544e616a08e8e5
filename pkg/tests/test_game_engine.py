import pytest
from hypothesis import given
from hypothesis import strategies as st

from bilingo.course_builder import CM, TS1, Exercise
from bilingo.game_engine import (
    LOCKOUT_SECONDS,
    GameConfig,
    LessonIncomplete,
    LessonRun,
    ShapeMismatch,
    WrongCourse,
    attempt,
    complete_lesson,
    grade,
    new_state,
)

TS = Exercise(
    kind=TS1,
    id="ts1:t1",
    prompt="ela foi buscar cará",
    answer=("oho", "kara", "ipiaromo"),
    bank=("kara", "oho", "zuze", "ipiaromo"),
    source_sentence_id="t1",
    concept_ids=frozenset({"YAM"}),
)
CM_EX = Exercise(
    kind=CM,
    id="cm:t1:1:YAM",
    prompt="kara",
    answer="YAM",
    bank=("FISH", "YAM", "CACAO", "MANIOC"),
    source_sentence_id="t1",
    concept_ids=frozenset({"YAM"}),
)

DAY = 86400


def fresh(max_gems=3):
    return new_state("learner", "course-1", GameConfig(max_gems=max_gems))


def test_grade_ts_exact_order():
    assert grade(TS, ["oho", "kara", "ipiaromo"]) is True


def test_grade_ts_wrong_order():
    assert grade(TS, ["kara", "oho", "ipiaromo"]) is False


def test_grade_ts_wrong_length():
    assert grade(TS, ["oho", "kara"]) is False
    assert grade(TS, ["oho", "kara", "ipiaromo", "oho"]) is False


def test_grade_ts_casefold_insensitive():
    assert grade(TS, ["Oho", "KARA", "ipiaromo"]) is True


def test_grade_cm():
    assert grade(CM_EX, "YAM") is True
    assert grade(CM_EX, "FISH") is False


def test_grade_shape_mismatch():
    with pytest.raises(ShapeMismatch):
        grade(TS, "oho kara ipiaromo")
    with pytest.raises(ShapeMismatch):
        grade(CM_EX, ["YAM"])
    with pytest.raises(ShapeMismatch):
        grade(TS, [1, 2, 3])


def test_attempt_correct_advances_exercise():
    state, result = attempt(fresh(), TS, ["oho", "kara", "ipiaromo"], now=1000)
    assert result.correct is True
    assert result.gem_delta == 0
    assert state.gems.current == 3
    assert state.lesson_run == LessonRun(exercise_index=1, mistakes=0)


def test_attempt_mistake_burns_a_gem():
    state, result = attempt(fresh(), TS, ["kara"], now=1000)
    assert result.correct is False
    assert result.gem_delta == -1
    assert result.expected == ("oho", "kara", "ipiaromo")
    assert state.gems.current == 2
    assert state.lesson_run == LessonRun(exercise_index=0, mistakes=1)


def test_third_mistake_engages_lockout_and_resets_lesson():
    state = fresh()
    for i in range(2):
        state, result = attempt(state, TS, ["wrong"], now=1000 + i)
        assert result.locked_out is False
    state, result = attempt(state, TS, ["wrong"], now=1005)
    assert result.locked_out is True
    assert result.lockout_remaining_s == LOCKOUT_SECONDS
    assert state.gems.current == 0
    assert state.lockout_until == 1005 + LOCKOUT_SECONDS
    assert state.lesson_run is None


def test_attempt_rejected_during_lockout_state_unchanged():
    locked, _ = _locked_state(now=1000)
    deadline = locked.lockout_until
    after, result = attempt(locked, TS, ["oho", "kara", "ipiaromo"], now=deadline - 1)
    assert after == locked
    assert result.locked_out is True
    assert result.lockout_remaining_s == 1
    assert result.expected is None  # rejection must not reveal the answer
    assert result.gem_delta == 0


def test_attempt_at_deadline_refills_and_grades():
    locked, _ = _locked_state(now=1000)
    state, result = attempt(locked, TS, ["oho", "kara", "ipiaromo"], now=locked.lockout_until)
    assert result.correct is True
    assert state.gems.current == 3
    assert state.lockout_until is None


def test_wrong_course_rejected():
    with pytest.raises(WrongCourse):
        attempt(fresh(), TS, ["oho"], now=0, course_id="another-course")


def test_exactly_max_gems_mistakes_engage_lockout():
    for max_gems in (1, 2, 3, 5):
        state = fresh(max_gems=max_gems)
        for i in range(max_gems):
            assert state.lockout_until is None
            state, result = attempt(state, TS, ["wrong"], now=100 + i)
            assert state.gems.current == max_gems - i - 1
        assert state.lockout_until == 100 + max_gems - 1 + LOCKOUT_SECONDS
        assert result.locked_out is True


def test_no_transition_decrements_gems_and_advances_cursor():
    # Enumerate every reachable one-step transition from small states.
    for gems in range(1, 4):
        for submission in (["oho", "kara", "ipiaromo"], ["wrong"]):
            base = fresh()
            base = base.__class__.from_dict({**base.to_dict(), "gems": {"current": gems, "max": 3}})
            after, result = attempt(base, TS, submission, now=50)
            if result.gem_delta < 0:
                assert after.cursor == base.cursor
                assert (after.lesson_run or LessonRun(0, 0)).exercise_index <= (
                    base.lesson_run or LessonRun(0, 0)
                ).exercise_index


def test_attempt_is_pure():
    state = fresh()
    results = {attempt(state, TS, ["kara"], now=123) for _ in range(3)}
    assert len(results) == 1


def _locked_state(now):
    state = fresh()
    for i in range(3):
        state, result = attempt(state, TS, ["wrong"], now=now)
    return state, result


def _completed_run(state, size=4):
    return state.__class__.from_dict(
        {**state.to_dict(), "lesson_run": {"exercise_index": size, "mistakes": 0}}
    )


def test_complete_lesson_advances_within_section():
    state = _completed_run(fresh())
    done = complete_lesson(state, now=0, lesson_size=4, section_sizes=[4, 4])
    assert done.cursor == (0, 1)
    assert done.lesson_run is None


def test_complete_lesson_rolls_into_next_section():
    state = _completed_run(fresh())
    state = state.__class__.from_dict({**state.to_dict(), "cursor": [0, 3]})
    done = complete_lesson(state, now=0, lesson_size=4, section_sizes=[4, 4])
    assert done.cursor == (1, 0)
    assert done.completed is False


def test_complete_last_lesson_sets_course_complete():
    state = _completed_run(fresh())
    state = state.__class__.from_dict({**state.to_dict(), "cursor": [1, 3]})
    done = complete_lesson(state, now=0, lesson_size=4, section_sizes=[4, 4])
    assert done.completed is True
    assert done.cursor == (1, 3)


def test_complete_lesson_incomplete_rejected():
    state = fresh()
    with pytest.raises(LessonIncomplete):
        complete_lesson(state, now=0, lesson_size=4, section_sizes=[4])
    partial = state.__class__.from_dict(
        {**state.to_dict(), "lesson_run": {"exercise_index": 3, "mistakes": 1}}
    )
    with pytest.raises(LessonIncomplete):
        complete_lesson(partial, now=0, lesson_size=4, section_sizes=[4])


def test_streak_same_day_unchanged():
    state = _completed_run(fresh())
    first = complete_lesson(state, now=10 * DAY, lesson_size=4, section_sizes=[4, 4])
    assert first.streak.days == 1
    second = complete_lesson(
        _completed_run(first), now=10 * DAY + 3600, lesson_size=4, section_sizes=[4, 4]
    )
    assert second.streak.days == 1


def test_streak_consecutive_day_increments():
    state = _completed_run(fresh())
    day1 = complete_lesson(state, now=10 * DAY, lesson_size=4, section_sizes=[4, 4])
    day2 = complete_lesson(_completed_run(day1), now=11 * DAY, lesson_size=4, section_sizes=[4, 4])
    assert day2.streak.days == 2
    day5 = complete_lesson(_completed_run(day2), now=14 * DAY, lesson_size=4, section_sizes=[4, 4])
    assert day5.streak.days == 1  # gap resets


def test_streak_three_then_yesterday_makes_four():
    state = fresh()
    for day in (5, 6, 7):
        state = complete_lesson(_completed_run(state), now=day * DAY, lesson_size=4, section_sizes=[9, 9])
    assert state.streak.days == 3
    state = complete_lesson(_completed_run(state), now=8 * DAY, lesson_size=4, section_sizes=[9, 9])
    assert state.streak.days == 4


def test_quest_counts_lessons_per_day():
    state = fresh()
    first = complete_lesson(_completed_run(state), now=10 * DAY, lesson_size=4, section_sizes=[9])
    assert first.quest.lessons_completed_today == 1
    second = complete_lesson(_completed_run(first), now=10 * DAY + 60, lesson_size=4, section_sizes=[9])
    assert second.quest.lessons_completed_today == 2
    next_day = complete_lesson(_completed_run(second), now=11 * DAY, lesson_size=4, section_sizes=[9])
    assert next_day.quest.lessons_completed_today == 1  # date change resets


@given(st.lists(st.integers(min_value=0, max_value=3), min_size=1, max_size=30))
def test_streak_property_random_day_gaps(gaps):
    # Completion days as cumulative gaps: gap 0 = same day, 1 = next day.
    state = fresh()
    day = 1000
    expected = 0
    previous_day = None
    for gap in gaps:
        day += gap
        state = complete_lesson(
            _completed_run(state), now=day * DAY, lesson_size=4, section_sizes=[10**6]
        )
        if previous_day is None or day - previous_day > 1:
            expected = 1
        elif day - previous_day == 1:
            expected += 1
        previous_day = day
        assert state.streak.days == expected


def test_state_round_trips_through_dict():
    locked, _ = _locked_state(now=77)
    assert locked.__class__.from_dict(locked.to_dict()) == locked
