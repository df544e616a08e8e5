"""Deterministic course pack generation.

Turns a linked corpus plus a section configuration into sections of
lessons of exercises. Three exercise kinds:

  TS1  prompt is the Portuguese translation, answer is the target-language
       token sequence in order; the bank adds distractor tokens drawn from
       other sentences of the same language.
  TS2  mirror image: prompt in the target language, answer is the ordered
       Portuguese token sequence, distractors drawn from other sentences'
       Portuguese translations.
  CM   prompt is a single matched word, answer is its concept; the option
       set samples further concepts from the same section.

All randomness flows from one root seed. Each exercise and each section
assembly derives its own generator as root XOR sha256(labels), so adding
or reordering a section never perturbs the exercises of another.
"""
from __future__ import annotations

import hashlib
import json
import random
from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Sequence

from . import __version__
from .concept_linker import ConceptHit, LinkedCorpus
from .corpus_ingest import Sentence
from .textnorm import normalize_form

TS1 = "TS1"
TS2 = "TS2"
CM = "CM"
KINDS = (TS1, TS2, CM)

SCHEMA_VERSION = 1
DEFAULT_LESSON_QUOTA = {TS1: 1, TS2: 1, CM: 2}
DEFAULT_K_DISTRACTORS = 4
DEFAULT_N_OPTIONS = 4

# Initial number of neighbor sentences sampled for distractor tokens;
# doubled on shortfall until the whole language has been sampled.
DISTRACTOR_SAMPLE_SENTENCES = 5


class ConfigInvalid(Exception):
    pass


class EmptySection(Exception):
    """No sentence qualifies for the section; carries the subject name."""


class SectionTooSmall(Exception):
    """Fewer section concepts than requested options."""


class InsufficientDistractorPool(Exception):
    pass


class InsufficientPool(Exception):
    """An exercise pool is smaller than the per-lesson quota for its kind."""


@dataclass(frozen=True)
class SectionSpec:
    subject: str
    concept_ids: frozenset[str]
    lessons: int
    lesson_quota: Mapping[str, int]


@dataclass(frozen=True)
class Exercise:
    kind: str
    id: str
    prompt: str
    answer: tuple[str, ...] | str  # ordered tokens (TS) or concept_id (CM)
    bank: tuple[str, ...]  # token multiset (TS) or option list (CM)
    source_sentence_id: str
    concept_ids: frozenset[str]

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "id": self.id,
            "prompt": self.prompt,
            "answer": list(self.answer) if self.kind != CM else self.answer,
            "bank": list(self.bank),
            "source_sentence_id": self.source_sentence_id,
            "concept_ids": sorted(self.concept_ids),
        }

    @staticmethod
    def from_dict(data: dict) -> "Exercise":
        kind = data["kind"]
        answer = data["answer"] if kind == CM else tuple(data["answer"])
        return Exercise(
            kind=kind,
            id=data["id"],
            prompt=data["prompt"],
            answer=answer,
            bank=tuple(data["bank"]),
            source_sentence_id=data["source_sentence_id"],
            concept_ids=frozenset(data["concept_ids"]),
        )


@dataclass(frozen=True)
class Lesson:
    index: int
    exercises: tuple[Exercise, ...]

    def to_dict(self) -> dict:
        return {"index": self.index, "exercises": [e.to_dict() for e in self.exercises]}

    @staticmethod
    def from_dict(data: dict) -> "Lesson":
        return Lesson(
            index=data["index"],
            exercises=tuple(Exercise.from_dict(e) for e in data["exercises"]),
        )


@dataclass(frozen=True)
class CourseSection:
    spec: SectionSpec
    lessons: tuple[Lesson, ...]

    def to_dict(self) -> dict:
        return {
            "subject": self.spec.subject,
            "concept_ids": sorted(self.spec.concept_ids),
            "lesson_quota": dict(sorted(self.spec.lesson_quota.items())),
            "lessons": [l.to_dict() for l in self.lessons],
        }

    @staticmethod
    def from_dict(data: dict) -> "CourseSection":
        lessons = tuple(Lesson.from_dict(l) for l in data["lessons"])
        spec = SectionSpec(
            subject=data["subject"],
            concept_ids=frozenset(data["concept_ids"]),
            lessons=len(lessons),
            lesson_quota=dict(data["lesson_quota"]),
        )
        return CourseSection(spec=spec, lessons=lessons)


@dataclass(frozen=True)
class CoursePack:
    course_id: str
    language: str
    sections: tuple[CourseSection, ...]
    seed: int
    provenance: Mapping[str, object]
    glossary: Mapping[str, str]
    schema_version: int = SCHEMA_VERSION

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "course_id": self.course_id,
            "language": self.language,
            "seed": self.seed,
            "provenance": dict(self.provenance),
            "glossary": dict(self.glossary),
            "sections": [s.to_dict() for s in self.sections],
        }

    @staticmethod
    def from_dict(data: dict) -> "CoursePack":
        return CoursePack(
            course_id=data["course_id"],
            language=data["language"],
            sections=tuple(CourseSection.from_dict(s) for s in data["sections"]),
            seed=data["seed"],
            provenance=data.get("provenance", {}),
            glossary=data.get("glossary", {}),
            schema_version=data["schema_version"],
        )

    def find_exercise(self, exercise_id: str) -> Exercise | None:
        for section in self.sections:
            for lesson in section.lessons:
                for exercise in lesson.exercises:
                    if exercise.id == exercise_id:
                        return exercise
        return None


@dataclass
class CourseConfig:
    language: str
    sections: Sequence[SectionSpec]
    k_distractors: int = DEFAULT_K_DISTRACTORS
    n_options: int = DEFAULT_N_OPTIONS
    course_id: str | None = None


def derive_seed(root: int, *labels: str) -> int:
    """Root seed XOR a stable 64-bit hash of the label path."""
    digest = hashlib.sha256("\x1f".join(labels).encode("utf-8")).digest()
    return (root ^ int.from_bytes(digest[:8], "big")) & 0xFFFFFFFFFFFFFFFF


def select_section_sentences(
    corpus: LinkedCorpus, spec: SectionSpec, language: str
) -> list[Sentence]:
    """Sentences of the language hit by a section concept and carrying a
    cleaned Portuguese translation, ordered by sent_id."""
    if not spec.concept_ids:
        raise ConfigInvalid(f"section {spec.subject!r} has no concepts")
    ids: set[str] = set()
    for concept_id in spec.concept_ids:
        ids.update(corpus.by_concept.get((language, concept_id), ()))
    selected = [
        corpus.sentences[sid] for sid in sorted(ids) if corpus.sentences[sid].has_translation("pt")
    ]
    if not selected:
        raise EmptySection(f"section {spec.subject!r}: no usable sentences")
    return selected


def _draw_distractors(
    rng: random.Random,
    pools: Sequence[Sequence[str]],
    answer_norms: set[str],
    k: int,
    context: str,
) -> list[str]:
    """Draw k tokens without replacement from a growing sample of sentence pools.

    Tokens normalizing to an answer token are excluded so a distractor can
    never complete the answer. The sentence sample doubles on shortfall;
    once every pool has been sampled the draw fails for good.
    """
    if k == 0:
        return []
    if not pools:
        raise InsufficientDistractorPool(f"{context}: no other sentences to draw from")
    size = min(DISTRACTOR_SAMPLE_SENTENCES, len(pools))
    while True:
        sampled = rng.sample(list(pools), size)
        tokens = [token for pool in sampled for token in pool]
        rng.shuffle(tokens)
        eligible = [t for t in tokens if normalize_form(t) not in answer_norms]
        if len(eligible) >= k:
            return eligible[:k]
        if size == len(pools):
            raise InsufficientDistractorPool(
                f"{context}: need {k} distractors, only {len(eligible)} available"
            )
        size = min(size * 2, len(pools))


def gen_ts1(
    sentence: Sentence, corpus: LinkedCorpus, rng: random.Random, k_distractors: int
) -> Exercise:
    """Portuguese prompt, target-language token answer."""
    translation = sentence.translation("pt")
    if translation is None or translation.cleaned == "":
        raise ConfigInvalid(f"{sentence.sent_id}: TS1 requires a cleaned pt translation")
    answer = [t.form for t in sentence.tokens]
    others = [
        s
        for s in corpus.sentences_of_language(sentence.language)
        if s.sent_id != sentence.sent_id
    ]
    distractors = _draw_distractors(
        rng,
        [s.forms() for s in others],
        {t.norm for t in sentence.tokens},
        k_distractors,
        f"ts1:{sentence.sent_id}",
    )
    bank = answer + distractors
    rng.shuffle(bank)
    return Exercise(
        kind=TS1,
        id=f"ts1:{sentence.sent_id}",
        prompt=translation.cleaned,
        answer=tuple(answer),
        bank=tuple(bank),
        source_sentence_id=sentence.sent_id,
        concept_ids=_sentence_concepts(corpus, sentence.sent_id),
    )


def gen_ts2(
    sentence: Sentence, corpus: LinkedCorpus, rng: random.Random, k_distractors: int
) -> Exercise:
    """Target-language prompt, Portuguese token answer."""
    translation = sentence.translation("pt")
    if translation is None or translation.cleaned == "":
        raise ConfigInvalid(f"{sentence.sent_id}: TS2 requires a cleaned pt translation")
    answer = translation.cleaned.split()
    others = [
        s
        for s in corpus.sentences_of_language(sentence.language)
        if s.sent_id != sentence.sent_id and s.has_translation("pt")
    ]
    distractors = _draw_distractors(
        rng,
        [s.translations["pt"].cleaned.split() for s in others],
        {normalize_form(t) for t in answer},
        k_distractors,
        f"ts2:{sentence.sent_id}",
    )
    bank = answer + distractors
    rng.shuffle(bank)
    return Exercise(
        kind=TS2,
        id=f"ts2:{sentence.sent_id}",
        prompt=" ".join(sentence.forms()),
        answer=tuple(answer),
        bank=tuple(bank),
        source_sentence_id=sentence.sent_id,
        concept_ids=_sentence_concepts(corpus, sentence.sent_id),
    )


def gen_cm(
    hit: ConceptHit, spec: SectionSpec, rng: random.Random, n_options: int
) -> Exercise:
    """Word prompt, concept answer, options sampled from the section."""
    if n_options < 2:
        raise ConfigInvalid(f"n_options must be >= 2, got {n_options}")
    if len(spec.concept_ids) < n_options:
        raise SectionTooSmall(
            f"section {spec.subject!r} has {len(spec.concept_ids)} concepts, needs {n_options}"
        )
    alternatives = sorted(spec.concept_ids - {hit.concept_id})
    options = [hit.concept_id] + rng.sample(alternatives, n_options - 1)
    rng.shuffle(options)
    return Exercise(
        kind=CM,
        id=f"cm:{hit.sentence_id}:{hit.token_index}:{hit.concept_id}",
        prompt=hit.matched_form,
        answer=hit.concept_id,
        bank=tuple(options),
        source_sentence_id=hit.sentence_id,
        concept_ids=frozenset({hit.concept_id}),
    )


def assemble_lessons(
    pools: Mapping[str, Sequence[Exercise]], spec: SectionSpec, rng: random.Random
) -> list[Lesson]:
    """Sample each lesson's quota per kind, then shuffle the lesson order.

    Sampling is without replacement within a lesson and with replacement
    across lessons, so a pool only needs to cover one lesson's quota.
    """
    for kind in KINDS:
        quota = spec.lesson_quota.get(kind, 0)
        if quota > len(pools.get(kind, ())):
            raise InsufficientPool(
                f"section {spec.subject!r}: kind {kind} has {len(pools.get(kind, ()))} "
                f"exercises, quota needs {quota}"
            )
    lessons = []
    for index in range(spec.lessons):
        chosen: list[Exercise] = []
        for kind in KINDS:
            quota = spec.lesson_quota.get(kind, 0)
            if quota:
                chosen.extend(rng.sample(list(pools[kind]), quota))
        rng.shuffle(chosen)
        lessons.append(Lesson(index=index, exercises=tuple(chosen)))
    return lessons


def build_course(
    corpus: LinkedCorpus,
    cfg: CourseConfig,
    seed: int,
    input_digests: Mapping[str, str] | None = None,
) -> CoursePack:
    """Build the full pack; equal (corpus, cfg, seed) gives identical bytes."""
    _check_config(cfg)
    sections: list[CourseSection] = []
    used_concepts: set[str] = set()
    for spec in cfg.sections:
        sentences = select_section_sentences(corpus, spec, cfg.language)
        pools: dict[str, list[Exercise]] = {}
        if spec.lesson_quota.get(TS1, 0):
            pools[TS1] = [
                gen_ts1(s, corpus, random.Random(derive_seed(seed, spec.subject, TS1, str(i))), cfg.k_distractors)
                for i, s in enumerate(sentences)
            ]
        if spec.lesson_quota.get(TS2, 0):
            pools[TS2] = [
                gen_ts2(s, corpus, random.Random(derive_seed(seed, spec.subject, TS2, str(i))), cfg.k_distractors)
                for i, s in enumerate(sentences)
            ]
        if spec.lesson_quota.get(CM, 0):
            selected_ids = {s.sent_id for s in sentences}
            hits = [
                h
                for h in corpus.hits
                if h.sentence_id in selected_ids and h.concept_id in spec.concept_ids
            ]
            pools[CM] = [
                gen_cm(h, spec, random.Random(derive_seed(seed, spec.subject, CM, str(i))), cfg.n_options)
                for i, h in enumerate(hits)
            ]
        lessons = assemble_lessons(pools, spec, random.Random(derive_seed(seed, spec.subject, "lessons")))
        sections.append(CourseSection(spec=spec, lessons=tuple(lessons)))
        used_concepts.update(spec.concept_ids)

    course_id = cfg.course_id or _default_course_id(cfg)
    provenance: dict[str, object] = {
        "tool": "bilingo",
        "tool_version": __version__,
        "seed": seed,
        "inputs": dict(input_digests or {}),
        "k_distractors": cfg.k_distractors,
        "n_options": cfg.n_options,
        "distractor_scope": "language-wide",
    }
    glossary = {
        c: corpus.glossary.get(c, c.replace("_", " ").lower()) for c in sorted(used_concepts)
    }
    return CoursePack(
        course_id=course_id,
        language=cfg.language,
        sections=tuple(sections),
        seed=seed,
        provenance=provenance,
        glossary=glossary,
    )


def _check_config(cfg: CourseConfig) -> None:
    if not cfg.sections:
        raise ConfigInvalid("course has no sections")
    if cfg.k_distractors < 0:
        raise ConfigInvalid("k_distractors must be >= 0")
    if cfg.n_options < 2:
        raise ConfigInvalid("n_options must be >= 2")
    for spec in cfg.sections:
        if not spec.concept_ids:
            raise ConfigInvalid(f"section {spec.subject!r} has no concepts")
        if spec.lessons < 1:
            raise ConfigInvalid(f"section {spec.subject!r} must have >= 1 lesson")
        quotas = dict(spec.lesson_quota)
        if any(q < 0 for q in quotas.values()):
            raise ConfigInvalid(f"section {spec.subject!r} has a negative quota")
        if not any(q > 0 for q in quotas.values()):
            raise ConfigInvalid(f"section {spec.subject!r} has an all-zero quota")
        unknown = set(quotas) - set(KINDS)
        if unknown:
            raise ConfigInvalid(f"section {spec.subject!r} quota names unknown kinds {sorted(unknown)}")


def _default_course_id(cfg: CourseConfig) -> str:
    subjects = "-".join(s.subject.lower().replace(" ", "-") for s in cfg.sections)
    return f"{cfg.language.lower()}-{subjects}"


def _sentence_concepts(corpus: LinkedCorpus, sent_id: str) -> frozenset[str]:
    return frozenset(h.concept_id for h in corpus.hits if h.sentence_id == sent_id)


def pack_to_json(pack: CoursePack) -> str:
    """Canonical serialization: sorted keys, UTF-8 text, LF, trailing newline."""
    return json.dumps(pack.to_dict(), ensure_ascii=False, sort_keys=True, indent=2) + "\n"


def pack_digest(pack: CoursePack) -> str:
    return hashlib.sha256(pack_to_json(pack).encode("utf-8")).hexdigest()


def validate_pack(pack: CoursePack) -> list[str]:
    """Re-check every exercise and lesson invariant; returns violations."""
    problems: list[str] = []
    n_options = pack.provenance.get("n_options")
    for section in pack.sections:
        spec = section.spec
        for expected_index, lesson in enumerate(section.lessons):
            if lesson.index != expected_index:
                problems.append(
                    f"section {spec.subject!r} lesson {lesson.index}: non-contiguous index"
                )
            kind_counts = Counter(e.kind for e in lesson.exercises)
            quota = {k: q for k, q in spec.lesson_quota.items() if q > 0}
            if kind_counts != Counter(quota):
                problems.append(
                    f"section {spec.subject!r} lesson {lesson.index}: kinds {dict(kind_counts)} "
                    f"do not match quota {quota}"
                )
            ids = [e.id for e in lesson.exercises]
            for dup, count in Counter(ids).items():
                if count > 1:
                    problems.append(f"exercise {dup}: appears {count} times in one lesson")
            for exercise in lesson.exercises:
                problems.extend(_check_exercise(exercise, spec, n_options))
    return problems


def _check_exercise(exercise: Exercise, spec: SectionSpec, n_options) -> list[str]:
    problems = []
    if exercise.kind in (TS1, TS2):
        if not isinstance(exercise.answer, tuple) or not exercise.answer:
            problems.append(f"exercise {exercise.id}: TS answer must be a non-empty token list")
            return problems
        bank = Counter(exercise.bank)
        bank.subtract(Counter(exercise.answer))
        if any(count < 0 for count in bank.values()):
            problems.append(f"exercise {exercise.id}: answer is not a sub-multiset of the bank")
        else:
            answer_norms = {normalize_form(t) for t in exercise.answer}
            leftovers = [t for t, count in bank.items() if count > 0 for _ in range(count)]
            for token in leftovers:
                if normalize_form(token) in answer_norms:
                    problems.append(
                        f"exercise {exercise.id}: distractor {token!r} normalizes to an answer token"
                    )
    elif exercise.kind == CM:
        options = list(exercise.bank)
        if len(set(options)) != len(options):
            problems.append(f"exercise {exercise.id}: duplicate CM options")
        if options.count(exercise.answer) != 1:
            problems.append(f"exercise {exercise.id}: answer must appear exactly once in options")
        if not set(options) <= set(spec.concept_ids):
            problems.append(f"exercise {exercise.id}: options outside the section concept set")
        if isinstance(n_options, int) and len(options) != n_options:
            problems.append(
                f"exercise {exercise.id}: {len(options)} options, pack declares {n_options}"
            )
    else:
        problems.append(f"exercise {exercise.id}: unknown kind {exercise.kind!r}")
    return problems
