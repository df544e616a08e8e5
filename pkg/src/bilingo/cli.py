"""Operator command line.

    bilingo stats       coverage statistics TSV from a treebank + lexicon
    bilingo candidates  concepts with enough sentences to anchor a section
    bilingo build       deterministic course pack from a declarative config
    bilingo validate    re-check every invariant of a built pack
    bilingo serve       run the lesson/grading service

Exit codes: 0 ok, 1 validation failure, 2 input error, 3 build infeasible.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import concept_linker, course_builder, game_engine, persistence
from .corpus_ingest import (
    DuplicateSentId,
    IngestConfig,
    MalformedLine,
    iter_warning_counts,
    load_corpus,
)
from .course_builder import (
    ConfigInvalid,
    CourseConfig,
    EmptySection,
    InsufficientDistractorPool,
    InsufficientPool,
    SectionSpec,
    SectionTooSmall,
)
from .lexicon_ingest import LexiconConfig, MissingColumn, parse_lexicon_file

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_INPUT = 2
EXIT_INFEASIBLE = 3


@dataclass
class AppConfig:
    ingest: IngestConfig = field(default_factory=IngestConfig)
    lexicon: LexiconConfig = field(default_factory=LexiconConfig)
    course: CourseConfig | None = None
    game: game_engine.GameConfig = field(default_factory=game_engine.GameConfig)


def load_config(path: str | Path | None) -> AppConfig:
    """Parse the declarative JSON config document (see README for the schema)."""
    if path is None:
        return AppConfig()
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigInvalid(f"{path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigInvalid(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc

    ingest_data = data.get("ingest", {})
    ingest = IngestConfig(
        language=ingest_data.get("language"),
        metadata_keys=ingest_data.get("metadata_keys", dict(IngestConfig().metadata_keys)),
        text_key=ingest_data.get("text_key", "text"),
    )
    lex_data = data.get("lexicon", {})
    lexicon = LexiconConfig(
        delimiter=lex_data.get("delimiter", "\t"),
        language_column=lex_data.get("language_column", "language"),
        form_column=lex_data.get("form_column", "form"),
        concept_column=lex_data.get("concept_column", "concept"),
        gloss_column=lex_data.get("gloss_column", "gloss"),
        form_split=lex_data.get("form_split"),
    )
    course: CourseConfig | None = None
    build = data.get("build")
    if build is not None:
        language = data.get("language")
        if not language:
            raise ConfigInvalid(f"{path}: build config requires a top-level 'language'")
        sections = [
            SectionSpec(
                subject=s["subject"],
                concept_ids=frozenset(s.get("concepts", ())),
                lessons=s.get("lessons", 1),
                lesson_quota=s.get("quota", dict(course_builder.DEFAULT_LESSON_QUOTA)),
            )
            for s in build.get("sections", ())
        ]
        course = CourseConfig(
            language=language,
            sections=sections,
            k_distractors=build.get("k_distractors", course_builder.DEFAULT_K_DISTRACTORS),
            n_options=build.get("n_options", course_builder.DEFAULT_N_OPTIONS),
            course_id=data.get("course_id"),
        )
    game_data = data.get("game", {})
    game = game_engine.GameConfig(
        max_gems=game_data.get("max_gems", 3),
        quest_lessons=game_data.get("quest_lessons", 2),
    )
    return AppConfig(ingest=ingest, lexicon=lexicon, course=course, game=game)


def _load_linked(treebank: str, lexicon: str, cfg: AppConfig, warnings: list[str]):
    sentences = load_corpus(treebank, cfg.ingest, warnings=warnings)
    entries = parse_lexicon_file(lexicon, cfg.lexicon, warnings=warnings)
    return concept_linker.link(sentences, entries, warnings=warnings)


def _print_warnings(warnings: list[str]) -> None:
    counts = iter_warning_counts(warnings)
    for kind in sorted(counts):
        print(f"warning: {kind} x{counts[kind]}", file=sys.stderr)


def _digest(path: Path) -> str:
    return "sha256:" + hashlib.sha256(path.read_bytes()).hexdigest()


def _input_digests(treebank: str, lexicon: str, config: str | None) -> dict[str, str]:
    digests: dict[str, str] = {}
    tb = Path(treebank)
    files = sorted(tb.glob("*.conllu")) if tb.is_dir() else [tb]
    for file in files:
        digests[file.name] = _digest(file)
    digests[Path(lexicon).name] = _digest(Path(lexicon))
    if config is not None:
        digests[Path(config).name] = _digest(Path(config))
    return digests


def cmd_stats(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    warnings: list[str] = []
    corpus = _load_linked(args.treebank, args.lexicon, cfg, warnings)
    rows = concept_linker.coverage_stats(corpus)
    lines = ["language\thas_concept\tpt\ten"]
    lines += [f"{r.language}\t{r.has_concept}\t{r.count_pt}\t{r.count_en}" for r in rows]
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    _print_warnings(warnings)
    return EXIT_OK


def cmd_candidates(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    warnings: list[str] = []
    corpus = _load_linked(args.treebank, args.lexicon, cfg, warnings)
    counts = concept_linker.candidate_concepts(corpus, args.language, args.min)
    for concept_id, count in counts.items():
        print(f"{concept_id}\t{count}")
    _print_warnings(warnings)
    return EXIT_OK


def cmd_build(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    if cfg.course is None:
        raise ConfigInvalid(f"{args.config}: no 'build' section in config")
    warnings: list[str] = []
    corpus = _load_linked(args.treebank, args.lexicon, cfg, warnings)
    pack = course_builder.build_course(
        corpus, cfg.course, args.seed, input_digests=_input_digests(args.treebank, args.lexicon, args.config)
    )
    persistence.save_pack(pack, args.out)
    print(f"wrote {args.out} ({course_builder.pack_digest(pack)})", file=sys.stderr)
    _print_warnings(warnings)
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    pack = persistence.load_pack(args.pack)
    problems = course_builder.validate_pack(pack)
    # Generator/grader compatibility: every exercise accepts its own answer.
    for section in pack.sections:
        for lesson in section.lessons:
            for exercise in lesson.exercises:
                try:
                    if not game_engine.grade(exercise, _echo_submission(exercise)):
                        problems.append(f"exercise {exercise.id}: rejects its own answer")
                except game_engine.ShapeMismatch as exc:
                    problems.append(f"exercise {exercise.id}: {exc}")
    if problems:
        for problem in problems:
            print(problem, file=sys.stderr)
        return EXIT_VALIDATION
    print(f"{args.pack}: ok", file=sys.stderr)
    return EXIT_OK


def _echo_submission(exercise: course_builder.Exercise):
    return exercise.answer if exercise.kind == course_builder.CM else list(exercise.answer)


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service_api import create_app, load_packs

    cfg = load_config(args.config)
    packs = load_packs(args.pack)
    store = persistence.StateStore(Path(args.state), defaults=cfg.game)
    app = create_app(packs, store, ui_dir=args.ui)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bilingo", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    stats = sub.add_parser("stats", help="coverage statistics TSV")
    stats.add_argument("--treebank", required=True, help="CoNLL-U file or directory")
    stats.add_argument("--lexicon", required=True, help="lexical database table")
    stats.add_argument("--config", required=True, help="JSON config file")
    stats.add_argument("--out", help="write TSV here instead of stdout")
    stats.set_defaults(func=cmd_stats)

    candidates = sub.add_parser("candidates", help="section subject candidates")
    candidates.add_argument("--treebank", required=True)
    candidates.add_argument("--lexicon", required=True)
    candidates.add_argument("--language", required=True)
    candidates.add_argument("--min", type=int, default=10, help="strict lower bound on sentences")
    candidates.add_argument("--config", help="JSON config file (optional)")
    candidates.set_defaults(func=cmd_candidates)

    build = sub.add_parser("build", help="build a course pack")
    build.add_argument("--treebank", required=True)
    build.add_argument("--lexicon", required=True)
    build.add_argument("--config", required=True)
    build.add_argument("--seed", type=_u64, required=True)
    build.add_argument("--out", required=True, help="pack output path")
    build.set_defaults(func=cmd_build)

    validate = sub.add_parser("validate", help="re-check a pack's invariants")
    validate.add_argument("pack")
    validate.set_defaults(func=cmd_validate)

    serve = sub.add_parser("serve", help="run the lesson service")
    serve.add_argument("--pack", required=True, help="pack file or directory of packs")
    serve.add_argument("--state", required=True, help="student state directory")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--ui", help="static directory with the built web player")
    serve.add_argument("--config", help="JSON config file (game settings)")
    serve.set_defaults(func=cmd_serve)

    return parser


def _u64(value: str) -> int:
    seed = int(value)
    if not 0 <= seed < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return seed


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (
        MalformedLine,
        DuplicateSentId,
        MissingColumn,
        ConfigInvalid,
        concept_linker.UnknownLanguage,
        persistence.ParseError,
        persistence.SchemaMismatch,
        FileNotFoundError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (EmptySection, InsufficientPool, InsufficientDistractorPool, SectionTooSmall) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())
