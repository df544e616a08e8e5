"""CoNLL-U treebank ingestion.

Reads CoNLL-U files (UTF-8, `#` metadata comments, 10-tab-column token
lines, blank line between sentences) into Sentence records. Dependency
columns are accepted but discarded: downstream exercise generation works
on token sequences and sentence translations only.

Translation metadata values often carry a citation to the source work,
e.g. ``ele colhe cacau (harrison, 2013:12)``. `clean_translation` strips
those and normalizes whitespace/case; both raw and cleaned strings are
kept on the sentence.
"""
from __future__ import annotations

import fnmatch
import re
from dataclasses import dataclass, field
from io import StringIO
from pathlib import Path
from typing import IO, Iterable, Mapping

from .textnorm import normalize_form

DEFAULT_METADATA_KEYS: Mapping[str, str] = {
    "text_por": "pt",
    "text_eng": "en",
    "text_en": "en",
}

# Parenthetical whose content ends in ``, <4-digit year>`` with optional
# ``:<pages>`` (single number or range). Plain parentheticals like
# "(ver nota)" must survive.
CITATION_RE = re.compile(r"\([^()]*,\s*\d{4}(?:\s*:\s*\d+(?:\s*-+\s*\d+)?)?\s*\)")

_WS_RE = re.compile(r"\s+")


class MalformedLine(Exception):
    """A token line with the wrong column count, with file/line location."""

    def __init__(self, source: str, line_no: int, detail: str):
        super().__init__(f"{source}:{line_no}: {detail}")
        self.source = source
        self.line_no = line_no
        self.detail = detail


class DuplicateSentId(Exception):
    """The same sent_id appeared twice in one corpus load."""


@dataclass(frozen=True)
class Token:
    """A single surface token; `index` is the 0-based sentence position."""

    index: int
    form: str
    norm: str

    @staticmethod
    def make(index: int, form: str) -> "Token":
        return Token(index=index, form=form, norm=normalize_form(form))


@dataclass(frozen=True)
class TranslationText:
    lang_code: str
    raw: str
    cleaned: str


@dataclass(frozen=True)
class Sentence:
    sent_id: str
    language: str
    tokens: tuple[Token, ...]
    original_text: str
    translations: Mapping[str, TranslationText]
    source_file: str

    def translation(self, lang_code: str) -> TranslationText | None:
        return self.translations.get(lang_code)

    def has_translation(self, lang_code: str) -> bool:
        """True when a non-empty cleaned translation exists for lang_code."""
        t = self.translations.get(lang_code)
        return t is not None and t.cleaned != ""

    def forms(self) -> list[str]:
        return [t.form for t in self.tokens]


@dataclass
class IngestConfig:
    """How treebank files map onto the corpus.

    `language` is either a fixed name for every file, a mapping of
    filename globs to names, or None to use the file stem. The key map
    routes metadata comments to translation language codes; the `text`
    key (configurable) becomes the sentence's original_text.
    """

    language: str | Mapping[str, str] | None = None
    metadata_keys: Mapping[str, str] = field(default_factory=lambda: dict(DEFAULT_METADATA_KEYS))
    text_key: str = "text"

    def language_for(self, source: str) -> str:
        if isinstance(self.language, str):
            return self.language
        name = Path(source).name
        if self.language is not None:
            for pattern, lang in self.language.items():
                if fnmatch.fnmatch(name, pattern):
                    return lang
        return Path(source).stem


def clean_translation(raw: str) -> str:
    """Strip year-bearing citations, collapse whitespace, casefold.

    Citation removal runs to a fixpoint: deleting an inner parenthetical
    can expose a new citation-shaped span, and the result must never
    match the citation pattern again (clean is idempotent).
    """
    text = raw
    while True:
        stripped = CITATION_RE.sub("", text)
        if stripped == text:
            break
        text = stripped
    return _WS_RE.sub(" ", text).strip().casefold()


def parse_conllu(
    data: bytes | str | IO[bytes],
    cfg: IngestConfig,
    source: str = "<stream>",
    warnings: list[str] | None = None,
    _seen_ids: set[str] | None = None,
) -> list[Sentence]:
    """Parse one CoNLL-U byte stream into Sentences.

    Multiword-range lines (``1-2``) and empty nodes (``1.1``) are
    skipped. A block without `# sent_id` gets the generated id
    ``<source>:<block-ordinal>`` plus a warning. Raises MalformedLine on
    a bad column count and DuplicateSentId on a repeated id.
    """
    if isinstance(data, bytes):
        text = data.decode("utf-8")
    elif isinstance(data, str):
        text = data
    else:
        text = data.read().decode("utf-8")

    language = cfg.language_for(source)
    seen = _seen_ids if _seen_ids is not None else set()
    sentences: list[Sentence] = []
    block: list[tuple[int, str]] = []
    ordinal = 0

    def flush() -> None:
        nonlocal ordinal
        if not block:
            return
        ordinal += 1
        sentence = _parse_block(block, cfg, language, source, ordinal, warnings)
        block.clear()
        if sentence is None:
            return
        if sentence.sent_id in seen:
            raise DuplicateSentId(f"{source}: duplicate sent_id {sentence.sent_id!r}")
        seen.add(sentence.sent_id)
        sentences.append(sentence)

    for line_no, line in enumerate(StringIO(text), start=1):
        line = line.rstrip("\n").rstrip("\r")
        if line.strip() == "":
            flush()
        else:
            block.append((line_no, line))
    flush()
    return sentences


def _parse_block(
    block: list[tuple[int, str]],
    cfg: IngestConfig,
    language: str,
    source: str,
    ordinal: int,
    warnings: list[str] | None,
) -> Sentence | None:
    sent_id: str | None = None
    metadata: dict[str, str] = {}
    tokens: list[Token] = []

    for line_no, line in block:
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" not in body:
                continue
            key, value = body.split("=", 1)
            key = key.strip()
            value = value.strip()
            if key == "sent_id":
                sent_id = value
            else:
                metadata[key] = value
            continue
        columns = line.split("\t")
        if len(columns) != 10:
            raise MalformedLine(source, line_no, f"expected 10 columns, got {len(columns)}")
        token_id = columns[0]
        if "-" in token_id or "." in token_id:
            continue  # multiword range / empty node
        form = columns[1]
        if form == "":
            raise MalformedLine(source, line_no, "empty FORM column")
        tokens.append(Token.make(len(tokens), form))

    if not tokens:
        _warn(warnings, f"empty-block: {source} block {ordinal} has no token lines, skipped")
        return None
    if sent_id is None:
        sent_id = f"{source}:{ordinal}"
        _warn(warnings, f"missing-sent-id: {source} block {ordinal}, generated id {sent_id!r}")

    translations: dict[str, TranslationText] = {}
    for key, lang_code in cfg.metadata_keys.items():
        raw = metadata.get(key)
        if raw:
            translations[lang_code] = TranslationText(
                lang_code=lang_code, raw=raw, cleaned=clean_translation(raw)
            )
    original = metadata.get(cfg.text_key) or " ".join(t.form for t in tokens)

    return Sentence(
        sent_id=sent_id,
        language=language,
        tokens=tuple(tokens),
        original_text=original,
        translations=translations,
        source_file=source,
    )


def parse_conllu_file(
    path: str | Path,
    cfg: IngestConfig,
    warnings: list[str] | None = None,
    _seen_ids: set[str] | None = None,
) -> list[Sentence]:
    path = Path(path)
    return parse_conllu(path.read_bytes(), cfg, source=str(path), warnings=warnings, _seen_ids=_seen_ids)


def parse_conllu_dir(
    path: str | Path,
    cfg: IngestConfig,
    warnings: list[str] | None = None,
) -> list[Sentence]:
    """Parse every *.conllu under a directory, enforcing corpus-wide id uniqueness."""
    path = Path(path)
    seen: set[str] = set()
    sentences: list[Sentence] = []
    for file in sorted(path.glob("*.conllu")):
        sentences.extend(parse_conllu_file(file, cfg, warnings=warnings, _seen_ids=seen))
    return sentences


def load_corpus(path: str | Path, cfg: IngestConfig, warnings: list[str] | None = None) -> list[Sentence]:
    """Parse a treebank path, file or directory."""
    path = Path(path)
    if path.is_dir():
        return parse_conllu_dir(path, cfg, warnings=warnings)
    return parse_conllu_file(path, cfg, warnings=warnings)


def _warn(warnings: list[str] | None, message: str) -> None:
    if warnings is not None:
        warnings.append(message)


def iter_warning_counts(warnings: Iterable[str]) -> dict[str, int]:
    """Group collected warning strings by their `<kind>:` prefix."""
    counts: dict[str, int] = {}
    for w in warnings:
        kind = w.split(":", 1)[0]
        counts[kind] = counts.get(kind, 0) + 1
    return counts
