"""Lexical database ingestion.

Reads a delimited table (TSV by default) of (language, form, concept)
rows into LexicalEntry records, deduplicated on the normalized triple.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from io import StringIO
from pathlib import Path
from typing import IO

from .textnorm import normalize_form


class MissingColumn(Exception):
    """A configured column name is absent from the table header."""


@dataclass(frozen=True)
class LexicalEntry:
    language: str
    form: str
    norm_form: str
    concept_id: str
    gloss: str


@dataclass
class LexiconConfig:
    """Column names and delimiters for the lexicon table.

    `form_split`, when set, splits multi-variant form cells (e.g.
    "kara, karah") into one entry per variant.
    """

    delimiter: str = "\t"
    language_column: str = "language"
    form_column: str = "form"
    concept_column: str = "concept"
    gloss_column: str | None = "gloss"
    form_split: str | None = None


def parse_lexicon(
    data: bytes | str | IO[bytes],
    cfg: LexiconConfig,
    source: str = "<stream>",
    warnings: list[str] | None = None,
) -> list[LexicalEntry]:
    """Parse a lexicon table into deduplicated entries.

    Rows with an empty form or concept are skipped with a counted
    warning. A header-only table yields an empty list.
    """
    if isinstance(data, bytes):
        text = data.decode("utf-8")
    elif isinstance(data, str):
        text = data
    else:
        text = data.read().decode("utf-8")

    reader = csv.reader(StringIO(text), delimiter=cfg.delimiter)
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        return []

    def column(name: str) -> int:
        try:
            return header.index(name)
        except ValueError:
            raise MissingColumn(f"{source}: column {name!r} not in header {header}") from None

    lang_i = column(cfg.language_column)
    form_i = column(cfg.form_column)
    concept_i = column(cfg.concept_column)
    gloss_i: int | None = None
    if cfg.gloss_column is not None and cfg.gloss_column in header:
        gloss_i = header.index(cfg.gloss_column)

    entries: list[LexicalEntry] = []
    seen: set[tuple[str, str, str]] = set()
    for row_no, row in enumerate(reader, start=2):
        if not row or all(cell.strip() == "" for cell in row):
            continue
        cell = _get(row, form_i)
        language = _get(row, lang_i)
        concept = _get(row, concept_i)
        gloss = _get(row, gloss_i) if gloss_i is not None else ""
        forms = [f.strip() for f in cell.split(cfg.form_split)] if cfg.form_split else [cell]
        for form in forms:
            if form == "" or concept == "":
                if warnings is not None:
                    warnings.append(f"skipped-row: {source} row {row_no} has empty form or concept")
                continue
            key = (language, normalize_form(form), concept)
            if key in seen:
                continue
            seen.add(key)
            entries.append(
                LexicalEntry(
                    language=language,
                    form=form,
                    norm_form=key[1],
                    concept_id=concept,
                    gloss=gloss or concept,
                )
            )
    return entries


def parse_lexicon_file(
    path: str | Path, cfg: LexiconConfig, warnings: list[str] | None = None
) -> list[LexicalEntry]:
    path = Path(path)
    return parse_lexicon(path.read_bytes(), cfg, source=str(path), warnings=warnings)


def _get(row: list[str], index: int) -> str:
    return row[index].strip() if index < len(row) else ""
