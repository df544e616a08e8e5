"""Link lexicon entries to corpus tokens by exact normalized form.

A hit is emitted for every (sentence, token, entry) where the languages
match and the token's normalization equals the entry's norm_form; no
stemming, no diacritics folding. Multiword lexicon forms cannot match a
single token and are skipped with a warning.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .corpus_ingest import Sentence
from .lexicon_ingest import LexicalEntry


class UnknownLanguage(Exception):
    """The requested language has no sentences in the corpus."""


@dataclass(frozen=True)
class ConceptHit:
    sentence_id: str
    token_index: int
    concept_id: str
    matched_form: str


@dataclass(frozen=True)
class CoverageRow:
    language: str
    has_concept: bool
    count_pt: int
    count_en: int


@dataclass
class LinkedCorpus:
    """Sentences plus their concept hits and the derived indexes.

    Immutable after construction (link builds it in one pass); the
    glossary maps each linked concept to a human-readable label for
    downstream option rendering.
    """

    sentences: Mapping[str, Sentence]
    hits: Sequence[ConceptHit]
    by_language: Mapping[str, Sequence[str]]
    by_concept: Mapping[tuple[str, str], Sequence[str]]
    glossary: Mapping[str, str] = field(default_factory=dict)

    def sentences_of_language(self, language: str) -> list[Sentence]:
        return [self.sentences[sid] for sid in self.by_language.get(language, ())]

    def hit_sentence_ids(self) -> set[str]:
        return {h.sentence_id for h in self.hits}


def link(
    sentences: Iterable[Sentence],
    entries: Iterable[LexicalEntry],
    warnings: list[str] | None = None,
) -> LinkedCorpus:
    """Index-based production matcher; agrees with `link_bruteforce`."""
    sentence_map: dict[str, Sentence] = {}
    by_language: dict[str, list[str]] = defaultdict(list)
    for s in sentences:
        if s.sent_id in sentence_map:
            raise ValueError(f"duplicate sent_id in corpus: {s.sent_id!r}")
        sentence_map[s.sent_id] = s
        by_language[s.language].append(s.sent_id)
    for ids in by_language.values():
        ids.sort()

    by_form: dict[tuple[str, str], list[LexicalEntry]] = defaultdict(list)
    glossary: dict[str, str] = {}
    for e in entries:
        if " " in e.norm_form:
            if warnings is not None:
                warnings.append(
                    f"multiword-form: lexicon form {e.form!r} ({e.concept_id}) cannot match a single token"
                )
            continue
        by_form[(e.language, e.norm_form)].append(e)
        glossary.setdefault(e.concept_id, e.gloss)

    hits: list[ConceptHit] = []
    for s in sentence_map.values():
        for token in s.tokens:
            for entry in by_form.get((s.language, token.norm), ()):
                hits.append(
                    ConceptHit(
                        sentence_id=s.sent_id,
                        token_index=token.index,
                        concept_id=entry.concept_id,
                        matched_form=token.form,
                    )
                )
    hits.sort(key=lambda h: (h.sentence_id, h.token_index, h.concept_id))

    concept_sets: dict[tuple[str, str], set[str]] = defaultdict(set)
    for h in hits:
        concept_sets[(sentence_map[h.sentence_id].language, h.concept_id)].add(h.sentence_id)

    return LinkedCorpus(
        sentences=sentence_map,
        hits=hits,
        by_language=dict(by_language),
        by_concept={key: sorted(ids) for key, ids in concept_sets.items()},
        glossary=glossary,
    )


def link_bruteforce(
    sentences: Iterable[Sentence], entries: Iterable[LexicalEntry]
) -> list[ConceptHit]:
    """Exhaustive O(sentences x tokens x entries) reference matcher.

    Kept as the independent oracle for the production `link` path; do
    not optimize.
    """
    hits: list[ConceptHit] = []
    entry_list = [e for e in entries if " " not in e.norm_form]
    for s in sentences:
        for token in s.tokens:
            for e in entry_list:
                if s.language == e.language and token.norm == e.norm_form:
                    hits.append(
                        ConceptHit(
                            sentence_id=s.sent_id,
                            token_index=token.index,
                            concept_id=e.concept_id,
                            matched_form=token.form,
                        )
                    )
    hits.sort(key=lambda h: (h.sentence_id, h.token_index, h.concept_id))
    return hits


def coverage_stats(corpus: LinkedCorpus) -> list[CoverageRow]:
    """Per-language counts of concept-bearing sentences with pt/en translations.

    A row appears for a (language, has_concept) group only when the
    group is non-empty; a corpus with zero hits therefore reports only
    has_concept=false rows. A sentence with both translations counts in
    both columns.
    """
    linked = corpus.hit_sentence_ids()
    groups: dict[tuple[str, bool], list[Sentence]] = defaultdict(list)
    for s in corpus.sentences.values():
        groups[(s.language, s.sent_id in linked)].append(s)

    rows = [
        CoverageRow(
            language=language,
            has_concept=has_concept,
            count_pt=sum(1 for s in group if s.has_translation("pt")),
            count_en=sum(1 for s in group if s.has_translation("en")),
        )
        for (language, has_concept), group in groups.items()
    ]
    rows.sort(key=lambda r: (r.language, not r.has_concept))
    return rows


def candidate_concepts(
    corpus: LinkedCorpus, language: str, min_sentences: int
) -> dict[str, int]:
    """Concepts of a language by distinct-sentence count, strictly above the threshold.

    Returned in descending count order (concept_id breaks ties); a
    concept hit twice in one sentence counts once.
    """
    if language not in corpus.by_language:
        raise UnknownLanguage(f"no sentences for language {language!r}")
    counts = {
        concept_id: len(sentence_ids)
        for (lang, concept_id), sentence_ids in corpus.by_concept.items()
        if lang == language and len(sentence_ids) > min_sentences
    }
    return dict(sorted(counts.items(), key=lambda kv: (-kv[1], kv[0])))
