"""Detection of shared-spelling migrant words and source-language attribution."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from .ingest import Corpus, normalize_word

logger = logging.getLogger(__name__)

WILDCARD = "*"


@dataclass(frozen=True)
class FirstAppearance:
    """Earliest year (and the rank held that year) a word entered a top-K list."""

    language: str
    year: int
    rank: int


@dataclass(frozen=True)
class MigrantWord:
    """A word shared by several languages, attributed to a unique source.

    `receivers` maps each receiving language to the first year the word
    showed up in its top-K list; that year is never earlier than the
    source's first appearance.
    """

    word: str
    source: str
    source_first: FirstAppearance
    receivers: Mapping[str, int]
    ambiguous_source: bool = False


@dataclass(frozen=True)
class ExclusionEntry:
    """One manual-review veto; None for source/receiver matches any language."""

    word: str
    source: str | None = None
    receiver: str | None = None
    note: str = ""


@dataclass(frozen=True)
class ExclusionList:
    entries: tuple[ExclusionEntry, ...] = ()

    @classmethod
    def empty(cls) -> ExclusionList:
        return cls(())

    def matches(self, word: str, source: str, receiver: str) -> bool:
        for e in self.entries:
            if (
                e.word == word
                and e.source in (None, source)
                and e.receiver in (None, receiver)
            ):
                return True
        return False


def load_exclusions(path: str | Path) -> ExclusionList:
    """Read a `word TAB source-or-* TAB receiver-or-* TAB note` exclusion file."""
    entries = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) < 3:
                raise ValueError(f"{path}: line {line_no}: expected at least 3 tab-separated fields")
            word = normalize_word(fields[0])
            if word is None:
                logger.warning("%s: line %d: unnormalizable word %r skipped", path, line_no, fields[0])
                continue
            source = None if fields[1] in (WILDCARD, "") else fields[1].lower()
            receiver = None if fields[2] in (WILDCARD, "") else fields[2].lower()
            note = fields[3] if len(fields) > 3 else ""
            entries.append(ExclusionEntry(word, source, receiver, note))
    return ExclusionList(tuple(entries))


def first_appearances(corpus: Corpus, word: str) -> dict[str, FirstAppearance]:
    """Earliest top-K appearance of `word` in every language that ever lists it."""
    out = {}
    for language in corpus.languages:
        for year in corpus.years(language):
            entry = corpus.get(language, year).by_word.get(word)
            if entry is not None:
                out[language] = FirstAppearance(language, year, entry.rank)
                break
    return out


def first_appearance_index(corpus: Corpus) -> dict[str, dict[str, FirstAppearance]]:
    """word -> language -> earliest appearance, built in one pass over the snapshot."""
    index: dict[str, dict[str, FirstAppearance]] = {}
    for language in corpus.languages:
        for year in corpus.years(language):
            for e in corpus.get(language, year).entries:
                per_lang = index.setdefault(e.word, {})
                if language not in per_lang:
                    per_lang[language] = FirstAppearance(language, year, e.rank)
    return index


def attribute_source(appearances: Mapping[str, FirstAppearance]) -> tuple[str, bool]:
    """Pick the source language: earliest year, then lowest rank that year.

    A full (year, rank) tie falls back to the lexicographically smallest
    language code and is flagged ambiguous.
    """
    if len(appearances) < 2:
        raise ValueError("source attribution needs appearances in at least two languages")
    ranked = sorted(appearances.values(), key=lambda a: (a.year, a.rank, a.language))
    best = ranked[0]
    ambiguous = (ranked[1].year, ranked[1].rank) == (best.year, best.rank)
    return best.language, ambiguous


def detect_migrants(corpus: Corpus, exclusions: ExclusionList | None = None) -> list[MigrantWord]:
    """One record per word present in at least two languages' top-K lists.

    Exclusion entries remove individual (word, receiver) pairs; a word whose
    receivers are all excluded disappears from the result entirely. Output is
    sorted by word, so repeated runs over the same snapshot are identical.
    """
    if exclusions is None:
        exclusions = ExclusionList.empty()
    out = []
    index = first_appearance_index(corpus)
    for word in sorted(index):
        appearances = index[word]
        if len(appearances) < 2:
            continue
        source, ambiguous = attribute_source(appearances)
        receivers = {}
        for language, app in sorted(appearances.items()):
            if language == source or exclusions.matches(word, source, language):
                continue
            receivers[language] = app.year
        if not receivers:
            continue
        out.append(MigrantWord(word, source, appearances[source], receivers, ambiguous))
    return out
