"""Streaming ingestion of yearly word-frequency shards into ranked top-K lists."""

from __future__ import annotations

import gzip
import json
import logging
import os
import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from heapq import nsmallest
from importlib import resources
from pathlib import Path
from typing import IO, TYPE_CHECKING, Iterable, Mapping, NamedTuple

if TYPE_CHECKING:
    from .config import CorpusConfig

logger = logging.getLogger(__name__)

DEFAULT_K = 5000
MANIFEST_NAME = "manifest.json"
MANIFEST_FORMAT = 1

# Curly apostrophes are folded into the plain one so spellings compare equal.
_APOSTROPHES = str.maketrans({"’": "'", "ʼ": "'"})


class IngestError(RuntimeError):
    """Fatal ingestion problem: unreadable shard, corrupt cache, missing input."""


class ShardParseError(ValueError):
    """A shard line with a bad field count or non-numeric year/count."""

    def __init__(self, message: str, line_no: int = 0) -> None:
        super().__init__(f"line {line_no}: {message}" if line_no else message)
        self.line_no = line_no


class NgramRecord(NamedTuple):
    word: str
    year: int
    count: int


class RankedEntry(NamedTuple):
    word: str
    frequency: int
    rank: int


@dataclass(frozen=True)
class StopwordSet:
    """Functional words excluded from one language's rankings."""

    language: str
    words: frozenset[str]

    @classmethod
    def empty(cls, language: str) -> StopwordSet:
        return cls(language, frozenset())


@dataclass(frozen=True)
class RankedList:
    """Top-K words of one (language, year), ranked by descending frequency.

    Ranks run 1..len(entries) with no gaps; `total_frequency` is the exact
    integer sum of the retained entries' frequencies.
    """

    language: str
    year: int
    entries: tuple[RankedEntry, ...]
    total_frequency: int

    @cached_property
    def by_word(self) -> dict[str, RankedEntry]:
        return {e.word: e for e in self.entries}

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, word: str) -> bool:
        return word in self.by_word


@dataclass(frozen=True)
class Corpus:
    """Immutable snapshot of ranked lists keyed by (language, year).

    Missing (language, year) combinations are simply absent; `get` returns
    None for them rather than fabricating an empty list.
    """

    lists: Mapping[tuple[str, int], RankedList]

    def __post_init__(self) -> None:
        object.__setattr__(self, "lists", dict(self.lists))

    @classmethod
    def from_counts(
        cls,
        table: Mapping[tuple[str, int], Mapping[str, int]],
        *,
        k: int = DEFAULT_K,
        stopwords: Mapping[str, StopwordSet] | None = None,
    ) -> Corpus:
        """Build a snapshot directly from per-(language, year) word counts."""
        lists = {}
        for (language, year), counts in table.items():
            sw = stopwords.get(language) if stopwords else None
            lists[(language, year)] = ranked_list_from_counts(language, year, counts, sw, k)
        return cls(lists)

    @cached_property
    def languages(self) -> tuple[str, ...]:
        return tuple(sorted({lang for lang, _ in self.lists}))

    def years(self, language: str) -> tuple[int, ...]:
        return tuple(sorted(year for lang, year in self.lists if lang == language))

    def get(self, language: str, year: int) -> RankedList | None:
        return self.lists.get((language, year))

    def items(self) -> list[tuple[tuple[str, int], RankedList]]:
        return sorted(self.lists.items())

    def __len__(self) -> int:
        return len(self.lists)


@dataclass
class IngestStats:
    """Tallies from one shard-parsing pass."""

    files_read: int = 0
    lines_read: int = 0
    records_kept: int = 0
    skipped_token: int = 0
    skipped_year: int = 0
    malformed_lines: int = 0
    lists_built: int = 0

    def summary(self) -> str:
        return (
            f"files={self.files_read} lines={self.lines_read:,} kept={self.records_kept:,} "
            f"skipped_token={self.skipped_token:,} skipped_year={self.skipped_year:,} "
            f"malformed={self.malformed_lines:,} lists={self.lists_built}"
        )


def normalize_word(raw: str) -> str | None:
    """Canonical form of a corpus token, or None when the token is rejected.

    Case-folds, keeps diacritics, and accepts only letters plus internal
    apostrophes or hyphens. Tokens containing digits, other punctuation, or
    an underscore (POS-tagged forms such as "market_NOUN") are rejected.
    """
    if not raw or "_" in raw:
        return None
    word = unicodedata.normalize("NFC", raw).translate(_APOSTROPHES).casefold()
    if word.isalpha():
        return word
    if word[0] in "'-" or word[-1] in "'-":
        return None
    for ch in word:
        if ch != "'" and ch != "-" and not ch.isalpha():
            return None
    return word


def parse_shard_line(line: str, line_no: int = 0) -> NgramRecord | None:
    """Parse one `ngram TAB year TAB match_count TAB volume_count` line.

    Returns None (skip) for well-formed lines whose token fails
    normalization; raises ShardParseError for malformed lines.
    """
    fields = line.rstrip("\r\n").split("\t")
    if len(fields) != 4:
        raise ShardParseError(f"expected 4 tab-separated fields, got {len(fields)}", line_no)
    try:
        year = int(fields[1])
        count = int(fields[2])
    except ValueError:
        raise ShardParseError("non-numeric year or match_count", line_no) from None
    if count < 0:
        raise ShardParseError("negative match_count", line_no)
    word = normalize_word(fields[0])
    if word is None:
        return None
    return NgramRecord(word, year, count)


def ranked_list_from_counts(
    language: str,
    year: int,
    counts: Mapping[str, int],
    stopwords: StopwordSet | None = None,
    k: int = DEFAULT_K,
) -> RankedList:
    """Build the top-k ranked list from aggregated word counts.

    Frequency ties rank the lexicographically smaller word first, so the
    result is deterministic for any input ordering.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    banned = stopwords.words if stopwords is not None else frozenset()
    top = nsmallest(
        k,
        ((w, c) for w, c in counts.items() if w not in banned),
        key=lambda wc: (-wc[1], wc[0]),
    )
    entries = tuple(RankedEntry(w, c, rank) for rank, (w, c) in enumerate(top, start=1))
    return RankedList(language, year, entries, sum(c for _, c in top))


def build_ranked_list(
    language: str,
    year: int,
    records: Iterable[NgramRecord],
    stopwords: StopwordSet | None = None,
    k: int = DEFAULT_K,
) -> RankedList:
    """Aggregate a record stream for one (language, year) into its top-k list."""
    counts: Counter[str] = Counter()
    for rec in records:
        counts[rec.word] += rec.count
    return ranked_list_from_counts(language, year, counts, stopwords, k)


def _parse_stopword_text(text: str) -> frozenset[str]:
    words = set()
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        word = normalize_word(line)
        if word is not None:
            words.add(word)
    return frozenset(words)


def load_stopwords(path: str | Path, language: str) -> StopwordSet:
    """Read a one-word-per-line stopword file (UTF-8, `#` comments allowed)."""
    text = Path(path).read_text(encoding="utf-8")
    return StopwordSet(language, _parse_stopword_text(text))


def default_stopwords(language: str) -> StopwordSet:
    """Packaged functional-word list for `language`, empty if none is shipped."""
    res = resources.files(__package__).joinpath("data").joinpath("stopwords").joinpath(f"{language}.txt")
    if not res.is_file():
        return StopwordSet.empty(language)
    return StopwordSet(language, _parse_stopword_text(res.read_text(encoding="utf-8")))


def open_shard(path: str | Path) -> IO[str]:
    path = Path(path)
    if path.suffix == ".gz":
        return gzip.open(path, "rt", encoding="utf-8")
    return open(path, "r", encoding="utf-8")


def _aggregate_shard(
    path: Path,
    year_counts: dict[int, Counter],
    year_min: int,
    year_max: int,
    stats: IngestStats,
) -> None:
    """Stream one shard into per-year counters; memory stays O(distinct vocabulary)."""
    try:
        fh = open_shard(path)
    except OSError as exc:
        raise IngestError(f"cannot read shard {path}: {exc}") from exc
    lines = kept = skipped_token = skipped_year = malformed = 0
    with fh:
        try:
            for line in fh:
                lines += 1
                fields = line.rstrip("\r\n").split("\t")
                if len(fields) != 4:
                    malformed += 1
                    continue
                try:
                    year = int(fields[1])
                    count = int(fields[2])
                except ValueError:
                    malformed += 1
                    continue
                if count < 0:
                    malformed += 1
                    continue
                if year < year_min or year > year_max:
                    skipped_year += 1
                    continue
                word = normalize_word(fields[0])
                if word is None:
                    skipped_token += 1
                    continue
                counts = year_counts.get(year)
                if counts is None:
                    counts = year_counts[year] = Counter()
                counts[word] += count
                kept += 1
        except OSError as exc:
            raise IngestError(f"cannot read shard {path}: {exc}") from exc
    stats.files_read += 1
    stats.lines_read += lines
    stats.records_kept += kept
    stats.skipped_token += skipped_token
    stats.skipped_year += skipped_year
    stats.malformed_lines += malformed
    if malformed:
        logger.warning("skipped %d malformed line(s) in %s", malformed, path)


def ingest_corpus(config: CorpusConfig) -> tuple[Corpus, IngestStats]:
    """Parse every configured shard and build the ranked-list snapshot.

    Writes the ranked-list cache (and its manifest) when the configuration
    names a cache directory.
    """
    stats = IngestStats()
    lists: dict[tuple[str, int], RankedList] = {}
    for language in config.languages:
        paths = config.shard_paths(language)
        if not paths:
            patterns = ", ".join(config.shards.get(language, ())) or "<none>"
            raise IngestError(f"no shard files found for language {language!r} (globs: {patterns})")
        year_counts: dict[int, Counter] = {}
        for path in paths:
            _aggregate_shard(path, year_counts, config.year_min, config.year_max, stats)
        stopwords = resolve_stopwords(config, language)
        for year in sorted(year_counts):
            lists[(language, year)] = ranked_list_from_counts(
                language, year, year_counts[year], stopwords, config.k
            )
            stats.lists_built += 1
        year_counts.clear()
    corpus = Corpus(lists)
    if config.cache_dir is not None:
        write_cache(corpus, config)
    return corpus, stats


def resolve_stopwords(config: CorpusConfig, language: str) -> StopwordSet:
    """Configured stopword file for `language`, or the packaged default."""
    override = config.stopword_paths.get(language)
    if override is not None:
        return load_stopwords(override, language)
    return default_stopwords(language)


def load_corpus(config: CorpusConfig) -> Corpus:
    """Return the snapshot, reusing the ranked-list cache when it is fresh."""
    if config.cache_dir is not None and cache_is_fresh(config):
        try:
            return read_cached_corpus(config)
        except IngestError as exc:
            logger.warning("cache unusable (%s); re-ingesting", exc)
    corpus, _ = ingest_corpus(config)
    return corpus


# ── ranked-list cache ──

def _file_fingerprint(path: Path) -> list:
    st = path.stat()
    return [str(path), st.st_size, st.st_mtime_ns]


def corpus_fingerprint(config: CorpusConfig) -> dict:
    """Inputs that determine the cache contents; any change invalidates it."""
    shards = {}
    stopwords = {}
    for language in config.languages:
        shards[language] = [_file_fingerprint(p) for p in config.shard_paths(language)]
        override = config.stopword_paths.get(language)
        if override is not None:
            stopwords[language] = _file_fingerprint(Path(override))
        else:
            stopwords[language] = f"builtin:{language}"
    return {
        "format": MANIFEST_FORMAT,
        "languages": list(config.languages),
        "year_min": config.year_min,
        "year_max": config.year_max,
        "k": config.k,
        "shards": shards,
        "stopwords": stopwords,
    }


def _cache_file(cache_dir: Path, language: str, year: int) -> Path:
    return cache_dir / f"{language}-{year}.tsv"


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def write_cache(corpus: Corpus, config: CorpusConfig) -> None:
    """Write one `rank TAB word TAB frequency` file per list, then the manifest.

    Every file lands atomically, and the manifest is written last, so an
    interrupted run never leaves a cache that claims to be complete.
    """
    cache_dir = Path(config.cache_dir)
    cache_dir.mkdir(parents=True, exist_ok=True)
    years: dict[str, list[int]] = {lang: [] for lang in config.languages}
    for (language, year), ranked in corpus.items():
        lines = [f"{e.rank}\t{e.word}\t{e.frequency}\n" for e in ranked.entries]
        _atomic_write(_cache_file(cache_dir, language, year), "".join(lines))
        years.setdefault(language, []).append(year)
    manifest = {
        "format": MANIFEST_FORMAT,
        "fingerprint": corpus_fingerprint(config),
        "lists": {lang: sorted(ys) for lang, ys in years.items()},
    }
    _atomic_write(cache_dir / MANIFEST_NAME, json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def read_manifest(cache_dir: Path) -> dict | None:
    path = Path(cache_dir) / MANIFEST_NAME
    if not path.is_file():
        return None
    try:
        manifest = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, ValueError):
        return None
    if not isinstance(manifest, dict) or manifest.get("format") != MANIFEST_FORMAT:
        return None
    return manifest


def cache_is_fresh(config: CorpusConfig) -> bool:
    """True when the manifest exists and its input fingerprint still matches."""
    if config.cache_dir is None:
        return False
    manifest = read_manifest(Path(config.cache_dir))
    if manifest is None:
        return False
    try:
        current = corpus_fingerprint(config)
    except OSError:
        return False
    if manifest.get("fingerprint") != current:
        return False
    cache_dir = Path(config.cache_dir)
    return all(
        _cache_file(cache_dir, lang, year).is_file()
        for lang, ys in manifest.get("lists", {}).items()
        for year in ys
    )


def read_ranked_list(path: str | Path, language: str, year: int) -> RankedList:
    """Read one cached ranked list, validating ranks run 1..n in order."""
    entries = []
    total = 0
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            fields = line.rstrip("\n").split("\t")
            if len(fields) != 3:
                raise IngestError(f"corrupt cache file {path}: line {line_no}")
            try:
                rank = int(fields[0])
                frequency = int(fields[2])
            except ValueError:
                raise IngestError(f"corrupt cache file {path}: line {line_no}") from None
            if rank != line_no:
                raise IngestError(f"corrupt cache file {path}: rank gap at line {line_no}")
            entries.append(RankedEntry(fields[1], frequency, rank))
            total += frequency
    return RankedList(language, year, tuple(entries), total)


def read_cached_corpus(config: CorpusConfig) -> Corpus:
    cache_dir = Path(config.cache_dir)
    manifest = read_manifest(cache_dir)
    if manifest is None:
        raise IngestError(f"no usable cache manifest in {cache_dir}")
    lists = {}
    for language, ys in manifest.get("lists", {}).items():
        for year in ys:
            path = _cache_file(cache_dir, language, year)
            lists[(language, int(year))] = read_ranked_list(path, language, int(year))
    return Corpus(lists)
