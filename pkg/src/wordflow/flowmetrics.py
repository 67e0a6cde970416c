"""Flow statistics: per-decade new-word counts, accumulated use, Zipf curves."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .ingest import Corpus
from .migration import MigrantWord

MIN_ZIPF_POINTS = 5
DEFAULT_MIN_FIT_RANK = 3


class MissingListError(LookupError):
    """No ranked list exists for the requested (language, year)."""


class UndefinedUseError(ValueError):
    """Use is undefined because the year's list has zero total frequency."""


@dataclass(frozen=True)
class Decade:
    """Calendar-aligned decade [start_year, start_year + 9]."""

    start_year: int

    def __post_init__(self) -> None:
        if self.start_year % 10 != 0:
            raise ValueError(f"decade must start on a multiple of 10, got {self.start_year}")

    @classmethod
    def containing(cls, year: int) -> Decade:
        return cls(year - year % 10)

    @property
    def end_year(self) -> int:
        return self.start_year + 9

    def __contains__(self, year: int) -> bool:
        return self.start_year <= year <= self.end_year

    def __str__(self) -> str:
        return f"{self.start_year}s"


@dataclass(frozen=True)
class FlowCount:
    """New migrant words for one (source, receiver) pair in one decade."""

    source: str
    receiver: str
    decade: Decade
    words: tuple[str, ...]

    @property
    def count(self) -> int:
        return len(self.words)


@dataclass(frozen=True)
class UseSeries:
    """Per-year use of `source` words inside `receiver`; absent years are gaps."""

    source: str
    receiver: str
    points: tuple[tuple[int, float], ...]

    def years(self) -> tuple[int, ...]:
        return tuple(year for year, _ in self.points)

    def values(self) -> tuple[float, ...]:
        return tuple(value for _, value in self.points)


@dataclass(frozen=True)
class ZipfCurve:
    """Accumulated migrant words re-ranked 1..m by year frequency."""

    source: str
    receiver: str
    year: int
    points: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class ZipfFit:
    slope: float
    intercept: float
    r_squared: float
    n_points: int
    fit_min_rank: int
    fit_max_rank: int


def new_migrant_words(
    migrants: Iterable[MigrantWord], source: str, receiver: str, decade: Decade
) -> FlowCount:
    """Words from `source` whose first migration into `receiver` falls in `decade`."""
    if source == receiver:
        raise ValueError("source and receiver must differ")
    words = []
    for w in migrants:
        if w.source != source:
            continue
        year = w.receivers.get(receiver)
        if year is not None and year in decade:
            words.append(w.word)
    return FlowCount(source, receiver, decade, tuple(sorted(words)))


def nmw_out(migrants: Iterable[MigrantWord], language: str, decade: Decade) -> int:
    """Total (word, receiver) pairs exported by `language` during `decade`."""
    return sum(
        1
        for w in migrants
        if w.source == language
        for year in w.receivers.values()
        if year in decade
    )


def nmw_in(migrants: Iterable[MigrantWord], language: str, decade: Decade) -> dict[str, int]:
    """New migrant words arriving in `language` during `decade`, keyed by source."""
    counts: Counter[str] = Counter()
    for w in migrants:
        year = w.receivers.get(language)
        if year is not None and year in decade:
            counts[w.source] += 1
    return dict(counts)


def accumulated_migrants(
    migrants: Iterable[MigrantWord], corpus: Corpus, source: str, receiver: str, year: int
) -> list[tuple[str, int]]:
    """Words from `source` that migrated to `receiver` by `year` and appear in
    that year's list, with their frequencies.

    Sorted by descending frequency (ties lexicographic), i.e. already in
    migrant-internal rank order.
    """
    ranked = corpus.get(receiver, year)
    if ranked is None:
        raise MissingListError(f"no ranked list for {receiver!r} in {year}")
    pairs = []
    for w in migrants:
        if w.source != source:
            continue
        migrated = w.receivers.get(receiver)
        if migrated is None or migrated > year:
            continue
        entry = ranked.by_word.get(w.word)
        if entry is not None:
            pairs.append((w.word, entry.frequency))
    pairs.sort(key=lambda p: (-p[1], p[0]))
    return pairs


def use(
    migrants: Iterable[MigrantWord], corpus: Corpus, source: str, receiver: str, year: int
) -> float:
    """Summed frequency of accumulated migrant words over the list's total.

    Both sums are exact integers; the single final division produces the
    float in [0, 1].
    """
    pairs = accumulated_migrants(migrants, corpus, source, receiver, year)
    ranked = corpus.get(receiver, year)
    if ranked.total_frequency <= 0:
        raise UndefinedUseError(f"empty ranked list for {receiver!r} in {year}")
    return sum(f for _, f in pairs) / ranked.total_frequency


def use_series(
    migrants: Iterable[MigrantWord],
    corpus: Corpus,
    source: str,
    receiver: str,
    years: Iterable[int],
) -> UseSeries:
    """Use per year over `years`; years without a usable list are left out."""
    migrants = list(migrants)
    points = []
    for year in years:
        try:
            points.append((year, use(migrants, corpus, source, receiver, year)))
        except (MissingListError, UndefinedUseError):
            continue
    return UseSeries(source, receiver, tuple(points))


def fit_power_law(
    points: Sequence[tuple[int, float]],
    *,
    min_fit_rank: int = DEFAULT_MIN_FIT_RANK,
    max_fit_rank: int | None = None,
    trim_tied_head: bool = True,
) -> ZipfFit | None:
    """Least-squares slope of log10 frequency against log10 rank.

    The flattened head is trimmed before fitting: ranks tied with the top
    frequency are dropped (when `trim_tied_head`), and the fit starts no
    earlier than `min_fit_rank`. Returns None when fewer than two usable
    points remain.
    """
    start = min_fit_rank
    if trim_tied_head and points:
        top = points[0][1]
        tied = sum(1 for _, f in points if f == top)
        start = max(start, tied + 1)
    sel = [
        (r, f)
        for r, f in points
        if r >= start and (max_fit_rank is None or r <= max_fit_rank) and f > 0
    ]
    if len(sel) < 2:
        return None
    x = np.log10([r for r, _ in sel])
    y = np.log10([f for _, f in sel])
    xd = x - x.mean()
    yd = y - y.mean()
    sxx = float(xd @ xd)
    if sxx == 0.0:
        return None
    slope = float(xd @ yd) / sxx
    intercept = float(y.mean() - slope * x.mean())
    syy = float(yd @ yd)
    if syy == 0.0:
        r_squared = 1.0
    else:
        residuals = yd - slope * xd
        r_squared = 1.0 - float(residuals @ residuals) / syy
    return ZipfFit(slope, intercept, r_squared, len(sel), sel[0][0], sel[-1][0])


def zipf_curve(
    migrants: Iterable[MigrantWord],
    corpus: Corpus,
    source: str,
    receiver: str,
    year: int,
    *,
    min_points: int = MIN_ZIPF_POINTS,
    min_fit_rank: int = DEFAULT_MIN_FIT_RANK,
    max_fit_rank: int | None = None,
    trim_tied_head: bool = True,
) -> tuple[ZipfCurve, ZipfFit | None]:
    """Frequency-rank curve of the year's accumulated migrant words plus its fit.

    With fewer than `min_points` words the raw curve is still returned but
    the fit is refused (None).
    """
    pairs = accumulated_migrants(migrants, corpus, source, receiver, year)
    points = tuple((rank, f) for rank, (_, f) in enumerate(pairs, start=1))
    curve = ZipfCurve(source, receiver, year, points)
    if len(points) < min_points:
        return curve, None
    fit = fit_power_law(
        points,
        min_fit_rank=min_fit_rank,
        max_fit_rank=max_fit_rank,
        trim_tied_head=trim_tied_head,
    )
    return curve, fit
