"""Sensitivity of the use series to eliminating migrant words."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .ingest import Corpus
from .migration import MigrantWord

LOWEST_RANKS_FIRST = "lowest-ranks-first"
HIGHEST_RANKS_FIRST = "highest-ranks-first"
DIRECTIONS = (LOWEST_RANKS_FIRST, HIGHEST_RANKS_FIRST)

DEFAULT_PROPORTIONS = tuple(p / 100 for p in range(1, 100))


class DegenerateSeriesError(ValueError):
    """Normalization undefined: the series mean is not positive."""


@dataclass(frozen=True)
class EliminationSpec:
    """Remove a proportion of words from one end of the rank ordering."""

    direction: str
    proportion: float

    def __post_init__(self) -> None:
        if self.direction not in DIRECTIONS:
            raise ValueError(f"direction must be one of {DIRECTIONS}, got {self.direction!r}")
        if not 0.0 <= self.proportion < 1.0:
            raise ValueError(f"proportion must be in [0, 1), got {self.proportion}")


@dataclass(frozen=True)
class RobustnessResult:
    """Average distances over the removal grid for one pair and direction.

    `reason` is set (and `points` empty) when the pair has no migrant words
    or no usable use series. `reference_year` is the year whose frequencies
    ordered the elimination.
    """

    source: str
    receiver: str
    direction: str
    points: tuple[tuple[float, float], ...]
    n_years: int
    reference_year: int | None = None
    reason: str | None = None


def removal_count(proportion: float, size: int) -> int:
    """ceil(proportion * size), guarded against float noise at integer boundaries."""
    return math.ceil(round(proportion * size, 9))


def eliminate(words_by_rank: Sequence[str], spec: EliminationSpec) -> list[str]:
    """Survivors after removing ceil(proportion * m) words from the chosen end.

    `words_by_rank` is ordered rank 1 first (most frequent in the reference
    year). The set is never emptied: a removal that would delete every word
    keeps the last survivor and warns.
    """
    m = len(words_by_rank)
    if m == 0:
        return []
    n = removal_count(spec.proportion, m)
    if n >= m:
        warnings.warn(
            f"removing {n} of {m} words would empty the set; keeping one survivor",
            RuntimeWarning,
            stacklevel=2,
        )
        n = m - 1
    if n == 0:
        return list(words_by_rank)
    if spec.direction == LOWEST_RANKS_FIRST:
        return list(words_by_rank[n:])
    return list(words_by_rank[: m - n])


def normalize_series(values: Iterable[float]) -> np.ndarray:
    """Series divided by its arithmetic mean, so the result averages to one."""
    arr = np.asarray(list(values) if not isinstance(values, np.ndarray) else values, dtype=float)
    if arr.size == 0:
        raise DegenerateSeriesError("cannot normalize an empty series")
    mean = float(arr.mean())
    if mean <= 0.0:
        raise DegenerateSeriesError(f"series mean must be positive, got {mean}")
    return arr / mean


def average_distance(u: Iterable[float], v: Iterable[float]) -> float:
    """Mean absolute difference between two aligned series."""
    a = np.asarray(list(u) if not isinstance(u, np.ndarray) else u, dtype=float)
    b = np.asarray(list(v) if not isinstance(v, np.ndarray) else v, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"series lengths differ: {a.shape[0]} vs {b.shape[0]}")
    if a.size == 0:
        raise ValueError("series must contain at least one point")
    return float(np.mean(np.abs(a - b)))


def _pair_matrix(
    migrants: Iterable[MigrantWord],
    corpus: Corpus,
    source: str,
    receiver: str,
    years: Iterable[int],
) -> tuple[list[str], list[int], np.ndarray, np.ndarray, int] | None:
    """Frequencies of the pair's migrant words per usable year.

    Returns (words in reference-rank order, usable years, year-by-word
    frequency matrix, per-year list totals, reference year), or None when the
    pair has no usable years. The matrix already zeroes out years before a
    word's first migration.
    """
    pair_words = {}
    for w in migrants:
        if w.source == source and receiver in w.receivers:
            pair_words[w.word] = w.receivers[receiver]
    if not pair_words:
        return None
    usable = []
    for year in years:
        ranked = corpus.get(receiver, year)
        if ranked is not None and ranked.total_frequency > 0:
            usable.append(year)
    if not usable:
        return None
    reference_year = max(usable)
    ref = corpus.get(receiver, reference_year).by_word
    ordered = sorted(
        pair_words,
        key=lambda word: (-(ref[word].frequency if word in ref else 0), word),
    )
    matrix = np.zeros((len(usable), len(ordered)))
    totals = np.empty(len(usable))
    for i, year in enumerate(usable):
        ranked = corpus.get(receiver, year)
        totals[i] = ranked.total_frequency
        by_word = ranked.by_word
        for j, word in enumerate(ordered):
            if pair_words[word] <= year:
                entry = by_word.get(word)
                if entry is not None:
                    matrix[i, j] = entry.frequency
    return ordered, usable, matrix, totals, reference_year


def robustness_sweep(
    migrants: Iterable[MigrantWord],
    corpus: Corpus,
    source: str,
    receiver: str,
    direction: str,
    years: Iterable[int],
    proportions: Sequence[float] | None = None,
) -> RobustnessResult:
    """Average distance between the original and reduced use series per proportion.

    Both series are normalized by their own means before the distance is
    taken. A reduced series that is identically zero has no normalization;
    its distance is reported as NaN.
    """
    if proportions is None:
        proportions = DEFAULT_PROPORTIONS
    migrants = list(migrants)
    built = _pair_matrix(migrants, corpus, source, receiver, years)
    if built is None:
        return RobustnessResult(
            source, receiver, direction, (), 0, None, reason="no migrant words or usable years for this pair"
        )
    ordered, usable, matrix, totals, reference_year = built
    full = matrix.sum(axis=1) / totals
    mean_full = full.mean()
    if mean_full <= 0.0:
        return RobustnessResult(
            source,
            receiver,
            direction,
            (),
            len(usable),
            reference_year,
            reason="use series is identically zero over the window",
        )
    norm_full = full / mean_full
    column = {word: j for j, word in enumerate(ordered)}
    points = []
    for proportion in proportions:
        survivors = eliminate(ordered, EliminationSpec(direction, proportion))
        reduced = matrix[:, [column[w] for w in survivors]].sum(axis=1) / totals
        mean_reduced = reduced.mean()
        if mean_reduced > 0.0:
            distance = float(np.mean(np.abs(norm_full - reduced / mean_reduced)))
        else:
            distance = math.nan
        points.append((float(proportion), distance))
    return RobustnessResult(
        source, receiver, direction, tuple(points), len(usable), reference_year
    )
