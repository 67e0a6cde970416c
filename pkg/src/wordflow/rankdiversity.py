"""Rank diversity of accumulated migrant words and its sigmoid profile."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np
from scipy.special import ndtr, ndtri

from .ingest import Corpus
from .migration import MigrantWord
from .flowmetrics import MissingListError, accumulated_migrants

MIN_FIT_POINTS = 4


@dataclass(frozen=True)
class RankOccupancy:
    """Distinct words that held each migrant-internal rank across the years.

    `n_slots` counts only years in which the pair had at least one
    accumulated migrant word; empty years carry no rank information.
    """

    source: str
    receiver: str
    occupants: Mapping[int, frozenset[str]]
    n_slots: int


@dataclass(frozen=True)
class DiversityCurve:
    """Points (rank, diversity); diversity lies in [1/n_slots, 1]."""

    points: tuple[tuple[int, float], ...]
    n_slots: int | None = None
    source: str | None = None
    receiver: str | None = None


@dataclass(frozen=True)
class SigmoidFit:
    """Gaussian-CDF parameters (in log10-rank units) from a probit regression."""

    mu: float
    sigma: float
    r_squared: float
    n_points: int


def rank_occupancy(
    migrants: Iterable[MigrantWord],
    corpus: Corpus,
    source: str,
    receiver: str,
    years: Iterable[int],
) -> RankOccupancy:
    """Collect, per rank, the set of words holding it in each usable year.

    Each year's accumulated migrant words are re-ranked 1..m by that year's
    frequency, ties broken lexicographically.
    """
    migrants = list(migrants)
    occupants: dict[int, set[str]] = {}
    slots = 0
    for year in years:
        try:
            pairs = accumulated_migrants(migrants, corpus, source, receiver, year)
        except MissingListError:
            continue
        if not pairs:
            continue
        slots += 1
        for rank, (word, _) in enumerate(pairs, start=1):
            occupants.setdefault(rank, set()).add(word)
    frozen = {rank: frozenset(words) for rank, words in occupants.items()}
    return RankOccupancy(source, receiver, frozen, slots)


def diversity(occupancy: RankOccupancy) -> DiversityCurve:
    """d(rank) = distinct occupants divided by the number of time slots."""
    if occupancy.n_slots < 1:
        return DiversityCurve((), None, occupancy.source, occupancy.receiver)
    t = occupancy.n_slots
    points = tuple((rank, len(occupancy.occupants[rank]) / t) for rank in sorted(occupancy.occupants))
    return DiversityCurve(points, t, occupancy.source, occupancy.receiver)


def saturation_epsilon(curve: DiversityCurve) -> float:
    """Half-count bound below/above which diversity values carry no probit information."""
    if curve.n_slots:
        return 1.0 / (2.0 * curve.n_slots)
    return 0.0


def probit_points(curve: DiversityCurve, clip_eps: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """(log10 rank, probit diversity) for points inside the saturation bounds.

    Points with d <= eps or d >= 1 - eps (eps = 1/(2 * n_slots) by default)
    are excluded: at the data's resolution they are saturated and their
    probit would be pinned at an arbitrary boundary value.
    """
    eps = saturation_epsilon(curve) if clip_eps is None else clip_eps
    xs = []
    ds = []
    for rank, d in curve.points:
        if d <= eps or d >= 1.0 - eps:
            continue
        xs.append(math.log10(rank))
        ds.append(d)
    return np.asarray(xs, dtype=float), ndtri(np.asarray(ds, dtype=float))


def _regress_probit(x: np.ndarray, z: np.ndarray) -> SigmoidFit | None:
    """Variance-weighted least squares of z against x.

    Each point is weighted by the squared normal density at its probit value,
    the transform's inverse variance under constant noise in diversity, so
    near-saturated points cannot dominate the line. On exactly collinear
    points the weights are irrelevant and the fit is exact.
    """
    if len(x) < MIN_FIT_POINTS:
        return None
    w = np.exp(-z * z) / (2.0 * np.pi)
    sw = float(w.sum())
    if sw <= 0.0:
        return None
    xm = float(w @ x) / sw
    zm = float(w @ z) / sw
    xd = x - xm
    zd = z - zm
    sxx = float(w @ (xd * xd))
    if sxx == 0.0:
        return None
    slope = float(w @ (xd * zd)) / sxx
    if not math.isfinite(slope) or slope <= 0.0:
        return None
    szz = float(w @ (zd * zd))
    if szz == 0.0:
        return None
    residuals = zd - slope * xd
    r_squared = 1.0 - float(w @ (residuals * residuals)) / szz
    intercept = zm - slope * xm
    return SigmoidFit(
        mu=-intercept / slope, sigma=1.0 / slope, r_squared=r_squared, n_points=len(x)
    )


def fit_sigmoid(curve: DiversityCurve, clip_eps: float | None = None) -> SigmoidFit | None:
    """Fit z = (log10 k - mu) / sigma by weighted least squares in probit space.

    Returns None when fewer than four usable points remain or the fitted
    slope is not positive (e.g. a fully saturated curve).
    """
    x, z = probit_points(curve, clip_eps)
    return _regress_probit(x, z)


def global_fit(curves: Iterable[DiversityCurve], clip_eps: float | None = None) -> SigmoidFit | None:
    """One regression over the pooled probit points of several curves."""
    xs = []
    zs = []
    for curve in curves:
        x, z = probit_points(curve, clip_eps)
        xs.append(x)
        zs.append(z)
    if not xs:
        return None
    return _regress_probit(np.concatenate(xs), np.concatenate(zs))


def sigmoid_profile(ranks: Iterable[int], mu: float, sigma: float) -> np.ndarray:
    """Evaluate the fitted Gaussian-CDF diversity model at the given ranks."""
    x = np.log10(np.asarray(list(ranks), dtype=float))
    return ndtr((x - mu) / sigma)
