"""Plot-ready CSV/JSON report writers with byte-deterministic output."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

from .flowmetrics import FlowCount, UseSeries, ZipfCurve, ZipfFit
from .migration import MigrantWord
from .rankdiversity import DiversityCurve, SigmoidFit, saturation_epsilon
from .robustness import RobustnessResult


def fmt6(value: float) -> str:
    """Six significant digits; full precision lives in the JSON sidecars."""
    return format(value, ".6g")


def _write_json(path: Path, payload) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _csv_writer(fh):
    return csv.writer(fh, lineterminator="\n")


def write_migrant_report(path: str | Path, migrants: Iterable[MigrantWord]) -> None:
    """TSV with one row per (word, receiver) pair."""
    rows = []
    for w in migrants:
        for receiver, year in sorted(w.receivers.items()):
            rows.append(
                (
                    w.word,
                    w.source,
                    w.source_first.year,
                    w.source_first.rank,
                    receiver,
                    year,
                    "true" if w.ambiguous_source else "false",
                )
            )
    rows.sort(key=lambda r: (r[0], r[4]))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("word\tsource\tsource_year\tsource_rank\treceiver\treceiver_year\tambiguous\n")
        for row in rows:
            fh.write("\t".join(str(v) for v in row) + "\n")


def write_nmw_report(
    csv_path: str | Path, words_path: str | Path, flows: Sequence[FlowCount]
) -> None:
    """`decade,source,receiver,count` rows plus a word-list sidecar."""
    flows = sorted(flows, key=lambda f: (f.decade.start_year, f.source, f.receiver))
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        writer = _csv_writer(fh)
        writer.writerow(["decade", "source", "receiver", "count"])
        for flow in flows:
            writer.writerow([flow.decade.start_year, flow.source, flow.receiver, flow.count])
    with open(words_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("decade\tsource\treceiver\tword\n")
        for flow in flows:
            for word in flow.words:
                fh.write(f"{flow.decade.start_year}\t{flow.source}\t{flow.receiver}\t{word}\n")


def write_use_report(
    csv_path: str | Path,
    series: Sequence[UseSeries],
    sidecar_path: str | Path | None = None,
) -> None:
    """`source,receiver,year,use` rows; the optional sidecar keeps full precision."""
    ordered = sorted(series, key=lambda s: (s.source, s.receiver))
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        writer = _csv_writer(fh)
        writer.writerow(["source", "receiver", "year", "use"])
        for s in ordered:
            for year, value in s.points:
                writer.writerow([s.source, s.receiver, year, fmt6(value)])
    if sidecar_path is not None:
        payload = [
            {
                "source": s.source,
                "receiver": s.receiver,
                "points": [{"year": year, "use": value} for year, value in s.points],
            }
            for s in ordered
        ]
        _write_json(Path(sidecar_path), payload)


def write_zipf_report(
    csv_path: str | Path,
    fits_path: str | Path,
    results: Sequence[tuple[ZipfCurve, ZipfFit | None]],
) -> None:
    """`source,receiver,year,rank,frequency` rows plus a fit-summary JSON."""
    ordered = sorted(results, key=lambda cf: (cf[0].source, cf[0].receiver, cf[0].year))
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        writer = _csv_writer(fh)
        writer.writerow(["source", "receiver", "year", "rank", "frequency"])
        for curve, _ in ordered:
            for rank, frequency in curve.points:
                writer.writerow([curve.source, curve.receiver, curve.year, rank, frequency])
    fits = []
    for curve, fit in ordered:
        record = {
            "source": curve.source,
            "receiver": curve.receiver,
            "year": curve.year,
            "n_words": len(curve.points),
        }
        if fit is None:
            record["fit"] = None
        else:
            record["fit"] = {
                "slope": fit.slope,
                "intercept": fit.intercept,
                "r_squared": fit.r_squared,
                "n_points": fit.n_points,
                "fit_min_rank": fit.fit_min_rank,
                "fit_max_rank": fit.fit_max_rank,
            }
        fits.append(record)
    _write_json(Path(fits_path), fits)


def _fit_payload(fit: SigmoidFit | None):
    if fit is None:
        return None
    return {
        "mu": fit.mu,
        "sigma": fit.sigma,
        "r_squared": fit.r_squared,
        "n_points": fit.n_points,
    }


def write_diversity_report(
    csv_path: str | Path,
    fits_path: str | Path,
    entries: Sequence[tuple[DiversityCurve, SigmoidFit | None]],
    pooled: SigmoidFit | None,
) -> None:
    """`source,receiver,rank,diversity` rows plus per-pair and global fits."""
    ordered = sorted(entries, key=lambda cf: (cf[0].source or "", cf[0].receiver or ""))
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        writer = _csv_writer(fh)
        writer.writerow(["source", "receiver", "rank", "diversity"])
        for curve, _ in ordered:
            for rank, value in curve.points:
                writer.writerow([curve.source, curve.receiver, rank, fmt6(value)])
    payload = {
        "pairs": [
            {
                "source": curve.source,
                "receiver": curve.receiver,
                "time_slots": curve.n_slots,
                "saturation_epsilon": saturation_epsilon(curve),
                "fit": _fit_payload(fit),
            }
            for curve, fit in ordered
        ],
        "global": _fit_payload(pooled),
        "saturation_handling": (
            "points with diversity <= eps or >= 1-eps are excluded from the probit "
            "regression; eps = 1/(2*time_slots)"
        ),
    }
    _write_json(Path(fits_path), payload)


def write_robustness_report(
    csv_path: str | Path,
    meta_path: str | Path,
    results: Sequence[RobustnessResult],
    sidecar_path: str | Path | None = None,
) -> None:
    """`source,receiver,direction,removal_proportion,avg_distance` rows plus metadata."""
    ordered = sorted(results, key=lambda r: (r.source, r.receiver, r.direction))
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        writer = _csv_writer(fh)
        writer.writerow(["source", "receiver", "direction", "removal_proportion", "avg_distance"])
        for result in ordered:
            for proportion, distance in result.points:
                writer.writerow(
                    [result.source, result.receiver, result.direction, fmt6(proportion), fmt6(distance)]
                )
    meta = {
        "removal_rounding": "ceil(proportion * word_count), never removing the whole set",
        "pairs": [
            {
                "source": r.source,
                "receiver": r.receiver,
                "direction": r.direction,
                "n_years": r.n_years,
                "reference_year": r.reference_year,
                "reason": r.reason,
            }
            for r in ordered
        ],
    }
    _write_json(Path(meta_path), meta)
    if sidecar_path is not None:
        payload = [
            {
                "source": r.source,
                "receiver": r.receiver,
                "direction": r.direction,
                "points": [
                    {"removal_proportion": p, "avg_distance": None if math.isnan(d) else d}
                    for p, d in r.points
                ],
            }
            for r in ordered
        ]
        _write_json(Path(sidecar_path), payload)
