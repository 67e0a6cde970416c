"""Command-line interface: ingest the corpus and emit every report."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import reports
from .config import ConfigError, CorpusConfig, load_config
from .flowmetrics import Decade, new_migrant_words, use_series, zipf_curve
from .ingest import Corpus, IngestError, cache_is_fresh, ingest_corpus, load_corpus
from .migration import ExclusionList, MigrantWord, detect_migrants, load_exclusions
from .rankdiversity import diversity, fit_sigmoid, global_fit, rank_occupancy
from .robustness import DIRECTIONS, robustness_sweep

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2

logger = logging.getLogger(__name__)


class UsageError(Exception):
    """Bad command usage (unknown pair, missing argument); exits with code 2."""


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wordflow",
        description="Word-flow analytics over yearly ranked word-frequency lists.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, metavar="PATH", help="run configuration file")
    common.add_argument("--k", type=int, metavar="N", help="override the ranked-list cutoff")

    report = argparse.ArgumentParser(add_help=False)
    report.add_argument("--out", default="reports", metavar="DIR", help="report directory")
    report.add_argument(
        "--pair",
        action="append",
        metavar="SRC:DST",
        help="restrict to a source:receiver pair (repeatable)",
    )
    report.add_argument("--years", metavar="A..B", help="analysis year window")

    sidecar = argparse.ArgumentParser(add_help=False)
    sidecar.add_argument("--sidecar", action="store_true", help="also write full-precision JSON")

    sub.add_parser("ingest", parents=[common], help="build the ranked-list cache")
    sub.add_parser("detect", parents=[common, report], help="write the migrant-word report")
    nmw = sub.add_parser("nmw", parents=[common, report], help="count new migrant words per decade")
    nmw.add_argument("--decade-start", type=int, metavar="Y", help="limit to the decade starting at Y")
    sub.add_parser("use", parents=[common, report, sidecar], help="write per-year use series")
    sub.add_parser("zipf", parents=[common, report], help="write frequency-rank curves and fits")
    sub.add_parser("diversity", parents=[common, report], help="write rank-diversity curves and fits")
    sub.add_parser("robustness", parents=[common, report, sidecar], help="write elimination sweeps")
    return parser


def _load_run_config(args) -> CorpusConfig:
    config = load_config(args.config)
    if args.k is not None:
        if args.k < 1:
            raise UsageError(f"--k must be >= 1, got {args.k}")
        config = config.replace(k=args.k)
    return config


def _parse_pairs(config: CorpusConfig, raw_pairs: list[str] | None) -> list[tuple[str, str]]:
    all_pairs = [
        (a, b) for a in config.languages for b in config.languages if a != b
    ]
    if not raw_pairs:
        return all_pairs
    selected = []
    for raw in raw_pairs:
        parts = raw.split(":")
        if len(parts) != 2:
            raise UsageError(f"--pair expects SRC:DST, got {raw!r}")
        pair = (parts[0], parts[1])
        if pair[0] not in config.languages or pair[1] not in config.languages:
            raise UsageError(f"unknown language in pair {raw!r} (configured: {', '.join(config.languages)})")
        if pair[0] == pair[1]:
            raise UsageError(f"pair {raw!r} must name two different languages")
        if pair not in selected:
            selected.append(pair)
    return selected


def _parse_years(config: CorpusConfig, raw: str | None) -> range:
    if raw is None:
        return config.use_years()
    parts = raw.split("..")
    if len(parts) != 2:
        raise UsageError(f"--years expects A..B, got {raw!r}")
    try:
        first, last = int(parts[0]), int(parts[1])
    except ValueError:
        raise UsageError(f"--years expects integer bounds, got {raw!r}") from None
    if first > last:
        raise UsageError(f"--years window is empty: {raw!r}")
    return range(first, last + 1)


def _require_pairs_possible(config: CorpusConfig) -> None:
    if len(config.languages) < 2:
        raise UsageError("migration commands need at least two configured languages")


def _prepare(args) -> tuple[CorpusConfig, Corpus, list[MigrantWord]]:
    config = _load_run_config(args)
    _require_pairs_possible(config)
    corpus = load_corpus(config)
    exclusions = ExclusionList.empty()
    if config.exclusions_path is not None:
        exclusions = load_exclusions(config.exclusions_path)
    migrants = detect_migrants(corpus, exclusions)
    return config, corpus, migrants


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_ingest(args) -> int:
    config = _load_run_config(args)
    if config.cache_dir is None:
        raise UsageError("ingest needs a cache_dir (config key or WORDFLOW_CACHE_DIR)")
    if cache_is_fresh(config):
        print(f"cache up to date: {config.cache_dir}", file=sys.stderr)
        return EXIT_OK
    _, stats = ingest_corpus(config)
    print(f"ingested: {stats.summary()}", file=sys.stderr)
    print(f"cache written: {config.cache_dir}", file=sys.stderr)
    return EXIT_OK


def cmd_detect(args) -> int:
    config, _, migrants = _prepare(args)
    wanted = set(_parse_pairs(config, args.pair))
    filtered = []
    for w in migrants:
        receivers = {r: y for r, y in w.receivers.items() if (w.source, r) in wanted}
        if receivers:
            filtered.append(
                MigrantWord(w.word, w.source, w.source_first, receivers, w.ambiguous_source)
            )
    out = _out_dir(args)
    reports.write_migrant_report(out / "migrants.tsv", filtered)
    print(f"wrote {out / 'migrants.tsv'}", file=sys.stderr)
    return EXIT_OK


def _decades(args, years: range) -> list[Decade]:
    if getattr(args, "decade_start", None) is not None:
        return [Decade(args.decade_start)]
    first = Decade.containing(years.start)
    last = Decade.containing(years[-1])
    return [Decade(y) for y in range(first.start_year, last.start_year + 10, 10)]


def cmd_nmw(args) -> int:
    config, _, migrants = _prepare(args)
    pairs = _parse_pairs(config, args.pair)
    years = _parse_years(config, args.years)
    flows = [
        new_migrant_words(migrants, source, receiver, decade)
        for decade in _decades(args, years)
        for source, receiver in pairs
    ]
    out = _out_dir(args)
    reports.write_nmw_report(out / "nmw.csv", out / "nmw_words.tsv", flows)
    print(f"wrote {out / 'nmw.csv'}", file=sys.stderr)
    return EXIT_OK


def cmd_use(args) -> int:
    config, corpus, migrants = _prepare(args)
    pairs = _parse_pairs(config, args.pair)
    years = _parse_years(config, args.years)
    series = [use_series(migrants, corpus, a, b, years) for a, b in pairs]
    out = _out_dir(args)
    sidecar = out / "use.full.json" if args.sidecar else None
    reports.write_use_report(out / "use.csv", series, sidecar)
    print(f"wrote {out / 'use.csv'}", file=sys.stderr)
    return EXIT_OK


def cmd_zipf(args) -> int:
    config, corpus, migrants = _prepare(args)
    pairs = _parse_pairs(config, args.pair)
    if args.years is None:
        years = range(config.use_year_max, config.use_year_max + 1)
    else:
        years = _parse_years(config, args.years)
    results = []
    for a, b in pairs:
        for year in years:
            if corpus.get(b, year) is None:
                continue
            results.append(zipf_curve(migrants, corpus, a, b, year))
    out = _out_dir(args)
    reports.write_zipf_report(out / "zipf.csv", out / "zipf_fits.json", results)
    print(f"wrote {out / 'zipf.csv'}", file=sys.stderr)
    return EXIT_OK


def cmd_diversity(args) -> int:
    config, corpus, migrants = _prepare(args)
    pairs = _parse_pairs(config, args.pair)
    years = _parse_years(config, args.years)
    entries = []
    for a, b in pairs:
        curve = diversity(rank_occupancy(migrants, corpus, a, b, years))
        entries.append((curve, fit_sigmoid(curve)))
    pooled = global_fit(curve for curve, _ in entries)
    out = _out_dir(args)
    reports.write_diversity_report(out / "diversity.csv", out / "diversity_fits.json", entries, pooled)
    print(f"wrote {out / 'diversity.csv'}", file=sys.stderr)
    return EXIT_OK


def cmd_robustness(args) -> int:
    config, corpus, migrants = _prepare(args)
    pairs = _parse_pairs(config, args.pair)
    years = _parse_years(config, args.years)
    results = [
        robustness_sweep(migrants, corpus, a, b, direction, years)
        for a, b in pairs
        for direction in DIRECTIONS
    ]
    out = _out_dir(args)
    sidecar = out / "robustness.full.json" if args.sidecar else None
    reports.write_robustness_report(
        out / "robustness.csv", out / "robustness_meta.json", results, sidecar
    )
    print(f"wrote {out / 'robustness.csv'}", file=sys.stderr)
    return EXIT_OK


_COMMANDS = {
    "ingest": cmd_ingest,
    "detect": cmd_detect,
    "nmw": cmd_nmw,
    "use": cmd_use,
    "zipf": cmd_zipf,
    "diversity": cmd_diversity,
    "robustness": cmd_robustness,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except IngestError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
