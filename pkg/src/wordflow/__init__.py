"""Word-flow analytics over yearly ranked word-frequency lists.

Detects migrant words (identical spellings shared across languages),
attributes each to a source language, and computes flow statistics: new
migrant words per decade, the use measure, Zipf frequency-rank curves, rank
diversity with sigmoid fits, and robustness-by-elimination sweeps.
"""

from .config import ConfigError, CorpusConfig, load_config
from .flowmetrics import (
    Decade,
    FlowCount,
    MissingListError,
    UndefinedUseError,
    UseSeries,
    ZipfCurve,
    ZipfFit,
    accumulated_migrants,
    new_migrant_words,
    nmw_in,
    nmw_out,
    use,
    use_series,
    zipf_curve,
)
from .ingest import (
    Corpus,
    IngestError,
    NgramRecord,
    RankedEntry,
    RankedList,
    ShardParseError,
    StopwordSet,
    build_ranked_list,
    ingest_corpus,
    load_corpus,
    normalize_word,
    parse_shard_line,
)
from .migration import (
    ExclusionEntry,
    ExclusionList,
    FirstAppearance,
    MigrantWord,
    attribute_source,
    detect_migrants,
    first_appearances,
    load_exclusions,
)
from .rankdiversity import (
    DiversityCurve,
    RankOccupancy,
    SigmoidFit,
    diversity,
    fit_sigmoid,
    global_fit,
    rank_occupancy,
)
from .robustness import (
    HIGHEST_RANKS_FIRST,
    LOWEST_RANKS_FIRST,
    EliminationSpec,
    RobustnessResult,
    average_distance,
    eliminate,
    normalize_series,
    robustness_sweep,
)

__version__ = "0.1.0"
