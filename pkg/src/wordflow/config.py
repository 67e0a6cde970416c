"""Declarative run configuration: languages, shard globs, year range, K, paths."""

from __future__ import annotations

import glob
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import yaml

DEFAULT_K = 5000
DEFAULT_YEAR_MIN = 1740
DEFAULT_YEAR_MAX = 2009
DEFAULT_USE_YEAR_MIN = 1900
DEFAULT_USE_YEAR_MAX = 2009

CACHE_DIR_ENV = "WORDFLOW_CACHE_DIR"

_KNOWN_KEYS = {
    "languages",
    "shards",
    "year_min",
    "year_max",
    "k",
    "stopwords",
    "exclusions",
    "cache_dir",
    "use_year_min",
    "use_year_max",
}


class ConfigError(ValueError):
    """Invalid or unreadable run configuration."""


@dataclass(frozen=True)
class CorpusConfig:
    """All parameters of one corpus run.

    Relative paths and globs are resolved against `base_dir`, normally the
    directory containing the config file.
    """

    languages: tuple[str, ...]
    shards: Mapping[str, tuple[str, ...]] = field(default_factory=dict)
    year_min: int = DEFAULT_YEAR_MIN
    year_max: int = DEFAULT_YEAR_MAX
    k: int = DEFAULT_K
    stopword_paths: Mapping[str, Path] = field(default_factory=dict)
    exclusions_path: Path | None = None
    cache_dir: Path | None = None
    use_year_min: int = DEFAULT_USE_YEAR_MIN
    use_year_max: int = DEFAULT_USE_YEAR_MAX
    base_dir: Path = Path(".")

    def __post_init__(self) -> None:
        if not self.languages:
            raise ConfigError("at least one language is required")
        seen = set()
        for code in self.languages:
            if not code or code != code.lower():
                raise ConfigError(f"language codes must be non-empty lowercase, got {code!r}")
            if code in seen:
                raise ConfigError(f"duplicate language code {code!r}")
            seen.add(code)
        if self.year_min > self.year_max:
            raise ConfigError(f"year_min {self.year_min} exceeds year_max {self.year_max}")
        if self.k < 1:
            raise ConfigError(f"k must be >= 1, got {self.k}")
        if self.use_year_min > self.use_year_max:
            raise ConfigError(
                f"use_year_min {self.use_year_min} exceeds use_year_max {self.use_year_max}"
            )

    def _resolve(self, path: str | Path) -> Path:
        p = Path(path)
        return p if p.is_absolute() else Path(self.base_dir) / p

    def shard_paths(self, language: str) -> list[Path]:
        """Existing shard files matching the language's globs, sorted."""
        paths: set[Path] = set()
        for pattern in self.shards.get(language, ()):
            resolved = self._resolve(pattern)
            paths.update(Path(p) for p in glob.glob(str(resolved)))
        return sorted(p for p in paths if p.is_file())

    def use_years(self) -> range:
        return range(self.use_year_min, self.use_year_max + 1)

    def replace(self, **changes) -> CorpusConfig:
        from dataclasses import replace

        return replace(self, **changes)


def _as_str_list(value, key: str) -> list[str]:
    if isinstance(value, str):
        return [value]
    if isinstance(value, list) and all(isinstance(v, str) for v in value):
        return list(value)
    raise ConfigError(f"{key!r} must be a string or list of strings")


def _as_int(value, key: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{key!r} must be an integer, got {value!r}")
    return value


def parse_config(data: dict, base_dir: str | Path = ".") -> CorpusConfig:
    """Validate a parsed config document and build a CorpusConfig."""
    if not isinstance(data, dict):
        raise ConfigError("config document must be a mapping")
    unknown = set(data) - _KNOWN_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    if "languages" not in data:
        raise ConfigError("config is missing the 'languages' list")
    languages = tuple(_as_str_list(data["languages"], "languages"))

    shards_raw = data.get("shards", {})
    if not isinstance(shards_raw, dict):
        raise ConfigError("'shards' must map language codes to glob patterns")
    shards = {}
    for lang, patterns in shards_raw.items():
        if lang not in languages:
            raise ConfigError(f"'shards' names unknown language {lang!r}")
        shards[lang] = tuple(_as_str_list(patterns, f"shards.{lang}"))

    stopwords_raw = data.get("stopwords", {})
    if not isinstance(stopwords_raw, dict):
        raise ConfigError("'stopwords' must map language codes to file paths")
    stopword_paths = {}
    base = Path(base_dir)
    for lang, path in stopwords_raw.items():
        if lang not in languages:
            raise ConfigError(f"'stopwords' names unknown language {lang!r}")
        if not isinstance(path, str):
            raise ConfigError(f"stopwords.{lang} must be a path string")
        p = Path(path)
        stopword_paths[lang] = p if p.is_absolute() else base / p

    exclusions = data.get("exclusions")
    if exclusions is not None and not isinstance(exclusions, str):
        raise ConfigError("'exclusions' must be a path string")

    cache_dir = os.environ.get(CACHE_DIR_ENV) or data.get("cache_dir")
    if cache_dir is not None and not isinstance(cache_dir, str):
        raise ConfigError("'cache_dir' must be a path string")

    def resolve_opt(value: str | None) -> Path | None:
        if value is None:
            return None
        p = Path(value)
        return p if p.is_absolute() else base / p

    return CorpusConfig(
        languages=languages,
        shards=shards,
        year_min=_as_int(data.get("year_min", DEFAULT_YEAR_MIN), "year_min"),
        year_max=_as_int(data.get("year_max", DEFAULT_YEAR_MAX), "year_max"),
        k=_as_int(data.get("k", DEFAULT_K), "k"),
        stopword_paths=stopword_paths,
        exclusions_path=resolve_opt(exclusions),
        cache_dir=resolve_opt(cache_dir),
        use_year_min=_as_int(data.get("use_year_min", DEFAULT_USE_YEAR_MIN), "use_year_min"),
        use_year_max=_as_int(data.get("use_year_max", DEFAULT_USE_YEAR_MAX), "use_year_max"),
        base_dir=base,
    )


def load_config(path: str | Path) -> CorpusConfig:
    """Load a YAML (or JSON) config file.

    The WORDFLOW_CACHE_DIR environment variable overrides the configured
    cache directory; no other key has an environment override.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        if path.suffix == ".json":
            data = json.loads(text)
        else:
            data = yaml.safe_load(text)
    except (ValueError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from exc
    return parse_config(data, base_dir=path.parent)
