import gzip

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wordflow.config import CorpusConfig
from wordflow.ingest import (
    Corpus,
    IngestError,
    NgramRecord,
    RankedEntry,
    ShardParseError,
    StopwordSet,
    build_ranked_list,
    cache_is_fresh,
    default_stopwords,
    ingest_corpus,
    load_corpus,
    load_stopwords,
    normalize_word,
    parse_shard_line,
    ranked_list_from_counts,
    read_cached_corpus,
)


class TestParseShardLine:
    def test_plain_record(self):
        assert parse_shard_line("market\t1999\t523\t410") == NgramRecord("market", 1999, 523)

    def test_pos_tagged_token_is_skipped(self):
        assert parse_shard_line("market_NOUN\t1999\t523\t410") is None

    def test_numeric_token_is_skipped(self):
        assert parse_shard_line("1942\t1999\t523\t410") is None

    def test_non_numeric_count_is_error(self):
        with pytest.raises(ShardParseError) as err:
            parse_shard_line("market\t1999\tabc\t410", line_no=7)
        assert err.value.line_no == 7
        assert "line 7" in str(err.value)

    def test_bad_field_count_is_error(self):
        with pytest.raises(ShardParseError):
            parse_shard_line("market\t1999\t523")

    def test_negative_count_is_error(self):
        with pytest.raises(ShardParseError):
            parse_shard_line("market\t1999\t-3\t410")

    def test_trailing_newline_tolerated(self):
        assert parse_shard_line("market\t1999\t523\t410\n") == NgramRecord("market", 1999, 523)


class TestNormalizeWord:
    @pytest.mark.parametrize(
        "raw,expected",
        [
            ("Internet", "internet"),
            ("don't", "don't"),
            ("don’t", "don't"),
            ("well-known", "well-known"),
            ("café", "café"),
            ("Über", "über"),
        ],
    )
    def test_accepted(self, raw, expected):
        assert normalize_word(raw) == expected

    @pytest.mark.parametrize(
        "raw",
        ["1942", "a1", "market_NOUN", "_NOUN_", "", "up.", "(word", "-dash", "dash-", "'quote", "--", "'"],
    )
    def test_rejected(self, raw):
        assert normalize_word(raw) is None

    @given(st.text(min_size=1, max_size=20))
    def test_idempotent(self, raw):
        first = normalize_word(raw)
        if first is not None:
            assert normalize_word(first) == first


class TestBuildRankedList:
    def test_aggregates_equal_words(self):
        records = [NgramRecord("rome", 1900, 10), NgramRecord("war", 1900, 7), NgramRecord("rome", 1900, 5)]
        ranked = build_ranked_list("en", 1900, records, k=2)
        assert [(e.word, e.frequency, e.rank) for e in ranked.entries] == [("rome", 15, 1), ("war", 7, 2)]
        assert ranked.total_frequency == 22

    def test_excludes_stopwords(self):
        records = [NgramRecord("rome", 1900, 10), NgramRecord("war", 1900, 7), NgramRecord("rome", 1900, 5)]
        sw = StopwordSet("en", frozenset({"rome"}))
        ranked = build_ranked_list("en", 1900, records, stopwords=sw, k=2)
        assert [(e.word, e.frequency, e.rank) for e in ranked.entries] == [("war", 7, 1)]

    def test_tie_breaks_lexicographically(self):
        records = [NgramRecord("beta", 1900, 5), NgramRecord("alpha", 1900, 5)]
        ranked = build_ranked_list("en", 1900, records, k=2)
        assert [e.word for e in ranked.entries] == ["alpha", "beta"]

    def test_empty_input(self):
        ranked = build_ranked_list("en", 1900, [], k=5)
        assert ranked.entries == ()
        assert ranked.total_frequency == 0

    def test_vocabulary_smaller_than_k(self):
        ranked = ranked_list_from_counts("en", 1900, {"one": 3}, k=100)
        assert len(ranked) == 1

    def test_rejects_bad_k(self):
        with pytest.raises(ValueError):
            ranked_list_from_counts("en", 1900, {"one": 3}, k=0)

    @given(
        st.lists(
            st.tuples(st.sampled_from(["ant", "bee", "cat", "dog", "elk", "fox"]), st.integers(0, 100)),
            max_size=30,
        ),
        st.randoms(use_true_random=False),
    )
    @settings(max_examples=200)
    def test_order_independence_and_invariants(self, pairs, rng):
        records = [NgramRecord(w, 1900, c) for w, c in pairs]
        shuffled = list(records)
        rng.shuffle(shuffled)
        a = build_ranked_list("en", 1900, records, k=4)
        b = build_ranked_list("en", 1900, shuffled, k=4)
        assert a == b
        freqs = [e.frequency for e in a.entries]
        assert freqs == sorted(freqs, reverse=True)
        assert [e.rank for e in a.entries] == list(range(1, len(a.entries) + 1))
        assert a.total_frequency == sum(freqs)
        assert len({e.word for e in a.entries}) == len(a.entries)


FIXTURE_LINES = {
    "en": [
        "market\t1900\t10\t3",
        "war\t1900\t7\t2",
        "dog\t1900\t5\t1",
        "the\t1900\t100\t9",
        "market\t1901\t12\t3",
        "war\t1901\t6\t2",
        "peace\t1901\t6\t2",
        "market_NOUN\t1901\t99\t9",
        "1942\t1901\t50\t4",
        "rome\t1600\t88\t7",
    ],
    "fr": [
        "guerre\t1900\t9\t4",
        "paix\t1900\t8\t2",
        "le\t1900\t50\t9",
        "guerre\t1901\t9\t4",
        "market\t1901\t4\t1",
        "paix\t1901\t2\t1",
    ],
}

# Hand-built expectation for the fixture above (stopwords: "the", "le").
FIXTURE_EXPECTED = {
    ("en", 1900): [("market", 10, 1), ("war", 7, 2), ("dog", 5, 3)],
    ("en", 1901): [("market", 12, 1), ("peace", 6, 2), ("war", 6, 3)],
    ("fr", 1900): [("guerre", 9, 1), ("paix", 8, 2)],
    ("fr", 1901): [("guerre", 9, 1), ("market", 4, 2), ("paix", 2, 3)],
}


def write_fixture_shards(root, gz_for=("fr",)):
    shards = {}
    for language, lines in FIXTURE_LINES.items():
        body = "".join(line + "\n" for line in lines)
        if language in gz_for:
            path = root / f"{language}.tsv.gz"
            with gzip.open(path, "wt", encoding="utf-8") as fh:
                fh.write(body)
        else:
            path = root / f"{language}.tsv"
            path.write_text(body, encoding="utf-8")
        shards[language] = (str(path),)
    return shards


def fixture_config(tmp_path, cache_dir=None, **overrides):
    shards = write_fixture_shards(tmp_path)
    kwargs = dict(
        languages=("en", "fr"),
        shards=shards,
        year_min=1900,
        year_max=1909,
        k=3,
        cache_dir=cache_dir,
        use_year_min=1900,
        use_year_max=1901,
        base_dir=tmp_path,
    )
    kwargs.update(overrides)
    return CorpusConfig(**kwargs)


class TestLoadCorpus:
    def test_fixture_matches_hand_built_lists(self, tmp_path):
        corpus, stats = ingest_corpus(fixture_config(tmp_path))
        assert len(corpus) == 4
        for key, expected in FIXTURE_EXPECTED.items():
            ranked = corpus.get(*key)
            assert [(e.word, e.frequency, e.rank) for e in ranked.entries] == expected
            assert ranked.total_frequency == sum(f for _, f, _ in expected)
        assert stats.skipped_token == 2  # POS tag + numeric token
        assert stats.skipped_year == 1  # the 1600 record
        assert corpus.get("en", 1600) is None

    def test_single_language_snapshot_is_valid(self, tmp_path):
        shards = write_fixture_shards(tmp_path)
        config = CorpusConfig(
            languages=("en",),
            shards={"en": shards["en"]},
            year_min=1900,
            year_max=1909,
            k=3,
        )
        corpus, _ = ingest_corpus(config)
        assert corpus.languages == ("en",)

    def test_missing_shard_is_fatal_and_names_the_glob(self, tmp_path):
        config = fixture_config(tmp_path)
        config = config.replace(shards={"en": ("missing-*.tsv",), "fr": config.shards["fr"]})
        with pytest.raises(IngestError, match="missing-"):
            ingest_corpus(config)

    def test_malformed_lines_are_tallied(self, tmp_path):
        path = tmp_path / "xx.tsv"
        path.write_text("good\t1900\t5\t1\nbroken line\nbad\t1900\tx\t1\n", encoding="utf-8")
        config = CorpusConfig(languages=("xx",), shards={"xx": (str(path),)}, year_min=1900, year_max=1901, k=5)
        corpus, stats = ingest_corpus(config)
        assert stats.malformed_lines == 2
        assert [e.word for e in corpus.get("xx", 1900).entries] == ["good"]

    def test_no_stopword_appears_in_any_list(self, tmp_path):
        corpus, _ = ingest_corpus(fixture_config(tmp_path))
        en = default_stopwords("en").words
        fr = default_stopwords("fr").words
        for (language, _), ranked in corpus.items():
            banned = en if language == "en" else fr
            assert not banned & {e.word for e in ranked.entries}


class TestCache:
    def test_roundtrip_and_manifest_hit(self, tmp_path):
        cache = tmp_path / "cache"
        config = fixture_config(tmp_path, cache_dir=cache)
        corpus, _ = ingest_corpus(config)
        assert cache_is_fresh(config)
        reread = read_cached_corpus(config)
        assert reread.items() == corpus.items()

        mtimes = {p: p.stat().st_mtime_ns for p in cache.glob("*.tsv")}
        again = load_corpus(config)
        assert again.items() == corpus.items()
        assert {p: p.stat().st_mtime_ns for p in cache.glob("*.tsv")} == mtimes

    def test_changed_shard_invalidates(self, tmp_path):
        cache = tmp_path / "cache"
        config = fixture_config(tmp_path, cache_dir=cache)
        ingest_corpus(config)
        shard = tmp_path / "en.tsv"
        shard.write_text(shard.read_text(encoding="utf-8") + "extra\t1900\t1\t1\n", encoding="utf-8")
        assert not cache_is_fresh(config)

    def test_changed_k_invalidates(self, tmp_path):
        cache = tmp_path / "cache"
        config = fixture_config(tmp_path, cache_dir=cache)
        ingest_corpus(config)
        assert not cache_is_fresh(config.replace(k=2))

    def test_cache_files_are_plain_tsv(self, tmp_path):
        cache = tmp_path / "cache"
        ingest_corpus(fixture_config(tmp_path, cache_dir=cache))
        text = (cache / "en-1900.tsv").read_text(encoding="utf-8")
        assert text == "1\tmarket\t10\n2\twar\t7\n3\tdog\t5\n"


class TestStopwordFiles:
    def test_load_with_comments_and_normalization(self, tmp_path):
        path = tmp_path / "sw.txt"
        path.write_text("# comment\nThe\n\nOF\nn0t-a-word1\n", encoding="utf-8")
        sw = load_stopwords(path, "en")
        assert sw.words == frozenset({"the", "of"})

    def test_defaults_exist_for_the_five_languages(self):
        for language in ("en", "fr", "de", "it", "es"):
            sw = default_stopwords(language)
            assert sw.words, language
            assert all(normalize_word(w) == w for w in sw.words)

    def test_unknown_language_default_is_empty(self):
        assert default_stopwords("zz").words == frozenset()


def test_corpus_accessors():
    table = {("aa", 1901): {"x": 1}, ("aa", 1900): {"y": 2}, ("bb", 1900): {"z": 3}}
    corpus = Corpus.from_counts(table, k=5)
    assert corpus.languages == ("aa", "bb")
    assert corpus.years("aa") == (1900, 1901)
    assert corpus.get("aa", 1900).entries == (RankedEntry("y", 2, 1),)
    assert corpus.get("cc", 1900) is None
    assert len(corpus) == 3
