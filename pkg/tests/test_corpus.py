"""Corpus loading, validation, filtering, and the temporal split."""

import json
import logging

import pytest

from venuerec import Corpus, DataError, SplitSpec
from venuerec.corpus import (
    exclude_venues,
    filter_venues,
    load_corpus,
    parse_record,
    save_corpus,
    split_by_year,
)

from conftest import make_article


def good_record(i=1, venue="v1", year=2010):
    return {
        "id": f"a{i}",
        "venue": venue,
        "year": year,
        "title_abstract": "deep parsing of text",
        "keywords": ["parsing"],
        "authors": ["0000-0001-0000-0001"],
    }


class TestParseRecord:
    def test_valid(self):
        art = parse_record(good_record())
        assert art.article_id == "a1"
        assert art.venue_id == "v1"
        assert art.year == 2010
        assert art.keywords == ("parsing",)

    def test_schema_mapping(self):
        rec = good_record()
        rec["pmid"] = rec.pop("id")
        art = parse_record(rec, schema={"id": "pmid"})
        assert art.article_id == "a1"

    @pytest.mark.parametrize(
        "mutate",
        [
            lambda r: r.update(id=""),
            lambda r: r.update(id=7),
            lambda r: r.update(venue="  "),
            lambda r: r.update(year="2010"),
            lambda r: r.update(year=0),
            lambda r: r.update(year=True),
            lambda r: r.update(title_abstract=None),
            lambda r: r.update(keywords="not a list"),
            lambda r: r.update(keywords=[1, 2]),
            lambda r: r.update(authors=None),
        ],
    )
    def test_invalid_fields(self, mutate):
        rec = good_record()
        mutate(rec)
        with pytest.raises(ValueError):
            parse_record(rec)

    def test_empty_text_needs_keywords(self):
        rec = good_record()
        rec["title_abstract"] = "   "
        assert parse_record(rec).keywords  # still valid: keywords present
        rec["keywords"] = []
        with pytest.raises(ValueError):
            parse_record(rec)

    def test_author_whitespace_trimmed(self):
        rec = good_record()
        rec["authors"] = ["  x1  ", "", "x2"]
        assert parse_record(rec).authors == ("x1", "x2")


class TestLoadSave:
    def test_skips_invalid_lines_with_warning(self, tmp_path, caplog):
        path = tmp_path / "corpus.jsonl"
        lines = [
            json.dumps(good_record(1)),
            "{ not json",
            json.dumps({"id": "a2"}),  # missing fields
            json.dumps(good_record(3)),
            json.dumps(good_record(4, year=-5)),
        ]
        path.write_text("\n".join(lines) + "\n")
        with caplog.at_level(logging.WARNING):
            corpus = load_corpus(path)
        assert len(corpus) == 2
        assert sum("skipping invalid record" in r.message for r in caplog.records) == 3

    def test_duplicate_id_fatal(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        path.write_text(json.dumps(good_record(1)) + "\n" + json.dumps(good_record(1)) + "\n")
        with pytest.raises(DataError, match="duplicate"):
            load_corpus(path)

    def test_unreadable_file(self, tmp_path):
        with pytest.raises(DataError):
            load_corpus(tmp_path / "missing.jsonl")

    def test_all_invalid_is_error(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        path.write_text("not json\n")
        with pytest.raises(DataError, match="no valid articles"):
            load_corpus(path)

    def test_round_trip_bytes_stable(self, tmp_path):
        corpus = Corpus.from_articles(
            [make_article(i, "v1", text="some text here") for i in range(4)]
        )
        p1 = tmp_path / "one.jsonl"
        p2 = tmp_path / "two.jsonl"
        save_corpus(corpus, p1)
        save_corpus(load_corpus(p1), p2)
        assert p1.read_bytes() == p2.read_bytes()


class TestFilterVenues:
    def _corpus(self):
        arts = []
        i = 0
        for venue, count in (("big", 3), ("mid", 2), ("small", 1)):
            for _ in range(count):
                arts.append(make_article(i, venue, text="t"))
                i += 1
        return Corpus.from_articles(arts)

    def test_threshold_keeps_expected_counts(self):
        # tally oracle: venues sized 3/2/1; threshold 2 keeps 3+2 articles
        out = filter_venues(self._corpus(), 2)
        assert out.venue_counts == {"big": 3, "mid": 2}
        assert len(out) == 5

    def test_threshold_one_is_identity(self):
        corpus = self._corpus()
        assert filter_venues(corpus, 1).venue_counts == corpus.venue_counts

    def test_bad_threshold(self):
        with pytest.raises(ValueError):
            filter_venues(self._corpus(), 0)

    def test_everything_filtered_is_error(self):
        with pytest.raises(DataError):
            filter_venues(self._corpus(), 10)

    def test_exclude_venues(self):
        out = exclude_venues(self._corpus(), ["big"])
        assert set(out.venue_counts) == {"mid", "small"}
        with pytest.raises(DataError):
            exclude_venues(self._corpus(), ["big", "mid", "small"])


class TestSplit:
    def test_split_boundary(self):
        arts = [
            make_article(0, "v1", year=2014, text="t"),
            make_article(1, "v1", year=2015, text="t"),
            make_article(2, "v1", year=2016, text="t"),
        ]
        train, test = split_by_year(Corpus.from_articles(arts), SplitSpec(2015))
        assert {a.year for a in train.articles} == {2014, 2015}
        assert {a.year for a in test.articles} == {2016}

    def test_empty_side_is_error(self):
        arts = [make_article(0, "v1", year=2010, text="t")]
        with pytest.raises(DataError):
            split_by_year(Corpus.from_articles(arts), SplitSpec(2015))
        with pytest.raises(DataError):
            split_by_year(Corpus.from_articles(arts), SplitSpec(2005))

    def test_unseen_test_venue_warns(self, caplog):
        arts = [
            make_article(0, "v1", year=2010, text="t"),
            make_article(1, "v2", year=2016, text="t"),
        ]
        with caplog.at_level(logging.WARNING):
            split_by_year(Corpus.from_articles(arts), SplitSpec(2015))
        assert any("never appear in training" in r.message for r in caplog.records)


class TestCorpusContainer:
    def test_duplicate_ids_rejected(self):
        arts = [make_article(0, "v1", text="t"), make_article(0, "v2", text="t")]
        with pytest.raises(DataError):
            Corpus.from_articles(arts)

    def test_counts_and_venue_ids(self):
        corpus = Corpus.from_articles(
            [make_article(0, "b", text="t"), make_article(1, "a", text="t")]
        )
        assert corpus.n_venues == 2
        assert corpus.venue_ids == ("a", "b")
