"""Metric definitions, report invariants, and CSV output."""

import csv
import random

import pytest

from venuerec.corpus import Corpus
from venuerec.evaluation import (
    EvalReport,
    accuracy_at,
    evaluate_index,
    mrr,
    rank_of_truth,
    sweep_lambda,
    write_reports_csv,
)
from venuerec.index import build_index
from venuerec.profiles import default_tokenizer

TOKENIZE = default_tokenizer()

from conftest import make_article, make_profile


class TestRankOfTruth:
    def test_found(self):
        ranking = [("v2", 0.9), ("v7", 0.5), ("v1", 0.1)]
        assert rank_of_truth(ranking, "v2") == 1
        assert rank_of_truth(ranking, "v1") == 3

    def test_absent(self):
        assert rank_of_truth([("v2", 0.9)], "vX") is None
        assert rank_of_truth([], "vX") is None


class TestAccuracyAt:
    def test_hand_example(self):
        ranks = [1, 3, None, 12]
        assert accuracy_at(ranks, 1) == 0.25
        assert accuracy_at(ranks, 5) == 0.5
        assert accuracy_at(ranks, 12) == 0.75
        assert accuracy_at(ranks, 100) == 0.75

    def test_all_hits_and_misses(self):
        assert accuracy_at([1, 1, 1], 1) == 1.0
        assert accuracy_at([None, None], 10) == 0.0

    def test_validation(self):
        with pytest.raises(ValueError):
            accuracy_at([], 1)
        with pytest.raises(ValueError):
            accuracy_at([1], 0)

    def test_matches_counting_oracle(self):
        rng = random.Random(5)
        for _ in range(100):
            ranks = [
                None if rng.random() < 0.3 else rng.randint(1, 50)
                for _ in range(rng.randint(1, 30))
            ]
            for x in (1, 5, 10, 40):
                hits = len([r for r in ranks if r is not None and r <= x])
                assert accuracy_at(ranks, x) == hits / len(ranks)


class TestMrr:
    def test_hand_example(self):
        # (1/1 + 1/2 + 1/4) / 3
        assert mrr([1, 2, 4]) == pytest.approx(7.0 / 12.0, abs=1e-15)

    def test_cutoff_excludes_deep_ranks(self):
        assert mrr([1, 41], cutoff=40) == pytest.approx(0.5)
        assert mrr([41], cutoff=40) == 0.0
        assert mrr([40], cutoff=40) == pytest.approx(1.0 / 40.0)

    def test_none_contributes_zero(self):
        assert mrr([None, 1], cutoff=40) == pytest.approx(0.5)

    def test_validation(self):
        with pytest.raises(ValueError):
            mrr([])
        with pytest.raises(ValueError):
            mrr([1], cutoff=0)

    def test_matches_direct_sum(self):
        rng = random.Random(17)
        for _ in range(100):
            ranks = [
                None if rng.random() < 0.2 else rng.randint(1, 80)
                for _ in range(rng.randint(1, 25))
            ]
            want = sum(1.0 / r for r in ranks if r is not None and r <= 40) / len(ranks)
            assert mrr(ranks, 40) == want


class TestEvalReport:
    def report(self, **overrides):
        base = dict(
            config={"features": "combined", "lambda_blend": 0.75},
            n_queries=4,
            acc_at={1: 0.25, 5: 0.5, 10: 0.5},
            mrr_value=0.3,
        )
        base.update(overrides)
        return EvalReport(**base)

    def test_accuracy_must_be_monotone(self):
        with pytest.raises(ValueError, match="non-decreasing"):
            self.report(acc_at={1: 0.9, 5: 0.5, 10: 0.5})

    def test_fingerprint_depends_only_on_config(self):
        a = self.report()
        b = self.report(mrr_value=0.99)
        assert a.fingerprint == b.fingerprint
        c = self.report(config={"features": "cb"})
        assert c.fingerprint != a.fingerprint
        assert len(a.fingerprint) == 12

    def test_text_rendering(self):
        text = self.report().to_text()
        assert "accuracy@1 = 0.2500" in text
        assert "mrr = 0.3000" in text
        assert "queries = 4" in text

    def test_csv_row_and_file(self, tmp_path):
        rep = self.report(
            config={
                "features": "combined",
                "strategy": "gp",
                "n_clusters": 60,
                "seed": 0,
                "lambda_s": 0.1,
                "lambda_blend": 0.75,
                "depth": 1000,
                "mrr_cutoff": 40,
            }
        )
        row = rep.csv_row()
        assert row["acc_at_1"] == "0.250000"
        assert row["strategy"] == "gp"
        path = tmp_path / "report.csv"
        write_reports_csv([rep, rep], path)
        with path.open(newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 2
        assert rows[0]["fingerprint"] == rep.fingerprint
        assert rows[0]["mrr"] == "0.300000"


def tiny_setup():
    """Two clearly separated venues so ranks are predictable."""
    profiles = [
        make_profile("va", "va", content={"alpha": 5, "beta": 1}, authors={"x1": 3}),
        make_profile("vb", "vb", content={"gamma": 5, "delta": 1}, authors={"x2": 3}),
    ]
    index = build_index(profiles)
    test = Corpus.from_articles(
        [
            make_article(1, "va", year=2016, text="alpha alpha beta"),
            make_article(2, "vb", year=2016, text="gamma delta"),
            make_article(3, "va", year=2016, text="gamma"),  # fooled by vb
        ]
    )
    return index, test


class TestEvaluateIndex:
    def test_metrics_on_tiny_corpus(self):
        index, test = tiny_setup()
        rep = evaluate_index(
            index, test, TOKENIZE, features="cb", lambda_s=0.5
        )
        # queries 1 and 2 rank their truth first; query 3 retrieves only vb
        assert rep.n_queries == 3
        assert rep.acc_at[1] == pytest.approx(2.0 / 3.0)
        assert rep.mrr_value == pytest.approx(2.0 / 3.0)

    def test_unseen_venue_counted(self):
        index, test = tiny_setup()
        extra = Corpus.from_articles(
            list(test.articles) + [make_article(9, "vZ", year=2016, text="alpha")]
        )
        rep = evaluate_index(index, extra, TOKENIZE, features="cb")
        assert rep.n_unseen_venues == 1
        assert rep.acc_at[1] == pytest.approx(0.5)

    def test_validation(self):
        index, test = tiny_setup()
        with pytest.raises(ValueError, match="features"):
            evaluate_index(index, test, TOKENIZE, features="magic")

    def test_author_only_uses_author_field(self):
        index, _ = tiny_setup()
        test = Corpus.from_articles(
            [make_article(1, "va", year=2016, text="gamma", authors=["x1"])]
        )
        rep = evaluate_index(index, test, TOKENIZE, features="au")
        assert rep.acc_at[1] == 1.0


class TestSweepLambda:
    def test_endpoints_match_single_feature_runs(self):
        index, test = tiny_setup()
        reports = sweep_lambda(
            index, test, TOKENIZE, lambdas=[0.0, 0.5, 1.0]
        )
        assert len(reports) == 3
        author_only = evaluate_index(index, test, TOKENIZE, features="au")
        content_only = evaluate_index(index, test, TOKENIZE, features="cb")
        assert reports[0].acc_at == author_only.acc_at
        assert reports[0].mrr_value == author_only.mrr_value
        assert reports[-1].acc_at == content_only.acc_at
        assert reports[-1].mrr_value == content_only.mrr_value

    def test_validation(self):
        index, test = tiny_setup()
        with pytest.raises(ValueError):
            sweep_lambda(index, test, TOKENIZE, lambdas=[])
        with pytest.raises(ValueError):
            sweep_lambda(index, test, TOKENIZE, lambdas=[1.5])
