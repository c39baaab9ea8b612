"""Holdout evaluation: top-X accuracy and mean reciprocal rank.

A test article's true venue is looked up in the recommended venue
ranking; the metrics aggregate those 1-based ranks.  MRR applies a rank
cutoff (default 40): a truth ranked beyond it, or absent entirely,
contributes 0.  Reports render both as human-readable text and as CSV
rows keyed by a fingerprint of the run configuration.
"""

import csv
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

from .corpus import Corpus
from .fusion import FusionParams, VenueRanking, comb_linear
from .index import FieldedIndex
from .recommender import (
    FEATURES,
    VenueRecommender,
    fuse_sides,
    query_from_article,
    side_rankings,
)

DEFAULT_MRR_CUTOFF = 40
ACCURACY_CUTOFFS = (1, 5, 10)

CSV_COLUMNS = (
    "fingerprint",
    "features",
    "strategy",
    "n_clusters",
    "seed",
    "lambda_s",
    "lambda_blend",
    "depth",
    "mrr_cutoff",
    "n_queries",
    "acc_at_1",
    "acc_at_5",
    "acc_at_10",
    "mrr",
)


def rank_of_truth(ranking: VenueRanking, true_venue: str) -> int | None:
    """1-based position of the true venue, or None when it never appears."""
    for pos, (venue, _) in enumerate(ranking, start=1):
        if venue == true_venue:
            return pos
    return None


def accuracy_at(ranks, x: int) -> float:
    """Fraction of queries whose truth ranks within the top ``x``."""
    ranks = list(ranks)
    if not ranks:
        raise ValueError("accuracy over zero queries is undefined")
    if x < 1:
        raise ValueError("x must be >= 1")
    hits = sum(1 for r in ranks if r is not None and r <= x)
    return hits / len(ranks)


def mrr(ranks, cutoff: int = DEFAULT_MRR_CUTOFF) -> float:
    """Mean reciprocal rank with a cutoff; misses contribute zero."""
    ranks = list(ranks)
    if not ranks:
        raise ValueError("MRR over zero queries is undefined")
    if cutoff < 1:
        raise ValueError("cutoff must be >= 1")
    total = sum(
        1.0 / r for r in ranks if r is not None and r <= cutoff
    )
    return total / len(ranks)


@dataclass(frozen=True)
class EvalReport:
    """Metrics for one configuration over one test corpus."""

    config: dict
    n_queries: int
    acc_at: dict[int, float]
    mrr_value: float
    n_unseen_venues: int = 0

    def __post_init__(self):
        accs = [self.acc_at[x] for x in sorted(self.acc_at)]
        # widening the cutoff can only add hits
        for lo, hi in zip(accs, accs[1:]):
            if lo > hi + 1e-12:
                raise ValueError("accuracy must be non-decreasing in the cutoff")

    @property
    def fingerprint(self) -> str:
        blob = json.dumps(self.config, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:12]

    def to_text(self) -> str:
        lines = [f"configuration {self.fingerprint}"]
        for key in sorted(self.config):
            lines.append(f"  {key} = {self.config[key]}")
        lines.append(f"  queries = {self.n_queries}")
        if self.n_unseen_venues:
            lines.append(f"  queries with unseen venue = {self.n_unseen_venues}")
        for x in sorted(self.acc_at):
            lines.append(f"  accuracy@{x} = {self.acc_at[x]:.4f}")
        lines.append(f"  mrr = {self.mrr_value:.4f}")
        return "\n".join(lines)

    def csv_row(self) -> dict:
        return {
            "fingerprint": self.fingerprint,
            "features": self.config.get("features", ""),
            "strategy": self.config.get("strategy", ""),
            "n_clusters": self.config.get("n_clusters", ""),
            "seed": self.config.get("seed", ""),
            "lambda_s": self.config.get("lambda_s", ""),
            "lambda_blend": self.config.get("lambda_blend", ""),
            "depth": self.config.get("depth", ""),
            "mrr_cutoff": self.config.get("mrr_cutoff", ""),
            "n_queries": self.n_queries,
            "acc_at_1": f"{self.acc_at.get(1, 0.0):.6f}",
            "acc_at_5": f"{self.acc_at.get(5, 0.0):.6f}",
            "acc_at_10": f"{self.acc_at.get(10, 0.0):.6f}",
            "mrr": f"{self.mrr_value:.6f}",
        }


def write_reports_csv(reports, path) -> None:
    """Write reports as CSV with a fixed column order."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        for rep in reports:
            writer.writerow(rep.csv_row())


def _collect_sides(index: FieldedIndex, test: Corpus, tokenize, retrieval: dict):
    """Per-query normalized side rankings plus the truth label."""
    known = set(index.doc_venue.values())
    rows = []
    unseen = 0
    for art in test.articles:
        query = query_from_article(art, tokenize)
        content_side, author_side = side_rankings(
            index,
            query,
            lambda_s=retrieval["lambda_s"],
            depth=retrieval["depth"],
            content_weight=retrieval["content_weight"],
            keyword_weight=retrieval["keyword_weight"],
            author_weight=retrieval["author_weight"],
        )
        if art.venue_id not in known:
            unseen += 1
        rows.append((content_side, author_side, art.venue_id))
    return rows, unseen


def _metrics(ranks, mrr_cutoff):
    return (
        {x: accuracy_at(ranks, x) for x in ACCURACY_CUTOFFS},
        mrr(ranks, mrr_cutoff),
    )


def evaluate_index(
    index: FieldedIndex,
    test: Corpus,
    tokenize,
    *,
    features: str = "combined",
    lambda_blend: float = 0.75,
    lambda_s: float = 0.1,
    depth: int = 1000,
    content_weight: float = 1.0,
    keyword_weight: float = 1.0,
    author_weight: float = 1.0,
    mrr_cutoff: int = DEFAULT_MRR_CUTOFF,
    config_extra: dict | None = None,
) -> EvalReport:
    """Evaluate one feature configuration over a test corpus."""
    if features not in FEATURES:
        raise ValueError(f"unknown features {features!r}")
    if len(test) == 0:
        raise ValueError("empty test corpus")
    retrieval = {
        "lambda_s": lambda_s,
        "depth": depth,
        "content_weight": content_weight,
        "keyword_weight": keyword_weight,
        "author_weight": author_weight,
    }
    rows, unseen = _collect_sides(index, test, tokenize, retrieval)
    ranks = [
        rank_of_truth(fuse_sides(c, a, features, lambda_blend), truth)
        for c, a, truth in rows
    ]
    acc, mrr_value = _metrics(ranks, mrr_cutoff)
    config = {
        "features": features,
        "lambda_blend": lambda_blend if features == "combined" else None,
        "mrr_cutoff": mrr_cutoff,
        **retrieval,
        **(config_extra or {}),
    }
    return EvalReport(
        config=config,
        n_queries=len(ranks),
        acc_at=acc,
        mrr_value=mrr_value,
        n_unseen_venues=unseen,
    )


def sweep_lambda(
    index: FieldedIndex,
    test: Corpus,
    tokenize,
    *,
    lambdas,
    lambda_s: float = 0.1,
    depth: int = 1000,
    content_weight: float = 1.0,
    keyword_weight: float = 1.0,
    author_weight: float = 1.0,
    mrr_cutoff: int = DEFAULT_MRR_CUTOFF,
    config_extra: dict | None = None,
) -> list[EvalReport]:
    """Evaluate a grid of blend weights, retrieving each query only once."""
    lambdas = list(lambdas)
    if not lambdas:
        raise ValueError("empty lambda grid")
    for lam in lambdas:
        FusionParams(lam)  # validates the range
    if len(test) == 0:
        raise ValueError("empty test corpus")
    retrieval = {
        "lambda_s": lambda_s,
        "depth": depth,
        "content_weight": content_weight,
        "keyword_weight": keyword_weight,
        "author_weight": author_weight,
    }
    rows, unseen = _collect_sides(index, test, tokenize, retrieval)
    reports = []
    for lam in lambdas:
        params = FusionParams(lam)
        ranks = [
            rank_of_truth(comb_linear(c, a, params), truth) for c, a, truth in rows
        ]
        acc, mrr_value = _metrics(ranks, mrr_cutoff)
        config = {
            "features": "combined",
            "lambda_blend": lam,
            "mrr_cutoff": mrr_cutoff,
            **retrieval,
            **(config_extra or {}),
        }
        reports.append(
            EvalReport(
                config=config,
                n_queries=len(ranks),
                acc_at=acc,
                mrr_value=mrr_value,
                n_unseen_venues=unseen,
            )
        )
    return reports


def run_evaluation(
    train: Corpus,
    test: Corpus,
    *,
    features: str = "combined",
    mrr_cutoff: int = DEFAULT_MRR_CUTOFF,
    **recommender_params,
) -> EvalReport:
    """Fit a recommender on ``train`` and evaluate it on ``test``."""
    rec = VenueRecommender(**recommender_params).fit(train)
    return evaluate_recommender(rec, test, features=features, mrr_cutoff=mrr_cutoff)


def evaluate_recommender(
    rec: VenueRecommender,
    test: Corpus,
    *,
    features: str | None = None,
    mrr_cutoff: int = DEFAULT_MRR_CUTOFF,
) -> EvalReport:
    """Evaluate a fitted recommender with its own retrieval settings."""
    rec._check_fitted()
    return evaluate_index(
        rec.index_,
        test,
        rec._tokenize,
        features=features or rec.features,
        lambda_blend=rec.blend_lambda,
        lambda_s=rec.smoothing_lambda,
        depth=rec.depth,
        content_weight=rec.content_weight,
        keyword_weight=rec.keyword_weight,
        author_weight=rec.author_weight,
        mrr_cutoff=mrr_cutoff,
        config_extra={
            "strategy": rec.strategy,
            "n_clusters": rec.n_clusters_,
            "seed": rec.seed,
        },
    )
