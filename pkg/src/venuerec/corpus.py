"""Article collections: loading, validation, filtering, temporal splits.

The on-disk form is JSON Lines, one article object per line with keys
``id``, ``venue``, ``year``, ``title_abstract``, ``keywords``,
``authors``.  Malformed lines are skipped with a logged warning;
structural problems that poison the whole collection (duplicate ids,
unreadable file, nothing left after filtering) raise ``DataError``.
"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path

from .errors import DataError

logger = logging.getLogger(__name__)

CORPUS_KEYS = ("id", "venue", "year", "title_abstract", "keywords", "authors")


@dataclass(frozen=True)
class Article:
    """One published article with its venue label and fielded text."""

    article_id: str
    venue_id: str
    year: int
    title_abstract: str
    keywords: tuple[str, ...]
    authors: tuple[str, ...]


@dataclass(frozen=True)
class Corpus:
    """An immutable bag of articles plus per-venue article counts."""

    articles: tuple[Article, ...]
    venue_counts: dict[str, int]

    @classmethod
    def from_articles(cls, articles) -> "Corpus":
        articles = tuple(articles)
        seen = set()
        counts: dict[str, int] = {}
        for art in articles:
            if art.article_id in seen:
                raise DataError(f"duplicate article id {art.article_id!r}")
            seen.add(art.article_id)
            counts[art.venue_id] = counts.get(art.venue_id, 0) + 1
        return cls(articles=articles, venue_counts=counts)

    def __len__(self) -> int:
        return len(self.articles)

    @property
    def n_venues(self) -> int:
        return len(self.venue_counts)

    @property
    def venue_ids(self) -> tuple[str, ...]:
        return tuple(sorted(self.venue_counts))


@dataclass(frozen=True)
class SplitSpec:
    """Temporal split boundary: train is every year <= ``train_through_year``."""

    train_through_year: int


def _clean_str_list(value) -> tuple[str, ...] | None:
    if not isinstance(value, list):
        return None
    out = []
    for item in value:
        if not isinstance(item, str):
            return None
        item = item.strip()
        if item:
            out.append(item)
    return tuple(out)


def parse_record(rec: dict, schema: dict[str, str] | None = None) -> Article:
    """Validate one raw record and return an ``Article``.

    ``schema`` maps canonical keys to the key names used in the file,
    for corpora that label fields differently.  Raises ``ValueError``
    on any malformed field.
    """
    if not isinstance(rec, dict):
        raise ValueError("record is not an object")
    schema = schema or {}
    get = lambda key: rec.get(schema.get(key, key))

    article_id = get("id")
    venue_id = get("venue")
    year = get("year")
    title_abstract = get("title_abstract")
    if not isinstance(article_id, str) or not article_id.strip():
        raise ValueError("id must be a non-empty string")
    if not isinstance(venue_id, str) or not venue_id.strip():
        raise ValueError("venue must be a non-empty string")
    if isinstance(year, bool) or not isinstance(year, int) or year <= 0:
        raise ValueError("year must be a positive integer")
    if not isinstance(title_abstract, str):
        raise ValueError("title_abstract must be a string")
    keywords = _clean_str_list(get("keywords"))
    if keywords is None:
        raise ValueError("keywords must be a list of strings")
    authors = _clean_str_list(get("authors"))
    if authors is None:
        raise ValueError("authors must be a list of strings")
    if not title_abstract.strip() and not keywords:
        raise ValueError("title_abstract and keywords are both empty")
    return Article(
        article_id=article_id.strip(),
        venue_id=venue_id.strip(),
        year=year,
        title_abstract=title_abstract,
        keywords=keywords,
        authors=authors,
    )


def load_corpus(path, schema: dict[str, str] | None = None) -> Corpus:
    """Read a JSONL article file, skipping invalid lines with a warning."""
    path = Path(path)
    articles = []
    skipped = 0
    try:
        with path.open("r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    rec = json.loads(line)
                    articles.append(parse_record(rec, schema))
                except (json.JSONDecodeError, ValueError) as exc:
                    skipped += 1
                    logger.warning("%s:%d: skipping invalid record: %s", path, lineno, exc)
    except OSError as exc:
        raise DataError(f"cannot read corpus file {path}: {exc}") from exc
    if skipped:
        logger.warning("%s: skipped %d invalid record(s)", path, skipped)
    if not articles:
        raise DataError(f"no valid articles in {path}")
    return Corpus.from_articles(articles)


def save_corpus(corpus: Corpus, path) -> None:
    """Write a corpus back to JSONL with canonical key order."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for art in corpus.articles:
            rec = {
                "id": art.article_id,
                "venue": art.venue_id,
                "year": art.year,
                "title_abstract": art.title_abstract,
                "keywords": list(art.keywords),
                "authors": list(art.authors),
            }
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def filter_venues(corpus: Corpus, min_articles: int) -> Corpus:
    """Drop venues with fewer than ``min_articles`` articles."""
    if min_articles < 1:
        raise ValueError("min_articles must be >= 1")
    keep = {v for v, n in corpus.venue_counts.items() if n >= min_articles}
    articles = [a for a in corpus.articles if a.venue_id in keep]
    if not articles:
        raise DataError(
            f"no venues have at least {min_articles} articles; lower the threshold"
        )
    return Corpus.from_articles(articles)


def exclude_venues(corpus: Corpus, venue_ids) -> Corpus:
    """Drop the listed venues entirely (e.g. defunct or out-of-scope ones)."""
    drop = set(venue_ids)
    unknown = drop - set(corpus.venue_counts)
    if unknown:
        logger.warning("excluded venues not present in corpus: %s", sorted(unknown))
    articles = [a for a in corpus.articles if a.venue_id not in drop]
    if not articles:
        raise DataError("excluding those venues leaves an empty corpus")
    return Corpus.from_articles(articles)


def split_by_year(corpus: Corpus, spec: SplitSpec) -> tuple[Corpus, Corpus]:
    """Split into (train, test) by publication year; both must be non-empty."""
    train = [a for a in corpus.articles if a.year <= spec.train_through_year]
    test = [a for a in corpus.articles if a.year > spec.train_through_year]
    if not train:
        raise DataError(f"no articles with year <= {spec.train_through_year}")
    if not test:
        raise DataError(f"no articles with year > {spec.train_through_year}")
    train_c = Corpus.from_articles(train)
    test_c = Corpus.from_articles(test)
    unseen = set(test_c.venue_counts) - set(train_c.venue_counts)
    if unseen:
        logger.warning(
            "%d test venue(s) never appear in training and can never be recommended",
            len(unseen),
        )
    return train_c, test_c
