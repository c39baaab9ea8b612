"""Venue profiles: aggregate member articles into retrievable documents.

Three strategies:

* ``sp`` one document per venue (doc id = venue id)
* ``dp`` one document per article (doc id = ``venue#article``)
* ``gp`` one document per non-empty venue/cluster pair
  (doc id = ``venue#cluster``), using a global clustering of articles

Each document carries three field bags: ``content`` (tokenized
title+abstract), ``keywords`` (tokenized keyword strings), ``authors``
(verbatim identifiers, counted once per member article).
"""

import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from .corpus import Corpus
from .errors import DataError
from . import textprep

STRATEGIES = ("sp", "dp", "gp")


@dataclass
class Subprofile:
    """One retrievable profile document with its three field bags."""

    doc_id: str
    venue_id: str
    cluster_id: int | None
    n_articles: int
    content: Counter = field(default_factory=Counter)
    keywords: Counter = field(default_factory=Counter)
    authors: Counter = field(default_factory=Counter)

    def field_bag(self, name: str) -> Counter:
        try:
            return getattr(self, name)
        except AttributeError:
            raise ValueError(f"unknown field {name!r}") from None


def default_tokenizer(stopwords: frozenset[str] | None = None):
    """Tokenizer used when the caller does not supply one."""
    if stopwords is None:
        stopwords = textprep.load_stopwords()
    return lambda text: textprep.tokenize(text, stopwords)


def build_profiles(
    train: Corpus,
    strategy: str,
    clustering: dict[str, int] | None = None,
    n_clusters: int | None = None,
    tokenize=None,
) -> list[Subprofile]:
    """Group training articles per strategy and aggregate field bags.

    ``gp`` requires ``clustering`` covering every training article with
    cluster ids in ``[0, n_clusters)`` (``n_clusters`` defaults to
    ``max id + 1``).  Output is sorted by doc id.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    if tokenize is None:
        tokenize = default_tokenizer()
    if strategy == "gp":
        if not clustering:
            raise ValueError("gp strategy requires a clustering assignment")
        if n_clusters is None:
            n_clusters = 1 + max(clustering.values())

    groups: dict[str, Subprofile] = {}
    for art in train.articles:
        cluster_id = None
        if strategy == "sp":
            doc_id = art.venue_id
        elif strategy == "dp":
            doc_id = f"{art.venue_id}#{art.article_id}"
        else:
            if art.article_id not in clustering:
                raise ValueError(f"article {art.article_id!r} missing from clustering")
            cluster_id = clustering[art.article_id]
            if not 0 <= cluster_id < n_clusters:
                raise ValueError(
                    f"cluster id {cluster_id} out of range [0, {n_clusters}) "
                    f"for article {art.article_id!r}"
                )
            doc_id = f"{art.venue_id}#{cluster_id}"
        prof = groups.get(doc_id)
        if prof is None:
            prof = Subprofile(
                doc_id=doc_id,
                venue_id=art.venue_id,
                cluster_id=cluster_id,
                n_articles=0,
            )
            groups[doc_id] = prof
        prof.n_articles += 1
        prof.content.update(tokenize(art.title_abstract))
        for kw in art.keywords:
            prof.keywords.update(tokenize(kw))
        # one count per member article regardless of author list duplicates
        prof.authors.update({a.strip() for a in art.authors if a.strip()})
    return [groups[doc_id] for doc_id in sorted(groups)]


def save_profiles(profiles, path) -> None:
    """Write profiles as JSONL, one document per line, canonical key order."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for prof in profiles:
            rec = {
                "doc_id": prof.doc_id,
                "venue": prof.venue_id,
                "cluster": prof.cluster_id,
                "n_articles": prof.n_articles,
                "content": dict(sorted(prof.content.items())),
                "keywords": dict(sorted(prof.keywords.items())),
                "authors": dict(sorted(prof.authors.items())),
            }
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def load_profiles(path) -> list[Subprofile]:
    """Read a profiles artifact written by ``save_profiles``."""
    path = Path(path)
    profiles = []
    try:
        with path.open("r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    rec = json.loads(line)
                    profiles.append(
                        Subprofile(
                            doc_id=rec["doc_id"],
                            venue_id=rec["venue"],
                            cluster_id=rec["cluster"],
                            n_articles=int(rec["n_articles"]),
                            content=Counter(rec["content"]),
                            keywords=Counter(rec["keywords"]),
                            authors=Counter(rec["authors"]),
                        )
                    )
                except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                    raise DataError(f"{path}:{lineno}: malformed profile: {exc}") from exc
    except OSError as exc:
        raise DataError(f"cannot read profiles file {path}: {exc}") from exc
    if not profiles:
        raise DataError(f"no profiles in {path}")
    return profiles
