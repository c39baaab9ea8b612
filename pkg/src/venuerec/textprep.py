"""Tokenization, vocabulary pruning, and clustering feature vectors.

The token pipeline is: lowercase, split on runs of ``[a-z0-9]``,
drop stopwords (checked before stemming), Porter-stem the rest.
Author identifiers never pass through here; they are opaque strings.

Vocabulary pruning keeps terms whose document frequency over the
training set satisfies ``min_df_count <= df <= floor(max_df_ratio * m)``.
Term ids are dense, 0-based, assigned in lexicographic term order so
that rebuilding from the same corpus is bit-stable.
"""

import json
import math
import re
from collections import Counter
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import DataError
from .stemming import stem

_TOKEN_RE = re.compile(r"[a-z0-9]+")


def load_stopwords(path=None) -> frozenset[str]:
    """Load a stopword list, one token per line; ``#`` starts a comment.

    With no path, the bundled default English list is used.
    """
    if path is None:
        text = (
            resources.files("venuerec.data")
            .joinpath("stopwords_en.txt")
            .read_text(encoding="utf-8")
        )
    else:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise DataError(f"cannot read stopword file {path}: {exc}") from exc
    words = set()
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.add(line.lower())
    return frozenset(words)


def tokenize(text: str, stopwords: frozenset[str] = frozenset()) -> list[str]:
    """Lowercase, split, drop stopwords, stem. Order-preserving."""
    out = []
    for tok in _TOKEN_RE.findall(text.lower()):
        if tok in stopwords:
            continue
        stemmed = stem(tok)
        if stemmed:
            out.append(stemmed)
    return out


@dataclass(frozen=True)
class Vocabulary:
    """Pruned training vocabulary with document frequencies.

    ``term_to_id`` maps term -> dense feature id; ``df`` holds the
    document frequency of every kept term; ``n_docs`` is the number of
    training documents the frequencies were counted over.
    """

    term_to_id: dict[str, int]
    df: dict[str, int]
    n_docs: int
    max_df_ratio: float
    min_df_count: int

    def __len__(self) -> int:
        return len(self.term_to_id)

    @property
    def terms(self) -> list[str]:
        return sorted(self.term_to_id, key=self.term_to_id.__getitem__)


def build_vocabulary(
    token_docs, max_df_ratio: float = 0.9, min_df_count: int = 1
) -> Vocabulary:
    """Count document frequencies and keep mid-frequency terms.

    ``token_docs`` is an iterable of token lists, one per training
    document.  Raises ``DataError`` when pruning removes everything,
    since downstream clustering would be meaningless.
    """
    if not 0.0 < max_df_ratio <= 1.0:
        raise ValueError("max_df_ratio must be in (0, 1]")
    if min_df_count < 1:
        raise ValueError("min_df_count must be >= 1")
    df: Counter[str] = Counter()
    m = 0
    for tokens in token_docs:
        m += 1
        df.update(set(tokens))
    if m == 0:
        raise ValueError("no documents given")
    hi = math.floor(max_df_ratio * m)
    kept = sorted(t for t, n in df.items() if min_df_count <= n <= hi)
    if not kept:
        raise DataError(
            "vocabulary pruning removed every term; relax max_df_ratio or "
            "min_df_count for this corpus size"
        )
    return Vocabulary(
        term_to_id={t: i for i, t in enumerate(kept)},
        df={t: df[t] for t in kept},
        n_docs=m,
        max_df_ratio=max_df_ratio,
        min_df_count=min_df_count,
    )


@dataclass(frozen=True)
class DocVector:
    """Sparse feature vector for one document: feature id -> weight."""

    article_id: str
    weights: dict[int, float]


def vectorize(
    tokens,
    vocab: Vocabulary,
    weighting: str = "tfidf",
    normalize: bool = True,
    article_id: str = "",
) -> DocVector:
    """Project a token list onto the vocabulary.

    ``tfidf`` weights are ``tf * ln(1 + m/df)``; ``tf`` uses raw counts.
    With ``normalize`` the vector is scaled to unit L2 norm (the zero
    vector is left alone).  Out-of-vocabulary tokens are dropped.
    """
    if weighting not in ("tfidf", "tf"):
        raise ValueError(f"unknown weighting {weighting!r}")
    counts: Counter[str] = Counter(t for t in tokens if t in vocab.term_to_id)
    weights: dict[int, float] = {}
    for term, tf in counts.items():
        w = float(tf)
        if weighting == "tfidf":
            w *= math.log(1.0 + vocab.n_docs / vocab.df[term])
        weights[vocab.term_to_id[term]] = w
    if normalize and weights:
        norm = math.sqrt(sum(w * w for w in weights.values()))
        if norm > 0.0:
            weights = {i: w / norm for i, w in weights.items()}
    return DocVector(article_id=article_id, weights=weights)


def count_nonzero_entries(vectors) -> int:
    """Total nonzero entries across vectors (the ``e`` in the K heuristics)."""
    return sum(len(v.weights) for v in vectors)


def vocabulary_payload(vocab: Vocabulary, stats: dict) -> dict:
    """JSON-ready form of a vocabulary plus corpus statistics."""
    terms = vocab.terms
    return {
        "terms": terms,
        "df": [vocab.df[t] for t in terms],
        "n_docs": vocab.n_docs,
        "max_df_ratio": vocab.max_df_ratio,
        "min_df_count": vocab.min_df_count,
        "stats": dict(stats),
    }


def save_vocabulary(vocab: Vocabulary, stats: dict, path) -> None:
    Path(path).write_text(
        json.dumps(vocabulary_payload(vocab, stats), sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )


def load_vocabulary(path) -> tuple[Vocabulary, dict]:
    """Read a vocabulary artifact; returns (vocabulary, stats)."""
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        terms = payload["terms"]
        df_list = payload["df"]
        if len(terms) != len(df_list):
            raise ValueError("terms and df lengths differ")
        vocab = Vocabulary(
            term_to_id={t: i for i, t in enumerate(terms)},
            df={t: int(n) for t, n in zip(terms, df_list)},
            n_docs=int(payload["n_docs"]),
            max_df_ratio=float(payload["max_df_ratio"]),
            min_df_count=int(payload["min_df_count"]),
        )
        return vocab, dict(payload["stats"])
    except OSError as exc:
        raise DataError(f"cannot read vocabulary file {path}: {exc}") from exc
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        raise DataError(f"corrupt vocabulary file {path}: {exc}") from exc
