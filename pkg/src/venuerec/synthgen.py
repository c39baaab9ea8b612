"""Seeded synthetic corpora with planted venue/topic structure.

Every venue owns ``topics_per_venue`` topics; every topic owns a
disjoint slice of a synthetic lexicon.  Articles draw most tokens from
their topic's slice and the rest from a shared noise slice, so topical
clusters are recoverable by construction.  Author pools are per-venue
with a loyalty probability: disloyal author slots borrow from another
venue's pool.

Lexicon words are digit-suffixed (``w00042``) so stemming and stopword
removal leave them untouched; generated text survives the token
pipeline verbatim.  All randomness flows from one ``random.Random``
seed, so equal specs produce byte-identical corpora.
"""

import random
from dataclasses import dataclass

from .corpus import Article, Corpus
from .errors import DataError

MAX_LEXICON = 200_000


@dataclass(frozen=True)
class SynthSpec:
    """Shape of a generated corpus; defaults give a small dense benchmark."""

    n_venues: int = 20
    topics_per_venue: int = 3
    vocab_per_topic: int = 30
    shared_vocab_size: int = 120
    train_articles_per_topic: int = 40
    test_articles_per_topic: int = 5
    tokens_per_article: int = 40
    topic_token_share: float = 0.65
    keywords_per_article: int = 3
    authors_per_venue: int = 12
    max_authors_per_article: int = 3
    venue_loyalty: float = 0.8
    train_year_range: tuple[int, int] = (2007, 2015)
    test_year: int = 2016
    seed: int = 13

    def __post_init__(self):
        positive = (
            ("n_venues", self.n_venues),
            ("topics_per_venue", self.topics_per_venue),
            ("vocab_per_topic", self.vocab_per_topic),
            ("train_articles_per_topic", self.train_articles_per_topic),
            ("tokens_per_article", self.tokens_per_article),
            ("authors_per_venue", self.authors_per_venue),
            ("max_authors_per_article", self.max_authors_per_article),
        )
        for name, value in positive:
            if value < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.test_articles_per_topic < 0:
            raise ValueError("test_articles_per_topic must be >= 0")
        if self.shared_vocab_size < 0:
            raise ValueError("shared_vocab_size must be >= 0")
        if not 0.0 <= self.topic_token_share <= 1.0:
            raise ValueError("topic_token_share must be in [0, 1]")
        if not 0.0 <= self.venue_loyalty <= 1.0:
            raise ValueError("venue_loyalty must be in [0, 1]")
        if self.keywords_per_article < 0:
            raise ValueError("keywords_per_article must be >= 0")
        if self.keywords_per_article > self.vocab_per_topic:
            raise ValueError("keywords_per_article cannot exceed vocab_per_topic")
        if self.topic_token_share < 1.0 and self.shared_vocab_size == 0:
            raise ValueError("shared_vocab_size must be > 0 when noise is drawn")
        lo, hi = self.train_year_range
        if lo > hi:
            raise ValueError("train_year_range must be (low, high)")
        if self.test_year <= hi:
            raise ValueError("test_year must come after the training years")


def _lexicon(spec: SynthSpec, rng: random.Random):
    need = spec.n_venues * spec.topics_per_venue * spec.vocab_per_topic
    total = need + spec.shared_vocab_size
    if total > MAX_LEXICON:
        raise DataError(
            f"spec needs {total} lexicon words, more than the {MAX_LEXICON} cap"
        )
    words = [f"w{i:05d}" for i in range(total)]
    rng.shuffle(words)
    topic_vocab = {}
    pos = 0
    for v in range(spec.n_venues):
        for t in range(spec.topics_per_venue):
            topic_vocab[(v, t)] = words[pos : pos + spec.vocab_per_topic]
            pos += spec.vocab_per_topic
    shared = words[pos : pos + spec.shared_vocab_size]
    return topic_vocab, shared


def _author_pools(spec: SynthSpec):
    # identifier shape mimics ORCID; uniqueness comes from (venue, slot)
    return [
        [f"0000-0002-{v:04d}-{i:04d}" for i in range(spec.authors_per_venue)]
        for v in range(spec.n_venues)
    ]


def _article_tokens(spec, rng, vocab, shared):
    tokens = []
    for _ in range(spec.tokens_per_article):
        if shared and rng.random() >= spec.topic_token_share:
            tokens.append(rng.choice(shared))
        else:
            tokens.append(rng.choice(vocab))
    return tokens


def _article_authors(spec, rng, pools, venue):
    n = rng.randint(1, spec.max_authors_per_article)
    authors = []
    for _ in range(n):
        if spec.n_venues > 1 and rng.random() >= spec.venue_loyalty:
            other = rng.randrange(spec.n_venues - 1)
            if other >= venue:
                other += 1
            pool = pools[other]
        else:
            pool = pools[venue]
        authors.append(rng.choice(pool))
    # an author may appear once per article at most
    return tuple(dict.fromkeys(authors))


def generate(spec: SynthSpec) -> Corpus:
    """Generate one corpus holding both training-era and test-era articles.

    Split it with ``split_by_year`` at the last training year.
    """
    rng = random.Random(spec.seed)
    topic_vocab, shared = _lexicon(spec, rng)
    pools = _author_pools(spec)
    articles = []
    serial = 0
    for v in range(spec.n_venues):
        venue_id = f"venue{v:03d}"
        for t in range(spec.topics_per_venue):
            vocab = topic_vocab[(v, t)]
            for part, count in (("train", spec.train_articles_per_topic),
                                ("test", spec.test_articles_per_topic)):
                for _ in range(count):
                    tokens = _article_tokens(spec, rng, vocab, shared)
                    if part == "train":
                        year = rng.randint(*spec.train_year_range)
                    else:
                        year = spec.test_year
                    keywords = tuple(
                        rng.sample(vocab, spec.keywords_per_article)
                    )
                    articles.append(
                        Article(
                            article_id=f"a{serial:06d}",
                            venue_id=venue_id,
                            year=year,
                            title_abstract=" ".join(tokens),
                            keywords=keywords,
                            authors=_article_authors(spec, rng, pools, v),
                        )
                    )
                    serial += 1
    return Corpus.from_articles(articles)
