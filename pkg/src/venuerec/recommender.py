"""End-to-end venue recommendation with a scikit-learn style estimator.

``VenueRecommender`` wires the full training path together: tokenize,
prune vocabulary, cluster globally (for the grouped strategy), build
venue subprofiles, index them.  Recommendation retrieves profile
documents for a query article, fuses them into venue scores per side
(content vs authors), and blends the two sides.

The free functions are the reusable pieces the pipeline stages and the
evaluation harness call directly.
"""

import logging
from collections import Counter

from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from . import textprep
from .cluster import heuristic_k, kmeans
from .corpus import Article, Corpus
from .errors import DataError
from .fusion import FusionParams, VenueRanking, comb_lgdcs, comb_linear, normalize_max
from .index import FieldedIndex, Query, build_index
from .profiles import build_profiles
from .textprep import count_nonzero_entries, vectorize

logger = logging.getLogger(__name__)

FEATURES = ("cb", "au", "combined")


def build_query(
    title_abstract: str = "",
    keywords=(),
    authors=(),
    tokenize=None,
) -> Query:
    """Turn raw article parts into fielded query bags.

    Content and keyword text run through the token pipeline; author
    identifiers are kept verbatim (trimmed), one count each per mention.
    """
    if tokenize is None:
        tokenize = textprep.tokenize
    q = Query()
    q.content.update(tokenize(title_abstract))
    for kw in keywords:
        q.keywords.update(tokenize(kw))
    q.authors.update(a.strip() for a in authors if a.strip())
    return q


def query_from_article(article: Article, tokenize=None) -> Query:
    """Query bags from an article record; the venue label is ignored."""
    return build_query(
        article.title_abstract, article.keywords, article.authors, tokenize
    )


def side_rankings(
    index: FieldedIndex,
    query: Query,
    *,
    lambda_s: float = 0.1,
    depth: int = 1000,
    content_weight: float = 1.0,
    keyword_weight: float = 1.0,
    author_weight: float = 1.0,
) -> tuple[VenueRanking, VenueRanking]:
    """Normalized venue rankings for the content side and the author side.

    The content side searches the content and keyword fields; the author
    side searches only the author field.  Each document ranking is fused
    venue-wise and scaled to a maximum of 1.
    """
    content_docs = index.search(
        query,
        {"content": content_weight, "keywords": keyword_weight},
        top_n=depth,
        lambda_s=lambda_s,
    )
    author_docs = index.search(
        query, {"authors": author_weight}, top_n=depth, lambda_s=lambda_s
    )
    content_side = normalize_max(comb_lgdcs(content_docs, index.doc_venue))
    author_side = normalize_max(comb_lgdcs(author_docs, index.doc_venue))
    return content_side, author_side


def fuse_sides(
    content_side: VenueRanking,
    author_side: VenueRanking,
    features: str = "combined",
    lambda_blend: float = 0.75,
) -> VenueRanking:
    """Final venue ranking for one query under the requested feature set."""
    if features == "cb":
        return content_side
    if features == "au":
        return author_side
    if features == "combined":
        return comb_linear(content_side, author_side, FusionParams(lambda_blend))
    raise ValueError(f"unknown features {features!r}; expected one of {FEATURES}")


class VenueRecommender(BaseEstimator):
    """Fit venue subprofiles on a training corpus, then rank venues.

    Parameters mirror the pipeline configuration.  ``n_clusters`` set to
    an integer overrides ``k_method``; otherwise the cluster count comes
    from the chosen heuristic.  ``min_df_count`` defaults to the value
    used for large bibliographic corpora; small corpora want 1.
    """

    def __init__(
        self,
        strategy: str = "gp",
        k_method: str = "kaufman",
        n_clusters: int | None = None,
        seed: int = 0,
        max_df_ratio: float = 0.9,
        min_df_count: int = 750,
        weighting: str = "tfidf",
        normalize: bool = True,
        max_iter: int = 300,
        tol: float = 1e-4,
        smoothing_lambda: float = 0.1,
        content_weight: float = 1.0,
        keyword_weight: float = 1.0,
        author_weight: float = 1.0,
        depth: int = 1000,
        blend_lambda: float = 0.75,
        features: str = "combined",
        stopwords_path=None,
    ):
        self.strategy = strategy
        self.k_method = k_method
        self.n_clusters = n_clusters
        self.seed = seed
        self.max_df_ratio = max_df_ratio
        self.min_df_count = min_df_count
        self.weighting = weighting
        self.normalize = normalize
        self.max_iter = max_iter
        self.tol = tol
        self.smoothing_lambda = smoothing_lambda
        self.content_weight = content_weight
        self.keyword_weight = keyword_weight
        self.author_weight = author_weight
        self.depth = depth
        self.blend_lambda = blend_lambda
        self.features = features
        self.stopwords_path = stopwords_path

    # -- fitting --------------------------------------------------------

    def _make_tokenizer(self):
        stopwords = textprep.load_stopwords(self.stopwords_path)
        self.stopwords_ = stopwords
        return lambda text: textprep.tokenize(text, stopwords)

    def fit(self, corpus: Corpus, y=None):
        """Build profiles and the index from a training corpus."""
        if self.strategy not in ("sp", "dp", "gp"):
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.features not in FEATURES:
            raise ValueError(f"unknown features {self.features!r}")
        if len(corpus) == 0:
            raise DataError("cannot fit on an empty corpus")
        tokenize = self._make_tokenizer()

        assignment = None
        self.vocabulary_ = None
        self.clustering_ = None
        self.n_clusters_ = None
        if self.strategy == "gp":
            token_docs = [tokenize(a.title_abstract) for a in corpus.articles]
            vocab = textprep.build_vocabulary(
                token_docs, self.max_df_ratio, self.min_df_count
            )
            vectors = [
                vectorize(
                    tokens,
                    vocab,
                    weighting=self.weighting,
                    normalize=self.normalize,
                    article_id=art.article_id,
                )
                for art, tokens in zip(corpus.articles, token_docs)
            ]
            n_nonzero = count_nonzero_entries(vectors)
            if self.n_clusters is not None:
                k = heuristic_k("fixed", fixed_value=self.n_clusters)
            else:
                k = heuristic_k(
                    self.k_method, m=len(corpus), t=len(vocab), e=n_nonzero
                )
            n_points = sum(1 for v in vectors if v.weights)
            if k > max(n_points, 1):
                logger.warning(
                    "requested K=%d exceeds %d distinct non-empty articles; clamping",
                    k,
                    n_points,
                )
                k = max(n_points, 1)
            self.vocabulary_ = vocab
            self.clustering_ = kmeans(
                vectors,
                k,
                seed=self.seed,
                max_iter=self.max_iter,
                tol=self.tol,
                n_features=len(vocab),
            )
            self.n_clusters_ = k
            assignment = self.clustering_.assignment

        self.profiles_ = build_profiles(
            corpus,
            self.strategy,
            clustering=assignment,
            n_clusters=self.n_clusters_,
            tokenize=tokenize,
        )
        self.index_ = build_index(self.profiles_)
        self.venues_ = self.index_.venue_ids
        self.n_articles_ = len(corpus)
        return self

    def _check_fitted(self):
        if not hasattr(self, "index_"):
            raise NotFittedError(
                "this VenueRecommender is not fitted yet; call fit first"
            )

    def _tokenize(self, text: str) -> list[str]:
        return textprep.tokenize(text, self.stopwords_)

    # -- inference ------------------------------------------------------

    def _query_of(self, article) -> Query:
        if isinstance(article, Query):
            return article
        if isinstance(article, Article):
            return query_from_article(article, self._tokenize)
        raise ValueError("recommend expects an Article or a Query")

    def recommend(self, article, n: int = 10, features: str | None = None) -> VenueRanking:
        """Top ``n`` venues for one article or prebuilt query."""
        self._check_fitted()
        if n < 1:
            raise ValueError("n must be >= 1")
        content_side, author_side = self._sides(self._query_of(article))
        fused = fuse_sides(
            content_side,
            author_side,
            features or self.features,
            self.blend_lambda,
        )
        return fused[:n]

    def recommend_detail(
        self, article, n: int = 10, features: str | None = None
    ) -> list[tuple[int, str, float, float, float]]:
        """Rows of (rank, venue, fused score, content part, author part)."""
        self._check_fitted()
        content_side, author_side = self._sides(self._query_of(article))
        fused = fuse_sides(
            content_side, author_side, features or self.features, self.blend_lambda
        )
        c = dict(content_side)
        a = dict(author_side)
        return [
            (rank, venue, score, c.get(venue, 0.0), a.get(venue, 0.0))
            for rank, (venue, score) in enumerate(fused[:n], start=1)
        ]

    def _sides(self, query: Query) -> tuple[VenueRanking, VenueRanking]:
        return side_rankings(
            self.index_,
            query,
            lambda_s=self.smoothing_lambda,
            depth=self.depth,
            content_weight=self.content_weight,
            keyword_weight=self.keyword_weight,
            author_weight=self.author_weight,
        )

    def predict(self, articles) -> list[str | None]:
        """Top-1 venue per article; None when nothing matches."""
        self._check_fitted()
        out = []
        for art in articles:
            top = self.recommend(art, n=1)
            out.append(top[0][0] if top else None)
        return out
