"""Topic-aware publication venue recommendation.

Train-time: articles are tokenized, clustered globally by topic, and
aggregated into per-venue subprofile documents held in a fielded
inverted index.  Query-time: an article's text and author list retrieve
profile documents under a smoothed language model, document scores are
fused into venue scores with a log-discounted sum, and the content and
author sides are blended linearly.
"""

from .cluster import ClusteringResult, heuristic_k, kmeans
from .corpus import (
    Article,
    Corpus,
    SplitSpec,
    exclude_venues,
    filter_venues,
    load_corpus,
    save_corpus,
    split_by_year,
)
from .errors import DataError, UsageError, VenuerecError
from .evaluation import (
    EvalReport,
    accuracy_at,
    evaluate_index,
    evaluate_recommender,
    mrr,
    rank_of_truth,
    run_evaluation,
    sweep_lambda,
)
from .fusion import FusionParams, comb_lgdcs, comb_linear, normalize_max
from .index import FieldedIndex, Query, build_index
from .profiles import Subprofile, build_profiles
from .recommender import (
    VenueRecommender,
    build_query,
    fuse_sides,
    query_from_article,
    side_rankings,
)
from .synthgen import SynthSpec, generate
from .textprep import (
    DocVector,
    Vocabulary,
    build_vocabulary,
    load_stopwords,
    tokenize,
    vectorize,
)

__version__ = "0.1.0"

__all__ = [
    "Article",
    "ClusteringResult",
    "Corpus",
    "DataError",
    "DocVector",
    "EvalReport",
    "FieldedIndex",
    "FusionParams",
    "Query",
    "SplitSpec",
    "Subprofile",
    "SynthSpec",
    "UsageError",
    "VenuerecError",
    "VenueRecommender",
    "Vocabulary",
    "accuracy_at",
    "build_index",
    "build_profiles",
    "build_query",
    "build_vocabulary",
    "comb_lgdcs",
    "comb_linear",
    "evaluate_index",
    "evaluate_recommender",
    "exclude_venues",
    "filter_venues",
    "fuse_sides",
    "generate",
    "heuristic_k",
    "kmeans",
    "load_corpus",
    "load_stopwords",
    "mrr",
    "normalize_max",
    "query_from_article",
    "rank_of_truth",
    "run_evaluation",
    "save_corpus",
    "side_rankings",
    "split_by_year",
    "sweep_lambda",
    "tokenize",
    "vectorize",
]
