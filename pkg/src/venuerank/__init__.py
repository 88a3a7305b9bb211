"""Venue suggestion from social evidence: frequency profiles over venue
keywords and categories, per-user review classifiers, and learning-to-rank
fusion of the resulting scores, plus the evaluation harness around them.
"""

from .core import (
    MAX_KEYWORDS_PER_VENUE,
    MAX_RANKED_LIST,
    Polarity,
    RankingRequest,
    Review,
    UserHistory,
    Venue,
    polarity_of_review_rating,
    polarity_of_user_rating,
)
from .evaluate import (
    CVOutcome,
    MetricReport,
    SweepConfig,
    SweepResult,
    cross_validate,
    make_folds,
    random_baseline,
    run_sweep,
    sweep_keywords,
    sweep_reviews,
)
from .features import (
    BASELINE_SPEC,
    FEATURE_NAMES,
    FeatureSpec,
    QueryFeatures,
    VARIANTS,
    assemble_features,
    compute_score_tables,
)
from .ingest import (
    Collection,
    ParseError,
    ValidationError,
    load_collection,
    read_qrels,
    read_run,
    write_collection,
    write_run,
)
from .metrics import (
    TTestResult,
    mrr,
    ndcg_at_5,
    paired_ttest,
    precision_at_5,
    reciprocal_rank,
)
from .profiles import (
    FrequencyProfile,
    ItemSource,
    build_profile,
    frequency_score,
    restrict_profile,
    score_all,
)
from .rankers import (
    RANKER_KINDS,
    NoRankingSignal,
    TrainedRanker,
    rank,
    train_ranker,
)
from .review_model import (
    ReviewClassifier,
    assemble_training_set,
    build_user_classifier,
    review_score,
    train_classifier,
)
from .synth import SyntheticInfo, SyntheticSpec, generate_synthetic, generate_synthetic_with_info

__version__ = "0.1.0"

__all__ = [
    "BASELINE_SPEC",
    "Collection",
    "CVOutcome",
    "FEATURE_NAMES",
    "FeatureSpec",
    "FrequencyProfile",
    "ItemSource",
    "MAX_KEYWORDS_PER_VENUE",
    "MAX_RANKED_LIST",
    "MetricReport",
    "NoRankingSignal",
    "ParseError",
    "Polarity",
    "QueryFeatures",
    "RANKER_KINDS",
    "RankingRequest",
    "Review",
    "ReviewClassifier",
    "SweepConfig",
    "SweepResult",
    "SyntheticInfo",
    "SyntheticSpec",
    "TrainedRanker",
    "TTestResult",
    "UserHistory",
    "ValidationError",
    "VARIANTS",
    "Venue",
    "assemble_features",
    "assemble_training_set",
    "build_profile",
    "build_user_classifier",
    "compute_score_tables",
    "cross_validate",
    "frequency_score",
    "generate_synthetic",
    "generate_synthetic_with_info",
    "load_collection",
    "make_folds",
    "mrr",
    "ndcg_at_5",
    "paired_ttest",
    "polarity_of_review_rating",
    "polarity_of_user_rating",
    "precision_at_5",
    "random_baseline",
    "rank",
    "read_qrels",
    "read_run",
    "reciprocal_rank",
    "restrict_profile",
    "review_score",
    "run_sweep",
    "score_all",
    "sweep_keywords",
    "sweep_reviews",
    "train_classifier",
    "train_ranker",
    "write_collection",
    "write_run",
]
