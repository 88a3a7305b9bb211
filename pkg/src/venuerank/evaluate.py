"""Cross-validated evaluation and the data-ablation sweeps.

The protocol: users are split into 5 seeded folds; for each fold the ranker
is trained on the other folds, with the training seed chosen from a small
grid by mean training nDCG@5, and the held-out users' rankings are pooled
into one report. Sweeps rerun a fixed-seed version of the same protocol on
ablated inputs (fewer reviews per venue, or truncated keyword evidence) and
track mean nDCG@5 as a function of the ablation size k.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .features import (
    S_KEY,
    S_REV,
    FeatureSpec,
    QueryFeatures,
    ScoreTable,
    VARIANTS,
    assemble_features,
    compute_score_tables,
    profile_score_table,
    review_score_table,
)
from .ingest import Collection
from .metrics import ndcg_at_5, precision_at_5, reciprocal_rank
from .profiles import (
    FrequencyProfile,
    ItemSource,
    build_profile,
    frequency_score,
    restrict_profile,
)
from .rankers import TrainedRanker, rank, train_ranker

N_FOLDS = 5


@dataclass(eq=False)
class MetricReport:
    """Per-user metric values plus their means for one model and fold."""

    tag: str
    fold_id: int | None  # None means pooled over all folds
    precision_at_5: dict[str, float]
    ndcg_at_5: dict[str, float]
    reciprocal_rank: dict[str, float]

    def __post_init__(self) -> None:
        if not (
            self.precision_at_5.keys()
            == self.ndcg_at_5.keys()
            == self.reciprocal_rank.keys()
        ):
            raise ValueError("metric maps must cover the same users")

    @property
    def user_ids(self) -> list[str]:
        return sorted(self.precision_at_5)

    @staticmethod
    def _mean(values: Mapping[str, float]) -> float:
        return sum(values.values()) / len(values) if values else 0.0

    @property
    def mean_precision_at_5(self) -> float:
        return self._mean(self.precision_at_5)

    @property
    def mean_ndcg_at_5(self) -> float:
        return self._mean(self.ndcg_at_5)

    @property
    def mean_reciprocal_rank(self) -> float:
        # the mean of per-user reciprocal ranks is the MRR
        return self._mean(self.reciprocal_rank)


def evaluate_ranked_lists(
    ranked_lists: Mapping[str, Sequence[str]],
    collection: Collection,
    tag: str,
    fold_id: int | None = None,
) -> MetricReport:
    p5: dict[str, float] = {}
    ndcg: dict[str, float] = {}
    rr: dict[str, float] = {}
    for user_id, ranked in ranked_lists.items():
        qrels = collection.qrels_for_user(user_id)
        p5[user_id] = precision_at_5(ranked, qrels)
        ndcg[user_id] = ndcg_at_5(ranked, qrels)
        rr[user_id] = reciprocal_rank(ranked, qrels)
    return MetricReport(tag, fold_id, p5, ndcg, rr)


def make_folds(user_ids: Iterable[str], n_folds: int = N_FOLDS, seed: int = 0) -> list[list[str]]:
    """Seeded partition of the users into n_folds near-equal folds."""
    ids = sorted(set(user_ids))
    if len(ids) < n_folds:
        raise ValueError(f"cross-validation needs at least {n_folds} users, got {len(ids)}")
    perm = np.random.default_rng(seed).permutation(len(ids))
    return [sorted(ids[i] for i in chunk) for chunk in np.array_split(perm, n_folds)]


def _mean_train_ndcg(
    ranker: TrainedRanker,
    queries: Sequence[QueryFeatures],
    collection: Collection,
) -> float:
    values = [
        ndcg_at_5([v for v, _ in rank(ranker, q)], collection.qrels_for_user(q.user_id))
        for q in queries
    ]
    return sum(values) / len(values) if values else 0.0


@dataclass(eq=False)
class CVOutcome:
    pooled: MetricReport
    fold_reports: list[MetricReport]
    chosen_seeds: list[int]
    folds: list[list[str]]
    ranked_lists: dict[str, list[tuple[str, float]]]  # held-out ranking per user


def cross_validate(
    collection: Collection,
    specs: Sequence[FeatureSpec],
    ranker_kind: str,
    seed: int = 0,
    hyper_seeds: Sequence[int] = (0, 1, 2),
    tables: Mapping[str, ScoreTable] | None = None,
    n_folds: int = N_FOLDS,
) -> dict[str, CVOutcome]:
    """Evaluate each feature spec under seeded k-fold cross-validation.

    hyper_seeds is the per-fold hyperparameter grid: the ranker is trained
    once per seed on the training folds and the seed with the best mean
    training nDCG@5 wins (first on ties). Score tables are computed once and
    shared across specs and folds.
    """
    if not specs:
        raise ValueError("no feature specs given")
    if tables is None:
        needed = tuple(
            f for f in ("s_cat_yelp", "s_cat_foursquare", "s_rev", "s_key")
            if any(f in spec.features for spec in specs)
        )
        tables = compute_score_tables(collection, needed, svm_seed=seed)

    request_users = [r.user_id for r in collection.requests]
    folds = make_folds(request_users, n_folds=n_folds, seed=seed)

    outcomes: dict[str, CVOutcome] = {}
    for spec in specs:
        queries = assemble_features(collection, spec, tables)
        by_user = {q.user_id: q for q in queries}
        fold_reports: list[MetricReport] = []
        chosen_seeds: list[int] = []
        ranked_lists: dict[str, list[tuple[str, float]]] = {}
        for fold_id, test_users in enumerate(folds):
            held_out = set(test_users)
            train_queries = [q for q in queries if q.user_id not in held_out]
            best_ranker: TrainedRanker | None = None
            best_seed = hyper_seeds[0]
            best_train = -np.inf
            for hs in hyper_seeds:
                ranker = train_ranker(ranker_kind, train_queries, seed=hs)
                train_score = _mean_train_ndcg(ranker, train_queries, collection)
                if train_score > best_train + 1e-12:
                    best_train = train_score
                    best_ranker = ranker
                    best_seed = hs
            assert best_ranker is not None
            chosen_seeds.append(best_seed)

            fold_lists: dict[str, Sequence[str]] = {}
            for user_id in test_users:
                ranked = rank(best_ranker, by_user[user_id])
                ranked_lists[user_id] = ranked
                fold_lists[user_id] = [v for v, _ in ranked]
            fold_reports.append(
                evaluate_ranked_lists(fold_lists, collection, spec.name, fold_id)
            )

        pooled = MetricReport(
            tag=spec.name,
            fold_id=None,
            precision_at_5={u: v for r in fold_reports for u, v in r.precision_at_5.items()},
            ndcg_at_5={u: v for r in fold_reports for u, v in r.ndcg_at_5.items()},
            reciprocal_rank={u: v for r in fold_reports for u, v in r.reciprocal_rank.items()},
        )
        outcomes[spec.name] = CVOutcome(
            pooled=pooled,
            fold_reports=fold_reports,
            chosen_seeds=chosen_seeds,
            folds=folds,
            ranked_lists=ranked_lists,
        )
    return outcomes


def random_baseline(
    collection: Collection,
    n_repeats: int = 20,
    seed: int = 0,
    tag: str = "random",
) -> MetricReport:
    """Random-permutation ranking, per-user metrics averaged over repeats."""
    rng = np.random.default_rng(seed)
    p5: dict[str, float] = {}
    ndcg: dict[str, float] = {}
    rr: dict[str, float] = {}
    for request in collection.requests:
        candidates = sorted(request.candidates)
        qrels = collection.qrels_for_user(request.user_id)
        acc = np.zeros(3)
        for _ in range(n_repeats):
            perm = rng.permutation(len(candidates))
            ranked = [candidates[i] for i in perm]
            acc += (
                precision_at_5(ranked, qrels),
                ndcg_at_5(ranked, qrels),
                reciprocal_rank(ranked, qrels),
            )
        acc /= n_repeats
        p5[request.user_id] = float(acc[0])
        ndcg[request.user_id] = float(acc[1])
        rr[request.user_id] = float(acc[2])
    return MetricReport(tag, None, p5, ndcg, rr)


REVIEW_CRITERIA = ("random", "recent", "active")
KEYWORD_CRITERIA = ("venue-random", "user-random", "user-popular")


@dataclass(frozen=True)
class SweepConfig:
    axis: str  # "reviews" or "keywords"
    criterion: str
    k_values: tuple[int, ...]
    n_random_repeats: int = 5

    def __post_init__(self) -> None:
        if self.axis == "reviews":
            allowed = REVIEW_CRITERIA
        elif self.axis == "keywords":
            allowed = KEYWORD_CRITERIA
        else:
            raise ValueError(f"unknown sweep axis {self.axis!r}")
        if self.criterion not in allowed:
            raise ValueError(
                f"criterion {self.criterion!r} invalid for axis {self.axis!r}; "
                f"expected one of {allowed}"
            )
        if not self.k_values:
            raise ValueError("k_values must be non-empty")
        if any(k < 0 for k in self.k_values):
            raise ValueError("k_values must be non-negative")
        if list(self.k_values) != sorted(self.k_values):
            raise ValueError("k_values must be ascending")
        if self.criterion == "venue-random" and max(self.k_values) > 20:
            raise ValueError("venue-random keyword counts are capped at 20")
        if self.n_random_repeats < 1:
            raise ValueError("n_random_repeats must be >= 1")


@dataclass(frozen=True)
class SweepPoint:
    k: int
    mean_ndcg_at_5: float


@dataclass(eq=False)
class SweepResult:
    config: SweepConfig
    points: list[SweepPoint]


def with_filtered_reviews(
    collection: Collection,
    criterion: str,
    k: int,
    rng: np.random.Generator | None = None,
) -> Collection:
    """Copy of the collection keeping at most k reviews per venue.

    random: k uniform draws without replacement (original order kept);
    recent: the k newest by timestamp, ties by author id;
    active: the k whose authors wrote the most reviews, ties by author id.
    k at or above a venue's review count keeps everything.
    """
    if criterion not in REVIEW_CRITERIA:
        raise ValueError(f"unknown review criterion {criterion!r}")
    if criterion == "random" and rng is None:
        raise ValueError("random review filtering needs an rng")
    venues: dict[str, "object"] = {}
    for venue_id, venue in collection.venues.items():
        reviews = venue.reviews
        if k >= len(reviews):
            venues[venue_id] = venue
            continue
        if k <= 0:
            kept: tuple = ()
        elif criterion == "random":
            idx = sorted(rng.choice(len(reviews), size=k, replace=False))
            kept = tuple(reviews[i] for i in idx)
        elif criterion == "recent":
            kept = tuple(sorted(reviews, key=lambda r: (-r.timestamp, r.author_id))[:k])
        else:  # active
            kept = tuple(
                sorted(reviews, key=lambda r: (-r.author_review_count, r.author_id))[:k]
            )
        venues[venue_id] = dataclasses.replace(venue, reviews=kept)
    return collection.replace_venues(venues)


def with_truncated_keywords(
    collection: Collection,
    k: int,
    rng: np.random.Generator,
) -> Collection:
    """Copy keeping k random keywords per venue (the venue-random criterion)."""
    venues: dict[str, "object"] = {}
    for venue_id, venue in collection.venues.items():
        keywords = sorted(venue.keywords)
        if k >= len(keywords):
            venues[venue_id] = venue
            continue
        if k <= 0:
            chosen: frozenset[str] = frozenset()
        else:
            picks = rng.choice(np.array(keywords, dtype=object), size=k, replace=False)
            chosen = frozenset(str(x) for x in picks)
        venues[venue_id] = dataclasses.replace(venue, keywords=chosen)
    return collection.replace_venues(venues)


def restricted_keyword_table(
    collection: Collection,
    k: int,
    mode: str,
    rng: np.random.Generator | None = None,
    profiles: Mapping[str, FrequencyProfile] | None = None,
) -> ScoreTable:
    """Keyword score table with each user's profile cut down to k entries."""
    table: ScoreTable = {}
    for request in collection.requests:
        if profiles is None:
            profile = build_profile(
                collection.users[request.user_id], collection, ItemSource.KEYWORDS
            )
        else:
            profile = profiles[request.user_id]
        profile = restrict_profile(profile, k, mode, rng)
        for venue_id in request.candidates:
            items = ItemSource.KEYWORDS.extract(collection.venue(venue_id))
            table[(request.user_id, venue_id)] = frequency_score(profile, items)
    return table


def _ltr_s_mean_ndcg(
    collection: Collection,
    tables: Mapping[str, ScoreTable],
    ranker_kind: str,
    seed: int,
    n_folds: int,
) -> float:
    outcome = cross_validate(
        collection,
        [VARIANTS["LTR-S"]],
        ranker_kind,
        seed=seed,
        hyper_seeds=(seed,),  # sweeps hold hyperparameters fixed
        tables=tables,
        n_folds=n_folds,
    )
    return outcome["LTR-S"].pooled.mean_ndcg_at_5


def sweep_reviews(
    collection: Collection,
    config: SweepConfig,
    ranker_kind: str = "coordinate-ascent",
    seed: int = 0,
    n_folds: int = N_FOLDS,
) -> SweepResult:
    """nDCG@5 of LTR-S as the per-venue review budget k varies."""
    if config.axis != "reviews":
        raise ValueError("sweep_reviews needs a reviews-axis config")
    keyword_table = profile_score_table(collection, S_KEY)
    points: list[SweepPoint] = []
    for k in config.k_values:
        if config.criterion == "random":
            values = []
            for repeat in range(config.n_random_repeats):
                rng = np.random.default_rng([seed, k, repeat])
                filtered = with_filtered_reviews(collection, "random", k, rng)
                tables = {
                    S_KEY: keyword_table,
                    S_REV: review_score_table(filtered, svm_seed=seed),
                }
                values.append(
                    _ltr_s_mean_ndcg(filtered, tables, ranker_kind, seed, n_folds)
                )
            points.append(SweepPoint(k, sum(values) / len(values)))
        else:
            filtered = with_filtered_reviews(collection, config.criterion, k)
            tables = {
                S_KEY: keyword_table,
                S_REV: review_score_table(filtered, svm_seed=seed),
            }
            points.append(
                SweepPoint(k, _ltr_s_mean_ndcg(filtered, tables, ranker_kind, seed, n_folds))
            )
    return SweepResult(config, points)


def sweep_keywords(
    collection: Collection,
    config: SweepConfig,
    ranker_kind: str = "coordinate-ascent",
    seed: int = 0,
    n_folds: int = N_FOLDS,
) -> SweepResult:
    """nDCG@5 of LTR-S as keyword evidence is restricted to k items."""
    if config.axis != "keywords":
        raise ValueError("sweep_keywords needs a keywords-axis config")
    review_table = review_score_table(collection, svm_seed=seed)
    full_profiles = {
        request.user_id: build_profile(
            collection.users[request.user_id], collection, ItemSource.KEYWORDS
        )
        for request in collection.requests
    }
    points: list[SweepPoint] = []
    for k in config.k_values:
        if config.criterion == "venue-random":
            values = []
            for repeat in range(config.n_random_repeats):
                rng = np.random.default_rng([seed, k, repeat])
                truncated = with_truncated_keywords(collection, k, rng)
                tables = {
                    S_REV: review_table,
                    S_KEY: profile_score_table(truncated, S_KEY),
                }
                values.append(
                    _ltr_s_mean_ndcg(truncated, tables, ranker_kind, seed, n_folds)
                )
            points.append(SweepPoint(k, sum(values) / len(values)))
        elif config.criterion == "user-random":
            values = []
            for repeat in range(config.n_random_repeats):
                rng = np.random.default_rng([seed, k, repeat])
                tables = {
                    S_REV: review_table,
                    S_KEY: restricted_keyword_table(
                        collection, k, "random", rng, profiles=full_profiles
                    ),
                }
                values.append(
                    _ltr_s_mean_ndcg(collection, tables, ranker_kind, seed, n_folds)
                )
            points.append(SweepPoint(k, sum(values) / len(values)))
        else:  # user-popular, deterministic
            tables = {
                S_REV: review_table,
                S_KEY: restricted_keyword_table(
                    collection, k, "popular", profiles=full_profiles
                ),
            }
            points.append(
                SweepPoint(k, _ltr_s_mean_ndcg(collection, tables, ranker_kind, seed, n_folds))
            )
    return SweepResult(config, points)


def run_sweep(
    collection: Collection,
    config: SweepConfig,
    ranker_kind: str = "coordinate-ascent",
    seed: int = 0,
    n_folds: int = N_FOLDS,
) -> SweepResult:
    if config.axis == "reviews":
        return sweep_reviews(collection, config, ranker_kind, seed, n_folds)
    return sweep_keywords(collection, config, ranker_kind, seed, n_folds)
