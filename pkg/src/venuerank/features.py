"""Per-candidate feature assembly for the ranking models.

Four raw scores exist per (user, venue) pair: the two category frequency
scores, the keyword frequency score, and the review-classifier score. A
FeatureSpec selects a subset; the named variants are fixed subsets and
"custom" covers everything else. Raw scores are min-max normalized to
[0, 1] per query (per user, per feature) before training or scoring, with
constant columns mapping to 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .ingest import Collection
from .profiles import ItemSource, score_all
from .review_model import build_user_classifier, review_score

S_CAT_YELP = "s_cat_yelp"
S_CAT_FOURSQUARE = "s_cat_foursquare"
S_REV = "s_rev"
S_KEY = "s_key"

FEATURE_NAMES = (S_CAT_YELP, S_CAT_FOURSQUARE, S_REV, S_KEY)

_PROFILE_SOURCES = {
    S_CAT_YELP: ItemSource.CATEGORIES_YELP,
    S_CAT_FOURSQUARE: ItemSource.CATEGORIES_FOURSQUARE,
    S_KEY: ItemSource.KEYWORDS,
}

UNLABELED = -1


@dataclass(frozen=True)
class FeatureSpec:
    name: str
    features: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.features:
            raise ValueError("a feature spec needs at least one feature")
        unknown = [f for f in self.features if f not in FEATURE_NAMES]
        if unknown:
            raise ValueError(f"unknown features: {unknown}")
        if len(set(self.features)) != len(self.features):
            raise ValueError("duplicate features in spec")
        canonical = tuple(f for f in FEATURE_NAMES if f in self.features)
        if canonical != self.features:
            raise ValueError(f"features must follow canonical order {FEATURE_NAMES}")


VARIANTS: dict[str, FeatureSpec] = {
    "LTR-All": FeatureSpec("LTR-All", FEATURE_NAMES),
    "LTR-S": FeatureSpec("LTR-S", (S_REV, S_KEY)),
    "LTR-C": FeatureSpec("LTR-C", (S_CAT_YELP, S_CAT_FOURSQUARE)),
    "LTR-Y": FeatureSpec("LTR-Y", (S_CAT_YELP, S_REV)),
    "LTR-F": FeatureSpec("LTR-F", (S_CAT_FOURSQUARE, S_KEY)),
}

# the linear-interpolation baseline fuses the two category scores with the
# review score, keywords stay out
BASELINE_SPEC = FeatureSpec("LinearCatRev", (S_CAT_YELP, S_CAT_FOURSQUARE, S_REV))


def variant(name: str) -> FeatureSpec:
    try:
        return VARIANTS[name]
    except KeyError:
        raise ValueError(
            f"unknown variant {name!r}; expected one of {sorted(VARIANTS)}"
        ) from None


def custom_spec(features: Iterable[str]) -> FeatureSpec:
    ordered = tuple(f for f in FEATURE_NAMES if f in set(features))
    return FeatureSpec("custom", ordered)


ScoreTable = dict[tuple[str, str], float]


def profile_score_table(collection: Collection, feature: str) -> ScoreTable:
    """Frequency scores for one profile-backed feature over all requests."""
    source = _PROFILE_SOURCES[feature]
    table: ScoreTable = {}
    for request in collection.requests:
        history = collection.users[request.user_id]
        for venue_id, value in score_all(collection, history, request, source).items():
            table[(request.user_id, venue_id)] = value
    return table


def review_score_table(collection: Collection, svm_seed: int = 0) -> ScoreTable:
    """Train one classifier per requesting user and score their candidates."""
    table: ScoreTable = {}
    for request in collection.requests:
        history = collection.users[request.user_id]
        classifier = build_user_classifier(history, collection, seed=svm_seed)
        for venue_id in request.candidates:
            table[(request.user_id, venue_id)] = review_score(
                classifier, collection.venue(venue_id)
            )
    return table


def compute_score_tables(
    collection: Collection,
    features: tuple[str, ...] = FEATURE_NAMES,
    svm_seed: int = 0,
) -> dict[str, ScoreTable]:
    tables: dict[str, ScoreTable] = {}
    for feature in features:
        if feature == S_REV:
            tables[feature] = review_score_table(collection, svm_seed=svm_seed)
        else:
            tables[feature] = profile_score_table(collection, feature)
    return tables


def normalize_columns(matrix: np.ndarray) -> np.ndarray:
    """Min-max map each column into [0,1]; constant columns become 0."""
    lo = matrix.min(axis=0)
    hi = matrix.max(axis=0)
    span = hi - lo
    out = np.zeros_like(matrix, dtype=np.float64)
    varying = span > 0
    out[:, varying] = (matrix[:, varying] - lo[varying]) / span[varying]
    return out


@dataclass(eq=False)
class QueryFeatures:
    """One user's candidates in feature space, normalized, candidate ids ascending."""

    user_id: str
    venue_ids: tuple[str, ...]
    values: np.ndarray  # (n_candidates, n_features) in [0,1]
    labels: np.ndarray  # (n_candidates,) ratings 0..4, UNLABELED where unjudged
    feature_names: tuple[str, ...]

    def __post_init__(self) -> None:
        if self.values.shape != (len(self.venue_ids), len(self.feature_names)):
            raise ValueError("feature matrix shape mismatch")
        if self.labels.shape != (len(self.venue_ids),):
            raise ValueError("label vector shape mismatch")
        if any(self.venue_ids[i] >= self.venue_ids[i + 1] for i in range(len(self.venue_ids) - 1)):
            raise ValueError("venue ids must be strictly ascending")

    @property
    def n_candidates(self) -> int:
        return len(self.venue_ids)

    def has_ranking_signal(self) -> bool:
        judged = self.labels[self.labels != UNLABELED]
        return judged.size >= 2 and np.unique(judged).size >= 2


def assemble_features(
    collection: Collection,
    spec: FeatureSpec,
    tables: Mapping[str, ScoreTable] | None = None,
    svm_seed: int = 0,
) -> list[QueryFeatures]:
    """One QueryFeatures per request, in request order."""
    if tables is None:
        tables = compute_score_tables(collection, spec.features, svm_seed=svm_seed)
    missing = [f for f in spec.features if f not in tables]
    if missing:
        raise ValueError(f"score tables missing features: {missing}")

    queries: list[QueryFeatures] = []
    for request in collection.requests:
        venue_ids = tuple(sorted(request.candidates))
        raw = np.empty((len(venue_ids), len(spec.features)), dtype=np.float64)
        for j, feature in enumerate(spec.features):
            table = tables[feature]
            for i, venue_id in enumerate(venue_ids):
                raw[i, j] = table[(request.user_id, venue_id)]
        labels = np.array(
            [
                collection.qrels.get((request.user_id, venue_id), UNLABELED)
                for venue_id in venue_ids
            ],
            dtype=np.int64,
        )
        queries.append(
            QueryFeatures(
                user_id=request.user_id,
                venue_ids=venue_ids,
                values=normalize_columns(raw),
                labels=labels,
                feature_names=spec.features,
            )
        )
    return queries


def write_feature_file(
    queries: Iterable[QueryFeatures],
    path: str | Path,
    header: str | None = None,
) -> None:
    """Conventional ranking text format: "label qid:<user> 1:<v> ... # venue_id".

    Unjudged candidates are written with label 0 so the file stays loadable
    by standard tooling.
    """
    lines: list[str] = []
    if header:
        lines.append(f"# {header}")
    for query in queries:
        for i, venue_id in enumerate(query.venue_ids):
            label = int(query.labels[i])
            parts = [str(max(label, 0)), f"qid:{query.user_id}"]
            parts.extend(
                f"{j + 1}:{float(query.values[i, j])}" for j in range(len(query.feature_names))
            )
            parts.append(f"# {venue_id}")
            lines.append(" ".join(parts))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
