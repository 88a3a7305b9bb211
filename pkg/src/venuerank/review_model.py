"""Per-user relevance scoring from review text.

For each user, a linear squared-hinge classifier is trained on polarity
filtered reviews: positive reviews (4 or 5 stars) of venues the user rated
positively form the positive class, negative reviews (1 or 2 stars) of
venues the user rated negatively form the negative class. Cross-polarity
reviews (a bad review of a liked venue and vice versa) and everything
neutral are discarded. A candidate venue is scored by the classifier's
decision function on the mean of its per-review TF-IDF vectors.

Users whose filtered training data contains only one class get a degenerate
classifier that scores every venue 0, so downstream feature assembly stays
total.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import (
    Polarity,
    UserHistory,
    Venue,
    polarity_of_review_rating,
    polarity_of_user_rating,
)
from .ingest import Collection
from .svm import DEFAULT_MAX_PASSES, DEFAULT_TOL, train_squared_hinge
from .text import SparseVector, Vocabulary, fit_vocabulary, tokenize, transform


@dataclass(frozen=True)
class LabeledReview:
    text: str
    label: int  # +1 or -1


@dataclass(frozen=True)
class ReviewScore:
    value: float
    has_evidence: bool  # False when the venue carries no reviews at all


@dataclass(frozen=True)
class ReviewClassifier:
    """Trained per-user model; immutable and safe to share across threads."""

    vocabulary: Vocabulary
    weights: np.ndarray  # dense, length == vocabulary.size
    bias: float
    degenerate: bool
    n_positive: int = 0
    n_negative: int = 0
    objective_history: tuple[float, ...] = ()
    converged: bool = True

    def __post_init__(self) -> None:
        if len(self.weights) != self.vocabulary.size:
            raise ValueError("weight vector length must match vocabulary size")

    def decision_value(self, vector: SparseVector) -> float:
        if self.degenerate:
            return 0.0
        return vector.dot_dense(self.weights) + self.bias


def _degenerate(n_positive: int, n_negative: int) -> ReviewClassifier:
    return ReviewClassifier(
        vocabulary=Vocabulary(index={}, document_frequency={}, n_documents=0),
        weights=np.zeros(0, dtype=np.float64),
        bias=0.0,
        degenerate=True,
        n_positive=n_positive,
        n_negative=n_negative,
    )


def assemble_training_set(user: UserHistory, collection: Collection) -> list[LabeledReview]:
    """Collect the user's polarity-consistent training reviews.

    Each history entry contributes independently, so a venue listed twice
    contributes its reviews twice; that mirrors the frequency profiles,
    where repeat visits reweight evidence.
    """
    samples: list[LabeledReview] = []
    for venue_id, rating in user.rated_venues:
        venue_polarity = polarity_of_user_rating(rating)
        if venue_polarity is Polarity.NEUTRAL:
            continue
        label = 1 if venue_polarity is Polarity.POSITIVE else -1
        for review in collection.venue(venue_id).reviews:
            if polarity_of_review_rating(review.rating) is venue_polarity:
                samples.append(LabeledReview(text=review.text, label=label))
    return samples


def train_classifier(
    samples: list[LabeledReview],
    C: float = 1.0,
    tol: float = DEFAULT_TOL,
    max_passes: int = DEFAULT_MAX_PASSES,
    seed: int = 0,
) -> ReviewClassifier:
    n_positive = sum(1 for s in samples if s.label > 0)
    n_negative = len(samples) - n_positive
    if n_positive == 0 or n_negative == 0:
        return _degenerate(n_positive, n_negative)

    docs = [tokenize(s.text) for s in samples]
    vocabulary = fit_vocabulary(docs)
    if vocabulary.size == 0:
        # every training review tokenized to nothing; no usable signal
        return _degenerate(n_positive, n_negative)
    vectors = [transform(vocabulary, doc) for doc in docs]
    labels = np.array([s.label for s in samples], dtype=np.float64)
    result = train_squared_hinge(
        vectors, labels, vocabulary.size, C=C, tol=tol, max_passes=max_passes, seed=seed
    )
    return ReviewClassifier(
        vocabulary=vocabulary,
        weights=result.weights,
        bias=result.bias,
        degenerate=False,
        n_positive=n_positive,
        n_negative=n_negative,
        objective_history=tuple(result.objective_history),
        converged=result.converged,
    )


def build_user_classifier(
    user: UserHistory,
    collection: Collection,
    C: float = 1.0,
    seed: int = 0,
) -> ReviewClassifier:
    return train_classifier(assemble_training_set(user, collection), C=C, seed=seed)


def _mean_review_vector(classifier: ReviewClassifier, venue: Venue) -> np.ndarray:
    dense = np.zeros(classifier.vocabulary.size, dtype=np.float64)
    vectors = [transform(classifier.vocabulary, tokenize(r.text)) for r in venue.reviews]
    # canonical accumulation order makes the mean independent of review order
    for vector in sorted(vectors, key=SparseVector.key):
        vector.add_into(dense)
    dense /= len(vectors)
    return dense


def review_score_flagged(classifier: ReviewClassifier, venue: Venue) -> ReviewScore:
    if not venue.reviews:
        return ReviewScore(0.0, has_evidence=False)
    if classifier.degenerate:
        return ReviewScore(0.0, has_evidence=True)
    mean = _mean_review_vector(classifier, venue)
    return ReviewScore(float(np.dot(classifier.weights, mean) + classifier.bias), True)


def review_score(classifier: ReviewClassifier, venue: Venue) -> float:
    """Decision-function value on the venue's mean review vector (0 if no signal)."""
    return review_score_flagged(classifier, venue).value


def dump_classifier(
    classifier: ReviewClassifier,
    path: str | Path | None = None,
    header: str | None = None,
) -> str:
    """Render "term weight" lines plus a __bias__ line; tokens never contain
    underscores, so the bias marker cannot collide with a term."""
    lines: list[str] = []
    if header:
        lines.append(f"# {header}")
    if classifier.degenerate:
        lines.append("# degenerate classifier: every score is 0")
    for i, term in enumerate(classifier.vocabulary.terms_by_index()):
        lines.append(f"{term} {float(classifier.weights[i])}")
    lines.append(f"__bias__ {float(classifier.bias)}")
    text = "\n".join(lines) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text
