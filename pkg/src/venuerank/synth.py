"""Deterministic synthetic corpus generation.

Users and venues share a latent topic space: preference vectors and venue
topic mixtures are Dirichlet draws, and a user's ratings are per-user
quantile bins over noisy preference/mixture dot products, so they are
monotone in topical affinity up to a small noise term. Venue keywords,
categories, and review topic words are drawn conditioned on the venue's
mixture; keywords are conditioned harder and drawn more often than
categories, so keyword evidence carries more of the planted signal. Review
star ratings track a separate per-venue quality scalar that is independent
of topics, which makes the praise and complaint words realistic noise
rather than a shortcut.

All randomness flows through a single numpy Generator seeded from the spec,
so equal specs produce byte-identical dataset files.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Review, RankingRequest, UserHistory, Venue
from .ingest import Collection

CITY = "springfield"

PRAISE_WORDS = (
    "amazing", "fantastic", "delicious", "friendly", "cozy",
    "perfect", "wonderful", "excellent", "lovely", "superb",
)
COMPLAINT_WORDS = (
    "terrible", "bland", "rude", "dirty", "awful",
    "overpriced", "slow", "noisy", "disappointing", "mediocre",
)
FILLER_WORDS = (
    "place", "visit", "menu", "staff", "table",
    "order", "evening", "experience", "location", "service",
)

KEYWORD_CONDITIONING = 0.9
CATEGORY_CONDITIONING = 0.6
AFFINITY_NOISE = 0.02

AGE_GROUPS = ("18-24", "25-34", "35-49", "50+")
GENDERS = ("f", "m", "o")


@dataclass(frozen=True)
class SyntheticSpec:
    """Size and shape knobs for one generated corpus."""

    n_users: int = 50
    n_venues: int = 500
    preference_dimensions: int = 8
    n_keywords_vocab: int = 320
    n_categories_vocab: int = 16  # per category namespace
    history_size: int = 60
    candidates_per_user: int = 30
    reviews_per_venue_range: tuple[int, int] = (2, 6)
    keywords_per_venue_range: tuple[int, int] = (6, 12)
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_users < 1:
            raise ValueError("n_users must be >= 1")
        if self.n_venues < 12:
            raise ValueError("n_venues must be >= 12")
        if self.preference_dimensions < 2:
            raise ValueError("preference_dimensions must be >= 2")
        if self.n_keywords_vocab < 2 * self.preference_dimensions:
            raise ValueError("n_keywords_vocab must allow >= 2 keywords per topic")
        if self.n_categories_vocab < self.preference_dimensions:
            raise ValueError("n_categories_vocab must allow >= 1 label per topic")
        if self.history_size < 5 or self.candidates_per_user < 5:
            # per-user quantile binning needs at least five venues per block
            raise ValueError("history_size and candidates_per_user must be >= 5")
        for lo, hi in (self.reviews_per_venue_range, self.keywords_per_venue_range):
            if lo < 0 or hi < lo:
                raise ValueError(f"bad range ({lo}, {hi}): need 0 <= lo <= hi")
        if self.keywords_per_venue_range[1] > 20:
            raise ValueError("keywords_per_venue_range exceeds the 20-keyword cap")

    def effective_sizes(self) -> tuple[int, int]:
        """History and candidate counts clamped to fit n_venues (disjoint draws)."""
        history = min(self.history_size, self.n_venues - 5)
        candidates = min(self.candidates_per_user, self.n_venues - history)
        return history, candidates


@dataclass(eq=False)
class SyntheticInfo:
    """Planted latent state, exposed so tests can check the generator's promises."""

    user_preferences: dict[str, np.ndarray]
    venue_mixtures: dict[str, np.ndarray]
    venue_quality: dict[str, float]
    topic_words: list[list[str]]


def _topic_word_pools(spec: SyntheticSpec) -> list[list[str]]:
    d = spec.preference_dimensions
    per_topic = spec.n_keywords_vocab // d
    return [
        [f"t{t:02d}w{i:03d}" for i in range(per_topic)] for t in range(d)
    ]


def _category_labels(spec: SyntheticSpec, prefix: str) -> list[list[str]]:
    d = spec.preference_dimensions
    per_topic = spec.n_categories_vocab // d
    return [
        [f"{prefix}{t:02d}c{j:02d}" for j in range(per_topic)] for t in range(d)
    ]


def _conditioned_topic(rng: np.random.Generator, mixture: np.ndarray, p: float) -> int:
    if rng.random() < p:
        return int(rng.choice(len(mixture), p=mixture))
    return int(rng.integers(len(mixture)))


def _review_words(
    rng: np.random.Generator,
    mixture: np.ndarray,
    rating: int,
    topic_words: list[list[str]],
) -> str:
    words: list[str] = []
    for _ in range(int(rng.integers(4, 9))):
        topic = _conditioned_topic(rng, mixture, KEYWORD_CONDITIONING)
        pool = topic_words[topic]
        words.append(pool[int(rng.integers(len(pool)))])
    if rating >= 4:
        picks = rng.choice(len(PRAISE_WORDS), size=int(rng.integers(2, 5)), replace=False)
        words.extend(PRAISE_WORDS[int(i)] for i in picks)
    elif rating <= 2:
        picks = rng.choice(len(COMPLAINT_WORDS), size=int(rng.integers(2, 5)), replace=False)
        words.extend(COMPLAINT_WORDS[int(i)] for i in picks)
    else:
        words.append(PRAISE_WORDS[int(rng.integers(len(PRAISE_WORDS)))])
        words.append(COMPLAINT_WORDS[int(rng.integers(len(COMPLAINT_WORDS)))])
    picks = rng.choice(len(FILLER_WORDS), size=int(rng.integers(2, 5)), replace=False)
    words.extend(FILLER_WORDS[int(i)] for i in picks)
    order = rng.permutation(len(words))
    return " ".join(words[i] for i in order)


def _make_venue(
    rng: np.random.Generator,
    venue_id: str,
    mixture: np.ndarray,
    quality: float,
    spec: SyntheticSpec,
    topic_words: list[list[str]],
    yelp_labels: list[list[str]],
    foursquare_labels: list[list[str]],
    author_counter: list[int],
) -> Venue:
    kw_lo, kw_hi = spec.keywords_per_venue_range
    keywords: set[str] = set()
    for _ in range(int(rng.integers(kw_lo, kw_hi + 1))):
        topic = _conditioned_topic(rng, mixture, KEYWORD_CONDITIONING)
        pool = topic_words[topic]
        keywords.add(pool[int(rng.integers(len(pool)))])

    def draw_categories(labels_per_topic: list[list[str]]) -> frozenset[str]:
        cats: set[str] = set()
        for _ in range(int(rng.integers(2, 4))):
            topic = _conditioned_topic(rng, mixture, CATEGORY_CONDITIONING)
            labels = labels_per_topic[topic]
            cats.add(labels[int(rng.integers(len(labels)))])
        return frozenset(cats)

    categories_yelp = draw_categories(yelp_labels)
    categories_foursquare = draw_categories(foursquare_labels)

    r_lo, r_hi = spec.reviews_per_venue_range
    reviews = []
    for _ in range(int(rng.integers(r_lo, r_hi + 1))):
        rating = int(np.clip(np.rint(1.0 + 4.0 * quality + rng.normal(0.0, 0.8)), 1, 5))
        text = _review_words(rng, mixture, rating, topic_words)
        author_counter[0] += 1
        reviews.append(
            Review(
                venue_id=venue_id,
                author_id=f"a{author_counter[0]:06d}",
                text=text,
                rating=rating,
                timestamp=int(rng.integers(1_500_000_000, 1_700_000_000)),
                author_review_count=int(rng.integers(1, 400)),
            )
        )
    return Venue(
        id=venue_id,
        city=CITY,
        categories_yelp=categories_yelp,
        categories_foursquare=categories_foursquare,
        keywords=frozenset(keywords),
        reviews=tuple(reviews),
    )


def generate_synthetic_with_info(spec: SyntheticSpec) -> tuple[Collection, SyntheticInfo]:
    rng = np.random.default_rng(spec.seed)
    d = spec.preference_dimensions
    topic_words = _topic_word_pools(spec)
    yelp_labels = _category_labels(spec, "yc")
    foursquare_labels = _category_labels(spec, "fc")

    venues: dict[str, Venue] = {}
    mixtures: dict[str, np.ndarray] = {}
    quality: dict[str, float] = {}
    author_counter = [0]
    for i in range(spec.n_venues):
        venue_id = f"v{i:05d}"
        mixture = rng.dirichlet(np.full(d, 0.3))
        q = float(rng.beta(2.0, 2.0))
        mixtures[venue_id] = mixture
        quality[venue_id] = q
        venues[venue_id] = _make_venue(
            rng, venue_id, mixture, q, spec, topic_words,
            yelp_labels, foursquare_labels, author_counter,
        )

    venue_ids = sorted(venues)
    mixture_matrix = np.stack([mixtures[v] for v in venue_ids])

    history_size, candidate_size = spec.effective_sizes()
    users: dict[str, UserHistory] = {}
    requests: list[RankingRequest] = []
    qrels: dict[tuple[str, str], int] = {}
    preferences: dict[str, np.ndarray] = {}
    for i in range(spec.n_users):
        user_id = f"u{i:04d}"
        pref = rng.dirichlet(np.full(d, 0.3))
        preferences[user_id] = pref

        chosen = rng.choice(spec.n_venues, size=history_size + candidate_size, replace=False)
        affinity = mixture_matrix[chosen] @ pref
        affinity = affinity + rng.normal(0.0, AFFINITY_NOISE, size=len(chosen))
        # rating 4 for the top fifth of this user's venues, down to 0 for the bottom
        rank_of = np.empty(len(chosen), dtype=np.int64)
        rank_of[np.argsort(-affinity, kind="stable")] = np.arange(len(chosen))
        ratings = 4 - (5 * rank_of) // len(chosen)

        rated = tuple(
            (venue_ids[chosen[j]], int(ratings[j])) for j in range(history_size)
        )
        users[user_id] = UserHistory(
            user_id=user_id,
            rated_venues=rated,
            age_group=AGE_GROUPS[int(rng.integers(len(AGE_GROUPS)))],
            gender=GENDERS[int(rng.integers(len(GENDERS)))],
        )
        candidate_ids = sorted(venue_ids[chosen[j]] for j in range(history_size, len(chosen)))
        requests.append(
            RankingRequest(user_id=user_id, city=CITY, candidates=tuple(candidate_ids))
        )
        for j in range(history_size, len(chosen)):
            qrels[(user_id, venue_ids[chosen[j]])] = int(ratings[j])

    collection = Collection(venues=venues, users=users, requests=requests, qrels=qrels)
    info = SyntheticInfo(
        user_preferences=preferences,
        venue_mixtures=mixtures,
        venue_quality=quality,
        topic_words=topic_words,
    )
    return collection, info


def generate_synthetic(spec: SyntheticSpec) -> Collection:
    collection, _ = generate_synthetic_with_info(spec)
    return collection
