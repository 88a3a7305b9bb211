"""Positive/negative frequency profiles and the frequency-based similarity score.

A profile stores, for every item (keyword or category) seen in a user's
history, the exact fraction of item occurrences contributed by venues the
user rated positively (and, separately, negatively). Each venue's item list
is a set, so an item counts at most once per history entry. Neutral venues
contribute to the denominator only. Everything is kept in rational
arithmetic so counts can be recovered exactly.

The candidate score is sum over candidate items of cf+(item) - cf-(item);
items absent from the profile contribute zero, and a degenerate (empty
history) profile scores zero everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping, TYPE_CHECKING

import numpy as np

from .core import Polarity, Venue, normalize_item, polarity_of_user_rating

if TYPE_CHECKING:  # pragma: no cover
    from .core import RankingRequest, UserHistory
    from .ingest import Collection


class ItemSource(Enum):
    """Which venue field feeds the profile."""

    KEYWORDS = "keywords"
    CATEGORIES_YELP = "categories_yelp"
    CATEGORIES_FOURSQUARE = "categories_foursquare"

    def extract(self, venue: Venue) -> frozenset[str]:
        if self is ItemSource.KEYWORDS:
            raw = venue.keywords
        elif self is ItemSource.CATEGORIES_YELP:
            raw = venue.categories_yelp
        else:
            raw = venue.categories_foursquare
        return frozenset(normalize_item(item) for item in raw)


@dataclass(frozen=True)
class FrequencyProfile:
    positive_freq: Mapping[str, Fraction]
    negative_freq: Mapping[str, Fraction]
    denominator: int

    @property
    def degenerate(self) -> bool:
        return self.denominator == 0

    def cf_pos(self, item: str) -> Fraction:
        return self.positive_freq.get(item, Fraction(0))

    def cf_neg(self, item: str) -> Fraction:
        return self.negative_freq.get(item, Fraction(0))

    def items(self) -> frozenset[str]:
        return frozenset(self.positive_freq) | frozenset(self.negative_freq)


def build_profile(
    history: "UserHistory", collection: "Collection", source: ItemSource
) -> FrequencyProfile:
    """Count item occurrences over the whole history; split by venue polarity.

    Raises KeyError via collection lookup if a history venue is unresolvable.
    An empty history yields the degenerate profile (denominator 0).
    """
    pos_counts: dict[str, int] = {}
    neg_counts: dict[str, int] = {}
    denominator = 0
    for venue_id, rating in history.rated_venues:
        items = source.extract(collection.venue(venue_id))
        denominator += len(items)
        polarity = polarity_of_user_rating(rating)
        if polarity is Polarity.POSITIVE:
            for item in items:
                pos_counts[item] = pos_counts.get(item, 0) + 1
        elif polarity is Polarity.NEGATIVE:
            for item in items:
                neg_counts[item] = neg_counts.get(item, 0) + 1
    if denominator == 0:
        return FrequencyProfile({}, {}, 0)
    return FrequencyProfile(
        positive_freq={k: Fraction(v, denominator) for k, v in pos_counts.items()},
        negative_freq={k: Fraction(v, denominator) for k, v in neg_counts.items()},
        denominator=denominator,
    )


def frequency_score(profile: FrequencyProfile, candidate_items: Iterable[str]) -> float:
    """Sum of cf+ - cf- over the candidate's items, as a float."""
    if profile.degenerate:
        return 0.0
    total = Fraction(0)
    for item in candidate_items:
        item = normalize_item(item)
        total += profile.cf_pos(item) - profile.cf_neg(item)
    return float(total)


def score_all(
    collection: "Collection",
    history: "UserHistory",
    request: "RankingRequest",
    source: ItemSource,
    profile: FrequencyProfile | None = None,
) -> dict[str, float]:
    """Frequency score for every candidate in the request. Pure in its inputs."""
    if profile is None:
        profile = build_profile(history, collection, source)
    return {
        venue_id: frequency_score(profile, source.extract(collection.venue(venue_id)))
        for venue_id in request.candidates
    }


def restrict_profile(
    profile: FrequencyProfile,
    k: int,
    mode: str,
    rng: np.random.Generator | None = None,
) -> FrequencyProfile:
    """Keep only k profile items for scoring; the denominator is unchanged.

    mode "random" draws k items uniformly (requires rng); mode "popular"
    keeps the k items with the highest cf+ + cf-, ties broken by
    lexicographically smaller item. k at or above the profile size is a
    no-op.
    """
    items = sorted(profile.items())
    if k >= len(items):
        return profile
    if k <= 0:
        return FrequencyProfile({}, {}, profile.denominator)
    if mode == "random":
        if rng is None:
            raise ValueError("random restriction needs an rng")
        chosen = set(rng.choice(np.array(items, dtype=object), size=k, replace=False))
    elif mode == "popular":
        by_mass = sorted(items, key=lambda it: (-(profile.cf_pos(it) + profile.cf_neg(it)), it))
        chosen = set(by_mass[:k])
    else:
        raise ValueError(f"unknown restriction mode {mode!r}")
    return FrequencyProfile(
        positive_freq={k_: v for k_, v in profile.positive_freq.items() if k_ in chosen},
        negative_freq={k_: v for k_, v in profile.negative_freq.items() if k_ in chosen},
        denominator=profile.denominator,
    )
