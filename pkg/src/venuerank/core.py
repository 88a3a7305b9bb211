"""Shared domain types: venues, reviews, user histories, and rating polarity.

Two rating scales coexist and must not be mixed up:

* user ratings of venues live on a 0..4 scale (0 = very uninterested,
  4 = very interested);
* review ratings on the social networks live on a 1..5 star scale.

Each scale has its own polarity rule; both split the scale into a top-2
positive band, a single neutral grade, and a bottom band.

All types here are immutable after construction and safe to share across
concurrent workers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum

USER_RATING_MIN = 0
USER_RATING_MAX = 4
REVIEW_RATING_MIN = 1
REVIEW_RATING_MAX = 5

#: Hard cap on taste keywords attached to a single venue.
MAX_KEYWORDS_PER_VENUE = 20

#: Maximum length of an emitted ranked list.
MAX_RANKED_LIST = 30


class Polarity(Enum):
    POSITIVE = "positive"
    NEUTRAL = "neutral"
    NEGATIVE = "negative"


def polarity_of_review_rating(rating: int) -> Polarity:
    """Polarity of a 1..5 review star rating: [4,5] positive, 3 neutral, [1,2] negative."""
    if not REVIEW_RATING_MIN <= rating <= REVIEW_RATING_MAX:
        raise ValueError(f"review rating {rating!r} outside [1, 5]")
    if rating >= 4:
        return Polarity.POSITIVE
    if rating == 3:
        return Polarity.NEUTRAL
    return Polarity.NEGATIVE


def polarity_of_user_rating(rating: int) -> Polarity:
    """Polarity of a 0..4 user rating: {3,4} positive, 2 neutral, {0,1} negative."""
    if not USER_RATING_MIN <= rating <= USER_RATING_MAX:
        raise ValueError(f"user rating {rating!r} outside [0, 4]")
    if rating >= 3:
        return Polarity.POSITIVE
    if rating == 2:
        return Polarity.NEUTRAL
    return Polarity.NEGATIVE


def normalize_item(item: str) -> str:
    """Canonical form for keywords and categories: trimmed, lowercased."""
    return item.strip().lower()


@dataclass(frozen=True)
class Review:
    venue_id: str
    author_id: str
    text: str
    rating: int  # 1..5 star scale
    timestamp: int  # seconds since epoch
    author_review_count: int  # total reviews the author has written, activity measure

    def __post_init__(self) -> None:
        if not REVIEW_RATING_MIN <= self.rating <= REVIEW_RATING_MAX:
            raise ValueError(f"review rating {self.rating!r} outside [1, 5]")
        if self.timestamp < 0:
            raise ValueError("review timestamp must be >= 0")
        if self.author_review_count < 0:
            raise ValueError("author_review_count must be >= 0")

    def to_dict(self) -> dict:
        return {
            "venue_id": self.venue_id,
            "author_id": self.author_id,
            "text": self.text,
            "rating": self.rating,
            "timestamp": self.timestamp,
            "author_review_count": self.author_review_count,
        }

    @classmethod
    def from_dict(cls, d: dict, venue_id: str | None = None) -> "Review":
        return cls(
            venue_id=d.get("venue_id", venue_id if venue_id is not None else ""),
            author_id=d.get("author_id", ""),
            text=d["text"],
            rating=int(d["rating"]),
            timestamp=int(d.get("timestamp", 0)),
            author_review_count=int(d.get("author_review_count", 0)),
        )


@dataclass(frozen=True)
class Venue:
    """A candidate place: per-source categories, taste keywords, and reviews.

    Ids are opaque strings and never parsed for meaning. Category and keyword
    strings are stored lowercased and trimmed; unknown values are kept
    verbatim (there is no canonical taxonomy).
    """

    id: str
    city: str
    categories_yelp: frozenset[str] = frozenset()
    categories_foursquare: frozenset[str] = frozenset()
    keywords: frozenset[str] = frozenset()
    reviews: tuple[Review, ...] = ()

    def __post_init__(self) -> None:
        if len(self.keywords) > MAX_KEYWORDS_PER_VENUE:
            raise ValueError(
                f"venue {self.id!r} has {len(self.keywords)} keywords, "
                f"limit is {MAX_KEYWORDS_PER_VENUE}"
            )
        for review in self.reviews:
            if review.venue_id != self.id:
                raise ValueError(
                    f"review for {review.venue_id!r} attached to venue {self.id!r}"
                )

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "city": self.city,
            "categories_yelp": sorted(self.categories_yelp),
            "categories_foursquare": sorted(self.categories_foursquare),
            "keywords": sorted(self.keywords),
            "reviews": [r.to_dict() for r in self.reviews],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Venue":
        venue_id = d["id"]
        return cls(
            id=venue_id,
            city=str(d["city"]),
            categories_yelp=frozenset(
                normalize_item(c) for c in d.get("categories_yelp", [])
            ),
            categories_foursquare=frozenset(
                normalize_item(c) for c in d.get("categories_foursquare", [])
            ),
            keywords=frozenset(normalize_item(k) for k in d.get("keywords", [])),
            reviews=tuple(
                Review.from_dict(r, venue_id=venue_id) for r in d.get("reviews", [])
            ),
        )

    def to_json_line(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, separators=(",", ":"))


@dataclass(frozen=True)
class UserHistory:
    """A user's previously rated venues plus optional demographic fields."""

    user_id: str
    rated_venues: tuple[tuple[str, int], ...]  # (venue_id, 0..4 rating)
    age_group: str | None = None
    gender: str | None = None

    def __post_init__(self) -> None:
        for venue_id, rating in self.rated_venues:
            if not USER_RATING_MIN <= rating <= USER_RATING_MAX:
                raise ValueError(
                    f"user {self.user_id!r} rates {venue_id!r} as {rating!r}, "
                    "outside [0, 4]"
                )

    def to_dict(self) -> dict:
        return {
            "user_id": self.user_id,
            "rated_venues": [[v, r] for v, r in self.rated_venues],
            "age_group": self.age_group,
            "gender": self.gender,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "UserHistory":
        return cls(
            user_id=d["user_id"],
            rated_venues=tuple((str(v), int(r)) for v, r in d.get("rated_venues", [])),
            age_group=d.get("age_group"),
            gender=d.get("gender"),
        )

    def to_json_line(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, separators=(",", ":"))


@dataclass(frozen=True)
class RankingRequest:
    """One ranking task: suggest venues from `candidates` to `user_id` in `city`."""

    user_id: str
    city: str
    candidates: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "user_id": self.user_id,
            "city": self.city,
            "candidates": list(self.candidates),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RankingRequest":
        return cls(
            user_id=d["user_id"],
            city=str(d["city"]),
            candidates=tuple(str(v) for v in d.get("candidates", [])),
        )

    def to_json_line(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, separators=(",", ":"))
