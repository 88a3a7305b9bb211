"""Shared fixtures: a hand-built six-venue collection and a small synthetic one."""

from __future__ import annotations

import pytest

from venuerank import (
    Collection,
    RankingRequest,
    Review,
    SyntheticSpec,
    UserHistory,
    Venue,
    generate_synthetic,
)

CITY = "springfield"


def make_review(venue_id, text, rating, ts=0, author="a1", count=1):
    return Review(
        venue_id=venue_id,
        author_id=author,
        text=text,
        rating=rating,
        timestamp=ts,
        author_review_count=count,
    )


def make_venue(vid, yelp=(), four=(), kw=(), reviews=(), city=CITY):
    return Venue(
        id=vid,
        city=city,
        categories_yelp=frozenset(yelp),
        categories_foursquare=frozenset(four),
        keywords=frozenset(kw),
        reviews=tuple(reviews),
    )


def build_tiny_collection():
    venues = [
        make_venue(
            "v1",
            yelp=("italian",),
            four=("restaurant",),
            kw=("cozy", "pasta"),
            reviews=(
                make_review("v1", "great cozy pasta place", 5, ts=100, author="r1", count=3),
                make_review("v1", "awful noisy room", 1, ts=200, author="r2", count=9),
            ),
        ),
        make_venue(
            "v2",
            yelp=("bars",),
            four=("pub",),
            kw=("noisy", "burger"),
            reviews=(
                make_review("v2", "terrible noisy burger", 2, ts=150, author="r3", count=2),
                make_review("v2", "lovely quiet evening", 5, ts=50, author="r4", count=40),
            ),
        ),
        make_venue(
            "v3",
            yelp=("italian", "wine"),
            four=("restaurant",),
            kw=("pasta", "wine"),
            reviews=(make_review("v3", "great wine pasta", 4, ts=300, author="r5", count=7),),
        ),
        make_venue("v4", yelp=("wine",), four=("bar",), kw=("cozy", "wine")),
        make_venue(
            "v5",
            yelp=("bars",),
            four=("pub",),
            kw=("burger",),
            reviews=(make_review("v5", "bland burger meh", 3, ts=400, author="r6", count=1),),
        ),
        make_venue(
            "v6",
            yelp=("cafe",),
            four=("teahouse",),
            kw=("quiet", "tea"),
            reviews=(make_review("v6", "calm quiet tea", 4, ts=500, author="r7", count=12),),
        ),
    ]
    users = [
        UserHistory("u1", (("v1", 4), ("v2", 0), ("v3", 3), ("v5", 2))),
        UserHistory("u2", (("v2", 4), ("v6", 1)), age_group="25-34", gender="f"),
        UserHistory("u3", (("v3", 4), ("v4", 4), ("v1", 0))),
    ]
    requests = [
        RankingRequest("u1", CITY, ("v4", "v5", "v6")),
        RankingRequest("u2", CITY, ("v1", "v3", "v4")),
        RankingRequest("u3", CITY, ("v2", "v5", "v6")),
    ]
    qrels = {
        ("u1", "v4"): 4,
        ("u1", "v5"): 1,
        ("u1", "v6"): 3,
        ("u2", "v1"): 2,
        ("u2", "v3"): 4,
        ("u2", "v4"): 0,
        ("u3", "v2"): 0,
        ("u3", "v5"): 2,
        ("u3", "v6"): 4,
    }
    return Collection(
        venues={v.id: v for v in venues},
        users={u.user_id: u for u in users},
        requests=requests,
        qrels=qrels,
    )


@pytest.fixture
def tiny_collection():
    return build_tiny_collection()


@pytest.fixture(scope="session")
def small_synth():
    spec = SyntheticSpec(
        n_users=8,
        n_venues=60,
        history_size=12,
        candidates_per_user=8,
        reviews_per_venue_range=(1, 3),
        seed=5,
    )
    return generate_synthetic(spec)
