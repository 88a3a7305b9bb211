"""Cross-validation harness, baselines, and the two ablation sweep axes."""

import dataclasses

import numpy as np
import pytest

from venuerank import (
    MetricReport,
    SweepConfig,
    cross_validate,
    make_folds,
    ndcg_at_5,
    precision_at_5,
    random_baseline,
    reciprocal_rank,
    sweep_reviews,
)
from venuerank.evaluate import (
    evaluate_ranked_lists,
    restricted_keyword_table,
    with_filtered_reviews,
    with_truncated_keywords,
)
from venuerank.features import VARIANTS, compute_score_tables
from venuerank.profiles import ItemSource, build_profile, frequency_score, restrict_profile
from tests.conftest import make_review, make_venue


def test_make_folds_partitions_users():
    ids = [f"u{i}" for i in range(8)]
    folds = make_folds(ids, n_folds=5, seed=0)
    assert len(folds) == 5
    flat = [u for fold in folds for u in fold]
    assert sorted(flat) == sorted(ids)
    assert sorted(len(f) for f in folds) == [1, 1, 2, 2, 2]


def test_make_folds_deterministic_and_seed_sensitive():
    ids = [f"u{i}" for i in range(10)]
    assert make_folds(ids, seed=1) == make_folds(ids, seed=1)
    assert make_folds(ids, seed=1) != make_folds(ids, seed=2)
    # input order must not matter: ids are sorted before the shuffle
    assert make_folds(list(reversed(ids)), seed=1) == make_folds(ids, seed=1)


def test_make_folds_rejects_too_few_users():
    with pytest.raises(ValueError):
        make_folds(["u1", "u2"], n_folds=5)


def test_evaluate_ranked_lists_matches_direct_metrics(tiny_collection):
    ranked = {
        "u1": ["v4", "v6", "v5"],
        "u2": ["v1", "v3", "v4"],
        "u3": ["v6", "v5", "v2"],
    }
    report = evaluate_ranked_lists(ranked, tiny_collection, tag="demo", fold_id=2)
    assert report.tag == "demo"
    assert report.fold_id == 2
    for user_id, listing in ranked.items():
        qrels = tiny_collection.qrels_for_user(user_id)
        assert report.precision_at_5[user_id] == precision_at_5(listing, qrels)
        assert report.ndcg_at_5[user_id] == ndcg_at_5(listing, qrels)
        assert report.reciprocal_rank[user_id] == reciprocal_rank(listing, qrels)
    assert report.mean_ndcg_at_5 == pytest.approx(
        np.mean([report.ndcg_at_5[u] for u in ranked])
    )


def test_metric_report_rejects_mismatched_keys():
    with pytest.raises(ValueError):
        MetricReport(
            tag="x",
            fold_id=None,
            precision_at_5={"u1": 0.2},
            ndcg_at_5={"u2": 0.3},
            reciprocal_rank={"u1": 1.0},
        )


def test_cross_validate_small_collection(small_synth):
    outcomes = cross_validate(
        small_synth, [VARIANTS["LTR-C"]], "coordinate-ascent",
        seed=0, hyper_seeds=(0, 1),
    )
    outcome = outcomes["LTR-C"]
    assert len(outcome.fold_reports) == 5
    assert len(outcome.chosen_seeds) == 5
    assert set(outcome.chosen_seeds) <= {0, 1}
    all_users = {r.user_id for r in small_synth.requests}
    assert set(outcome.pooled.user_ids) == all_users
    for user_id, ranked in outcome.ranked_lists.items():
        candidates = set(small_synth.request_for_user(user_id).candidates)
        assert {v for v, _ in ranked} <= candidates
        scores = [s for _, s in ranked]
        assert scores == sorted(scores, reverse=True)
    # fold-level user sets partition the pooled set
    fold_users = [set(r.user_ids) for r in outcome.fold_reports]
    assert set().union(*fold_users) == all_users
    assert sum(len(f) for f in fold_users) == len(all_users)


def test_cross_validate_shares_tables_across_variants(small_synth):
    tables = compute_score_tables(small_synth, ("s_cat_yelp", "s_cat_foursquare"))
    a = cross_validate(
        small_synth, [VARIANTS["LTR-C"]], "linear-interpolation", seed=0, tables=tables
    )
    b = cross_validate(
        small_synth, [VARIANTS["LTR-C"]], "linear-interpolation", seed=0
    )
    assert a["LTR-C"].pooled.mean_ndcg_at_5 == b["LTR-C"].pooled.mean_ndcg_at_5


def test_random_baseline_deterministic(small_synth):
    a = random_baseline(small_synth, n_repeats=5, seed=9)
    b = random_baseline(small_synth, n_repeats=5, seed=9)
    assert a.ndcg_at_5 == b.ndcg_at_5
    c = random_baseline(small_synth, n_repeats=5, seed=10)
    assert a.ndcg_at_5 != c.ndcg_at_5
    assert all(0.0 <= v <= 1.0 for v in a.ndcg_at_5.values())


def review_fixture_venue():
    return make_venue(
        "w1",
        reviews=[
            make_review("w1", "oldest slow", 3, ts=10, author="rb", count=50),
            make_review("w1", "newest quick", 4, ts=400, author="ra", count=5),
            make_review("w1", "middle calm", 2, ts=200, author="rc", count=200),
            make_review("w1", "tied stamp", 5, ts=400, author="rz", count=7),
        ],
    )


def make_single_venue_collection():
    from venuerank import Collection

    venue = review_fixture_venue()
    return Collection(venues={venue.id: venue}, users={}, requests=[], qrels={})


def test_filter_reviews_recent():
    coll = with_filtered_reviews(make_single_venue_collection(), "recent", 2)
    texts = [r.text for r in coll.venues["w1"].reviews]
    # both ts=400 reviews survive; the author id breaks the tie first
    assert sorted(texts) == ["newest quick", "tied stamp"]


def test_filter_reviews_active():
    coll = with_filtered_reviews(make_single_venue_collection(), "active", 2)
    counts = [r.author_review_count for r in coll.venues["w1"].reviews]
    assert sorted(counts) == [50, 200]


def test_filter_reviews_random_keeps_original_order():
    rng = np.random.default_rng(3)
    coll = with_filtered_reviews(make_single_venue_collection(), "random", 3, rng=rng)
    kept = [r.text for r in coll.venues["w1"].reviews]
    original = [r.text for r in review_fixture_venue().reviews]
    assert len(kept) == 3
    positions = [original.index(t) for t in kept]
    assert positions == sorted(positions)


def test_filter_reviews_clamps_at_length():
    base = make_single_venue_collection()
    coll = with_filtered_reviews(base, "recent", 99)
    assert coll.venues["w1"].reviews == base.venues["w1"].reviews
    zero = with_filtered_reviews(base, "recent", 0)
    assert zero.venues["w1"].reviews == ()


def test_filter_reviews_unknown_criterion():
    with pytest.raises(ValueError):
        with_filtered_reviews(make_single_venue_collection(), "loudest", 2)


def test_truncate_keywords_subset(small_synth):
    rng = np.random.default_rng(0)
    trimmed = with_truncated_keywords(small_synth, 3, rng)
    for venue_id, venue in trimmed.venues.items():
        original = small_synth.venues[venue_id]
        assert len(venue.keywords) == min(3, len(original.keywords))
        assert venue.keywords <= original.keywords
        assert venue.reviews == original.reviews


def test_restricted_keyword_table_matches_manual(tiny_collection):
    table = restricted_keyword_table(tiny_collection, 2, "popular")
    for request in tiny_collection.requests:
        profile = build_profile(
            tiny_collection.users[request.user_id], tiny_collection, ItemSource.KEYWORDS
        )
        restricted = restrict_profile(profile, 2, "popular")
        for venue_id in request.candidates:
            items = ItemSource.KEYWORDS.extract(tiny_collection.venues[venue_id])
            assert table[(request.user_id, venue_id)] == frequency_score(
                restricted, items
            )


def test_sweep_config_validation():
    SweepConfig(axis="reviews", criterion="recent", k_values=(0, 2))
    with pytest.raises(ValueError):
        SweepConfig(axis="reviews", criterion="user-popular", k_values=(1,))
    with pytest.raises(ValueError):
        SweepConfig(axis="keywords", criterion="recent", k_values=(1,))
    with pytest.raises(ValueError):
        SweepConfig(axis="reviews", criterion="recent", k_values=())
    with pytest.raises(ValueError):
        SweepConfig(axis="reviews", criterion="recent", k_values=(4, 2))
    with pytest.raises(ValueError):
        SweepConfig(axis="reviews", criterion="recent", k_values=(-1, 2))
    with pytest.raises(ValueError):
        SweepConfig(axis="keywords", criterion="venue-random", k_values=(25,))
    with pytest.raises(ValueError):
        SweepConfig(axis="sideways", criterion="recent", k_values=(1,))


def test_review_sweep_random_criterion_is_seeded_mean(small_synth):
    # the reported value at each k must equal the mean over repeats of
    # independently re-running the pipeline on the filtered collection
    config = SweepConfig(
        axis="reviews", criterion="random", k_values=(1,), n_random_repeats=2
    )
    result = sweep_reviews(small_synth, config, seed=0)
    assert len(result.points) == 1
    point = result.points[0]

    means = []
    for repeat in range(2):
        rng = np.random.default_rng([0, point.k, repeat])
        filtered = with_filtered_reviews(small_synth, "random", point.k, rng=rng)
        tables = compute_score_tables(filtered, ("s_rev", "s_key"), svm_seed=0)
        outcome = cross_validate(
            filtered, [VARIANTS["LTR-S"]], "coordinate-ascent",
            seed=0, hyper_seeds=(0,), tables=tables,
        )
        means.append(outcome["LTR-S"].pooled.mean_ndcg_at_5)
    assert point.mean_ndcg_at_5 == pytest.approx(float(np.mean(means)), abs=1e-12)


def test_review_sweep_clamped_k_equals_unrestricted(small_synth):
    max_reviews = max(len(v.reviews) for v in small_synth.venues.values())
    config = SweepConfig(axis="reviews", criterion="recent", k_values=(max_reviews,))
    result = sweep_reviews(small_synth, config, seed=0)
    outcome = cross_validate(
        small_synth, [VARIANTS["LTR-S"]], "coordinate-ascent", seed=0, hyper_seeds=(0,)
    )
    assert result.points[0].mean_ndcg_at_5 == pytest.approx(
        outcome["LTR-S"].pooled.mean_ndcg_at_5, abs=1e-12
    )
