"""Independent reference implementations used to check the package.

Everything here is written naively on purpose: plain loops, stdlib math,
exact fractions. None of it imports package internals beyond the public
data types, so a bug in the package cannot hide in its own oracle.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np

RELEVANT = 3
CUTOFF = 5


def naive_precision_at_5(ranked, qrels):
    hits = 0
    for venue_id in ranked[:CUTOFF]:
        if qrels.get(venue_id, 0) >= RELEVANT:
            hits += 1
    return hits / 5.0


def naive_dcg_at_5(ratings):
    total = 0.0
    for i, rating in enumerate(ratings[:CUTOFF]):
        total += (2.0 ** rating - 1.0) / math.log2(i + 2)
    return total


def naive_ndcg_at_5(ranked, qrels):
    got = naive_dcg_at_5([qrels.get(v, 0) for v in ranked])
    ideal = naive_dcg_at_5(sorted(qrels.values(), reverse=True))
    if ideal == 0.0:
        return 0.0
    return got / ideal


def exhaustive_ideal_dcg(pool_ratings):
    """Best DCG over every ordering of the pool. Factorial, small pools only."""
    best = 0.0
    take = min(CUTOFF, len(pool_ratings))
    for perm in itertools.permutations(pool_ratings, take):
        best = max(best, naive_dcg_at_5(list(perm)))
    return best


def naive_reciprocal_rank(ranked, qrels):
    for i, venue_id in enumerate(ranked):
        if qrels.get(venue_id, 0) >= RELEVANT:
            return 1.0 / (i + 1)
    return 0.0


def recount_profile(history, collection, extract):
    """Recount item frequencies from scratch with exact rationals.

    Returns (positive, negative, denominator) where the maps hold Fractions.
    Ratings 3 and 4 count as positive, 2 as neutral, 0 and 1 as negative;
    neutral items are counted in the denominator only.
    """
    pos: dict[str, int] = {}
    neg: dict[str, int] = {}
    denominator = 0
    for venue_id, rating in history.rated_venues:
        items = extract(collection.venue(venue_id))
        denominator += len(items)
        for item in items:
            if rating >= 3:
                pos[item] = pos.get(item, 0) + 1
            elif rating <= 1:
                neg[item] = neg.get(item, 0) + 1
    pos_f = {k: Fraction(v, denominator) for k, v in pos.items()}
    neg_f = {k: Fraction(v, denominator) for k, v in neg.items()}
    return pos_f, neg_f, denominator


def recount_score(history, collection, extract, candidate_items):
    pos_f, neg_f, denominator = recount_profile(history, collection, extract)
    if denominator == 0:
        return 0.0
    total = Fraction(0)
    for item in candidate_items:
        total += pos_f.get(item, Fraction(0)) - neg_f.get(item, Fraction(0))
    return float(total)


def pg_squared_hinge(dense_samples, labels, C=1.0, max_iters=200_000, tol=1e-10):
    """Projected gradient on the dual of the squared-hinge SVM.

    The intercept is a regularized constant feature, so the dual is
    min_{a >= 0}  0.5 a'Qa + sum a_i^2 / (4C) - sum a_i
    with Q_ij = y_i y_j (x_i . x_j + 1). Returns (weights, bias).
    """
    x = np.asarray(dense_samples, dtype=np.float64)
    y = np.asarray(labels, dtype=np.float64)
    aug = np.hstack([x, np.ones((x.shape[0], 1))])
    q = (y[:, None] * aug) @ (y[:, None] * aug).T
    hess = q + np.eye(len(y)) / (2.0 * C)
    step = 1.0 / max(np.linalg.eigvalsh(hess).max(), 1e-12)
    alpha = np.zeros(len(y))
    for _ in range(max_iters):
        grad = hess @ alpha - 1.0
        projected = np.where(alpha > 0.0, grad, np.minimum(grad, 0.0))
        if np.abs(projected).max() <= tol:
            break
        alpha = np.maximum(alpha - step * grad, 0.0)
    theta = ((alpha * y)[:, None] * aug).sum(axis=0)
    return theta[:-1], float(theta[-1])


def naive_primal(weights, bias, dense_samples, labels, C=1.0):
    reg = 0.5 * (float(np.dot(weights, weights)) + bias * bias)
    loss = 0.0
    for row, y in zip(dense_samples, labels):
        margin = 1.0 - y * (float(np.dot(row, weights)) + bias)
        if margin > 0.0:
            loss += margin * margin
    return reg + C * loss


def enumerate_simplex(parts, steps=10):
    """All nonnegative integer compositions of `steps` into `parts` slots."""
    rows = []
    for combo in itertools.product(range(steps + 1), repeat=parts):
        if sum(combo) == steps:
            rows.append(tuple(c / steps for c in combo))
    return rows
