"""Ranking quality metrics and the paired significance test.

Relevance convention: ratings are on the 0 to 4 user scale; the binary
metrics (precision, reciprocal rank) treat rating >= 3 as relevant, and
nDCG uses exponential gain 2^rating - 1. Venues missing from the judgment
map count as rating 0. The ideal DCG normalizes over the user's whole
judged pool, not just the retrieved prefix, and an all-zero pool yields
nDCG 0 by the 0/0 rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

RELEVANT_MIN_RATING = 3
CUTOFF = 5
SIGNIFICANCE_LEVEL = 0.05


def _gain(rating: int) -> float:
    return float(2 ** rating - 1) if rating > 0 else 0.0


def _discount(position: int) -> float:
    # position is 1-based
    return 1.0 / math.log2(position + 1)


def precision_at_5(ranked: Sequence[str], qrels: Mapping[str, int]) -> float:
    """Fraction of the top 5 with rating >= 3; short lists pad as non-relevant."""
    hits = sum(
        1 for venue_id in ranked[:CUTOFF] if qrels.get(venue_id, 0) >= RELEVANT_MIN_RATING
    )
    return hits / CUTOFF


def ndcg_at_5(ranked: Sequence[str], qrels: Mapping[str, int]) -> float:
    dcg = sum(
        _gain(qrels.get(venue_id, 0)) * _discount(i)
        for i, venue_id in enumerate(ranked[:CUTOFF], start=1)
    )
    ideal_gains = sorted((_gain(r) for r in qrels.values()), reverse=True)[:CUTOFF]
    ideal = sum(g * _discount(i) for i, g in enumerate(ideal_gains, start=1))
    if ideal == 0.0:
        return 0.0
    return dcg / ideal


def reciprocal_rank(ranked: Sequence[str], qrels: Mapping[str, int]) -> float:
    for i, venue_id in enumerate(ranked, start=1):
        if qrels.get(venue_id, 0) >= RELEVANT_MIN_RATING:
            return 1.0 / i
    return 0.0


def mrr(
    ranked_lists: Mapping[str, Sequence[str]],
    qrels_by_user: Mapping[str, Mapping[str, int]],
) -> float:
    """Mean reciprocal rank over users; a user with no relevant candidate adds 0."""
    if not ranked_lists:
        return 0.0
    total = sum(
        reciprocal_rank(ranked, qrels_by_user.get(user_id, {}))
        for user_id, ranked in ranked_lists.items()
    )
    return total / len(ranked_lists)


@dataclass(frozen=True)
class TTestResult:
    t: float
    p_value: float
    significant: bool  # p < 0.05


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz iteration)."""
    max_iterations = 300
    eps = 3e-14
    fpmin = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < fpmin:
        d = fpmin
    d = 1.0 / d
    h = d
    for m in range(1, max_iterations + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < fpmin:
            d = fpmin
        c = 1.0 + aa / c
        if abs(c) < fpmin:
            c = fpmin
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < fpmin:
            d = fpmin
        c = 1.0 + aa / c
        if abs(c) < fpmin:
            c = fpmin
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < eps:
            return h
    raise ArithmeticError("incomplete beta continued fraction did not converge")


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    if not (a > 0 and b > 0):
        raise ValueError("shape parameters must be positive")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log(1.0 - x)
    )
    front = math.exp(ln_front)
    # use the side of the symmetric identity where the fraction converges fast
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def student_t_two_tailed_p(t: float, df: int) -> float:
    if df < 1:
        raise ValueError("degrees of freedom must be >= 1")
    if math.isinf(t):
        return 0.0
    x = df / (df + t * t)
    return regularized_incomplete_beta(df / 2.0, 0.5, x)


def paired_ttest(sample_a: Sequence[float], sample_b: Sequence[float]) -> TTestResult:
    """Two-tailed paired t-test.

    Degenerate inputs keep the result total: identical samples give t=0,
    p=1; zero-variance differences with nonzero mean give p=0 with an
    infinite t of the matching sign.
    """
    if len(sample_a) != len(sample_b):
        raise ValueError("paired samples must have equal length")
    n = len(sample_a)
    if n < 2:
        raise ValueError("paired t-test needs at least 2 pairs")
    diffs = np.asarray(sample_a, dtype=np.float64) - np.asarray(sample_b, dtype=np.float64)
    mean = float(diffs.mean())
    sd = float(diffs.std(ddof=1))
    if sd == 0.0:
        if mean == 0.0:
            return TTestResult(t=0.0, p_value=1.0, significant=False)
        return TTestResult(t=math.copysign(math.inf, mean), p_value=0.0, significant=True)
    t = mean / (sd / math.sqrt(n))
    p = student_t_two_tailed_p(t, n - 1)
    return TTestResult(t=t, p_value=p, significant=p < SIGNIFICANCE_LEVEL)
