"""Ranking model trainers and the final ranking function.

Four fusion models over the normalized per-query features:

- coordinate ascent: cyclic one-dimensional grid search on linear weights,
  restarted from seeded random points, maximizing mean train nDCG@5;
- pairwise neural: one hidden layer of 10 logistic units trained with a
  pairwise logistic loss over same-user label-discordant pairs;
- adarank: boosting over single-feature weak learners with query
  re-weighting, which also yields a linear scorer;
- linear interpolation: exhaustive convex grid search at step 0.1, used by
  the three-feature baseline.

All trainers are deterministic given their seed. Queries whose judged pool
has zero total gain carry no training signal and are skipped by the
internal evaluator (their nDCG is 0 for any ranking).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import MAX_RANKED_LIST
from .features import QueryFeatures

RANKER_KINDS = (
    "coordinate-ascent",
    "pairwise-neural",
    "adarank",
    "linear-interpolation",
)

_DISCOUNTS = 1.0 / np.log2(np.arange(2, 7, dtype=np.float64))  # positions 1..5


class NoRankingSignal(ValueError):
    """Raised when no query has two differently-labeled candidates."""


def _require_signal(queries: Sequence[QueryFeatures]) -> None:
    if not any(q.has_ranking_signal() for q in queries):
        raise NoRankingSignal("no ranking signal: need a query with differing labels")


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return np.exp(-np.logaddexp(0.0, -z))


class RankedQuerySet:
    """Labeled queries packed for fast nDCG@5 of linear scorers.

    Queries are grouped by candidate count so a whole batch of weight
    vectors can be scored with one einsum per group. Candidate ids inside a
    QueryFeatures are ascending, so a stable argsort on negated scores
    reproduces the tie rule used by rank().
    """

    def __init__(self, queries: Sequence[QueryFeatures]):
        if not queries:
            raise ValueError("empty query list")
        self.n_features = len(queries[0].feature_names)
        kept: list[tuple[QueryFeatures, np.ndarray, float]] = []
        for query in queries:
            if len(query.feature_names) != self.n_features:
                raise ValueError("inconsistent feature dimensions across queries")
            gains = np.exp2(np.maximum(query.labels, 0).astype(np.float64)) - 1.0
            depth = min(5, query.n_candidates)
            top = np.sort(gains)[::-1][:depth]
            ideal = float(top @ _DISCOUNTS[:depth])
            if ideal > 0.0:
                kept.append((query, gains, ideal))
        self.n_queries = len(kept)
        self.user_ids = tuple(q.user_id for q, _, _ in kept)

        self._groups: list[tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]] = []
        by_size: dict[int, list[int]] = {}
        for qi, (query, _, _) in enumerate(kept):
            by_size.setdefault(query.n_candidates, []).append(qi)
        for size in sorted(by_size):
            idx = np.array(by_size[size], dtype=np.int64)
            feats = np.stack([kept[i][0].values for i in idx])
            gains = np.stack([kept[i][1] for i in idx])
            ideals = np.array([kept[i][2] for i in idx])
            self._groups.append((idx, feats, gains, ideals))

    def ndcg_batch(self, weight_rows: np.ndarray) -> np.ndarray:
        """Per-query nDCG@5 for each weight row; shape (n_rows, n_queries)."""
        weight_rows = np.atleast_2d(np.asarray(weight_rows, dtype=np.float64))
        out = np.empty((weight_rows.shape[0], self.n_queries), dtype=np.float64)
        for idx, feats, gains, ideals in self._groups:
            scores = np.einsum("mnk,bk->bmn", feats, weight_rows)
            depth = min(5, scores.shape[2])
            top = np.argsort(-scores, axis=2, kind="stable")[:, :, :depth]
            gains_b = np.broadcast_to(gains, scores.shape)
            dcg = np.take_along_axis(gains_b, top, axis=2) @ _DISCOUNTS[:depth]
            out[:, idx] = dcg / ideals
        return out

    def mean_ndcg(self, weights: np.ndarray) -> float:
        return float(self.ndcg_batch(weights).mean(axis=1)[0])


@dataclass(frozen=True)
class NeuralNet:
    hidden_weights: np.ndarray  # (n_features, n_hidden)
    hidden_bias: np.ndarray  # (n_hidden,)
    output_weights: np.ndarray  # (n_hidden,)
    output_bias: float

    def forward(self, values: np.ndarray) -> np.ndarray:
        hidden = _sigmoid(values @ self.hidden_weights + self.hidden_bias)
        return hidden @ self.output_weights + self.output_bias


@dataclass(frozen=True)
class TrainedRanker:
    """Immutable scorer; score() is a pure function of (parameters, features)."""

    kind: str
    feature_names: tuple[str, ...]
    weights: np.ndarray | None = None
    net: NeuralNet | None = None

    def score(self, values: np.ndarray) -> np.ndarray:
        values = np.asarray(values, dtype=np.float64)
        if values.ndim != 2 or values.shape[1] != len(self.feature_names):
            raise ValueError(
                f"expected (n, {len(self.feature_names)}) feature matrix, got {values.shape}"
            )
        if self.net is not None:
            return self.net.forward(values)
        assert self.weights is not None
        return values @ self.weights


def rank(ranker: TrainedRanker, query: QueryFeatures) -> list[tuple[str, float]]:
    """Candidates by descending score, ties by ascending venue id, top 30."""
    if query.feature_names != ranker.feature_names:
        raise ValueError(
            f"ranker trained on {ranker.feature_names}, query has {query.feature_names}"
        )
    scores = ranker.score(query.values)
    order = np.argsort(-scores, kind="stable")[:MAX_RANKED_LIST]
    return [(query.venue_ids[i], float(scores[i])) for i in order]


def train_coordinate_ascent(
    queries: Sequence[QueryFeatures],
    seed: int = 0,
    n_restarts: int = 25,
    grid_size: int = 51,
    max_cycles: int = 50,
) -> TrainedRanker:
    """Cyclic per-coordinate grid search over additive steps in [-1, 1]."""
    _require_signal(queries)
    qs = RankedQuerySet(queries)
    k = qs.n_features
    deltas = np.linspace(-1.0, 1.0, grid_size)
    rng = np.random.default_rng(seed)

    best_weights: np.ndarray | None = None
    best_score = -np.inf
    for _ in range(n_restarts):
        weights = rng.uniform(-1.0, 1.0, k)
        score = qs.mean_ndcg(weights)
        for _cycle in range(max_cycles):
            improved = False
            for c in range(k):
                candidates = np.repeat(weights[None, :], grid_size, axis=0)
                candidates[:, c] = weights[c] + deltas
                means = qs.ndcg_batch(candidates).mean(axis=1)
                j = int(np.argmax(means))
                if means[j] > score + 1e-12:
                    weights = candidates[j]
                    score = float(means[j])
                    improved = True
            if not improved:
                break
        if score > best_score + 1e-12:
            best_score = score
            best_weights = weights.copy()
    assert best_weights is not None
    return TrainedRanker(
        kind="coordinate-ascent",
        feature_names=queries[0].feature_names,
        weights=best_weights,
    )


def _simplex_grid(n_parts: int, steps: int = 10) -> np.ndarray:
    """All weight rows with entries in {0, 0.1, ..., 1} summing to 1."""

    def rec(remaining: int, parts: int) -> list[list[int]]:
        if parts == 1:
            return [[remaining]]
        return [[h] + rest for h in range(remaining + 1) for rest in rec(remaining - h, parts - 1)]

    return np.array(rec(steps, n_parts), dtype=np.float64) / steps


def train_linear_interpolation(queries: Sequence[QueryFeatures]) -> TrainedRanker:
    """Exhaustive convex-combination search, step 0.1 (66 points for 3 features)."""
    _require_signal(queries)
    qs = RankedQuerySet(queries)
    grid = _simplex_grid(qs.n_features)
    means = qs.ndcg_batch(grid).mean(axis=1)
    best = int(np.argmax(means))
    return TrainedRanker(
        kind="linear-interpolation",
        feature_names=queries[0].feature_names,
        weights=grid[best],
    )


def train_adarank(
    queries: Sequence[QueryFeatures],
    n_rounds: int = 50,
) -> TrainedRanker:
    """Boosting over single-feature weak learners.

    Each round picks the feature with the best query-weighted nDCG@5, adds
    it with weight alpha_t = 0.5 ln(sum w(1+E) / sum w(1-E)), then
    re-weights queries proportionally to exp(-ensemble nDCG). Stops early
    when the same feature is chosen again without improving the ensemble.
    """
    _require_signal(queries)
    qs = RankedQuerySet(queries)
    k = qs.n_features
    single = qs.ndcg_batch(np.eye(k))  # (k, n_queries)
    q_weights = np.full(qs.n_queries, 1.0 / qs.n_queries)
    alpha = np.zeros(k)
    last_feature = -1
    prev_mean = -np.inf
    eps = 1e-10
    for _ in range(n_rounds):
        feature = int(np.argmax(single @ q_weights))
        e = single[feature]
        num = float(np.dot(q_weights, 1.0 + e))
        den = float(np.dot(q_weights, 1.0 - e))
        step = 0.5 * np.log((num + eps) / (den + eps))
        trial = alpha.copy()
        trial[feature] += step
        ensemble = qs.ndcg_batch(trial[None, :])[0]
        mean_now = float(ensemble.mean())
        if feature == last_feature and mean_now <= prev_mean + 1e-12:
            break
        alpha = trial
        prev_mean = mean_now
        last_feature = feature
        shifted = np.exp(-ensemble)
        q_weights = shifted / shifted.sum()
    return TrainedRanker(
        kind="adarank", feature_names=queries[0].feature_names, weights=alpha
    )


def pairwise_loss_and_grad(
    hidden_weights: np.ndarray,
    hidden_bias: np.ndarray,
    output_weights: np.ndarray,
    output_bias: float,
    features: np.ndarray,
    pair_hi: np.ndarray,
    pair_lo: np.ndarray,
) -> tuple[float, np.ndarray, np.ndarray, np.ndarray, float]:
    """Summed pairwise logistic loss and its exact gradient.

    pair_hi/pair_lo index rows of `features`; row pair_hi[p] is preferred
    over row pair_lo[p]. Loss per pair is softplus(s_lo - s_hi), so two
    equal outputs cost ln 2.
    """
    pre = features @ hidden_weights + hidden_bias
    hidden = _sigmoid(pre)
    scores = hidden @ output_weights + output_bias
    margins = scores[pair_hi] - scores[pair_lo]
    loss = float(np.logaddexp(0.0, -margins).sum())

    dmargin = -_sigmoid(-margins)
    dscores = np.zeros_like(scores)
    np.add.at(dscores, pair_hi, dmargin)
    np.add.at(dscores, pair_lo, -dmargin)

    d_output_weights = hidden.T @ dscores
    d_output_bias = float(dscores.sum())
    d_hidden = np.outer(dscores, output_weights)
    d_pre = d_hidden * hidden * (1.0 - hidden)
    d_hidden_weights = features.T @ d_pre
    d_hidden_bias = d_pre.sum(axis=0)
    return loss, d_hidden_weights, d_hidden_bias, d_output_weights, d_output_bias


def _discordant_pairs(queries: Sequence[QueryFeatures]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    rows = np.vstack([q.values for q in queries])
    pair_hi: list[int] = []
    pair_lo: list[int] = []
    offset = 0
    for query in queries:
        labels = query.labels
        judged = np.where(labels >= 0)[0]
        for a in judged:
            for b in judged:
                if labels[a] > labels[b]:
                    pair_hi.append(offset + int(a))
                    pair_lo.append(offset + int(b))
        offset += query.n_candidates
    return rows, np.array(pair_hi, dtype=np.int64), np.array(pair_lo, dtype=np.int64)


def train_pairwise_neural(
    queries: Sequence[QueryFeatures],
    seed: int = 0,
    learning_rate: float = 1e-3,
    epochs: int = 100,
    n_hidden: int = 10,
) -> TrainedRanker:
    """Full-batch gradient descent on the summed pairwise logistic loss."""
    _require_signal(queries)
    rows, pair_hi, pair_lo = _discordant_pairs(queries)
    k = rows.shape[1]
    rng = np.random.default_rng(seed)
    hidden_weights = rng.uniform(-0.1, 0.1, (k, n_hidden))
    hidden_bias = rng.uniform(-0.1, 0.1, n_hidden)
    output_weights = rng.uniform(-0.1, 0.1, n_hidden)
    output_bias = float(rng.uniform(-0.1, 0.1))

    for _ in range(epochs):
        _, d_hw, d_hb, d_ow, d_ob = pairwise_loss_and_grad(
            hidden_weights, hidden_bias, output_weights, output_bias,
            rows, pair_hi, pair_lo,
        )
        hidden_weights = hidden_weights - learning_rate * d_hw
        hidden_bias = hidden_bias - learning_rate * d_hb
        output_weights = output_weights - learning_rate * d_ow
        output_bias = output_bias - learning_rate * d_ob

    net = NeuralNet(
        hidden_weights=hidden_weights,
        hidden_bias=hidden_bias,
        output_weights=output_weights,
        output_bias=output_bias,
    )
    return TrainedRanker(
        kind="pairwise-neural", feature_names=queries[0].feature_names, net=net
    )


def train_ranker(
    kind: str,
    queries: Sequence[QueryFeatures],
    seed: int = 0,
) -> TrainedRanker:
    if kind == "coordinate-ascent":
        return train_coordinate_ascent(queries, seed=seed)
    if kind == "pairwise-neural":
        return train_pairwise_neural(queries, seed=seed)
    if kind == "adarank":
        return train_adarank(queries)
    if kind == "linear-interpolation":
        return train_linear_interpolation(queries)
    raise ValueError(f"unknown ranker kind {kind!r}; expected one of {RANKER_KINDS}")
