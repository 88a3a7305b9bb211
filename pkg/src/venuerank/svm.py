"""Linear max-margin classifier with squared-hinge loss.

Minimizes, over an augmented weight vector theta = (w, b):

    P(theta) = 1/2 * ||theta||^2 + C * sum_i max(0, 1 - y_i * (w.x_i + b))^2

The intercept is handled by appending a constant feature with value 1, so it
is regularized like every other coordinate (mirroring the common linear-SVM
library default). The solver is dual coordinate descent; samples are visited
in one fixed order: canonical sort by (label, feature bytes), then a single
shuffle drawn from the seed. The dual objective is exactly minimized along
each coordinate, so the recorded per-pass objective never increases.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .text import SparseVector

DEFAULT_C = 1.0
DEFAULT_TOL = 1e-4
DEFAULT_MAX_PASSES = 1000


@dataclass
class SolverResult:
    weights: np.ndarray  # length V, excludes the intercept coordinate
    bias: float
    objective_history: list[float]  # dual objective after each pass
    n_passes: int
    converged: bool


def _augment(x: SparseVector, n_features: int) -> SparseVector:
    idx = np.append(x.indices, np.int32(n_features)).astype(np.int32)
    val = np.append(x.values, 1.0)
    return SparseVector(idx, val)


def _canonical_order(samples: list[SparseVector], labels: np.ndarray) -> list[int]:
    return sorted(range(len(samples)), key=lambda i: (labels[i], samples[i].key()))


def primal_objective(
    weights: np.ndarray,
    bias: float,
    samples: list[SparseVector],
    labels: np.ndarray,
    C: float = DEFAULT_C,
) -> float:
    """P(theta) for the objective above (intercept included in the norm)."""
    reg = 0.5 * (float(np.dot(weights, weights)) + bias * bias)
    loss = 0.0
    for x, y in zip(samples, labels):
        margin = 1.0 - y * (x.dot_dense(weights) + bias)
        if margin > 0.0:
            loss += margin * margin
    return reg + C * loss


def train_squared_hinge(
    samples: list[SparseVector],
    labels: np.ndarray,
    n_features: int,
    C: float = DEFAULT_C,
    tol: float = DEFAULT_TOL,
    max_passes: int = DEFAULT_MAX_PASSES,
    seed: int = 0,
) -> SolverResult:
    """Fit the classifier by dual coordinate descent.

    labels must be +1/-1. Converges when the largest projected dual gradient
    over a pass is at most `tol`, or after `max_passes` passes.
    """
    labels = np.asarray(labels, dtype=np.float64)
    if len(samples) != labels.size:
        raise ValueError("samples and labels length mismatch")
    if not np.all(np.isin(labels, (-1.0, 1.0))):
        raise ValueError("labels must be +1 or -1")
    for x in samples:
        if not np.all(np.isfinite(x.values)):
            raise ValueError("non-finite feature value in training sample")

    order = _canonical_order(samples, labels)
    rng = np.random.default_rng(seed)
    rng.shuffle(order)

    aug = [_augment(x, n_features) for x in samples]
    # Diagonal of the dual Hessian: ||x_i||^2 + 1/(2C).
    diag = np.array([np.dot(x.values, x.values) for x in aug]) + 1.0 / (2.0 * C)

    n = len(samples)
    alpha = np.zeros(n)
    theta = np.zeros(n_features + 1)
    history: list[float] = []
    converged = False
    n_passes = 0

    for _ in range(max_passes):
        n_passes += 1
        max_pg = 0.0
        for i in order:
            x = aug[i]
            y = labels[i]
            grad = y * x.dot_dense(theta) - 1.0 + alpha[i] / (2.0 * C)
            pg = grad if alpha[i] > 0.0 else min(grad, 0.0)
            if abs(pg) > max_pg:
                max_pg = abs(pg)
            if pg == 0.0:
                continue
            new_alpha = max(alpha[i] - grad / diag[i], 0.0)
            delta = new_alpha - alpha[i]
            if delta != 0.0:
                alpha[i] = new_alpha
                x.add_into(theta, scale=delta * y)
        history.append(_dual_objective(theta, alpha, C))
        if max_pg <= tol:
            converged = True
            break

    return SolverResult(
        weights=theta[:n_features].copy(),
        bias=float(theta[n_features]),
        objective_history=history,
        n_passes=n_passes,
        converged=converged,
    )


def _dual_objective(theta: np.ndarray, alpha: np.ndarray, C: float) -> float:
    return (
        0.5 * float(np.dot(theta, theta))
        + float(np.dot(alpha, alpha)) / (4.0 * C)
        - float(alpha.sum())
    )
