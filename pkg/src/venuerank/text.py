"""Tokenization and TF-IDF vectorization for review text.

The weighting variant is frozen here so that every classifier sees the same
feature space: raw term counts, smoothed idf ln((1+N)/(1+df)) + 1, and L2
document normalization. Out-of-vocabulary terms are dropped at transform
time; an empty document maps to the zero vector.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .stopwords import ENGLISH_STOPWORDS

# Runs of unicode letters/digits; underscore is a separator.
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)

_MIN_TOKEN_LEN = 2


def tokenize(text: str) -> list[str]:
    """Lowercase, split on non-alphanumeric runs, drop short tokens and stopwords."""
    tokens = _TOKEN_RE.findall(text.lower())
    return [
        t for t in tokens if len(t) >= _MIN_TOKEN_LEN and t not in ENGLISH_STOPWORDS
    ]


@dataclass(frozen=True)
class SparseVector:
    """Sparse feature vector with strictly increasing indices and finite weights."""

    indices: np.ndarray  # int32, strictly increasing
    values: np.ndarray  # float64

    def __post_init__(self) -> None:
        if self.indices.shape != self.values.shape:
            raise ValueError("indices and values must have equal length")
        if self.indices.size and np.any(np.diff(self.indices) <= 0):
            raise ValueError("indices must be strictly increasing")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("weights must be finite")

    @property
    def nnz(self) -> int:
        return int(self.indices.size)

    def norm(self) -> float:
        return float(np.sqrt(np.dot(self.values, self.values)))

    def dot_dense(self, dense: np.ndarray) -> float:
        if self.indices.size == 0:
            return 0.0
        return float(np.dot(dense[self.indices], self.values))

    def add_into(self, dense: np.ndarray, scale: float = 1.0) -> None:
        if self.indices.size:
            dense[self.indices] += scale * self.values

    def key(self) -> bytes:
        """Canonical byte key; used to order samples deterministically."""
        return self.indices.tobytes() + self.values.tobytes()


def sparse_from_pairs(pairs: dict[int, float]) -> SparseVector:
    if not pairs:
        return SparseVector(np.empty(0, dtype=np.int32), np.empty(0, dtype=np.float64))
    idx = np.fromiter(sorted(pairs), count=len(pairs), dtype=np.int32)
    val = np.array([pairs[int(i)] for i in idx], dtype=np.float64)
    return SparseVector(idx, val)


@dataclass(frozen=True)
class Vocabulary:
    """Term to dense-index map plus the document frequencies it was fitted on."""

    index: dict[str, int]  # dense 0..V-1
    document_frequency: dict[str, int]
    n_documents: int

    @property
    def size(self) -> int:
        return len(self.index)

    def idf(self, term: str) -> float:
        df = self.document_frequency.get(term, 0)
        return math.log((1.0 + self.n_documents) / (1.0 + df)) + 1.0

    def terms_by_index(self) -> list[str]:
        terms = [""] * len(self.index)
        for term, i in self.index.items():
            terms[i] = term
        return terms


def _count_terms(doc: list[str]) -> dict[str, int]:
    counts: dict[str, int] = {}
    for term in doc:
        counts[term] = counts.get(term, 0) + 1
    return counts


def fit_vocabulary(docs: list[list[str]]) -> Vocabulary:
    if not docs:
        raise ValueError("need at least one document to fit a vocabulary")
    df: dict[str, int] = {}
    for doc in docs:
        for term in set(doc):
            df[term] = df.get(term, 0) + 1
    # Sorted term order keeps indices stable across runs.
    index = {term: i for i, term in enumerate(sorted(df))}
    return Vocabulary(index=index, document_frequency=df, n_documents=len(docs))


def transform(vocabulary: Vocabulary, doc: list[str]) -> SparseVector:
    """TF-IDF vector of one document, L2-normalized; OOV terms contribute nothing."""
    weights: dict[int, float] = {}
    for term, tf in _count_terms(doc).items():
        col = vocabulary.index.get(term)
        if col is None:
            continue
        weights[col] = tf * vocabulary.idf(term)
    vec = sparse_from_pairs(weights)
    norm = vec.norm()
    if norm > 0.0:
        return SparseVector(vec.indices, vec.values / norm)
    return vec


def fit_tfidf(docs: list[list[str]]) -> tuple[Vocabulary, list[SparseVector]]:
    """Fit a vocabulary on `docs` and return their normalized TF-IDF vectors."""
    vocabulary = fit_vocabulary(docs)
    return vocabulary, [transform(vocabulary, doc) for doc in docs]
