"""Per-token semantic scores from embedding vectors, plus a TF-IDF baseline.

The embedding pipeline is: average a token's sub-word vectors into one
vector, mean-pool the components into a raw scalar, then min-max
normalize raw scalars within each sentence to [0, 1]. The TF-IDF scorer
replaces the embedding steps with term-frequency counts per transcript
and a smoothed inverse document frequency, normalized the same way.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .corpus import Sentence, TokenKey
from .embstore import EmbeddingStore, lookup_subwords
from .errors import EmbeddingLookupError

# Output for sentences where every raw score is identical (including
# singletons): the midpoint, asserting neither extreme.
DEGENERATE_SCORE = 0.5


@dataclass(frozen=True)
class SemanticScore:
    """Raw mean-pooled value and its within-sentence normalized value."""

    raw: float
    normalized: float


@dataclass(frozen=True)
class ScoredCorpus:
    """Scores per token key, plus the keys that had no stored embedding."""

    scores: dict[TokenKey, SemanticScore]
    missing: tuple[TokenKey, ...]


def merge_subwords(vectors: Sequence[np.ndarray]) -> np.ndarray:
    """Component-wise arithmetic mean of same-dimension vectors."""
    if len(vectors) == 0:
        raise ValueError("cannot merge an empty list of vectors")
    arrays = [np.asarray(v, dtype=np.float64) for v in vectors]
    dim = arrays[0].shape
    for arr in arrays[1:]:
        if arr.shape != dim:
            raise ValueError(f"dimension mismatch: {arr.shape} vs {dim}")
    return np.mean(arrays, axis=0)


def mean_pool(vector: np.ndarray) -> float:
    """Arithmetic mean of a vector's components."""
    arr = np.asarray(vector, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("expected a non-empty 1-D vector")
    if not np.all(np.isfinite(arr)):
        raise ValueError("vector has non-finite components")
    return float(arr.mean())


def normalize_sentence(raw_scores: Sequence[float]) -> list[float]:
    """Min-max scale raw scores to [0, 1] within one sentence.

    When all inputs are equal (including single-token sentences) every
    output is DEGENERATE_SCORE.
    """
    if len(raw_scores) == 0:
        raise ValueError("cannot normalize an empty sentence")
    values = [float(v) for v in raw_scores]
    if not all(math.isfinite(v) for v in values):
        raise ValueError("raw scores must be finite")
    lo = min(values)
    hi = max(values)
    if hi == lo:
        return [DEGENERATE_SCORE] * len(values)
    span = hi - lo
    return [(v - lo) / span for v in values]


def score_corpus(
    corpus: Iterable[Sentence],
    store: EmbeddingStore,
    *,
    missing: float | str = "error",
) -> ScoredCorpus:
    """Score every corpus token: merge sub-words, mean-pool, normalize per sentence.

    ``missing`` controls tokens absent from the store: "error" raises
    (the default); "skip" leaves them out, normalizing over the tokens
    the sentence does have; a number is used as the absent token's raw
    score. Skipped or substituted keys are reported in ``missing``.
    """
    if isinstance(missing, str) and missing not in ("error", "skip"):
        raise ValueError(f'missing policy must be "error", "skip", or a number, got {missing!r}')
    scores: dict[TokenKey, SemanticScore] = {}
    absent: list[TokenKey] = []
    for sentence in corpus:
        scored_tokens = []
        raws: list[float] = []
        for token in sentence.tokens:
            try:
                vectors = lookup_subwords(store, token)
            except EmbeddingLookupError:
                if missing == "error":
                    raise
                absent.append(token.key)
                if missing == "skip":
                    continue
                raws.append(float(missing))
            else:
                raws.append(mean_pool(merge_subwords(vectors)))
            scored_tokens.append(token)
        if not raws:
            continue
        for token, raw, norm in zip(scored_tokens, raws, normalize_sentence(raws)):
            scores[token.key] = SemanticScore(raw=raw, normalized=norm)
    return ScoredCorpus(scores=scores, missing=tuple(absent))


def tfidf_scores(corpus: list[Sentence]) -> dict[TokenKey, float]:
    """TF-IDF of each token's lowercased surface, normalized per sentence.

    The document unit is the transcript: tf is the surface's raw count
    within its transcript and idf = ln((1 + N) / (1 + df)) + 1 over the
    N transcripts. Raw tf-idf values are then min-max scaled within each
    sentence exactly like embedding scores.
    """
    if not corpus:
        raise ValueError("corpus is empty")

    tf: dict[str, Counter] = {}
    for sentence in corpus:
        counts = tf.setdefault(sentence.transcript_id, Counter())
        for token in sentence.tokens:
            counts[token.surface.lower()] += 1

    n_docs = len(tf)
    df: Counter = Counter()
    for counts in tf.values():
        df.update(counts.keys())

    def idf(word: str) -> float:
        return math.log((1 + n_docs) / (1 + df[word])) + 1.0

    out: dict[TokenKey, float] = {}
    for sentence in corpus:
        counts = tf[sentence.transcript_id]
        raws = [
            counts[token.surface.lower()] * idf(token.surface.lower())
            for token in sentence.tokens
        ]
        if not raws:
            continue
        for token, norm in zip(sentence.tokens, normalize_sentence(raws)):
            out[token.key] = norm
    return out
