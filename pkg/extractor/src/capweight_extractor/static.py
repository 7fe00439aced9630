"""Static word vectors: one small skip-gram model per transcript.

Words appearing fewer than ``min_count`` times within their transcript
get no vector. Training is plain skip-gram with negative sampling on a
seeded generator, so reruns are byte-identical. The store holds one
record per eligible token occurrence, all occurrences of a word sharing
the transcript's type vector.
"""

from __future__ import annotations

import hashlib
import logging
from pathlib import Path

import numpy as np

from capweight.corpus import Sentence
from capweight.embstore import EmbeddingStore, write_store

from .config import ExtractionConfig

log = logging.getLogger("capweight_extractor.static")


def _sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + np.exp(-min(x, 60.0)))
    return np.exp(max(x, -60.0)) / (1.0 + np.exp(max(x, -60.0)))


def _transcript_rng(seed: int, transcript_id: str) -> np.random.Generator:
    # stable per transcript regardless of corpus ordering
    digest = hashlib.sha256(transcript_id.encode("utf-8")).digest()
    tag = int.from_bytes(digest[:8], "big")
    return np.random.default_rng(np.random.SeedSequence((seed, tag)))


def train_type_vectors(
    sequences: list[list[int]],
    counts: np.ndarray,
    config: ExtractionConfig,
    rng: np.random.Generator,
) -> np.ndarray:
    """Skip-gram with negative sampling over index sequences."""
    vocab_size = len(counts)
    w_in = (rng.random((vocab_size, config.dim)) - 0.5) / config.dim
    w_out = np.zeros((vocab_size, config.dim))

    noise = counts.astype(np.float64) ** 0.75
    cumulative = np.cumsum(noise / noise.sum())

    total = config.epochs * sum(len(s) for s in sequences)
    floor = config.step * 1e-4
    done = 0
    for _ in range(config.epochs):
        for seq in sequences:
            for pos, center in enumerate(seq):
                alpha = max(config.step * (1.0 - done / total), floor)
                done += 1
                reach = int(rng.integers(1, config.window + 1))
                lo = max(0, pos - reach)
                hi = min(len(seq), pos + reach + 1)
                for ctx_pos in range(lo, hi):
                    if ctx_pos == pos:
                        continue
                    ctx = seq[ctx_pos]
                    center_vec = w_in[center]
                    center_grad = np.zeros(config.dim)
                    draws = np.searchsorted(cumulative, rng.random(config.negatives))
                    for target, label in [(ctx, 1.0)] + [
                        (int(d), 0.0) for d in draws if int(d) != ctx
                    ]:
                        score = _sigmoid(float(center_vec @ w_out[target]))
                        g = alpha * (label - score)
                        center_grad += g * w_out[target]
                        w_out[target] += g * center_vec
                    w_in[center] += center_grad
    return w_in


def extract_static(
    corpus: list[Sentence], config: ExtractionConfig, out_path: str | Path
) -> Path:
    """Write a static store for the corpus; returns the path."""
    by_transcript: dict[str, list[Sentence]] = {}
    for sentence in corpus:
        by_transcript.setdefault(sentence.transcript_id, []).append(sentence)

    records = []
    for tid, sentences in by_transcript.items():
        counts: dict[str, int] = {}
        for sentence in sentences:
            for token in sentence.tokens:
                word = token.surface.lower()
                counts[word] = counts.get(word, 0) + 1
        # first-appearance order keeps index assignment deterministic
        vocab = [w for w in counts if counts[w] >= config.min_count]
        if len(vocab) < 2:
            log.warning(
                "transcript %r has %d eligible word type(s), below the 2 "
                "needed to train; emitting no records for it",
                tid, len(vocab),
            )
            continue
        index = {w: i for i, w in enumerate(vocab)}
        count_arr = np.array([counts[w] for w in vocab], dtype=np.float64)

        sequences = []
        for sentence in sentences:
            seq = [index[t.surface.lower()] for t in sentence.tokens
                   if t.surface.lower() in index]
            if seq:
                sequences.append(seq)

        rng = _transcript_rng(config.seed, tid)
        vectors = train_type_vectors(sequences, count_arr, config, rng)

        for sentence in sentences:
            for token in sentence.tokens:
                word_idx = index.get(token.surface.lower())
                if word_idx is None:
                    continue
                key = (tid, sentence.sentence_idx, token.token_idx, 0)
                records.append((key, vectors[word_idx].astype(np.float32)))

    store = EmbeddingStore.build(config.dim, records)
    out_path = Path(out_path)
    write_store(
        out_path,
        store,
        manifest={
            "kind": "static",
            "dim": config.dim,
            "min_count": config.min_count,
            "seed": config.seed,
            "window": config.window,
            "negatives": config.negatives,
            "epochs": config.epochs,
            "step": config.step,
        },
    )
    log.info("wrote %d static records (dim %d) to %s", len(store.records), config.dim, out_path)
    return out_path
