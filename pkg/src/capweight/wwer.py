"""Importance-weighted word error rate.

A standard Levenshtein alignment charges every substitution, deletion,
and insertion the same. Here each reference word carries a weight (its
predicted importance), and so does each hypothesis word: substitutions
and deletions cost the reference word's weight, insertions cost the
hypothesis word's weight, matches cost nothing. The rate divides the
total incurred cost by the total reference weight.

All dynamic-programming arithmetic runs on exact rationals, so when
every weight is 1 the result equals the plain word error rate exactly,
not merely within rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .corpus import CLASS_MIDPOINTS, Sentence
from .embstore import EmbeddingStore, lookup_subwords
from .score import merge_subwords

MATCH = "match"
SUBSTITUTE = "substitute"
DELETE = "delete"
INSERT = "insert"

# Preference order when two edit paths cost the same.
_OP_RANK = {MATCH: 0, SUBSTITUTE: 1, DELETE: 2, INSERT: 3}


@dataclass(frozen=True)
class EditOp:
    op: str
    ref_index: int | None
    hyp_index: int | None


@dataclass(frozen=True)
class Alignment:
    ops: tuple[EditOp, ...]
    cost: Fraction


def _check_weights(words: Sequence[str], weights: Sequence[float], which: str) -> list[Fraction]:
    if len(words) != len(weights):
        raise ValueError(f"{which}: {len(words)} words but {len(weights)} weights")
    out = []
    for w in weights:
        f = Fraction(w)
        if f < 0:
            raise ValueError(f"{which}: negative weight {w}")
        out.append(f)
    return out


def _words_equal(a: str, b: str) -> bool:
    return a.casefold() == b.casefold()


def align(
    ref_words: Sequence[str],
    hyp_words: Sequence[str],
    ref_weights: Sequence[float],
    hyp_weights: Sequence[float],
) -> Alignment:
    """Minimum-cost edit path from hypothesis to reference.

    Ties between equal-cost paths break toward match, then substitute,
    then delete, then insert, applied cell by cell, which makes the
    returned op sequence deterministic.
    """
    rw = _check_weights(ref_words, ref_weights, "reference")
    hw = _check_weights(hyp_words, hyp_weights, "hypothesis")
    n, m = len(ref_words), len(hyp_words)

    zero = Fraction(0)
    # cost[i][j]: cheapest way to produce the first j hypothesis words
    # from the first i reference words. choice[i][j] remembers the op.
    cost = [[zero] * (m + 1) for _ in range(n + 1)]
    choice: list[list[str | None]] = [[None] * (m + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        cost[i][0] = cost[i - 1][0] + rw[i - 1]
        choice[i][0] = DELETE
    for j in range(1, m + 1):
        cost[0][j] = cost[0][j - 1] + hw[j - 1]
        choice[0][j] = INSERT
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            if _words_equal(ref_words[i - 1], hyp_words[j - 1]):
                diag_op = MATCH
                diag = cost[i - 1][j - 1]
            else:
                diag_op = SUBSTITUTE
                diag = cost[i - 1][j - 1] + rw[i - 1]
            candidates = [
                (diag, _OP_RANK[diag_op], diag_op),
                (cost[i - 1][j] + rw[i - 1], _OP_RANK[DELETE], DELETE),
                (cost[i][j - 1] + hw[j - 1], _OP_RANK[INSERT], INSERT),
            ]
            best = min(candidates)
            cost[i][j] = best[0]
            choice[i][j] = best[2]

    ops: list[EditOp] = []
    i, j = n, m
    while i > 0 or j > 0:
        op = choice[i][j]
        if op in (MATCH, SUBSTITUTE):
            ops.append(EditOp(op, i - 1, j - 1))
            i -= 1
            j -= 1
        elif op == DELETE:
            ops.append(EditOp(op, i - 1, None))
            i -= 1
        else:
            ops.append(EditOp(INSERT, None, j - 1))
            j -= 1
    ops.reverse()
    return Alignment(tuple(ops), cost[n][m])


@dataclass(frozen=True)
class WeightedScore:
    wwer: float
    plain_wer: float
    numerator: float
    denominator: float
    op_counts: dict[str, int]


def weighted_wer(
    ref_words: Sequence[str],
    hyp_words: Sequence[str],
    ref_weights: Sequence[float],
    hyp_weights: Sequence[float],
) -> WeightedScore:
    """Weighted and plain word error rates for one reference/hypothesis pair."""
    rw = _check_weights(ref_words, ref_weights, "reference")
    total = sum(rw, Fraction(0))
    if total <= 0:
        raise ValueError("total reference weight must be positive")
    weighted = align(ref_words, hyp_words, ref_weights, hyp_weights)
    unit = align(ref_words, hyp_words, [1] * len(ref_words), [1] * len(hyp_words))

    counts = {MATCH: 0, SUBSTITUTE: 0, DELETE: 0, INSERT: 0}
    for op in weighted.ops:
        counts[op.op] += 1
    return WeightedScore(
        wwer=float(weighted.cost / total),
        plain_wer=float(unit.cost / Fraction(len(ref_words))),
        numerator=float(weighted.cost),
        denominator=float(total),
        op_counts=counts,
    )


def class_weight(label: int) -> float:
    """Edit-cost weight for a predicted importance class."""
    if label not in CLASS_MIDPOINTS:
        raise ValueError(f"label must lie in 1..{len(CLASS_MIDPOINTS)}, got {label}")
    return CLASS_MIDPOINTS[label]


def sentence_weights(model, sentence: Sentence, store: EmbeddingStore) -> list[float]:
    """Predict a class per token and map it to its edit-cost weight."""
    weights = []
    for token in sentence.tokens:
        vectors = lookup_subwords(store, token)
        features = merge_subwords(vectors)
        label, _ = model.predict(features)
        weights.append(class_weight(label))
    return weights


def score_caption(
    model,
    ref_sentence: Sentence,
    ref_store: EmbeddingStore,
    hyp_sentence: Sentence,
    hyp_store: EmbeddingStore,
) -> WeightedScore:
    """Weighted WER between two sentences using model-predicted weights."""
    ref_words = [t.surface for t in ref_sentence.tokens]
    hyp_words = [t.surface for t in hyp_sentence.tokens]
    rw = sentence_weights(model, ref_sentence, ref_store)
    hw = sentence_weights(model, hyp_sentence, hyp_store)
    return weighted_wer(ref_words, hyp_words, rw, hw)
