"""Annotated transcript data model, importance discretization, and dataset splitting.

A corpus is an ordered list of sentences, each holding tokens with an
optional human importance score in [0, 1]. Corpus files are UTF-8 JSON
lines with keys ``t`` (transcript id), ``s`` (sentence index), ``i``
(token index within the sentence), ``w`` (surface form), and optional
``imp`` (importance score). Lines are ordered by (t, s, i); blank lines
are forbidden.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

from .errors import CorpusError

NUM_CLASSES = 6

# Left-closed importance bins; the last bin also includes 1.0.
CLASS_LOWER_BOUNDS = (0.0, 0.1, 0.3, 0.5, 0.7, 0.9)

# Canonical scalar weight for each class: the midpoint of its bin.
CLASS_MIDPOINTS = {1: 0.05, 2: 0.2, 3: 0.4, 4: 0.6, 5: 0.8, 6: 0.95}

TokenKey = tuple[str, int, int]


@dataclass(frozen=True)
class Token:
    """One transcript word. ``importance`` is None for unannotated tokens."""

    transcript_id: str
    sentence_idx: int
    token_idx: int
    surface: str
    importance: float | None = None

    @property
    def key(self) -> TokenKey:
        return (self.transcript_id, self.sentence_idx, self.token_idx)


@dataclass(frozen=True)
class Sentence:
    """A contiguous run of tokens sharing (transcript_id, sentence_idx)."""

    transcript_id: str
    sentence_idx: int
    tokens: tuple[Token, ...]


@dataclass(frozen=True)
class SplitAssignment:
    """Disjoint train/dev/test sets of global token indices (corpus order)."""

    train: frozenset[int]
    dev: frozenset[int]
    test: frozenset[int]
    seed: int


def discretize(score: float) -> int:
    """Map an importance score in [0, 1] to its class label in 1..6.

    Bins are left-closed: [0, 0.1) -> 1, [0.1, 0.3) -> 2, [0.3, 0.5) -> 3,
    [0.5, 0.7) -> 4, [0.7, 0.9) -> 5, [0.9, 1.0] -> 6.
    """
    if not 0.0 <= score <= 1.0:
        raise ValueError(f"importance score must lie in [0, 1], got {score!r}")
    label = 1
    for bound in CLASS_LOWER_BOUNDS[1:]:
        if score < bound:
            break
        label += 1
    return label


def _parse_line(line: str, lineno: int) -> Token:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise CorpusError(f"line {lineno}: invalid JSON: {exc.msg}") from exc
    if not isinstance(obj, dict):
        raise CorpusError(f"line {lineno}: expected a JSON object")

    def field(name, kind):
        if name not in obj:
            raise CorpusError(f"line {lineno}: missing key {name!r}")
        value = obj[name]
        if not isinstance(value, kind) or isinstance(value, bool):
            raise CorpusError(f"line {lineno}: key {name!r} has wrong type")
        return value

    tid = field("t", str)
    sidx = field("s", int)
    tidx = field("i", int)
    surface = field("w", str)
    if sidx < 0 or tidx < 0:
        raise CorpusError(f"line {lineno}: negative sentence or token index")

    importance = None
    if "imp" in obj and obj["imp"] is not None:
        imp = obj["imp"]
        if isinstance(imp, bool) or not isinstance(imp, (int, float)):
            raise CorpusError(f"line {lineno}: key 'imp' has wrong type")
        importance = float(imp)
        if not 0.0 <= importance <= 1.0:
            raise CorpusError(
                f"line {lineno}: importance {importance} outside [0, 1]"
            )
    return Token(tid, sidx, tidx, surface, importance)


def load_corpus(path: str | Path) -> list[Sentence]:
    """Read a corpus file into sentences, validating order and contiguity."""
    sentences: list[Sentence] = []
    seen: set[tuple[str, int]] = set()
    current: list[Token] = []

    def close_sentence():
        if current:
            sent = Sentence(current[0].transcript_id, current[0].sentence_idx, tuple(current))
            sentences.append(sent)
            current.clear()

    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                raise CorpusError(f"line {lineno}: blank lines are forbidden")
            token = _parse_line(line, lineno)
            group = (token.transcript_id, token.sentence_idx)
            if current and group == (current[0].transcript_id, current[0].sentence_idx):
                if token.token_idx != len(current):
                    raise CorpusError(
                        f"line {lineno}: token index {token.token_idx} breaks "
                        f"contiguity (expected {len(current)})"
                    )
            else:
                close_sentence()
                if group in seen:
                    raise CorpusError(
                        f"line {lineno}: sentence {group!r} appears in more than one run"
                    )
                seen.add(group)
                if token.token_idx != 0:
                    raise CorpusError(
                        f"line {lineno}: sentence {group!r} does not start at token index 0"
                    )
            current.append(token)
    close_sentence()
    return sentences


def save_corpus(sentences: Iterable[Sentence], path: str | Path) -> None:
    """Write sentences in the JSON-lines corpus format (inverse of load_corpus)."""
    with open(path, "w", encoding="utf-8") as fh:
        for sent in sentences:
            for tok in sent.tokens:
                obj: dict = {
                    "t": tok.transcript_id,
                    "s": tok.sentence_idx,
                    "i": tok.token_idx,
                    "w": tok.surface,
                }
                if tok.importance is not None:
                    obj["imp"] = tok.importance
                fh.write(json.dumps(obj, sort_keys=True) + "\n")


def iter_tokens(sentences: Iterable[Sentence]) -> Iterator[Token]:
    """Tokens in corpus order."""
    for sent in sentences:
        yield from sent.tokens


def corpus_tokens(sentences: Iterable[Sentence]) -> list[Token]:
    return list(iter_tokens(sentences))


def split(corpus: list[Sentence], seed: int) -> SplitAssignment:
    """Partition the corpus into 80/10/10 train/dev/test by whole sentence.

    The sentence order is shuffled deterministically from ``seed``; shuffled
    sentences are then assigned greedily so that the train and dev token
    shares reach 80% and 90% cumulative. Every part receives at least one
    sentence. Token proportions therefore hold to within one sentence.
    """
    if len(corpus) < 3:
        raise ValueError("cannot split a corpus with fewer than 3 sentences")

    # Global token index ranges per sentence, in corpus order.
    ranges: list[range] = []
    start = 0
    for sent in corpus:
        ranges.append(range(start, start + len(sent.tokens)))
        start += len(sent.tokens)
    total = start
    if total == 0:
        raise ValueError("cannot split a corpus with no tokens")

    order = list(range(len(corpus)))
    random.Random(seed).shuffle(order)

    cum = 0
    cut_train = None
    cut_dev = None
    for pos, sent_i in enumerate(order):
        cum += len(ranges[sent_i])
        if cut_train is None and cum >= 0.8 * total:
            cut_train = pos
        elif cut_train is not None and cut_dev is None and cum >= 0.9 * total:
            cut_dev = pos
    # Guarantee non-empty dev and test even when single sentences overshoot.
    n = len(corpus)
    if cut_train is None or cut_train > n - 3:
        cut_train = n - 3
    if cut_dev is None or cut_dev > n - 2:
        cut_dev = n - 2
    if cut_dev <= cut_train:
        cut_dev = cut_train + 1

    def indices(positions: Iterable[int]) -> frozenset[int]:
        out: set[int] = set()
        for pos in positions:
            out.update(ranges[order[pos]])
        return frozenset(out)

    return SplitAssignment(
        train=indices(range(0, cut_train + 1)),
        dev=indices(range(cut_train + 1, cut_dev + 1)),
        test=indices(range(cut_dev + 1, n)),
        seed=seed,
    )
