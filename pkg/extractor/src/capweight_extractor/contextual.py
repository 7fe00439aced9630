"""Contextual embedding extraction from a pretrained transformer.

One forward pass per sentence, no gradients, single-threaded math so two
runs with the same checkpoint write byte-identical stores. Each sub-word
piece of each word becomes one store record keyed by
(transcript, sentence, token, subword); downstream consumers average the
pieces back into word vectors.
"""

from __future__ import annotations

import logging
from pathlib import Path

import numpy as np

from capweight.corpus import Sentence
from capweight.embstore import EmbeddingStore, write_store

from .config import ExtractionConfig
from .errors import ExtractionError

log = logging.getLogger("capweight_extractor.contextual")


def load_transformer(model_id: str):
    """Tokenizer and encoder for a checkpoint; fatal with instructions."""
    import torch
    from transformers import AutoModel, AutoTokenizer

    try:
        tokenizer = AutoTokenizer.from_pretrained(model_id)
        model = AutoModel.from_pretrained(model_id)
    except Exception as exc:
        raise ExtractionError(
            f"could not load transformer checkpoint {model_id!r}: {exc}. "
            "Pass --model-id pointing at a local directory created with "
            "save_pretrained(), or fetch the published checkpoint on a "
            "machine with hub access and copy it here."
        ) from exc
    torch.set_num_threads(1)
    model.eval()
    return tokenizer, model


def _word_pieces(tokenizer, surface: str) -> list[str]:
    pieces = tokenizer.tokenize(surface)
    if not pieces:
        # whitespace or exotic codepoints can tokenize to nothing; every
        # token must still get a vector
        log.warning("surface %r produced no pieces, substituting %s",
                    surface, tokenizer.unk_token)
        pieces = [tokenizer.unk_token]
    return pieces


def _compose(hidden_states, composition: str):
    import torch

    layers = torch.stack(hidden_states[1:])  # drop the input embeddings
    if composition == "last_layer":
        return layers[-1]
    if composition == "mean_all_layers":
        return layers.mean(dim=0)
    if composition == "sum_last4":
        return layers[-4:].sum(dim=0)
    raise ValueError(f"unknown composition {composition!r}")


def sentence_records(tokenizer, model, sentence: Sentence, composition: str):
    """Records for one sentence: ((t, s, i, subword), vector) pairs."""
    import torch

    pieces_per_word = [_word_pieces(tokenizer, t.surface) for t in sentence.tokens]
    flat = [p for pieces in pieces_per_word for p in pieces]
    if not flat:
        log.warning("skipping empty sentence %s/%s",
                    sentence.transcript_id, sentence.sentence_idx)
        return []

    budget = model.config.max_position_embeddings - 2  # CLS and SEP
    if len(flat) > budget:
        log.warning(
            "sentence %s/%s has %d pieces, truncating to the model window (%d)",
            sentence.transcript_id, sentence.sentence_idx, len(flat), budget,
        )
        flat = flat[:budget]

    ids = (
        [tokenizer.cls_token_id]
        + tokenizer.convert_tokens_to_ids(flat)
        + [tokenizer.sep_token_id]
    )
    with torch.no_grad():
        out = model(input_ids=torch.tensor([ids]), output_hidden_states=True)
    composed = _compose(out.hidden_states, composition)[0]  # (seq, hidden)

    records = []
    cursor = 0
    for token, pieces in zip(sentence.tokens, pieces_per_word):
        for sub_idx in range(len(pieces)):
            if cursor >= len(flat):
                break  # truncated away
            vec = composed[1 + cursor].numpy().astype(np.float32)
            key = (token.transcript_id, token.sentence_idx, token.token_idx, sub_idx)
            records.append((key, vec))
            cursor += 1
    return records


def extract_contextual(
    corpus: list[Sentence], config: ExtractionConfig, out_path: str | Path
) -> Path:
    """Write a contextual store for the corpus; returns the path."""
    tokenizer, model = load_transformer(config.model_id)

    records = []
    for sentence in corpus:
        records.extend(sentence_records(tokenizer, model, sentence, config.composition))

    dim = model.config.hidden_size
    store = EmbeddingStore.build(dim, records)
    out_path = Path(out_path)
    write_store(
        out_path,
        store,
        manifest={
            "kind": "contextual",
            "model_id": config.model_id,
            "composition": config.composition,
            "seed": config.seed,
            "dim": dim,
        },
    )
    log.info("wrote %d contextual records (dim %d) to %s", len(store.records), dim, out_path)
    return out_path
