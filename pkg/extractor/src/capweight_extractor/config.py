"""Extraction settings shared by the library and the CLI."""

from __future__ import annotations

from dataclasses import dataclass

COMPOSITIONS = ("last_layer", "mean_all_layers", "sum_last4")


@dataclass(frozen=True)
class ExtractionConfig:
    """How to turn transcripts into embedding stores.

    ``model_id`` names a transformer checkpoint (hub id or a local
    directory saved with ``save_pretrained``). ``composition`` picks how
    per-layer hidden states collapse into one vector per sub-word. The
    remaining fields drive the static skip-gram trainer, which fits one
    small word2vec-style model per transcript.
    """

    model_id: str = "bert-base-uncased"
    composition: str = "mean_all_layers"
    seed: int = 42
    dim: int = 100          # static vector length
    min_count: int = 2      # static eligibility, counted within one transcript
    window: int = 5
    negatives: int = 5
    epochs: int = 5
    step: float = 0.025

    def __post_init__(self):
        if self.composition not in COMPOSITIONS:
            raise ValueError(
                f"composition must be one of {COMPOSITIONS}, got {self.composition!r}"
            )
        if self.dim <= 0:
            raise ValueError(f"dim must be positive, got {self.dim}")
        if self.min_count < 1:
            raise ValueError(f"min_count must be at least 1, got {self.min_count}")
        if self.window < 1 or self.negatives < 1 or self.epochs < 1:
            raise ValueError("window, negatives, and epochs must be at least 1")
        if self.step <= 0:
            raise ValueError(f"step must be positive, got {self.step}")
