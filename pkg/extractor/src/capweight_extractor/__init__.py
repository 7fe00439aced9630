"""Embedding extraction for the caption word-importance pipeline."""

from .config import COMPOSITIONS, ExtractionConfig
from .contextual import extract_contextual, load_transformer, sentence_records
from .errors import ExtractionError
from .static import extract_static, train_type_vectors

__version__ = "0.1.0"

__all__ = [
    "COMPOSITIONS",
    "ExtractionConfig",
    "ExtractionError",
    "extract_contextual",
    "extract_static",
    "load_transformer",
    "sentence_records",
    "train_type_vectors",
    "__version__",
]
