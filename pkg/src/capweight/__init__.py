"""Word-importance scoring, classification, and weighted caption metrics.

The pipeline: load caption transcripts with per-token human importance
annotations, derive per-token semantic scores from embedding vectors
(or TF-IDF counts), compare scoring methods against the annotations,
train 6-class importance classifiers, and weight caption word-error
rates by predicted importance.
"""

from .classify import (
    ClassifierModel,
    LinearSVMModel,
    LogisticRegressionModel,
    MLPModel,
    RandomForestModel,
    TrainConfig,
    TrainingInstance,
    load_model,
    loss_and_gradient,
    predict,
    save_model,
    train,
)
from .corpus import (
    CLASS_LOWER_BOUNDS,
    CLASS_MIDPOINTS,
    NUM_CLASSES,
    Sentence,
    SplitAssignment,
    Token,
    TokenKey,
    corpus_tokens,
    discretize,
    iter_tokens,
    load_corpus,
    save_corpus,
    split,
)
from .embstore import EmbeddingStore, RecordKey, lookup_subwords, read_manifest, read_store, write_store
from .errors import (
    CapweightError,
    CorpusError,
    EmbeddingLookupError,
    ModelFormatError,
    StoreFormatError,
)
from .evaluation import (
    EvalReport,
    confusion,
    evaluate_predictions,
    format_confusion,
    macro_f1,
    rmse,
)
from .score import (
    DEGENERATE_SCORE,
    ScoredCorpus,
    SemanticScore,
    mean_pool,
    merge_subwords,
    normalize_sentence,
    score_corpus,
    tfidf_scores,
)
from .stats import CorrelationReport, correlate_methods, fisher_compare, normal_two_sided_p, pearson
from .wwer import Alignment, EditOp, WeightedScore, align, score_caption, weighted_wer

__version__ = "0.1.0"

__all__ = [
    "CLASS_LOWER_BOUNDS",
    "CLASS_MIDPOINTS",
    "DEGENERATE_SCORE",
    "NUM_CLASSES",
    "Alignment",
    "CapweightError",
    "ClassifierModel",
    "CorpusError",
    "CorrelationReport",
    "EditOp",
    "EmbeddingLookupError",
    "EmbeddingStore",
    "EvalReport",
    "LinearSVMModel",
    "LogisticRegressionModel",
    "MLPModel",
    "ModelFormatError",
    "RandomForestModel",
    "RecordKey",
    "ScoredCorpus",
    "SemanticScore",
    "Sentence",
    "SplitAssignment",
    "StoreFormatError",
    "Token",
    "TokenKey",
    "TrainConfig",
    "TrainingInstance",
    "WeightedScore",
    "align",
    "confusion",
    "corpus_tokens",
    "correlate_methods",
    "discretize",
    "evaluate_predictions",
    "fisher_compare",
    "format_confusion",
    "iter_tokens",
    "load_corpus",
    "load_model",
    "lookup_subwords",
    "loss_and_gradient",
    "macro_f1",
    "mean_pool",
    "merge_subwords",
    "normal_two_sided_p",
    "normalize_sentence",
    "pearson",
    "predict",
    "read_manifest",
    "read_store",
    "rmse",
    "save_corpus",
    "save_model",
    "score_caption",
    "score_corpus",
    "split",
    "tfidf_scores",
    "train",
    "weighted_wer",
    "write_store",
]
