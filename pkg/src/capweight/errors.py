"""Exception types shared across the toolkit."""


class CapweightError(Exception):
    """Base class for all toolkit-specific errors."""


class CorpusError(CapweightError):
    """Malformed or invalid corpus file content."""


class StoreFormatError(CapweightError):
    """Malformed embedding store file. ``offset`` is the byte position of the problem."""

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class EmbeddingLookupError(CapweightError):
    """A corpus token has no vectors in the embedding store."""


class ModelFormatError(CapweightError):
    """Malformed classifier model file."""
