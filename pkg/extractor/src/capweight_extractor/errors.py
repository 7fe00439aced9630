class ExtractionError(Exception):
    """Raised when extraction cannot proceed (missing model, bad input)."""
