"""Error types shared across the toolkit.

Everything derives from SrlError so the CLI can map any toolkit failure
to a single validation exit code.
"""


class SrlError(ValueError):
    """Base class for all toolkit errors."""


class CorpusError(SrlError):
    """Malformed or invalid CONLL input."""


class TreeError(SrlError):
    """Malformed bracketed tree or failed leaf alignment."""


class FeatureError(SrlError):
    """Invalid feature extraction request."""


class EncodingError(SrlError):
    """Vocabulary construction or vectorization failure."""


class ModelError(SrlError):
    """Invalid training input or model artifact."""


class ScoreError(SrlError):
    """Invalid score table, weights, or coverage mismatch."""
