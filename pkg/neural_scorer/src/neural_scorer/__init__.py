"""Neural second-view scorer.

Reads the extended CONLL corpus format, scores every token with a small
transformer encoder, and writes the tab-separated score table the
feature-based toolkit's ensemble commands consume.  The two packages
share file formats, not code.
"""

from .conll import Sentence, Token, parse_conll
from .scorer import ScorerConfig, build_model, emit_scores, fit_model, score_sentences

__all__ = [
    "Sentence",
    "Token",
    "parse_conll",
    "ScorerConfig",
    "build_model",
    "emit_scores",
    "fit_model",
    "score_sentences",
]
