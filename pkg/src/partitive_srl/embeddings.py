"""Word-vector features for ARG1 candidates.

For a candidate head at index i, five word n-grams are formed (two
backward, the head alone, two forward).  Each n-gram gets two embeddings:
the mean vector of its words, and the "slash" variant, the mean vector of
the rest of the sentence.  At training time the embeddings of gold ARG1
positions are averaged per n-gram type; at feature time each candidate
contributes ten cosine similarities against those averages.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence, TextIO

import numpy as np

from .corpus import Instance, Sentence
from .errors import FeatureError
from .features import FeatureRecord

NGRAM_KINDS = ("back3", "back2", "head", "fwd2", "fwd3")


class EmbedMode(str, enum.Enum):
    NORMAL = "normal"
    SLASH = "slash"


@dataclass
class VectorStore:
    dimension: int
    table: dict[str, np.ndarray]

    def lookup(self, word: str) -> np.ndarray | None:
        """Case-sensitive lookup with a lowercase fallback."""
        vec = self.table.get(word)
        if vec is None:
            vec = self.table.get(word.lower())
        return vec


def load_vectors(stream: TextIO | str) -> VectorStore:
    """Read whitespace-separated word vectors.

    An optional first line may hold just two integers (word count and
    dimension).  Every remaining line is a word followed by its components.
    """
    text = stream if isinstance(stream, str) else stream.read()
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise FeatureError("empty vector file")
    start = 0
    first = lines[0].split()
    if len(first) == 2:
        try:
            int(first[0]), int(first[1])
            start = 1
        except ValueError:
            start = 0
    table: dict[str, np.ndarray] = {}
    dimension: int | None = None
    for line_no, line in enumerate(lines[start:], start=start + 1):
        fields = line.split()
        if len(fields) < 2:
            raise FeatureError(f"vector line {line_no}: no components")
        word = fields[0]
        try:
            vec = np.array([float(x) for x in fields[1:]], dtype=np.float64)
        except ValueError:
            raise FeatureError(f"vector line {line_no}: bad component") from None
        if dimension is None:
            dimension = len(vec)
        elif len(vec) != dimension:
            raise FeatureError(
                f"vector line {line_no}: dimension {len(vec)} != {dimension}"
            )
        table[word] = vec
    if dimension is None:
        raise FeatureError("empty vector file")
    return VectorStore(dimension=dimension, table=table)


def candidate_ngrams(sentence: Sentence, idx: int) -> dict[str, tuple[str, ...]]:
    """The five candidate n-grams around a head token, clipped at edges."""
    if not 0 <= idx < len(sentence):
        raise FeatureError(f"token {idx} out of range")
    words = sentence.words()
    n = len(words)
    spans = {
        "back3": (max(0, idx - 2), idx + 1),
        "back2": (max(0, idx - 1), idx + 1),
        "head": (idx, idx + 1),
        "fwd2": (idx, min(n, idx + 2)),
        "fwd3": (idx, min(n, idx + 3)),
    }
    return {kind: tuple(words[a:b]) for kind, (a, b) in spans.items()}


def _find_span(words: Sequence[str], span: Sequence[str]) -> tuple[int, int]:
    k = len(span)
    if k == 0 or k > len(words):
        raise FeatureError("span is empty or longer than the sentence")
    for start in range(len(words) - k + 1):
        if tuple(words[start : start + k]) == tuple(span):
            return start, start + k
    raise FeatureError(f"span {span!r} does not occur in the sentence")


def embed_span(
    sentence: Sentence,
    span: Sequence[str],
    mode: EmbedMode,
    store: VectorStore,
) -> np.ndarray:
    """Mean vector of the span (NORMAL) or of the rest of the sentence (SLASH).

    Words without a vector are skipped; if nothing is found the zero vector
    is returned.
    """
    words = sentence.words()
    a, b = _find_span(words, span)
    if mode is EmbedMode.NORMAL:
        chosen = words[a:b]
    else:
        chosen = words[:a] + words[b:]
    found = [v for v in (store.lookup(w) for w in chosen) if v is not None]
    if not found:
        return np.zeros(store.dimension, dtype=np.float64)
    return np.mean(found, axis=0)


@dataclass
class AverageProfile:
    """Per-(n-gram kind, mode) mean embedding over gold ARG1 positions."""

    dimension: int
    averages: dict[tuple[str, EmbedMode], np.ndarray]
    counts: dict[tuple[str, EmbedMode], int]


def fit_averages(
    training: Iterable[tuple[Sentence, Instance]], store: VectorStore
) -> AverageProfile:
    """Average the ten embedding types across gold ARG1 positions.

    Zero-vector embeddings (nothing found) are left out of both the sum
    and the count for their type.
    """
    sums = {
        (kind, mode): np.zeros(store.dimension, dtype=np.float64)
        for kind in NGRAM_KINDS
        for mode in EmbedMode
    }
    counts = {key: 0 for key in sums}
    seen = 0
    for sentence, instance in training:
        seen += 1
        if instance.arg1_index is None:
            raise FeatureError(
                f"sentence {instance.sentence_id}: training instance has no ARG1"
            )
        ngrams = candidate_ngrams(sentence, instance.arg1_index)
        for kind in NGRAM_KINDS:
            for mode in EmbedMode:
                vec = embed_span(sentence, ngrams[kind], mode, store)
                if np.any(vec):
                    sums[(kind, mode)] += vec
                    counts[(kind, mode)] += 1
    if seen == 0:
        raise FeatureError("empty training set")
    averages = {
        key: (sums[key] / counts[key] if counts[key] else sums[key])
        for key in sums
    }
    return AverageProfile(dimension=store.dimension, averages=averages, counts=counts)


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity, 0.0 whenever either vector is all zeros."""
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.dot(a, b) / (na * nb))


def _feature_name(kind: str, mode: EmbedMode) -> str:
    prefix = "embed" if mode is EmbedMode.NORMAL else "slash"
    return f"{prefix}_{kind}"


def cosine_features(
    sentence: Sentence,
    idx: int,
    profile: AverageProfile,
    store: VectorStore,
) -> FeatureRecord:
    """Ten cosine similarities between candidate embeddings and the averages."""
    ngrams = candidate_ngrams(sentence, idx)
    numeric: dict[str, float] = {}
    for kind in NGRAM_KINDS:
        for mode in EmbedMode:
            vec = embed_span(sentence, ngrams[kind], mode, store)
            avg = profile.averages[(kind, mode)]
            numeric[_feature_name(kind, mode)] = cosine(vec, avg)
    return FeatureRecord(numeric=numeric)


PROFILE_FORMAT = "srl-profile"
PROFILE_VERSION = 1


def save_profile(profile: AverageProfile) -> str:
    lines = [f"{PROFILE_FORMAT} {PROFILE_VERSION} dim={profile.dimension}"]
    for kind in NGRAM_KINDS:
        for mode in EmbedMode:
            key = (kind, mode)
            vec = " ".join(repr(float(x)) for x in profile.averages[key])
            lines.append(f"{kind}\t{mode.value}\t{profile.counts[key]}\t{vec}")
    return "\n".join(lines) + "\n"


def load_profile(text: str) -> AverageProfile:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise FeatureError("empty profile file")
    header = lines[0].split()
    if len(header) != 3 or header[0] != PROFILE_FORMAT:
        raise FeatureError(f"bad profile header: {lines[0]!r}")
    if header[1] != str(PROFILE_VERSION):
        raise FeatureError(f"unsupported profile version {header[1]}")
    dimension = int(header[2].removeprefix("dim="))
    averages: dict[tuple[str, EmbedMode], np.ndarray] = {}
    counts: dict[tuple[str, EmbedMode], int] = {}
    for line in lines[1:]:
        kind, mode_s, count_s, vec_s = line.split("\t")
        key = (kind, EmbedMode(mode_s))
        averages[key] = np.array([float(x) for x in vec_s.split()], dtype=np.float64)
        counts[key] = int(count_s)
    expected = {(kind, mode) for kind in NGRAM_KINDS for mode in EmbedMode}
    if set(averages) != expected:
        raise FeatureError("profile file does not cover all ten embedding types")
    return AverageProfile(dimension=dimension, averages=averages, counts=counts)
