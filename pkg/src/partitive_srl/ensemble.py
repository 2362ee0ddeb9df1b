"""Score tables and the two-view ensemble.

A score table assigns every (sentence, token) key a probability of being
the ARG1 head.  Two tables covering the same keys can be blended with
convex weights fitted on a dev set by grid search over w_A in hundredth
steps, minimizing mean binary cross-entropy against the gold tokens.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .corpus import Instance, Sentence
from .errors import ScoreError

SCORE_HEADER = "sentence_id\ttoken_index\tscore"

# probability floor inside the cross-entropy so 0/1 scores stay finite
_CLIP = 1e-12


@dataclass
class ScoreTable:
    rows: dict[tuple[int, int], float]
    source: str = ""

    @classmethod
    def from_rows(
        cls, pairs: Iterable[tuple[tuple[int, int], float]], source: str = ""
    ) -> "ScoreTable":
        rows: dict[tuple[int, int], float] = {}
        for key, score in pairs:
            if key in rows:
                raise ScoreError(f"duplicate key {key}")
            _check_score(score, f"key {key}")
            rows[key] = float(score)
        return cls(rows=rows, source=source)

    def sorted_items(self) -> list[tuple[tuple[int, int], float]]:
        return sorted(self.rows.items())

    def __len__(self) -> int:
        return len(self.rows)


def _check_score(score: float, where: str) -> None:
    if not math.isfinite(score) or not 0.0 <= score <= 1.0:
        raise ScoreError(f"{where}: score {score!r} outside [0, 1]")


def read_scores(text: str, source: str = "") -> ScoreTable:
    """Parse the TSV score format; rows are numbered from 0 after the header."""
    lines = text.splitlines()
    if not lines or lines[0] != SCORE_HEADER:
        raise ScoreError("missing or malformed score header")
    rows: dict[tuple[int, int], float] = {}
    for row_no, line in enumerate(lines[1:]):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise ScoreError(f"row {row_no}: expected 3 fields, got {len(fields)}")
        try:
            key = (int(fields[0]), int(fields[1]))
            score = float(fields[2])
        except ValueError:
            raise ScoreError(f"row {row_no}: bad number") from None
        if not math.isfinite(score) or not 0.0 <= score <= 1.0:
            raise ScoreError(f"row {row_no}: score {fields[2]} outside [0, 1]")
        if key in rows:
            raise ScoreError(f"row {row_no}: duplicate key {key}")
        rows[key] = score
    return ScoreTable(rows=rows, source=source)


def write_scores(table: ScoreTable) -> str:
    """Serialize sorted by (sentence_id, token_index); floats round-trip exactly."""
    lines = [SCORE_HEADER]
    for (sid, tidx), score in table.sorted_items():
        lines.append(f"{sid}\t{tidx}\t{score!r}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class EnsembleWeights:
    w_a: float

    @property
    def w_b(self) -> float:
        return 1.0 - self.w_a

    def __post_init__(self) -> None:
        if not 0.0 <= self.w_a <= 1.0:
            raise ScoreError(f"w_a {self.w_a} outside [0, 1]")


def _blend(w_a: float, a: float, b: float) -> float:
    # clamping keeps the blend inside the endpoint interval even when
    # floating-point rounding would nudge it out
    lo, hi = (a, b) if a <= b else (b, a)
    return min(max(w_a * a + (1.0 - w_a) * b, lo), hi)


def _require_same_keys(a: ScoreTable, b: ScoreTable) -> None:
    if a.rows.keys() == b.rows.keys():
        return
    only_a = sorted(a.rows.keys() - b.rows.keys())[:5]
    only_b = sorted(b.rows.keys() - a.rows.keys())[:5]
    raise ScoreError(
        f"score tables cover different keys; only in A: {only_a}, only in B: {only_b}"
    )


def fit_weights(
    scores_a: ScoreTable,
    scores_b: ScoreTable,
    dev: Sequence[tuple[Sentence, Instance]],
) -> EnsembleWeights:
    """Grid search w_A over 0.00..1.00 in hundredths, minimizing mean BCE.

    Both tables must cover every token of every dev sentence.  Ties prefer
    the larger w_A.
    """
    _require_same_keys(scores_a, scores_b)
    labels: dict[tuple[int, int], int] = {}
    missing: list[tuple[int, int]] = []
    for sentence, instance in dev:
        for tok in sentence.tokens:
            key = (sentence.sentence_id, tok.index)
            if key not in scores_a.rows:
                missing.append(key)
            labels[key] = 1 if instance.arg1_index == tok.index else 0
    if missing:
        raise ScoreError(f"score tables missing dev keys: {missing[:10]}")
    if not labels:
        raise ScoreError("empty dev set")
    pairs = [
        (scores_a.rows[key], scores_b.rows[key], y) for key, y in labels.items()
    ]
    best_w = 0.0
    best_loss = None
    for step in range(101):
        w = step / 100.0
        loss = 0.0
        for a, b, y in pairs:
            p = min(max(_blend(w, a, b), _CLIP), 1.0 - _CLIP)
            loss += -(math.log(p) if y == 1 else math.log(1.0 - p))
        loss /= len(pairs)
        if best_loss is None or loss <= best_loss:
            best_loss = loss
            best_w = w
    return EnsembleWeights(w_a=best_w)


def combine(
    scores_a: ScoreTable, scores_b: ScoreTable, weights: EnsembleWeights
) -> ScoreTable:
    """Convex per-key blend of two tables over identical key sets."""
    _require_same_keys(scores_a, scores_b)
    rows = {
        key: _blend(weights.w_a, score, scores_b.rows[key])
        for key, score in scores_a.rows.items()
    }
    return ScoreTable(rows=rows, source="ensemble")


class DecodeMode(str, enum.Enum):
    THRESHOLD = "threshold"
    ARGMAX = "argmax"


def decode(
    table: ScoreTable, mode: DecodeMode, tau: float = 0.5
) -> dict[int, set[int]]:
    """Turn scores into per-sentence predicted token sets.

    THRESHOLD keeps every token scoring at least tau.  ARGMAX keeps exactly
    one token per sentence, the highest-scoring one, ties going to the
    lowest token index.
    """
    by_sentence: dict[int, set[int]] = {}
    if mode is DecodeMode.THRESHOLD:
        for (sid, tidx), score in table.rows.items():
            by_sentence.setdefault(sid, set())
            if score >= tau:
                by_sentence[sid].add(tidx)
        return by_sentence
    best: dict[int, tuple[float, int]] = {}
    for (sid, tidx), score in sorted(table.rows.items()):
        if sid not in best or score > best[sid][0]:
            best[sid] = (score, tidx)
    return {sid: {tidx} for sid, (_, tidx) in best.items()}


def weights_to_json(weights: EnsembleWeights) -> str:
    import json

    return json.dumps({"format": "srl-weights", "version": 1, "w_a": weights.w_a,
                       "w_b": weights.w_b}, sort_keys=True) + "\n"


def weights_from_json(text: str) -> EnsembleWeights:
    import json

    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScoreError(f"bad weights file: {exc}") from None
    if payload.get("format") != "srl-weights":
        raise ScoreError("not an ensemble weights file")
    return EnsembleWeights(w_a=float(payload["w_a"]))
