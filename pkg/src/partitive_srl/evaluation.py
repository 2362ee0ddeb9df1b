"""Scoring predicted ARG1 tokens against the gold standard.

A predicted token matches the gold ARG1 if it is the same token, or if
both are proper-noun tokens (POS starting with NNP) inside the same
maximal NP chunk; picking Exon instead of Corp. in "Exon Mobil Corp." is
not a miss.  Precision, recall, and F1 are reported in percent.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .corpus import Instance, Sentence, np_chunk_spans
from .errors import SrlError


def f1_score(precision: float, recall: float) -> float:
    """Harmonic mean; 0 when both inputs are 0."""
    if precision + recall == 0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


@dataclass(frozen=True)
class PrfScores:
    tp: int
    fp: int
    fn: int

    @property
    def precision(self) -> float:
        total = self.tp + self.fp
        return 100.0 * self.tp / total if total else 0.0

    @property
    def recall(self) -> float:
        total = self.tp + self.fn
        return 100.0 * self.tp / total if total else 0.0

    @property
    def f1(self) -> float:
        return f1_score(self.precision, self.recall)


def match_arg1(sentence: Sentence, gold_idx: int, predicted_idx: int) -> bool:
    """Exact match, or same-NP proper-noun match."""
    n = len(sentence)
    if not 0 <= gold_idx < n or not 0 <= predicted_idx < n:
        raise SrlError(f"token index out of range for sentence {sentence.sentence_id}")
    if gold_idx == predicted_idx:
        return True
    gold = sentence.tokens[gold_idx]
    pred = sentence.tokens[predicted_idx]
    if not (gold.pos.startswith("NNP") and pred.pos.startswith("NNP")):
        return False
    for start, end in np_chunk_spans(sentence):
        if start <= gold_idx < end:
            return start <= predicted_idx < end
    return False


def prf(
    predictions: Mapping[int, Iterable[int]],
    instances: Sequence[Instance],
    sentences: Sequence[Sentence],
) -> PrfScores:
    """Count tp, fp, fn over sentences.

    At most one true positive per sentence; extra predictions that also
    match the gold token are neither rewarded nor punished.  Every gold
    ARG1 with no matching prediction is a false negative.
    """
    by_id = {s.sentence_id: s for s in sentences}
    gold_by_id = {inst.sentence_id: inst for inst in instances}
    tp = fp = fn = 0
    for sid, inst in gold_by_id.items():
        sentence = by_id.get(sid)
        if sentence is None:
            raise SrlError(f"no sentence with id {sid}")
        predicted = sorted(set(predictions.get(sid, ())))
        gold = inst.arg1_index
        matched = False
        for idx in predicted:
            if gold is not None and match_arg1(sentence, gold, idx):
                matched = True
            else:
                fp += 1
        if gold is not None:
            if matched:
                tp += 1
            else:
                fn += 1
    for sid in predictions:
        if sid not in gold_by_id:
            raise SrlError(f"prediction for unknown sentence {sid}")
    return PrfScores(tp=tp, fp=fp, fn=fn)


def format_prf_table(rows: Sequence[tuple[str, PrfScores]]) -> str:
    """Aligned plain-text table of labeled P/R/F1 rows."""
    header = ("system", "precision", "recall", "f1", "tp", "fp", "fn")
    body = [
        (
            label,
            f"{scores.precision:.2f}",
            f"{scores.recall:.2f}",
            f"{scores.f1:.2f}",
            str(scores.tp),
            str(scores.fp),
            str(scores.fn),
        )
        for label, scores in rows
    ]
    widths = [
        max(len(header[i]), *(len(row[i]) for row in body)) if body else len(header[i])
        for i in range(len(header))
    ]
    lines = [
        "  ".join(h.ljust(widths[i]) for i, h in enumerate(header)).rstrip(),
    ]
    for row in body:
        lines.append("  ".join(c.ljust(widths[i]) for i, c in enumerate(row)).rstrip())
    return "\n".join(lines) + "\n"


def prf_table_csv(rows: Sequence[tuple[str, PrfScores]]) -> str:
    lines = ["system,precision,recall,f1,tp,fp,fn"]
    for label, scores in rows:
        lines.append(
            f"{label},{scores.precision:.2f},{scores.recall:.2f},"
            f"{scores.f1:.2f},{scores.tp},{scores.fp},{scores.fn}"
        )
    return "\n".join(lines) + "\n"
