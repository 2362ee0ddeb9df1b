"""Extended CONLL-2000 corpus reading and writing.

Each token line carries six tab-separated fields:

    WORD  POS  BIO  TOKEN#  FUNC  FRAME

Sentences are separated by a blank line.  FUNC is one of ARG1, SUP, PRED,
or empty; FRAME holds the predicate's sense classes, "/"-joined when a
predicate belongs to several.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, TextIO

from .errors import CorpusError

FUNC_VALUES = ("", "ARG1", "SUP", "PRED")

_BIO_RE = re.compile(r"^(O|[BI]-[A-Z]+)$")


@dataclass(frozen=True)
class Token:
    word: str
    pos: str
    bio: str
    index: int
    func: str = ""
    frame: str = ""

    def chunk_label(self) -> str | None:
        """Chunk type for B-/I- tags, None for O."""
        if self.bio == "O":
            return None
        return self.bio[2:]


@dataclass(frozen=True)
class Sentence:
    tokens: tuple[Token, ...]
    sentence_id: int

    def __len__(self) -> int:
        return len(self.tokens)

    def words(self) -> list[str]:
        return [t.word for t in self.tokens]


@dataclass(frozen=True)
class Instance:
    """One labeled predicate occurrence extracted from a sentence."""

    sentence_id: int
    predicate_index: int
    support_indices: tuple[int, ...]
    arg1_index: int | None
    frame_classes: frozenset[str]


def _parse_token(line: str, line_no: int, position: int) -> Token:
    fields = line.split("\t")
    if len(fields) != 6:
        raise CorpusError(
            f"line {line_no}: expected 6 tab-separated fields, got {len(fields)}"
        )
    word, pos, bio, number, func, frame = fields
    if not _BIO_RE.match(bio):
        raise CorpusError(f"line {line_no}: bad BIO tag {bio!r}")
    if func not in FUNC_VALUES:
        raise CorpusError(f"line {line_no}: bad FUNC value {func!r}")
    try:
        index = int(number)
    except ValueError:
        raise CorpusError(f"line {line_no}: bad token number {number!r}") from None
    if index != position:
        raise CorpusError(
            f"line {line_no}: token number {index} does not match position {position}"
        )
    return Token(word=word, pos=pos, bio=bio, index=index, func=func, frame=frame)


def _check_sentence(tokens: list[Token], sentence_id: int, line_no: int) -> None:
    prev_bio = "O"
    for t in tokens:
        if t.bio.startswith("I-"):
            label = t.bio[2:]
            if prev_bio not in (f"B-{label}", f"I-{label}"):
                raise CorpusError(
                    f"sentence {sentence_id}: {t.bio} at token {t.index} "
                    f"does not continue a {label} chunk"
                )
        prev_bio = t.bio
    preds = [t.index for t in tokens if t.func == "PRED"]
    if len(preds) != 1:
        raise CorpusError(
            f"sentence {sentence_id} (ending line {line_no}): "
            f"expected exactly one PRED token, found {len(preds)}"
        )
    arg1s = [t.index for t in tokens if t.func == "ARG1"]
    if len(arg1s) > 1:
        raise CorpusError(
            f"sentence {sentence_id} (ending line {line_no}): "
            f"found {len(arg1s)} ARG1 tokens, at most one is allowed"
        )


def parse_conll(stream: TextIO | str) -> list[Sentence]:
    """Parse an extended CONLL-2000 stream into sentences.

    Accepts a file object or a string.  Raises CorpusError with a line
    number for malformed lines and with a sentence id for structural
    violations (bad chunk continuations, PRED/ARG1 counts).
    """
    text = stream if isinstance(stream, str) else stream.read()
    sentences: list[Sentence] = []
    current: list[Token] = []
    sentence_id = 0
    last_line_no = 0
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\n")
        if line.strip() == "":
            if current:
                _check_sentence(current, sentence_id, last_line_no)
                sentences.append(Sentence(tokens=tuple(current), sentence_id=sentence_id))
                sentence_id += 1
                current = []
            continue
        current.append(_parse_token(line, line_no, len(current)))
        last_line_no = line_no
    if current:
        _check_sentence(current, sentence_id, last_line_no)
        sentences.append(Sentence(tokens=tuple(current), sentence_id=sentence_id))
    return sentences


def write_conll(sentences: Iterable[Sentence]) -> str:
    """Serialize sentences to canonical form.

    Canonical form uses tab-separated fields, a single blank line between
    sentences, and no trailing blank line.
    """
    blocks = []
    for sent in sentences:
        lines = [
            "\t".join((t.word, t.pos, t.bio, str(t.index), t.func, t.frame))
            for t in sent.tokens
        ]
        blocks.append("\n".join(lines))
    if not blocks:
        return ""
    return "\n\n".join(blocks) + "\n"


def extract_instance(sentence: Sentence) -> Instance:
    """Pull the predicate, supports, ARG1, and frame classes out of a sentence."""
    pred = None
    sups: list[int] = []
    arg1 = None
    for t in sentence.tokens:
        if t.func == "PRED":
            pred = t.index
        elif t.func == "SUP":
            sups.append(t.index)
        elif t.func == "ARG1":
            arg1 = t.index
    if pred is None:
        raise CorpusError(f"sentence {sentence.sentence_id}: no PRED token")
    frame = sentence.tokens[pred].frame
    classes = frozenset(c for c in frame.split("/") if c)
    return Instance(
        sentence_id=sentence.sentence_id,
        predicate_index=pred,
        support_indices=tuple(sups),
        arg1_index=arg1,
        frame_classes=classes,
    )


def np_chunk_spans(sentence: Sentence) -> list[tuple[int, int]]:
    """Half-open [start, end) spans of maximal B-NP (I-NP)* runs."""
    spans = []
    start = None
    for t in sentence.tokens:
        if t.bio == "B-NP":
            if start is not None:
                spans.append((start, t.index))
            start = t.index
        elif t.bio == "I-NP":
            if start is None:
                start = t.index
        else:
            if start is not None:
                spans.append((start, t.index))
                start = None
    if start is not None:
        spans.append((start, len(sentence.tokens)))
    return spans
