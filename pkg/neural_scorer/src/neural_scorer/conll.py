"""Minimal reader for the extended CONLL token format.

Six tab-separated fields per line: word, POS, BIO chunk tag, token
number, function tag, frame list.  Blank lines separate sentences.
This reader checks only what the scorer relies on; the feature-based
toolkit owns the strict validator.
"""

from __future__ import annotations

from dataclasses import dataclass


class ConllError(ValueError):
    pass


@dataclass(frozen=True)
class Token:
    word: str
    pos: str
    bio: str
    index: int
    func: str
    frame: str


@dataclass(frozen=True)
class Sentence:
    tokens: tuple[Token, ...]
    sentence_id: int

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def predicate_index(self) -> int | None:
        for tok in self.tokens:
            if tok.func == "PRED":
                return tok.index
        return None

    @property
    def arg1_index(self) -> int | None:
        for tok in self.tokens:
            if tok.func == "ARG1":
                return tok.index
        return None


def parse_conll(text: str) -> list[Sentence]:
    sentences: list[Sentence] = []
    current: list[Token] = []

    def flush():
        if current:
            sentences.append(Sentence(tokens=tuple(current), sentence_id=len(sentences)))
            current.clear()

    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            flush()
            continue
        fields = line.split("\t")
        if len(fields) != 6:
            raise ConllError(f"line {line_no}: expected 6 fields, got {len(fields)}")
        word, pos, bio, number, func, frame = fields
        try:
            index = int(number)
        except ValueError:
            raise ConllError(f"line {line_no}: bad token number {number!r}") from None
        if index != len(current):
            raise ConllError(
                f"line {line_no}: token number {index} out of sequence"
            )
        current.append(
            Token(word=word, pos=pos, bio=bio, index=index, func=func, frame=frame)
        )
    flush()
    return sentences
