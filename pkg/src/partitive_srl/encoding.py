"""Turning feature records into fixed-width numeric vectors.

Categorical features are indexed against a vocabulary built from the
training records; id 0 is reserved for unseen categories in every
feature.  Ordinal encoding emits one real per categorical feature (its
id); one-hot encoding emits an indicator block spanning the unknown slot
plus every training category.  Numeric features pass through unchanged
after the categorical section.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import EncodingError
from .features import FeatureRecord

UNKNOWN = "<UNK>"


class EncodingMode(str, enum.Enum):
    ORDINAL = "ordinal"
    ONEHOT = "onehot"


@dataclass
class Vocabulary:
    mode: EncodingMode
    cat_names: tuple[str, ...]
    categories: dict[str, tuple[str, ...]]
    num_names: tuple[str, ...]
    _ids: dict[str, dict[str, int]] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        # id 0 is the unknown slot for every feature
        self._ids = {
            name: {cat: i + 1 for i, cat in enumerate(cats)}
            for name, cats in self.categories.items()
        }

    def category_id(self, name: str, value: str) -> int:
        return self._ids[name].get(value, 0)

    @property
    def width(self) -> int:
        if self.mode is EncodingMode.ORDINAL:
            return len(self.cat_names) + len(self.num_names)
        blocks = sum(len(self.categories[n]) + 1 for n in self.cat_names)
        return blocks + len(self.num_names)

    def column_names(self) -> list[str]:
        """One name per output column, for importance reports."""
        names: list[str] = []
        if self.mode is EncodingMode.ORDINAL:
            names.extend(self.cat_names)
        else:
            for cat_name in self.cat_names:
                names.append(f"{cat_name}={UNKNOWN}")
                names.extend(f"{cat_name}={c}" for c in self.categories[cat_name])
        names.extend(self.num_names)
        return names


def _check_names(record: FeatureRecord, vocab_cats, vocab_nums, where: str) -> None:
    if record.categorical_names() != vocab_cats or record.numeric_names() != vocab_nums:
        raise EncodingError(f"{where}: feature names do not match the first record")


def build_vocab(records: Sequence[FeatureRecord], mode: EncodingMode) -> Vocabulary:
    """Collect categories in first-seen order over the training records."""
    if not records:
        raise EncodingError("cannot build a vocabulary from zero records")
    cat_names = records[0].categorical_names()
    num_names = records[0].numeric_names()
    seen: dict[str, list[str]] = {name: [] for name in cat_names}
    member: dict[str, set[str]] = {name: set() for name in cat_names}
    for i, record in enumerate(records):
        _check_names(record, cat_names, num_names, f"record {i}")
        for name in cat_names:
            value = record.categorical[name]
            if value not in member[name]:
                member[name].add(value)
                seen[name].append(value)
    categories = {name: tuple(values) for name, values in seen.items()}
    return Vocabulary(
        mode=mode, cat_names=cat_names, categories=categories, num_names=num_names
    )


def vectorize(record: FeatureRecord, vocab: Vocabulary) -> np.ndarray:
    """Encode one record against the vocabulary; unseen categories map to id 0."""
    _check_names(record, vocab.cat_names, vocab.num_names, "record")
    numerics = [record.numeric[name] for name in vocab.num_names]
    if vocab.mode is EncodingMode.ORDINAL:
        ids = [
            float(vocab.category_id(name, record.categorical[name]))
            for name in vocab.cat_names
        ]
        return np.array(ids + numerics, dtype=np.float64)
    out = np.zeros(vocab.width, dtype=np.float64)
    offset = 0
    for name in vocab.cat_names:
        block = len(vocab.categories[name]) + 1
        out[offset + vocab.category_id(name, record.categorical[name])] = 1.0
        offset += block
    for k, value in enumerate(numerics):
        out[offset + k] = value
    return out


def vectorize_all(records: Sequence[FeatureRecord], vocab: Vocabulary) -> np.ndarray:
    if not records:
        return np.zeros((0, vocab.width), dtype=np.float64)
    return np.stack([vectorize(r, vocab) for r in records])


VOCAB_FORMAT = "srl-vocab"
VOCAB_VERSION = 1


def save_vocab(vocab: Vocabulary) -> str:
    """Versioned text form: one line per feature, categories tab-joined."""
    lines = [f"{VOCAB_FORMAT} {VOCAB_VERSION} {vocab.mode.value}"]
    for name in vocab.cat_names:
        lines.append("\t".join(["cat", name, *vocab.categories[name]]))
    for name in vocab.num_names:
        lines.append(f"num\t{name}")
    return "\n".join(lines) + "\n"


def load_vocab(text: str) -> Vocabulary:
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise EncodingError("empty vocabulary file")
    header = lines[0].split()
    if len(header) != 3 or header[0] != VOCAB_FORMAT:
        raise EncodingError(f"bad vocabulary header: {lines[0]!r}")
    if header[1] != str(VOCAB_VERSION):
        raise EncodingError(f"unsupported vocabulary version {header[1]}")
    mode = EncodingMode(header[2])
    cat_names: list[str] = []
    categories: dict[str, tuple[str, ...]] = {}
    num_names: list[str] = []
    for line in lines[1:]:
        if not line:
            continue
        fields = line.split("\t")
        if fields[0] == "cat":
            name = fields[1]
            cat_names.append(name)
            categories[name] = tuple(fields[2:])
        elif fields[0] == "num":
            num_names.append(fields[1])
        else:
            raise EncodingError(f"bad vocabulary line: {line!r}")
    return Vocabulary(
        mode=mode,
        cat_names=tuple(cat_names),
        categories=categories,
        num_names=tuple(num_names),
    )
