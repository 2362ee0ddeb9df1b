"""Per-token feature extraction for ARG1 candidate classification.

A FeatureRecord keeps categorical features (string-valued) apart from
numeric ones; downstream encoding treats the two differently.  All
extractors here are pure functions of the sentence, the instance, and a
candidate token index.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .corpus import Instance, Sentence
from .errors import FeatureError
from .parsetree import ParseTree, TreePath, tree_path


class Task(str, enum.Enum):
    PERCENT = "percent"
    PARTITIVE = "partitive"


# Predicate sense classes that get their own present/absent feature on the
# partitive task.  The percent task never uses them.
PREDICATE_CLASSES = (
    "GROUP",
    "MERONYM",
    "PART",
    "QUANT",
    "SHARE",
    "BOOK-CHAPTER",
    "BORDER",
    "CONTAINER",
    "DIVISION",
    "ENVIRONMENT",
    "INSTANCE-OF-SET",
    "NOM",
    "NOMADJ",
    "PART-OF-BODY-FURNITURE-ETC",
    "WORK-OF-ART",
)

PAD = "<PAD>"
WINDOW_OFFSETS = (-2, -1, 0, 1, 2)


@dataclass
class FeatureRecord:
    categorical: dict[str, str] = field(default_factory=dict)
    numeric: dict[str, float] = field(default_factory=dict)

    def merge(self, other: "FeatureRecord") -> "FeatureRecord":
        """Name-disjoint union; collisions are a bug in the caller."""
        mine = set(self.categorical) | set(self.numeric)
        theirs = set(other.categorical) | set(other.numeric)
        overlap = mine & theirs
        if overlap:
            raise FeatureError(f"duplicate feature names: {sorted(overlap)}")
        return FeatureRecord(
            categorical={**self.categorical, **other.categorical},
            numeric={**self.numeric, **other.numeric},
        )

    def categorical_names(self) -> tuple[str, ...]:
        return tuple(sorted(self.categorical))

    def numeric_names(self) -> tuple[str, ...]:
        return tuple(sorted(self.numeric))

    def dump_lines(self) -> list[str]:
        lines = [f"{name}={self.categorical[name]}" for name in sorted(self.categorical)]
        lines += [f"{name}={self.numeric[name]!r}" for name in sorted(self.numeric)]
        return lines


def _offset_suffix(offset: int) -> str:
    return str(offset) if offset == 0 else f"{offset:+d}"


def window_features(sentence: Sentence, idx: int) -> FeatureRecord:
    """Word, POS, and BIO tag in a five-token window around idx."""
    if not 0 <= idx < len(sentence):
        raise FeatureError(f"token {idx} out of range")
    cats: dict[str, str] = {}
    for offset in WINDOW_OFFSETS:
        pos = idx + offset
        suffix = _offset_suffix(offset)
        if 0 <= pos < len(sentence):
            tok = sentence.tokens[pos]
            cats[f"word_{suffix}"] = tok.word
            cats[f"pos_{suffix}"] = tok.pos
            cats[f"bio_{suffix}"] = tok.bio
        else:
            cats[f"word_{suffix}"] = PAD
            cats[f"pos_{suffix}"] = PAD
            cats[f"bio_{suffix}"] = PAD
    return FeatureRecord(categorical=cats)


def token_distance(idx: int, anchor: int) -> int:
    """Signed surface distance, negative when idx precedes the anchor."""
    return idx - anchor


def coarse_pos(pos: str) -> str:
    if pos.startswith("NN"):
        return "NOUN"
    if pos.startswith("VB"):
        return "VERB"
    return pos


def collapse_bio_path(sentence: Sentence, from_idx: int, to_idx: int) -> str:
    """Chunk-collapsed surface path between two tokens.

    The inclusive token span is walked in surface order.  Each maximal
    B-X (I-X)* run collapses to its label X; an O token contributes
    "O-" plus its lowercased word; each PP chunk is followed by its first
    token's lowercased word.  The path starts with "right" or "left"
    depending on whether to_idx follows from_idx and ends with the target
    token's coarse POS class (NN* -> NOUN, VB* -> VERB, else verbatim).
    """
    n = len(sentence)
    for name, idx in (("from_idx", from_idx), ("to_idx", to_idx)):
        if not 0 <= idx < n:
            raise FeatureError(f"{name} {idx} out of range")
    if from_idx == to_idx:
        raise FeatureError("path endpoints must differ")
    direction = "right" if to_idx > from_idx else "left"
    lo, hi = min(from_idx, to_idx), max(from_idx, to_idx)
    tokens = sentence.tokens
    parts = [direction]
    i = lo
    while i <= hi:
        tok = tokens[i]
        if tok.bio == "O":
            parts.append("O-" + tok.word.lower())
            i += 1
            continue
        label = tok.bio[2:]
        first_word = tok.word
        i += 1
        while i <= hi and tokens[i].bio == f"I-{label}":
            i += 1
        parts.append(label)
        if label == "PP":
            parts.append(first_word.lower())
    parts.append(coarse_pos(tokens[to_idx].pos))
    return "_".join(parts)


class Anchor(enum.Enum):
    SUPPORT = "support"
    PREDICATE = "predicate"


class Direction(enum.Enum):
    BEFORE = "before"
    AFTER = "after"


@dataclass(frozen=True)
class PathPattern:
    """A tree-path shape between an anchor token and an ARG1 candidate."""

    pattern_id: str
    up_labels: tuple[str, ...]
    down_labels: tuple[str, ...]
    direction: Direction
    anchor: Anchor

    def matches(self, path: TreePath, idx: int, anchor_idx: int) -> bool:
        if self.direction is Direction.BEFORE and idx >= anchor_idx:
            return False
        if self.direction is Direction.AFTER and idx <= anchor_idx:
            return False
        return (
            path.up_labels == self.up_labels and path.down_labels == self.down_labels
        )


PATH1 = PathPattern(
    pattern_id="PATH1",
    up_labels=("VP", "S"),
    down_labels=("NP",),
    direction=Direction.BEFORE,
    anchor=Anchor.SUPPORT,
)
PATH2 = PathPattern(
    pattern_id="PATH2",
    up_labels=("VP",),
    down_labels=("NP",),
    direction=Direction.AFTER,
    anchor=Anchor.SUPPORT,
)
PATH3 = PathPattern(
    pattern_id="PATH3",
    up_labels=("NP",),
    down_labels=("NP",),
    direction=Direction.BEFORE,
    anchor=Anchor.PREDICATE,
)


def type2_path_flags(
    tree: ParseTree, instance: Instance, idx: int
) -> tuple[bool, bool, bool]:
    """Match the three fixed tree-path patterns for a candidate token.

    The first two patterns anchor at the first support verb and only apply
    when the sentence has one; the third anchors at the predicate and only
    applies when the sentence has no support verb at all.
    """
    flags = [False, False, False]
    if instance.support_indices:
        anchor = instance.support_indices[0]
        if idx != anchor:
            path = tree_path(tree, anchor, idx)
            flags[0] = PATH1.matches(path, idx, anchor)
            flags[1] = PATH2.matches(path, idx, anchor)
    else:
        anchor = instance.predicate_index
        if idx != anchor:
            path = tree_path(tree, anchor, idx)
            flags[2] = PATH3.matches(path, idx, anchor)
    return flags[0], flags[1], flags[2]


def predicate_class_features(instance: Instance, task: Task) -> FeatureRecord:
    """Present/absent feature per known predicate class; partitive task only."""
    if task is Task.PERCENT:
        return FeatureRecord()
    cats = {
        f"class_{label}": ("1" if label in instance.frame_classes else "0")
        for label in PREDICATE_CLASSES
    }
    return FeatureRecord(categorical=cats)
