"""Seeded synthetic corpus for exercising the full pipeline.

Three clause shapes are mixed, optionally wrapped in distractor prefixes
and suffixes:

    A:  5 % of the big price fell sharply
    B:  The price rose 5 %
    C:  They raised the price 5 %

The ARG1 noun shares its word pool with the distractor nouns, and the
verbs before distractor nouns overlap the support verbs, so local windows
are ambiguous on purpose: the chunk path between the predicate and the
candidate is what pins the answer down.  Every generated sentence has a
matching constituency tree, and a deterministic vector file covers the
whole vocabulary.
"""

from __future__ import annotations

import math
import random

from .corpus import Sentence, Token
from .features import Task
from .parsetree import ParseTree

NOUNS = (
    "price", "output", "index", "profit", "revenue", "cost", "demand",
    "supply", "rate", "volume", "income", "turnover", "market", "surplus",
    "inventory", "backlog",
)
SUP_VERBS = ("rose", "fell", "climbed", "dropped", "gained", "slipped")
CAUSE_VERBS = ("raised", "cut", "boosted", "reduced", "lifted", "trimmed")
SAY_VERBS = ("said", "noted", "reported", "added")
TAIL_VERBS = ("fell", "rose", "declined", "recovered")
ADJS = ("big", "small", "new", "strong", "weak", "gross")
ADVS = ("sharply", "slightly", "quickly", "barely")
SUBJECTS = (("They", "PRP"), ("Analysts", "NNS"), ("Traders", "NNS"), ("Officials", "NNS"))
SUFFIX_PREPS = ("despite", "after", "amid", "before")
NUMBERS = ("2", "3", "5", "7", "10", "12", "15", "20", "25", "50")

PERCENT_PREDS = (("%", ""), ("percent", ""))
PARTITIVE_PREDS = (
    ("share", "SHARE"),
    ("portion", "PART"),
    ("set", "QUANT"),
    ("group", "GROUP"),
    ("majority", "QUANT"),
    ("segment", "PART/DIVISION"),
)


def _leaf(pos: str, word: str) -> ParseTree:
    return ParseTree(label=pos, leaf_word=word)


def _node(label: str, *children: ParseTree) -> ParseTree:
    return ParseTree(label=label, children=tuple(children))


class _Builder:
    """Accumulates token rows in surface order while the tree is assembled."""

    def __init__(self) -> None:
        self.rows: list[tuple[str, str, str, str, str]] = []

    def add(self, word: str, pos: str, bio: str, func: str = "", frame: str = "") -> ParseTree:
        self.rows.append((word, pos, bio, func, frame))
        return _leaf(pos, word)

    def noun_phrase(
        self,
        rng: random.Random,
        head: str,
        func: str = "",
        max_adjs: int = 2,
    ) -> ParseTree:
        leaves = [self.add("the", "DT", "B-NP")]
        for _ in range(rng.randint(0, max_adjs)):
            leaves.append(self.add(rng.choice(ADJS), "JJ", "I-NP"))
        leaves.append(self.add(head, "NN", "I-NP", func=func))
        return _node("NP", *leaves)

    def pred_np(self, rng: random.Random, pred_word: str, frame: str) -> ParseTree:
        num = self.add(rng.choice(NUMBERS), "CD", "B-NP")
        pred = self.add(pred_word, "NN", "I-NP", func="PRED", frame=frame)
        return _node("NP", num, pred)


def _core_a(builder: _Builder, rng: random.Random, pred_word: str, frame: str) -> list[ParseTree]:
    """5 % of the price fell sharply"""
    pred_np = builder.pred_np(rng, pred_word, frame)
    of = builder.add("of", "IN", "B-PP")
    arg_np = builder.noun_phrase(rng, rng.choice(NOUNS), func="ARG1")
    subject = _node("NP", pred_np, _node("PP", of, arg_np))
    vp_children = [builder.add(rng.choice(TAIL_VERBS), "VBD", "O")]
    if rng.random() < 0.5:
        vp_children.append(_node("ADVP", builder.add(rng.choice(ADVS), "RB", "O")))
    return [subject, _node("VP", *vp_children)]


def _core_b(builder: _Builder, rng: random.Random, pred_word: str, frame: str) -> list[ParseTree]:
    """The price rose 5 %"""
    arg_np = builder.noun_phrase(rng, rng.choice(NOUNS), func="ARG1")
    vp_children = [builder.add(rng.choice(SUP_VERBS), "VBD", "O", func="SUP")]
    if rng.random() < 0.4:
        vp_children.append(_node("ADVP", builder.add(rng.choice(ADVS), "RB", "O")))
    vp_children.append(builder.pred_np(rng, pred_word, frame))
    return [arg_np, _node("VP", *vp_children)]


def _core_c(builder: _Builder, rng: random.Random, pred_word: str, frame: str) -> list[ParseTree]:
    """They raised the price 5 %"""
    subj_word, subj_pos = rng.choice(SUBJECTS)
    subj = _node("NP", builder.add(subj_word, subj_pos, "B-NP"))
    verb = builder.add(rng.choice(CAUSE_VERBS), "VBD", "O", func="SUP")
    arg_np = builder.noun_phrase(rng, rng.choice(NOUNS), func="ARG1")
    pred_np = builder.pred_np(rng, pred_word, frame)
    return [subj, _node("VP", verb, arg_np, pred_np)]


def generate_sentence(
    rng: random.Random, task: Task, sentence_id: int
) -> tuple[Sentence, ParseTree]:
    builder = _Builder()
    preds = PERCENT_PREDS if task is Task.PERCENT else PARTITIVE_PREDS
    pred_word, frame = rng.choice(preds)

    prefix_kind = rng.choice(("none", "clause", "pp_clause"))
    prefix_children: list[ParseTree] = []
    prefix_verb: ParseTree | None = None
    if prefix_kind == "pp_clause":
        at = builder.add("at", "IN", "B-PP")
        pp_np = builder.noun_phrase(rng, rng.choice(NOUNS), max_adjs=1)
        prefix_children.append(_node("PP", at, pp_np))
        prefix_children.append(builder.add(",", ",", "O"))
    if prefix_kind in ("clause", "pp_clause"):
        prefix_children.append(builder.noun_phrase(rng, rng.choice(NOUNS), max_adjs=1))
        prefix_verb = builder.add(rng.choice(SUP_VERBS + SAY_VERBS), "VBD", "O")

    core_fn = rng.choice((_core_a, _core_b, _core_c))
    core_children = core_fn(builder, rng, pred_word, frame)
    if rng.random() < 0.4:
        prep = builder.add(rng.choice(SUFFIX_PREPS), "IN", "B-PP")
        pp_np = builder.noun_phrase(rng, rng.choice(NOUNS), max_adjs=1)
        core_children.append(_node("PP", prep, pp_np))

    period = builder.add(".", ".", "O")
    if prefix_verb is not None:
        core = _node("S", *core_children)
        tree = _node("S", *prefix_children, _node("VP", prefix_verb, _node("SBAR", core)), period)
    else:
        tree = _node("S", *core_children, period)

    tokens = tuple(
        Token(word=w, pos=p, bio=b, index=i, func=f, frame=fr)
        for i, (w, p, b, f, fr) in enumerate(builder.rows)
    )
    return Sentence(tokens=tokens, sentence_id=sentence_id), tree


def generate_corpus(
    task: Task, n_sentences: int, seed: int
) -> tuple[list[Sentence], list[ParseTree]]:
    rng = random.Random(seed)
    sentences: list[Sentence] = []
    trees: list[ParseTree] = []
    for sid in range(n_sentences):
        sentence, tree = generate_sentence(rng, task, sid)
        sentences.append(sentence)
        trees.append(tree)
    return sentences, trees


def vector_file(sentences: list[Sentence], dim: int, seed: int) -> str:
    """Deterministic unit vectors for every word in the corpus."""
    vocab = sorted({t.word for s in sentences for t in s.tokens})
    lines = [f"{len(vocab)} {dim}"]
    for word in vocab:
        wrng = random.Random(f"{seed}:{word}")
        raw = [wrng.gauss(0.0, 1.0) for _ in range(dim)]
        norm = math.sqrt(sum(x * x for x in raw)) or 1.0
        lines.append(word + " " + " ".join(repr(x / norm) for x in raw))
    return "\n".join(lines) + "\n"
