"""Assembling per-token datasets out of the individual feature families.

Feature groups:

    window      word/POS/BIO in a two-token window
    distance    signed token distance to the predicate and support verb
    path        chunk-collapsed surface paths and, when trees are given,
                the three fixed tree-path pattern flags
    class       predicate sense classes (partitive task only)
    basic-embed cosine features of the candidate n-grams
    slash-embed cosine features of the sentence-minus-n-gram embeddings

"embed" is accepted as shorthand for both embedding groups.  The same
group set must be used to featurize training and evaluation data.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import Instance, Sentence, extract_instance
from .embeddings import AverageProfile, VectorStore, cosine_features, fit_averages
from .encoding import Vocabulary, vectorize_all
from .errors import FeatureError
from .features import (
    FeatureRecord,
    Task,
    collapse_bio_path,
    predicate_class_features,
    token_distance,
    type2_path_flags,
    window_features,
)
from .model import BoostModel, Dataset, fit_adaboost
from .parsetree import ParseTree

FEATURE_GROUPS = (
    "window",
    "distance",
    "path",
    "class",
    "basic-embed",
    "slash-embed",
)

# sentinel categories for degenerate path positions
SELF_PATH = "<SELF>"
NO_SUPPORT_PATH = "<NONE>"

TABLE_ROW_LABELS = (
    "All",
    "N-gram Only",
    "All but Path",
    "All but Embed",
    "All but Basic Embed",
    "All but Slash Embed",
)


def expand_groups(groups) -> frozenset[str]:
    """Validate group names and expand the "embed" shorthand."""
    expanded: set[str] = set()
    for group in groups:
        if group == "embed":
            expanded.update(("basic-embed", "slash-embed"))
        elif group in FEATURE_GROUPS:
            expanded.add(group)
        else:
            raise FeatureError(f"unknown feature group {group!r}")
    if not expanded:
        raise FeatureError("empty feature group set")
    return frozenset(expanded)


def table_rows(all_groups) -> list[tuple[str, frozenset[str]]]:
    """The six standard ablation rows over whatever groups are active.

    "All but Path" removes the distance features too; the surface paths
    and token distances travel together as path-type information.
    """
    base = expand_groups(all_groups)
    embeds = {"basic-embed", "slash-embed"}
    rows = [
        ("All", base),
        ("N-gram Only", base & {"window"}),
        ("All but Path", base - {"path", "distance"}),
        ("All but Embed", base - embeds),
        ("All but Basic Embed", base - {"basic-embed"}),
        ("All but Slash Embed", base - {"slash-embed"}),
    ]
    return [(label, frozenset(groups)) for label, groups in rows]


@dataclass
class FeatureContext:
    """Everything needed to featurize one corpus consistently."""

    task: Task
    trees: list[ParseTree] | None = None
    store: VectorStore | None = None
    profile: AverageProfile | None = None

    def tree_for(self, sentence_id: int) -> ParseTree | None:
        if self.trees is None:
            return None
        return self.trees[sentence_id]


def build_record(
    sentence: Sentence,
    instance: Instance,
    idx: int,
    ctx: FeatureContext,
    groups: frozenset[str],
) -> FeatureRecord:
    record = FeatureRecord()
    if "window" in groups:
        record = record.merge(window_features(sentence, idx))
    if "distance" in groups:
        sups = instance.support_indices
        record = record.merge(
            FeatureRecord(
                numeric={
                    "dist_pred": float(token_distance(idx, instance.predicate_index)),
                    # no support verb leaves the distance at the neutral 0
                    "dist_sup": float(token_distance(idx, sups[0])) if sups else 0.0,
                }
            )
        )
    if "path" in groups:
        cats: dict[str, str] = {}
        pred = instance.predicate_index
        cats["path_pred"] = (
            SELF_PATH if idx == pred else collapse_bio_path(sentence, pred, idx)
        )
        sups = instance.support_indices
        if not sups:
            cats["path_sup"] = NO_SUPPORT_PATH
        elif idx == sups[0]:
            cats["path_sup"] = SELF_PATH
        else:
            cats["path_sup"] = collapse_bio_path(sentence, sups[0], idx)
        tree = ctx.tree_for(sentence.sentence_id)
        if tree is not None:
            flag1, flag2, flag3 = type2_path_flags(tree, instance, idx)
            cats["path1"] = "1" if flag1 else "0"
            cats["path2"] = "1" if flag2 else "0"
            cats["path3"] = "1" if flag3 else "0"
        record = record.merge(FeatureRecord(categorical=cats))
    if "class" in groups:
        record = record.merge(predicate_class_features(instance, ctx.task))
    wants_basic = "basic-embed" in groups
    wants_slash = "slash-embed" in groups
    if wants_basic or wants_slash:
        if ctx.store is None or ctx.profile is None:
            raise FeatureError("embedding groups need a vector store and profile")
        embeds = cosine_features(sentence, idx, ctx.profile, ctx.store)
        numeric = {
            name: value
            for name, value in embeds.numeric.items()
            if (name.startswith("embed_") and wants_basic)
            or (name.startswith("slash_") and wants_slash)
        }
        record = record.merge(FeatureRecord(numeric=numeric))
    return record


def build_records(
    sentences: list[Sentence],
    instances: list[Instance],
    ctx: FeatureContext,
    groups: frozenset[str],
) -> tuple[list[FeatureRecord], list[tuple[int, int]], np.ndarray]:
    """Feature records for every token of every sentence, with keys and labels."""
    records: list[FeatureRecord] = []
    keys: list[tuple[int, int]] = []
    labels: list[int] = []
    for sentence, instance in zip(sentences, instances):
        for tok in sentence.tokens:
            records.append(build_record(sentence, instance, tok.index, ctx, groups))
            keys.append((sentence.sentence_id, tok.index))
            labels.append(1 if instance.arg1_index == tok.index else 0)
    return records, keys, np.array(labels, dtype=np.int8)


def make_context(
    task: Task,
    train_sentences: list[Sentence],
    train_instances: list[Instance],
    trees: list[ParseTree] | None,
    store: VectorStore | None,
    groups: frozenset[str],
    profile: AverageProfile | None = None,
) -> FeatureContext:
    """Build a feature context, fitting the embedding profile if needed."""
    needs_embed = groups & {"basic-embed", "slash-embed"}
    if needs_embed and store is not None and profile is None:
        profile = fit_averages(zip(train_sentences, train_instances), store)
    return FeatureContext(task=task, trees=trees, store=store, profile=profile)


def build_dataset(
    sentences: list[Sentence],
    instances: list[Instance],
    ctx: FeatureContext,
    groups: frozenset[str],
    vocab: Vocabulary,
) -> Dataset:
    records, keys, y = build_records(sentences, instances, ctx, groups)
    X = vectorize_all(records, vocab)
    return Dataset(keys=keys, X=X, y=y, sentences=sentences, instances=instances)


def instances_for(sentences: list[Sentence]) -> list[Instance]:
    return [extract_instance(s) for s in sentences]


def ablation_report(
    rows,
    task: Task,
    train_sentences: list[Sentence],
    dev_sentences: list[Sentence],
    encoding_mode,
    train_trees: list[ParseTree] | None = None,
    dev_trees: list[ParseTree] | None = None,
    store: VectorStore | None = None,
    rounds: int = 200,
    depth: int = 2,
    shrinkage: float = 1.0,
    seed: int = 0,
    tau: float = 0.5,
    decode_mode: str = "threshold",
):
    """Train one model per row mask with identical hyperparameters.

    rows is an ordered sequence of (label, group set); table_rows() builds
    the standard six.  Returns a list of (label, PrfScores).
    """
    from .encoding import build_vocab
    from .ensemble import DecodeMode, ScoreTable, decode
    from .evaluation import prf

    train_instances = instances_for(train_sentences)
    dev_instances = instances_for(dev_sentences)
    results = []
    for label, groups in rows:
        groups = expand_groups(groups)
        train_ctx = make_context(
            task, train_sentences, train_instances, train_trees, store, groups
        )
        dev_ctx = FeatureContext(
            task=task, trees=dev_trees, store=store, profile=train_ctx.profile
        )
        records, _, y = build_records(train_sentences, train_instances, train_ctx, groups)
        vocab = build_vocab(records, encoding_mode)
        X = vectorize_all(records, vocab)
        model = fit_adaboost(
            X, y, rounds=rounds, depth=depth, shrinkage=shrinkage, seed=seed
        )
        dev = build_dataset(dev_sentences, dev_instances, dev_ctx, groups, vocab)
        scores = model.score_batch(dev.X)
        table = ScoreTable.from_rows(zip(dev.keys, scores.tolist()), source=label)
        predictions = decode(table, DecodeMode(decode_mode), tau=tau)
        results.append((label, prf(predictions, dev_instances, dev_sentences)))
    return results


def train_model(
    task: Task,
    sentences: list[Sentence],
    instances: list[Instance],
    ctx: FeatureContext,
    groups: frozenset[str],
    encoding_mode,
    rounds: int = 200,
    depth: int = 2,
    shrinkage: float = 1.0,
    seed: int = 0,
    class_balanced: bool = False,
) -> tuple[BoostModel, Vocabulary]:
    """Featurize, build the vocabulary, and fit the booster."""
    from .encoding import build_vocab

    records, _, y = build_records(sentences, instances, ctx, groups)
    vocab = build_vocab(records, encoding_mode)
    X = vectorize_all(records, vocab)
    model = fit_adaboost(
        X,
        y,
        rounds=rounds,
        depth=depth,
        shrinkage=shrinkage,
        seed=seed,
        class_balanced=class_balanced,
    )
    model.metadata = {
        "task": task.value,
        "groups": sorted(groups),
        "encoding": encoding_mode.value,
    }
    return model, vocab
