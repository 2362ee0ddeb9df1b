"""Command-line interface.

Subcommands: validate, featurize, train, predict, gridsearch,
ensemble-fit, ensemble-apply, evaluate, ablate, importances, synth.

Exit codes: 0 on success, 1 on validation errors (bad input data or
artifacts), 2 on usage errors.  Shared knobs resolve as command-line
flags first, then the JSON file named by the SRL_CONFIG environment
variable, then built-in defaults.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import corpus as corpus_io
from . import encoding as encoding_io
from . import ensemble as ensemble_io
from . import evaluation
from . import parsetree as tree_io
from . import pipeline, synth
from .embeddings import load_profile, load_vectors, save_profile
from .errors import SrlError
from .features import Task
from .model import (
    GridSpec,
    feature_importances,
    grid_search,
    model_from_json,
    model_to_json,
)

DEFAULTS = {
    "seed": 0,
    "rounds": 200,
    "depth": 2,
    "shrinkage": 1.0,
    "tau": 0.5,
    "encoding": "onehot",
    "decode": "threshold",
    "dim": 16,
}


def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8") as handle:
        return handle.read()


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(text)


def _resolve_config(args: argparse.Namespace) -> None:
    """Fill knobs left unset on the command line from SRL_CONFIG, then defaults."""
    config = {}
    config_path = os.environ.get("SRL_CONFIG")
    if config_path:
        try:
            config = json.loads(_read(config_path))
        except (OSError, json.JSONDecodeError) as exc:
            raise SrlError(f"bad SRL_CONFIG file {config_path}: {exc}") from None
        if not isinstance(config, dict):
            raise SrlError(f"SRL_CONFIG file {config_path} must hold a JSON object")
    for key, fallback in DEFAULTS.items():
        if getattr(args, key, None) is None and hasattr(args, key):
            value = config.get(key, fallback)
            setattr(args, key, type(fallback)(value))


def _load_corpus(path: str):
    sentences = corpus_io.parse_conll(_read(path))
    instances = [corpus_io.extract_instance(s) for s in sentences]
    return sentences, instances


def _load_trees(path: str, sentences):
    trees = tree_io.read_trees(_read(path))
    if len(trees) != len(sentences):
        raise SrlError(
            f"{path}: {len(trees)} trees for {len(sentences)} sentences"
        )
    return [tree_io.align_leaves(t, s) for t, s in zip(trees, sentences)]


def _groups_from_args(args, store) -> frozenset[str]:
    if getattr(args, "groups", None):
        return pipeline.expand_groups(args.groups.split(","))
    groups = {"window", "distance", "path", "class"}
    if store is not None:
        groups.update(("basic-embed", "slash-embed"))
    return frozenset(groups)


def _context_for(args, sentences, instances, task, profile=None):
    store = load_vectors(_read(args.vectors)) if getattr(args, "vectors", None) else None
    trees = _load_trees(args.trees, sentences) if getattr(args, "trees", None) else None
    groups = _groups_from_args(args, store)
    ctx = pipeline.make_context(
        task, sentences, instances, trees, store, groups, profile=profile
    )
    return ctx, groups, store


def _model_bundle(model, vocab, profile) -> str:
    model.metadata = dict(model.metadata)
    model.metadata["vocab"] = encoding_io.save_vocab(vocab)
    model.metadata["profile"] = save_profile(profile) if profile is not None else None
    return model_to_json(model)


def _read_model_bundle(path: str):
    model = model_from_json(_read(path))
    meta = model.metadata
    if "vocab" not in meta:
        raise SrlError(f"{path}: model file has no embedded vocabulary")
    vocab = encoding_io.load_vocab(meta["vocab"])
    profile = load_profile(meta["profile"]) if meta.get("profile") else None
    task = Task(meta["task"])
    groups = frozenset(meta["groups"])
    return model, vocab, profile, task, groups


def cmd_validate(args) -> int:
    sentences, instances = _load_corpus(args.conll)
    n_tokens = sum(len(s) for s in sentences)
    message = f"OK: {len(sentences)} sentences, {n_tokens} tokens"
    if args.trees:
        _load_trees(args.trees, sentences)
        message += f", {len(sentences)} aligned trees"
    print(message)
    return 0


def cmd_synth(args) -> int:
    task = Task(args.task)
    sentences, trees = synth.generate_corpus(task, args.sentences, args.seed)
    _write(args.out_conll, corpus_io.write_conll(sentences))
    if args.out_trees:
        # alignment sanity check before anything consumes these
        for tree, sentence in zip(trees, sentences):
            tree_io.align_leaves(tree, sentence)
        _write(args.out_trees, tree_io.write_trees(trees))
    if args.out_vectors:
        _write(args.out_vectors, synth.vector_file(sentences, args.dim, args.seed))
    print(f"wrote {len(sentences)} sentences to {args.out_conll}")
    return 0


def cmd_featurize(args) -> int:
    task = Task(args.task)
    sentences, instances = _load_corpus(args.conll)
    profile = load_profile(_read(args.profile)) if args.profile else None
    ctx, groups, _ = _context_for(args, sentences, instances, task, profile=profile)
    records, keys, _ = pipeline.build_records(sentences, instances, ctx, groups)
    blocks = []
    for (sid, tidx), record in zip(keys, records):
        lines = [f"# sentence {sid} token {tidx}"]
        lines.extend(record.dump_lines())
        blocks.append("\n".join(lines))
    text = "\n\n".join(blocks) + "\n"
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_train(args) -> int:
    task = Task(args.task)
    sentences, instances = _load_corpus(args.conll)
    ctx, groups, _ = _context_for(args, sentences, instances, task)
    model, vocab = pipeline.train_model(
        task,
        sentences,
        instances,
        ctx,
        groups,
        encoding_io.EncodingMode(args.encoding),
        rounds=args.rounds,
        depth=args.depth,
        shrinkage=args.shrinkage,
        seed=args.seed,
        class_balanced=args.class_balanced,
    )
    _write(args.out, _model_bundle(model, vocab, ctx.profile))
    if args.out_vocab:
        _write(args.out_vocab, encoding_io.save_vocab(vocab))
    if args.out_profile:
        if ctx.profile is None:
            raise SrlError("no embedding profile was fitted; pass --vectors")
        _write(args.out_profile, save_profile(ctx.profile))
    print(f"trained {len(model.trees)} rounds, wrote {args.out}")
    return 0


def cmd_predict(args) -> int:
    model, vocab, profile, task, groups = _read_model_bundle(args.model)
    sentences, instances = _load_corpus(args.conll)
    store = load_vectors(_read(args.vectors)) if args.vectors else None
    trees = _load_trees(args.trees, sentences) if args.trees else None
    if groups & {"basic-embed", "slash-embed"}:
        if store is None:
            raise SrlError("model uses embedding features; pass --vectors")
        if profile is None:
            raise SrlError("model bundle is missing its embedding profile")
    if "path" in groups and any(
        name.startswith("path1") for name in vocab.cat_names
    ) and trees is None:
        raise SrlError("model uses tree-path flags; pass --trees")
    ctx = pipeline.FeatureContext(task=task, trees=trees, store=store, profile=profile)
    dataset = pipeline.build_dataset(sentences, instances, ctx, groups, vocab)
    scores = model.score_batch(dataset.X)
    table = ensemble_io.ScoreTable.from_rows(
        zip(dataset.keys, scores.tolist()), source="feature-model"
    )
    _write(args.out, ensemble_io.write_scores(table))
    print(f"scored {len(table)} tokens, wrote {args.out}")
    return 0


def cmd_gridsearch(args) -> int:
    task = Task(args.task)
    train_sentences, train_instances = _load_corpus(args.conll)
    dev_sentences, dev_instances = _load_corpus(args.dev_conll)
    ctx, groups, store = _context_for(args, train_sentences, train_instances, task)
    dev_trees = (
        _load_trees(args.dev_trees, dev_sentences) if args.dev_trees else None
    )
    records, _, y = pipeline.build_records(train_sentences, train_instances, ctx, groups)
    vocab = encoding_io.build_vocab(records, encoding_io.EncodingMode(args.encoding))
    train_set = pipeline.build_dataset(train_sentences, train_instances, ctx, groups, vocab)
    dev_ctx = pipeline.FeatureContext(
        task=task, trees=dev_trees, store=store, profile=ctx.profile
    )
    dev_set = pipeline.build_dataset(dev_sentences, dev_instances, dev_ctx, groups, vocab)
    spec = GridSpec(
        rounds=tuple(int(x) for x in args.rounds_grid.split(",")),
        depths=tuple(int(x) for x in args.depth_grid.split(",")),
        shrinkages=tuple(float(x) for x in args.shrinkage_grid.split(",")),
    )
    model, report = grid_search(
        spec,
        train_set,
        dev_set,
        seed=args.seed,
        tau=args.tau,
        decode_mode=args.decode,
    )
    model.metadata = {
        "task": task.value,
        "groups": sorted(groups),
        "encoding": args.encoding,
    }
    _write(args.out, _model_bundle(model, vocab, ctx.profile))
    lines = ["rounds,depth,shrinkage,precision,recall,f1"]
    for row in report:
        lines.append(
            f"{row['rounds']},{row['depth']},{row['shrinkage']},"
            f"{row['precision']:.2f},{row['recall']:.2f},{row['f1']:.2f}"
        )
    if args.report_out:
        _write(args.report_out, "\n".join(lines) + "\n")
    best = max(report, key=lambda r: r["f1"])
    print(
        f"best dev f1 {best['f1']:.2f}, wrote {args.out}"
    )
    return 0


def cmd_ensemble_fit(args) -> int:
    scores_a = ensemble_io.read_scores(_read(args.scores_a), source="A")
    scores_b = ensemble_io.read_scores(_read(args.scores_b), source="B")
    sentences, instances = _load_corpus(args.gold)
    weights = ensemble_io.fit_weights(
        scores_a, scores_b, list(zip(sentences, instances))
    )
    _write(args.out, ensemble_io.weights_to_json(weights))
    print(f"fitted w_a={weights.w_a:.2f}, wrote {args.out}")
    return 0


def cmd_ensemble_apply(args) -> int:
    scores_a = ensemble_io.read_scores(_read(args.scores_a), source="A")
    scores_b = ensemble_io.read_scores(_read(args.scores_b), source="B")
    weights = ensemble_io.weights_from_json(_read(args.weights))
    combined = ensemble_io.combine(scores_a, scores_b, weights)
    _write(args.out, ensemble_io.write_scores(combined))
    print(f"combined {len(combined)} scores, wrote {args.out}")
    return 0


def cmd_evaluate(args) -> int:
    sentences, instances = _load_corpus(args.gold)
    table = ensemble_io.read_scores(_read(args.scores))
    predictions = ensemble_io.decode(
        table, ensemble_io.DecodeMode(args.mode), tau=args.tau
    )
    scores = evaluation.prf(predictions, instances, sentences)
    rows = [("overall", scores)]
    text = evaluation.format_prf_table(rows)
    sys.stdout.write(text)
    if args.report_out:
        _write(args.report_out, text)
    if args.csv_out:
        _write(args.csv_out, evaluation.prf_table_csv(rows))
    return 0


def cmd_ablate(args) -> int:
    task = Task(args.task)
    train_sentences, _ = _load_corpus(args.train_conll)
    dev_sentences, _ = _load_corpus(args.dev_conll)
    store = load_vectors(_read(args.vectors)) if args.vectors else None
    train_trees = (
        _load_trees(args.train_trees, train_sentences) if args.train_trees else None
    )
    dev_trees = _load_trees(args.dev_trees, dev_sentences) if args.dev_trees else None
    groups = _groups_from_args(args, store)
    rows = pipeline.table_rows(groups)
    results = pipeline.ablation_report(
        rows,
        task,
        train_sentences,
        dev_sentences,
        encoding_io.EncodingMode(args.encoding),
        train_trees=train_trees,
        dev_trees=dev_trees,
        store=store,
        rounds=args.rounds,
        depth=args.depth,
        shrinkage=args.shrinkage,
        seed=args.seed,
        tau=args.tau,
        decode_mode=args.decode,
    )
    text = evaluation.format_prf_table(results)
    sys.stdout.write(text)
    if args.out:
        _write(args.out, text)
    if args.csv_out:
        _write(args.csv_out, evaluation.prf_table_csv(results))
    return 0


def cmd_importances(args) -> int:
    model, vocab, _, _, _ = _read_model_bundle(args.model)
    ranked = feature_importances(model, vocab.column_names())
    if args.top:
        ranked = ranked[: args.top]
    lines = [f"{name}\t{value!r}" for name, value in ranked]
    text = "\n".join(lines) + "\n"
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def _add_shared_training_flags(parser) -> None:
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--rounds", type=int, default=None)
    parser.add_argument("--depth", type=int, default=None)
    parser.add_argument("--shrinkage", type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="partitive-srl",
        description="Find ARG1 arguments of partitive noun predicates.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a CONLL file (and optional trees)")
    p.add_argument("--conll", required=True)
    p.add_argument("--trees")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("synth", help="generate a seeded synthetic corpus")
    p.add_argument("--task", choices=[t.value for t in Task], required=True)
    p.add_argument("--sentences", type=int, required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--out-conll", required=True)
    p.add_argument("--out-trees")
    p.add_argument("--out-vectors")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("featurize", help="dump feature records as name=value lines")
    p.add_argument("--task", choices=[t.value for t in Task], required=True)
    p.add_argument("--conll", required=True)
    p.add_argument("--trees")
    p.add_argument("--vectors")
    p.add_argument("--profile")
    p.add_argument("--groups")
    p.add_argument("--out")
    p.set_defaults(func=cmd_featurize)

    p = sub.add_parser("train", help="train the boosted-tree scorer")
    p.add_argument("--task", choices=[t.value for t in Task], required=True)
    p.add_argument("--conll", required=True)
    p.add_argument("--trees")
    p.add_argument("--vectors")
    p.add_argument("--groups")
    p.add_argument("--encoding", choices=["ordinal", "onehot"], default=None)
    p.add_argument("--class-balanced", action="store_true")
    p.add_argument("--out", required=True)
    p.add_argument("--out-vocab")
    p.add_argument("--out-profile")
    _add_shared_training_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="score every token with a trained model")
    p.add_argument("--conll", required=True)
    p.add_argument("--trees")
    p.add_argument("--vectors")
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("gridsearch", help="pick hyperparameters on a dev set")
    p.add_argument("--task", choices=[t.value for t in Task], required=True)
    p.add_argument("--conll", required=True)
    p.add_argument("--trees")
    p.add_argument("--dev-conll", required=True)
    p.add_argument("--dev-trees")
    p.add_argument("--vectors")
    p.add_argument("--groups")
    p.add_argument("--encoding", choices=["ordinal", "onehot"], default=None)
    p.add_argument("--rounds-grid", required=True)
    p.add_argument("--depth-grid", required=True)
    p.add_argument("--shrinkage-grid", required=True)
    p.add_argument("--tau", type=float, default=None)
    p.add_argument("--decode", choices=["threshold", "argmax"], default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--report-out")
    p.set_defaults(func=cmd_gridsearch)

    p = sub.add_parser("ensemble-fit", help="fit convex blend weights on a dev set")
    p.add_argument("--scores-a", required=True)
    p.add_argument("--scores-b", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ensemble_fit)

    p = sub.add_parser("ensemble-apply", help="blend two score tables")
    p.add_argument("--scores-a", required=True)
    p.add_argument("--scores-b", required=True)
    p.add_argument("--weights", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ensemble_apply)

    p = sub.add_parser("evaluate", help="P/R/F1 of a score table against gold")
    p.add_argument("--gold", required=True)
    p.add_argument("--scores", required=True)
    p.add_argument("--mode", choices=["threshold", "argmax"], default="threshold")
    p.add_argument("--tau", type=float, default=None)
    p.add_argument("--report-out")
    p.add_argument("--csv-out")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("ablate", help="retrain with feature groups removed")
    p.add_argument("--task", choices=[t.value for t in Task], required=True)
    p.add_argument("--train-conll", required=True)
    p.add_argument("--dev-conll", required=True)
    p.add_argument("--train-trees")
    p.add_argument("--dev-trees")
    p.add_argument("--vectors")
    p.add_argument("--groups")
    p.add_argument("--encoding", choices=["ordinal", "onehot"], default=None)
    p.add_argument("--tau", type=float, default=None)
    p.add_argument("--decode", choices=["threshold", "argmax"], default=None)
    p.add_argument("--out")
    p.add_argument("--csv-out")
    _add_shared_training_flags(p)
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("importances", help="rank encoded features by importance")
    p.add_argument("--model", required=True)
    p.add_argument("--top", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_importances)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _resolve_config(args)
        return args.func(args)
    except SrlError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
