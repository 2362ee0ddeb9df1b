"""Acceptance gate: one test per shipping criterion, each printing a
PASS/FAIL line and holding to a wall-clock budget.

Run with `pytest tests/test_acceptance.py -v -s` to see the lines.
"""

import contextlib
import random
import time

import numpy as np

from partitive_srl.corpus import (
    Instance,
    Sentence,
    Token,
    extract_instance,
    parse_conll,
    write_conll,
)
from partitive_srl.embeddings import candidate_ngrams, load_vectors
from partitive_srl.encoding import EncodingMode, build_vocab
from partitive_srl.ensemble import (
    DecodeMode,
    EnsembleWeights,
    ScoreTable,
    combine,
    decode,
    fit_weights,
    read_scores,
    write_scores,
)
from partitive_srl.evaluation import f1_score, prf
from partitive_srl.features import (
    Task,
    collapse_bio_path,
    type2_path_flags,
)
from partitive_srl.model import fit_adaboost
from partitive_srl.parsetree import (
    align_leaves,
    parse_bracketed,
    read_trees,
    write_trees,
)
from partitive_srl.pipeline import (
    TABLE_ROW_LABELS,
    ablation_report,
    build_dataset,
    build_records,
    instances_for,
    make_context,
    table_rows,
)
from partitive_srl.synth import generate_corpus, vector_file


@contextlib.contextmanager
def criterion(name, budget_seconds):
    start = time.monotonic()
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE FAIL: {name}")
        raise
    elapsed = time.monotonic() - start
    if elapsed >= budget_seconds:
        print(f"ACCEPTANCE FAIL: {name} (took {elapsed:.2f}s of {budget_seconds}s)")
        raise AssertionError(f"{name}: {elapsed:.2f}s over the {budget_seconds}s budget")
    print(f"ACCEPTANCE PASS: {name} ({elapsed:.2f}s, budget {budget_seconds}s)")


def _sentence(rows, sentence_id=0):
    tokens = tuple(
        Token(word=w, pos=p, bio=b, index=i) for i, (w, p, b) in enumerate(rows)
    )
    return Sentence(tokens=tokens, sentence_id=sentence_id)


def test_criterion_f1_arithmetic():
    with criterion("reported-score arithmetic", 1.0):
        assert abs(f1_score(83.33, 51.72) - 63.83) <= 0.02
        assert abs(f1_score(93.59, 74.51) - 82.95) <= 0.05


def test_criterion_collapsed_paths():
    pie = _sentence(
        [
            ("He", "PRP", "B-NP"),
            ("ate", "VBD", "O"),
            ("20", "CD", "B-NP"),
            ("%", "NN", "I-NP"),
            ("of", "IN", "B-PP"),
            ("the", "DT", "B-NP"),
            ("pie", "NN", "I-NP"),
            (".", ".", "O"),
        ]
    )
    figure = _sentence(
        [
            ("Output", "NN", "B-NP"),
            ("in", "IN", "B-PP"),
            ("the", "DT", "B-NP"),
            ("mines", "NNS", "I-NP"),
            ("rose", "VBD", "O"),
            ("5", "CD", "B-NP"),
            ("percent", "NN", "I-NP"),
            (".", ".", "O"),
        ]
    )
    with criterion("chunk-collapsed surface paths", 1.0):
        assert collapse_bio_path(pie, 3, 6) == "right_NP_PP_of_NP_NOUN"
        assert collapse_bio_path(figure, 6, 0) == "left_NP_PP_in_NP_O-rose_NP_NOUN"


def test_criterion_tree_path_flags():
    rise_tree = parse_bracketed(
        "(S (NP (DT The) (NN price)) (VP (VBD rose) (NP (CD five) (NN percent))))"
    )
    rise_sent = _sentence(
        [
            ("The", "DT", "B-NP"),
            ("price", "NN", "I-NP"),
            ("rose", "VBD", "O"),
            ("five", "CD", "B-NP"),
            ("percent", "NN", "I-NP"),
        ]
    )
    rise = Instance(
        sentence_id=0, predicate_index=4, support_indices=(2,),
        arg1_index=1, frame_classes=frozenset(),
    )
    raise_tree = parse_bracketed(
        "(S (NP (PRP They)) (VP (VBD increased) (NP (DT the) (NN price))"
        " (NP (CD five) (NN percent))))"
    )
    raise_sent = _sentence(
        [
            ("They", "PRP", "B-NP"),
            ("increased", "VBD", "O"),
            ("the", "DT", "B-NP"),
            ("price", "NN", "I-NP"),
            ("five", "CD", "B-NP"),
            ("percent", "NN", "I-NP"),
        ]
    )
    raised = Instance(
        sentence_id=0, predicate_index=5, support_indices=(1,),
        arg1_index=3, frame_classes=frozenset(),
    )
    leaders_tree = parse_bracketed("(NP (NP (DT the) (NN industry)) (NN leaders))")
    leaders_sent = _sentence(
        [("the", "DT", "B-NP"), ("industry", "NN", "I-NP"),
         ("leaders", "NNS", "I-NP")]
    )
    leaders = Instance(
        sentence_id=0, predicate_index=2, support_indices=(),
        arg1_index=1, frame_classes=frozenset({"GROUP"}),
    )
    with criterion("parse-path pattern flags", 1.0):
        tree = align_leaves(rise_tree, rise_sent)
        assert type2_path_flags(tree, rise, 1) == (True, False, False)
        tree = align_leaves(raise_tree, raise_sent)
        assert type2_path_flags(tree, raised, 3) == (False, True, False)
        tree = align_leaves(leaders_tree, leaders_sent)
        assert type2_path_flags(tree, leaders, 1) == (False, False, True)


def test_criterion_candidate_ngrams():
    sent = _sentence(
        [
            ("The", "DT", "B-NP"),
            ("consumer", "NN", "I-NP"),
            ("price", "NN", "I-NP"),
            ("index", "NN", "I-NP"),
            ("rose", "VBD", "O"),
            ("five", "CD", "B-NP"),
            ("percent", "NN", "I-NP"),
            (".", ".", "O"),
        ]
    )
    with criterion("five candidate n-grams", 1.0):
        grams = candidate_ngrams(sent, 3)
        assert grams == {
            "back3": ("consumer", "price", "index"),
            "back2": ("price", "index"),
            "head": ("index",),
            "fwd2": ("index", "rose"),
            "fwd3": ("index", "rose", "five"),
        }


def _stump_oracle(X, y, w):
    """Best (error, feature, threshold) by exhaustive midpoint search."""
    n, d = X.shape
    best = None
    for f in range(d):
        values = sorted(set(X[:, f].tolist()))
        for a, b in zip(values, values[1:]):
            t = (a + b) / 2.0
            err_left_pos = sum(
                w[i] for i in range(n) if X[i, f] <= t and y[i] == 1
            )
            err_left_neg = sum(
                w[i] for i in range(n) if X[i, f] <= t and y[i] != 1
            )
            err_right_pos = sum(
                w[i] for i in range(n) if X[i, f] > t and y[i] == 1
            )
            err_right_neg = sum(
                w[i] for i in range(n) if X[i, f] > t and y[i] != 1
            )
            err = min(err_left_pos, err_left_neg) + min(err_right_pos, err_right_neg)
            cand = (err, f, t)
            if best is None or cand < best:
                best = cand
    return best


def _split_error(X, y, w, f, t):
    n = X.shape[0]
    lp = sum(w[i] for i in range(n) if X[i, f] <= t and y[i] == 1)
    ln = sum(w[i] for i in range(n) if X[i, f] <= t and y[i] != 1)
    rp = sum(w[i] for i in range(n) if X[i, f] > t and y[i] == 1)
    rn = sum(w[i] for i in range(n) if X[i, f] > t and y[i] != 1)
    return min(lp, ln) + min(rp, rn)


def test_criterion_weak_learner_oracle():
    rng = random.Random(1234)
    with criterion("weak-learner split oracle and loss descent", 30.0):
        checked = 0
        while checked < 50:
            n = rng.randint(2, 12)
            d = rng.randint(1, 4)
            if rng.random() < 0.5:
                X = np.array(
                    [[float(rng.randint(0, 3)) for _ in range(d)] for _ in range(n)]
                )
            else:
                X = np.array([[rng.uniform(-2, 2) for _ in range(d)] for _ in range(n)])
            y = np.array([rng.choice((1, -1)) for _ in range(n)], dtype=np.int64)
            if len(set(y.tolist())) < 2:
                continue
            checked += 1
            model = fit_adaboost(X, y, rounds=3, depth=1, seed=0)
            # replay the weight evolution and hold every round's stump to
            # the exhaustive-search optimum under the weights it saw
            w = np.full(n, 1.0 / n)
            node_err = min(w[y == 1].sum(), w[y != 1].sum())
            best = _stump_oracle(X, y, w.tolist())
            if not model.trees:
                # only legal when no split strictly improves on the node
                assert best is None or best[0] >= node_err - 1e-12
                continue
            for tree, alpha in zip(model.trees, model.alphas):
                best = _stump_oracle(X, y, w.tolist())
                assert tree.feature is not None
                chosen = _split_error(X, y, w.tolist(), tree.feature, tree.threshold)
                assert chosen <= best[0] + 1e-12
                h = tree.predict_batch(X).astype(np.float64)
                w = w * np.exp(-alpha * y * h)
                w = w / w.sum()

        # training loss must never rise over boosting rounds
        n = 60
        X = np.array([[rng.uniform(-1, 1) for _ in range(5)] for _ in range(n)])
        y = np.where(X[:, 0] + 0.3 * X[:, 1] > 0.1, 1, -1).astype(np.int64)
        model = fit_adaboost(X, y, rounds=10, depth=1, seed=0)
        margins = np.zeros(n)
        prev = np.mean(np.exp(-y * margins))
        for tree, alpha in zip(model.trees, model.alphas):
            margins = margins + alpha * tree.predict_batch(X).astype(np.float64)
            loss = np.mean(np.exp(-y * margins))
            assert loss <= prev + 1e-12
            prev = loss


def _argmax_f1(keys, scores, instances, sentences):
    table = ScoreTable.from_rows(zip(keys, np.asarray(scores).tolist()))
    predictions = decode(table, DecodeMode.ARGMAX)
    return prf(predictions, instances, sentences).f1


def test_criterion_synthetic_corpus_quality():
    with criterion("synthetic-corpus one-hot quality", 120.0):
        train_sents, train_trees = generate_corpus(Task.PERCENT, 500, seed=11)
        test_sents, test_trees = generate_corpus(Task.PERCENT, 100, seed=12)
        train_inst = instances_for(train_sents)
        test_inst = instances_for(test_sents)
        store = load_vectors(vector_file(train_sents + test_sents, dim=16, seed=11))
        groups = frozenset(
            {"window", "distance", "path", "class", "basic-embed", "slash-embed"}
        )
        ctx = make_context(
            Task.PERCENT, train_sents, train_inst, train_trees, store, groups
        )
        test_ctx = make_context(
            Task.PERCENT, train_sents, train_inst, test_trees, store, groups,
            profile=ctx.profile,
        )
        records, _, y = build_records(train_sents, train_inst, ctx, groups)
        results = {}
        for mode in (EncodingMode.ONEHOT, EncodingMode.ORDINAL):
            vocab = build_vocab(records, mode)
            from partitive_srl.encoding import vectorize_all

            X = vectorize_all(records, vocab)
            model = fit_adaboost(X, y, rounds=80, depth=2, seed=0)
            test_set = build_dataset(test_sents, test_inst, test_ctx, groups, vocab)
            scores = model.score_batch(test_set.X)
            results[mode] = _argmax_f1(test_set.keys, scores, test_inst, test_sents)
        assert results[EncodingMode.ONEHOT] >= results[EncodingMode.ORDINAL]
        assert results[EncodingMode.ONEHOT] >= 90.0


def test_criterion_ensemble_recovers_cleaner_view():
    with criterion("ensemble weighting favors the cleaner view", 60.0):
        train_sents, train_trees = generate_corpus(Task.PERCENT, 200, seed=31)
        dev_sents, dev_trees = generate_corpus(Task.PERCENT, 60, seed=32)
        train_inst = instances_for(train_sents)
        dev_inst = instances_for(dev_sents)
        groups = frozenset({"window", "distance", "path", "class"})
        ctx = make_context(
            Task.PERCENT, train_sents, train_inst, train_trees, None, groups
        )
        dev_ctx = make_context(
            Task.PERCENT, train_sents, train_inst, dev_trees, None, groups
        )
        records, _, y = build_records(train_sents, train_inst, ctx, groups)
        vocab = build_vocab(records, EncodingMode.ONEHOT)
        from partitive_srl.encoding import vectorize_all

        model = fit_adaboost(
            vectorize_all(records, vocab), y, rounds=40, depth=2, seed=0
        )
        dev = build_dataset(dev_sents, dev_inst, dev_ctx, groups, vocab)
        a_scores = model.score_batch(dev.X)
        table_a = ScoreTable.from_rows(zip(dev.keys, a_scores.tolist()), source="a")
        rng = random.Random(99)
        b_rows = []
        for key, a in sorted(table_a.rows.items()):
            b_rows.append((key, 0.5 * a + 0.5 * rng.random()))
        table_b = ScoreTable.from_rows(b_rows, source="b")

        weights = fit_weights(table_a, table_b, list(zip(dev_sents, dev_inst)))
        assert weights.w_a >= 0.7
        blended = combine(table_a, table_b, weights)
        f1_blend = prf(
            decode(blended, DecodeMode.ARGMAX), dev_inst, dev_sents
        ).f1
        f1_b = prf(
            decode(table_b, DecodeMode.ARGMAX), dev_inst, dev_sents
        ).f1
        assert f1_blend >= f1_b


def test_criterion_round_trips():
    with criterion("corpus, tree, and score round-trips", 30.0):
        sentences, trees = generate_corpus(Task.PARTITIVE, 100, seed=77)
        text = write_conll(sentences)
        assert write_conll(parse_conll(text)) == text
        tree_text = write_trees(trees)
        assert write_trees(read_trees(tree_text)) == tree_text
        for worked in (
            "(S (NP (DT The) (NN price)) (VP (VBD rose)"
            " (NP (CD five) (NN percent))))",
            "(S (NP (PRP They)) (VP (VBD increased) (NP (DT the) (NN price))"
            " (NP (CD five) (NN percent))))",
        ):
            from partitive_srl.parsetree import print_tree

            assert print_tree(parse_bracketed(worked)) == worked
        rng = random.Random(7)
        table = ScoreTable.from_rows(
            (((sid, tidx), rng.random()) for sid in range(5) for tidx in range(8))
        )
        score_text = write_scores(table)
        again = read_scores(score_text)
        assert again.rows == table.rows
        assert write_scores(again) == score_text


_PREP_POOL = (
    "sales", "profits", "exports", "imports",
    "shipments", "revenues", "orders", "earnings",
)


def _prep_corpus(n_sentences, seed):
    """Sentences where only the far-away preposition decides the label.

    The candidates sit at fixed positions 0 and 2; the of/for preposition
    sits three tokens past the second candidate, outside every candidate's
    two-token window, and candidate distances never vary.  Surface paths
    pass through the PP and pick up its head word.
    """
    rng = random.Random(seed)
    blocks = []
    for _ in range(n_sentences):
        n1, n2 = rng.sample(_PREP_POOL, 2)
        prep = rng.choice(("of", "for"))
        arg1 = 0 if prep == "of" else 2
        rows = [
            (n1, "NN", "B-NP", "ARG1" if arg1 == 0 else "", ""),
            ("or", "CC", "O", "", ""),
            (n2, "NN", "B-NP", "ARG1" if arg1 == 2 else "", ""),
            ("taken", "VBN", "B-VP", "", ""),
            ("together", "RB", "O", "", ""),
            (prep, "IN", "B-PP", "", ""),
            ("the", "DT", "B-NP", "", ""),
            ("seven", "CD", "I-NP", "", ""),
            ("big", "JJ", "I-NP", "", ""),
            ("mills", "NNS", "I-NP", "", ""),
            ("rose", "VBD", "B-VP", "SUP", ""),
            ("five", "CD", "B-NP", "", ""),
            ("percent", "NN", "I-NP", "PRED", "PART"),
            (".", ".", "O", "", ""),
        ]
        blocks.append(
            "\n".join(
                f"{w}\t{p}\t{b}\t{i}\t{f}\t{fr}"
                for i, (w, p, b, f, fr) in enumerate(rows)
            )
        )
    return parse_conll("\n\n".join(blocks) + "\n")


def test_criterion_ablation_table():
    with criterion("ablation rows and path contribution", 120.0):
        train = _prep_corpus(80, seed=5)
        dev = _prep_corpus(40, seed=6)
        rows = table_rows(("window", "distance", "path", "class"))
        results = ablation_report(
            rows,
            Task.PERCENT,
            train,
            dev,
            EncodingMode.ONEHOT,
            rounds=40,
            depth=2,
            seed=0,
            decode_mode="argmax",
        )
        labels = tuple(label for label, _ in results)
        assert labels == TABLE_ROW_LABELS
        scores = {label: prf_scores.f1 for label, prf_scores in results}
        assert scores["All"] > scores["All but Path"]
