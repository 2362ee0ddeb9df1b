"""Vocabulary building, ordinal and one-hot vectorization, persistence."""

import random

import numpy as np
import pytest

from partitive_srl.encoding import (
    EncodingMode,
    build_vocab,
    load_vocab,
    save_vocab,
    vectorize,
    vectorize_all,
)
from partitive_srl.errors import EncodingError
from partitive_srl.features import FeatureRecord


def _rec(color, shape, score):
    return FeatureRecord(
        categorical={"color": color, "shape": shape}, numeric={"score": score}
    )


TRAIN = [
    _rec("red", "round", 0.5),
    _rec("blue", "round", -1.0),
    _rec("red", "square", 2.0),
]


class TestBuildVocab:
    def test_first_seen_order(self):
        vocab = build_vocab(TRAIN, EncodingMode.ORDINAL)
        assert vocab.cat_names == ("color", "shape")
        assert vocab.categories["color"] == ("red", "blue")
        assert vocab.categories["shape"] == ("round", "square")
        assert vocab.num_names == ("score",)

    def test_ids_start_at_one(self):
        vocab = build_vocab(TRAIN, EncodingMode.ORDINAL)
        assert vocab.category_id("color", "red") == 1
        assert vocab.category_id("color", "blue") == 2
        assert vocab.category_id("color", "green") == 0  # unseen

    def test_empty_records_rejected(self):
        with pytest.raises(EncodingError, match="zero records"):
            build_vocab([], EncodingMode.ORDINAL)

    def test_inconsistent_names_rejected(self):
        bad = [TRAIN[0], FeatureRecord(categorical={"color": "red"})]
        with pytest.raises(EncodingError, match="record 1"):
            build_vocab(bad, EncodingMode.ORDINAL)


class TestOrdinal:
    def test_width_and_layout(self):
        vocab = build_vocab(TRAIN, EncodingMode.ORDINAL)
        assert vocab.width == 3
        np.testing.assert_array_equal(
            vectorize(TRAIN[0], vocab), [1.0, 1.0, 0.5]
        )
        np.testing.assert_array_equal(
            vectorize(TRAIN[2], vocab), [1.0, 2.0, 2.0]
        )

    def test_unseen_category_becomes_zero(self):
        vocab = build_vocab(TRAIN, EncodingMode.ORDINAL)
        vec = vectorize(_rec("green", "round", 0.0), vocab)
        np.testing.assert_array_equal(vec, [0.0, 1.0, 0.0])

    def test_column_names(self):
        vocab = build_vocab(TRAIN, EncodingMode.ORDINAL)
        assert vocab.column_names() == ["color", "shape", "score"]


class TestOneHot:
    def test_width_counts_unknown_slots(self):
        vocab = build_vocab(TRAIN, EncodingMode.ONEHOT)
        # color block 3 (unk+2), shape block 3, one numeric
        assert vocab.width == 7

    def test_indicator_layout(self):
        vocab = build_vocab(TRAIN, EncodingMode.ONEHOT)
        np.testing.assert_array_equal(
            vectorize(TRAIN[0], vocab), [0, 1, 0, 0, 1, 0, 0.5]
        )
        np.testing.assert_array_equal(
            vectorize(TRAIN[1], vocab), [0, 0, 1, 0, 1, 0, -1.0]
        )

    def test_unseen_hits_unknown_slot(self):
        vocab = build_vocab(TRAIN, EncodingMode.ONEHOT)
        vec = vectorize(_rec("green", "hex", 0.0), vocab)
        np.testing.assert_array_equal(vec, [1, 0, 0, 1, 0, 0, 0.0])

    def test_column_names(self):
        vocab = build_vocab(TRAIN, EncodingMode.ONEHOT)
        assert vocab.column_names() == [
            "color=<UNK>",
            "color=red",
            "color=blue",
            "shape=<UNK>",
            "shape=round",
            "shape=square",
            "score",
        ]

    def test_each_block_sums_to_one(self):
        rng = random.Random(47)
        values = ["red", "blue", "green", "violet"]
        shapes = ["round", "square", "hex"]
        train = [
            _rec(rng.choice(values), rng.choice(shapes), rng.random())
            for _ in range(30)
        ]
        vocab = build_vocab(train, EncodingMode.ONEHOT)
        for _ in range(30):
            rec = _rec(rng.choice(values + ["novel"]), rng.choice(shapes), 0.0)
            vec = vectorize(rec, vocab)
            color_block = vec[: len(vocab.categories["color"]) + 1]
            assert color_block.sum() == 1.0
            assert set(np.unique(color_block)) <= {0.0, 1.0}


def test_numeric_passthrough_is_identical_across_modes():
    values = [0.5, -1.0, 2.0, 1e-9, 3.14159]
    train = [_rec("red", "round", v) for v in values]
    ordinal = build_vocab(train, EncodingMode.ORDINAL)
    onehot = build_vocab(train, EncodingMode.ONEHOT)
    for rec, v in zip(train, values):
        assert vectorize(rec, ordinal)[-1] == v
        assert vectorize(rec, onehot)[-1] == v


def test_vectorize_checks_names():
    vocab = build_vocab(TRAIN, EncodingMode.ORDINAL)
    with pytest.raises(EncodingError, match="do not match"):
        vectorize(FeatureRecord(categorical={"color": "red"}), vocab)


def test_vectorize_all_shapes():
    vocab = build_vocab(TRAIN, EncodingMode.ONEHOT)
    X = vectorize_all(TRAIN, vocab)
    assert X.shape == (3, vocab.width)
    assert vectorize_all([], vocab).shape == (0, vocab.width)


class TestPersistence:
    @pytest.mark.parametrize("mode", [EncodingMode.ORDINAL, EncodingMode.ONEHOT])
    def test_round_trip(self, mode):
        vocab = build_vocab(TRAIN, mode)
        text = save_vocab(vocab)
        loaded = load_vocab(text)
        assert loaded.mode == vocab.mode
        assert loaded.cat_names == vocab.cat_names
        assert loaded.categories == vocab.categories
        assert loaded.num_names == vocab.num_names
        assert save_vocab(loaded) == text
        # vectorization behaves identically after the round trip
        for rec in TRAIN + [_rec("green", "round", 9.0)]:
            np.testing.assert_array_equal(
                vectorize(rec, loaded), vectorize(rec, vocab)
            )

    def test_header_checks(self):
        with pytest.raises(EncodingError, match="bad vocabulary header"):
            load_vocab("something-else 1 ordinal\n")
        with pytest.raises(EncodingError, match="unsupported vocabulary version"):
            load_vocab("srl-vocab 2 ordinal\n")
        with pytest.raises(EncodingError, match="empty vocabulary"):
            load_vocab("")

    def test_bad_line_rejected(self):
        with pytest.raises(EncodingError, match="bad vocabulary line"):
            load_vocab("srl-vocab 1 ordinal\nwhat\tis\tthis\n")
