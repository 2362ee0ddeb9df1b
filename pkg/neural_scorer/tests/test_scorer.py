"""Scorer output format, coverage, determinism, and truncation."""

import math

import pytest

from neural_scorer.conll import ConllError, parse_conll
from neural_scorer.scorer import (
    SCORE_HEADER,
    ScorerConfig,
    ScorerError,
    build_model,
    encode_sentence,
    fit_model,
    score_sentences,
    word_pieces,
    write_scores,
)


def _conll(rows_per_sentence):
    blocks = []
    for rows in rows_per_sentence:
        blocks.append(
            "\n".join(
                f"{w}\t{p}\t{b}\t{i}\t{f}\t{fr}"
                for i, (w, p, b, f, fr) in enumerate(rows)
            )
        )
    return "\n\n".join(blocks) + "\n"


SEVEN = [
    ("Output", "NN", "B-NP", "ARG1", ""),
    ("in", "IN", "B-PP", "", ""),
    ("mines", "NNS", "B-NP", "", ""),
    ("rose", "VBD", "B-VP", "SUP", ""),
    ("5", "CD", "B-NP", "", ""),
    ("percent", "NN", "I-NP", "PRED", "PART"),
    (".", ".", "O", "", ""),
]

FIVE = [
    ("Profits", "NNS", "B-NP", "ARG1", ""),
    ("fell", "VBD", "B-VP", "SUP", ""),
    ("3", "CD", "B-NP", "", ""),
    ("%", "NN", "I-NP", "PRED", "PART"),
    (".", ".", "O", "", ""),
]

TWO_SENTENCES = _conll([SEVEN, FIVE])


class TestConllReader:
    def test_parses_sentences_and_funcs(self):
        sentences = parse_conll(TWO_SENTENCES)
        assert [len(s) for s in sentences] == [7, 5]
        assert sentences[0].predicate_index == 5
        assert sentences[0].arg1_index == 0
        assert sentences[1].predicate_index == 3

    def test_field_count_error(self):
        with pytest.raises(ConllError, match="line 1: expected 6 fields"):
            parse_conll("just\tfour\tfields\there\n")

    def test_token_number_errors(self):
        with pytest.raises(ConllError, match="bad token number"):
            parse_conll("a\tNN\tB-NP\tx\t\t\n")
        with pytest.raises(ConllError, match="out of sequence"):
            parse_conll("a\tNN\tB-NP\t1\t\t\n")


class TestWordPieces:
    def test_fixed_width_chunks(self):
        assert len(word_pieces("percent")) == 2  # perc + ent
        assert len(word_pieces("in")) == 1

    def test_ids_leave_padding_slot_free(self):
        for word in ("percent", "a", "UPPER", ""):
            assert all(pid >= 1 for pid in word_pieces(word))

    def test_case_insensitive(self):
        assert word_pieces("Output") == word_pieces("output")


class TestScoring:
    CONFIG = ScorerConfig(seed=3)

    def test_coverage_is_every_token(self):
        sentences = parse_conll(TWO_SENTENCES)
        model = build_model(self.CONFIG)
        rows, truncated = score_sentences(model, sentences, self.CONFIG)
        assert len(rows) == 12
        assert truncated == []
        expected_keys = {(0, i) for i in range(7)} | {(1, i) for i in range(5)}
        assert set(rows) == expected_keys

    def test_untrained_scores_are_finite_probabilities(self):
        sentences = parse_conll(TWO_SENTENCES)
        model = build_model(self.CONFIG)
        rows, _ = score_sentences(model, sentences, self.CONFIG)
        for score in rows.values():
            assert math.isfinite(score)
            assert 0.0 <= score <= 1.0

    def test_tsv_layout(self):
        sentences = parse_conll(TWO_SENTENCES)
        model = build_model(self.CONFIG)
        rows, _ = score_sentences(model, sentences, self.CONFIG)
        lines = write_scores(rows).splitlines()
        assert lines[0] == SCORE_HEADER
        assert lines[0] == "sentence_id\ttoken_index\tscore"
        assert len(lines) == 13
        keys = [tuple(map(int, line.split("\t")[:2])) for line in lines[1:]]
        assert keys == sorted(keys)

    def test_same_seed_same_scores(self):
        sentences = parse_conll(TWO_SENTENCES)
        a, _ = score_sentences(build_model(self.CONFIG), sentences, self.CONFIG)
        b, _ = score_sentences(build_model(self.CONFIG), sentences, self.CONFIG)
        assert a == b

    def test_different_seed_different_scores(self):
        sentences = parse_conll(TWO_SENTENCES)
        other = ScorerConfig(seed=4)
        a, _ = score_sentences(build_model(self.CONFIG), sentences, self.CONFIG)
        b, _ = score_sentences(build_model(other), sentences, other)
        assert a != b

    def test_predicate_positions_change_scores(self):
        sentences = parse_conll(TWO_SENTENCES)
        with_flag = ScorerConfig(seed=3, predicate_positions=True)
        without = ScorerConfig(seed=3, predicate_positions=False)
        a, _ = score_sentences(build_model(with_flag), sentences, with_flag)
        b, _ = score_sentences(build_model(without), sentences, without)
        assert a != b


class TestTruncation:
    def test_long_sentence_is_truncated_with_full_coverage(self):
        long_words = [
            (f"verylongword{i}", "NN", "B-NP", "", "") for i in range(30)
        ]
        long_words[0] = ("verylongword0", "NN", "B-NP", "ARG1", "")
        long_words[1] = ("percent", "NN", "B-NP", "PRED", "PART")
        config = ScorerConfig(max_seq_len=16, seed=0)
        sentences = parse_conll(_conll([long_words, FIVE]))
        model = build_model(config)
        rows, truncated = score_sentences(model, sentences, config)
        assert truncated == [0]
        assert len(rows) == 35
        # tokens past the cutoff still get rows, scored zero
        tail = [rows[(0, i)] for i in range(20, 30)]
        assert all(score == 0.0 for score in tail)

    def test_encode_reports_truncation(self):
        sentence = parse_conll(_conll([[("word", "NN", "B-NP", "", "")] * 40]))[0]
        config = ScorerConfig(max_seq_len=8)
        pieces, first_piece, flags, truncated = encode_sentence(sentence, config)
        assert truncated
        assert len(pieces) <= 8
        assert len(flags) == len(pieces)
        assert first_piece.count(-1) == 40 - len(pieces)


class TestConfig:
    def test_unknown_encoder(self):
        with pytest.raises(ScorerError, match="unknown encoder"):
            ScorerConfig(encoder="enormous")

    def test_bad_max_len(self):
        with pytest.raises(ScorerError, match="too small"):
            ScorerConfig(max_seq_len=1)

    def test_bad_loss_scale(self):
        with pytest.raises(ScorerError, match="loss_scale must be positive"):
            ScorerConfig(loss_scale=0.0)

    def test_presets_differ_in_size(self):
        tiny = build_model(ScorerConfig(encoder="tiny"))
        small = build_model(ScorerConfig(encoder="small"))
        count = lambda m: sum(p.numel() for p in m.parameters())
        assert count(small) > count(tiny)


class TestFineTuning:
    def test_loss_goes_down_on_a_tiny_corpus(self):
        sentences = parse_conll(_conll([SEVEN, FIVE] * 4))
        config = ScorerConfig(seed=1, loss_scale=5.0)
        model = build_model(config)
        losses = fit_model(model, sentences, config, epochs=8)
        assert len(losses) == 8
        assert losses[-1] < losses[0]

    def test_trained_scores_stay_valid(self):
        sentences = parse_conll(_conll([SEVEN, FIVE]))
        config = ScorerConfig(seed=1)
        model = build_model(config)
        fit_model(model, sentences, config, epochs=2)
        rows, _ = score_sentences(model, sentences, config)
        assert all(0.0 <= s <= 1.0 and math.isfinite(s) for s in rows.values())

    def test_epoch_validation(self):
        config = ScorerConfig()
        with pytest.raises(ScorerError, match="epochs must be >= 1"):
            fit_model(build_model(config), [], config, epochs=0)
