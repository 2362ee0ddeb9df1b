"""Transformer token scorer with first-piece pooling.

Words are broken into fixed-width lowercase pieces hashed into an
embedding table, so no external vocabulary or checkpoint is needed.  A
token's score is the sigmoid head output at its first piece.  Sentences
whose piece sequence exceeds the configured length are truncated with a
warning; tokens that fall off the end score 0.0 but still get a row, so
coverage always equals the input token count.
"""

from __future__ import annotations

import warnings
import zlib
from dataclasses import dataclass

import torch
from torch import nn

from .conll import Sentence, parse_conll

SCORE_HEADER = "sentence_id\ttoken_index\tscore"

PIECE_BUCKETS = 4096
PIECE_WIDTH = 4

# encoder presets: d_model, attention heads, layers, feed-forward width
_PRESETS = {
    "tiny": (32, 4, 1, 64),
    "small": (64, 4, 2, 128),
}


class ScorerError(ValueError):
    pass


@dataclass(frozen=True)
class ScorerConfig:
    encoder: str = "tiny"
    max_seq_len: int = 128
    predicate_positions: bool = True
    loss_scale: float = 1.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.encoder not in _PRESETS:
            raise ScorerError(
                f"unknown encoder {self.encoder!r}; choose from {sorted(_PRESETS)}"
            )
        if self.max_seq_len < PIECE_WIDTH:
            raise ScorerError(f"max_seq_len {self.max_seq_len} is too small")
        if not self.loss_scale > 0:
            raise ScorerError(f"loss_scale must be positive, got {self.loss_scale}")


def word_pieces(word: str) -> list[int]:
    """Hash fixed-width lowercase chunks into embedding bucket ids (>= 1)."""
    lowered = word.lower() or "<empty>"
    chunks = [
        lowered[i : i + PIECE_WIDTH] for i in range(0, len(lowered), PIECE_WIDTH)
    ]
    return [
        1 + zlib.crc32(chunk.encode("utf-8")) % (PIECE_BUCKETS - 1)
        for chunk in chunks
    ]


def encode_sentence(
    sentence: Sentence, config: ScorerConfig
) -> tuple[list[int], list[int], list[int], bool]:
    """Piece ids, each token's first-piece position (-1 when truncated),
    per-piece predicate flags, and whether truncation happened."""
    pieces: list[int] = []
    first_piece: list[int] = []
    flags: list[int] = []
    pred = sentence.predicate_index
    truncated = False
    for tok in sentence.tokens:
        ids = word_pieces(tok.word)
        if len(pieces) + 1 > config.max_seq_len:
            first_piece.append(-1)
            truncated = True
            continue
        first_piece.append(len(pieces))
        room = config.max_seq_len - len(pieces)
        if len(ids) > room:
            ids = ids[:room]
            truncated = True
        pieces.extend(ids)
        flags.extend([1 if tok.index == pred else 0] * len(ids))
    return pieces, first_piece, flags, truncated


class TokenScorer(nn.Module):
    def __init__(self, config: ScorerConfig):
        super().__init__()
        d_model, heads, layers, ff = _PRESETS[config.encoder]
        self.config = config
        self.piece_embed = nn.Embedding(PIECE_BUCKETS, d_model)
        self.position_embed = nn.Embedding(config.max_seq_len, d_model)
        self.predicate_embed = nn.Embedding(2, d_model)
        layer = nn.TransformerEncoderLayer(
            d_model=d_model,
            nhead=heads,
            dim_feedforward=ff,
            dropout=0.0,
            batch_first=True,
        )
        self.encoder = nn.TransformerEncoder(layer, num_layers=layers)
        self.head = nn.Linear(d_model, 1)

    def forward(
        self, pieces: torch.Tensor, flags: torch.Tensor
    ) -> torch.Tensor:
        """Per-piece logits for one sentence: (seq_len,) from (seq_len,) ids."""
        positions = torch.arange(pieces.shape[0], device=pieces.device)
        x = self.piece_embed(pieces) + self.position_embed(positions)
        if self.config.predicate_positions:
            x = x + self.predicate_embed(flags)
        encoded = self.encoder(x.unsqueeze(0)).squeeze(0)
        return self.head(encoded).squeeze(-1)


def build_model(config: ScorerConfig) -> TokenScorer:
    """Seeded construction so identical configs give identical weights."""
    torch.manual_seed(config.seed)
    model = TokenScorer(config)
    model.eval()
    return model


def _sentence_logits(
    model: TokenScorer, sentence: Sentence, config: ScorerConfig
) -> tuple[list[float], bool]:
    pieces, first_piece, flags, truncated = encode_sentence(sentence, config)
    scores = [0.0] * len(sentence)
    if pieces:
        with torch.no_grad():
            logits = model(
                torch.tensor(pieces, dtype=torch.long),
                torch.tensor(flags, dtype=torch.long),
            )
            probs = torch.sigmoid(logits)
        for tok, pos in zip(sentence.tokens, first_piece):
            if pos >= 0:
                scores[tok.index] = float(probs[pos].clamp(0.0, 1.0))
    return scores, truncated


def score_sentences(
    model: TokenScorer, sentences: list[Sentence], config: ScorerConfig
) -> tuple[dict[tuple[int, int], float], list[int]]:
    """Score every token; returns rows and the truncated sentence ids."""
    rows: dict[tuple[int, int], float] = {}
    truncated_ids: list[int] = []
    for sentence in sentences:
        scores, truncated = _sentence_logits(model, sentence, config)
        if truncated:
            truncated_ids.append(sentence.sentence_id)
        for tok in sentence.tokens:
            rows[(sentence.sentence_id, tok.index)] = scores[tok.index]
    return rows, truncated_ids


def fit_model(
    model: TokenScorer,
    sentences: list[Sentence],
    config: ScorerConfig,
    epochs: int = 3,
    learning_rate: float = 1e-3,
) -> list[float]:
    """Fine-tune against gold ARG1 tokens; returns the per-epoch losses.

    The positive class is upweighted by loss_scale since almost every
    token is negative.
    """
    if epochs < 1:
        raise ScorerError(f"epochs must be >= 1, got {epochs}")
    torch.manual_seed(config.seed)
    criterion = nn.BCEWithLogitsLoss(pos_weight=torch.tensor(config.loss_scale))
    optimizer = torch.optim.Adam(model.parameters(), lr=learning_rate)
    model.train()
    losses: list[float] = []
    for _ in range(epochs):
        total = 0.0
        count = 0
        for sentence in sentences:
            pieces, first_piece, flags, _ = encode_sentence(sentence, config)
            kept = [(tok, pos) for tok, pos in zip(sentence.tokens, first_piece)
                    if pos >= 0]
            if not pieces or not kept:
                continue
            logits = model(
                torch.tensor(pieces, dtype=torch.long),
                torch.tensor(flags, dtype=torch.long),
            )
            token_logits = torch.stack([logits[pos] for _, pos in kept])
            targets = torch.tensor(
                [1.0 if tok.index == sentence.arg1_index else 0.0
                 for tok, _ in kept]
            )
            loss = criterion(token_logits, targets)
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            total += float(loss.detach())
            count += 1
        losses.append(total / max(count, 1))
    model.eval()
    return losses


def write_scores(rows: dict[tuple[int, int], float]) -> str:
    lines = [SCORE_HEADER]
    for (sid, tidx), score in sorted(rows.items()):
        lines.append(f"{sid}\t{tidx}\t{score!r}")
    return "\n".join(lines) + "\n"


def emit_scores(
    conll_path: str,
    config: ScorerConfig,
    train_path: str | None = None,
    epochs: int = 3,
) -> str:
    """Score every token of a corpus file as a TSV table.

    With train_path the model is first fine-tuned on that file's gold
    ARG1 labels; otherwise the freshly seeded encoder is applied as is.
    """
    with open(conll_path, "r", encoding="utf-8") as handle:
        sentences = parse_conll(handle.read())
    model = build_model(config)
    if train_path is not None:
        with open(train_path, "r", encoding="utf-8") as handle:
            fit_model(model, parse_conll(handle.read()), config, epochs=epochs)
    rows, truncated_ids = score_sentences(model, sentences, config)
    if truncated_ids:
        warnings.warn(
            "truncated sentences past "
            f"{config.max_seq_len} pieces: {truncated_ids}",
            stacklevel=2,
        )
    return write_scores(rows)
