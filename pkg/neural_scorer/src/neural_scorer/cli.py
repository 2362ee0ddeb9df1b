"""Command-line entry point: emit a score table for a corpus file."""

from __future__ import annotations

import argparse
import sys
import warnings

from .conll import ConllError
from .scorer import ScorerConfig, ScorerError, emit_scores


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="neural-scorer",
        description="Score every token of an extended-CONLL file.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("emit", help="write a score TSV for a corpus")
    p.add_argument("--conll", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--train", help="fine-tune on this labeled corpus first")
    p.add_argument("--epochs", type=int, default=3)
    p.add_argument("--encoder", default="tiny")
    p.add_argument("--max-seq-len", type=int, default=128)
    p.add_argument("--predicate-positions", dest="predicate_positions",
                   action="store_true", default=True)
    p.add_argument("--no-predicate-positions", dest="predicate_positions",
                   action="store_false")
    p.add_argument("--loss-scale", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = ScorerConfig(
            encoder=args.encoder,
            max_seq_len=args.max_seq_len,
            predicate_positions=args.predicate_positions,
            loss_scale=args.loss_scale,
            seed=args.seed,
        )
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            text = emit_scores(
                args.conll, config, train_path=args.train, epochs=args.epochs
            )
        for warning in caught:
            print(f"warning: {warning.message}", file=sys.stderr)
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text)
        print(f"wrote {len(text.splitlines()) - 1} scores to {args.out}")
        return 0
    except (ScorerError, ConllError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
