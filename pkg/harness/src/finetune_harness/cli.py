"""CLI: `finetune` a checkpoint on an exported corpus, `predict` a corpus."""

import argparse
import sys
from pathlib import Path

from .config import TrainConfig
from .data import CorpusInvalid, ModelMissing
from .predict import predict_file
from .train import finetune


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="seqscan-finetune")
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("finetune", help="fine-tune an encoder on a labeled corpus")
    p_train.add_argument("--corpus", type=Path, required=True)
    p_train.add_argument("--out", type=Path, required=True)
    p_train.add_argument("--base-model", required=True,
                         help="pretrained checkpoint path or hub id")
    p_train.add_argument("--lr", type=float, default=1e-6)
    p_train.add_argument("--bs", type=int, default=1)
    p_train.add_argument("--epochs", type=int, default=3)
    p_train.add_argument("--max-tokens", type=int, default=512)
    p_train.add_argument("--seed", type=int, default=0)

    p_pred = sub.add_parser("predict", help="write predictions for a corpus")
    p_pred.add_argument("--model", type=Path, required=True)
    p_pred.add_argument("--in", dest="corpus", type=Path, required=True)
    p_pred.add_argument("--out", type=Path, required=True)
    p_pred.add_argument("--max-tokens", type=int, default=512)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "finetune":
            config = TrainConfig(base_model=args.base_model, learning_rate=args.lr,
                                 batch_size=args.bs, epochs=args.epochs,
                                 max_tokens=args.max_tokens, seed=args.seed)
            out = finetune(args.corpus, args.out, config)
            print(f"saved model to {out}")
        else:
            count = predict_file(args.model, args.corpus, args.out,
                                 max_tokens=args.max_tokens)
            print(f"wrote {count} predictions to {args.out}")
    except (CorpusInvalid, ModelMissing) as exc:
        print(f"seqscan-finetune: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
