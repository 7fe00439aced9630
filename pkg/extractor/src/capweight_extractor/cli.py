"""CLI for producing `.wemb` stores from transcripts.

Subcommands `contextual` and `static` mirror ExtractionConfig. Exit codes
follow the pipeline convention: 0 success, 1 usage, 2 data or model
problems. CAPWEIGHT_LOG controls verbosity.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from capweight.corpus import load_corpus
from capweight.errors import CapweightError

from .config import COMPOSITIONS, ExtractionConfig
from .contextual import extract_contextual
from .errors import ExtractionError
from .static import extract_static

log = logging.getLogger("capweight_extractor.cli")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _configure_logging() -> None:
    name = os.environ.get("CAPWEIGHT_LOG", "warning").upper()
    level = getattr(logging, name, None)
    if not isinstance(level, int):
        level = logging.WARNING
    logging.basicConfig(
        level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s"
    )


def _cmd_contextual(args) -> int:
    corpus = load_corpus(args.corpus)
    config = ExtractionConfig(
        model_id=args.model_id, composition=args.composition, seed=args.seed
    )
    path = extract_contextual(corpus, config, args.out)
    print(f"contextual: {path} ({config.composition}, {config.model_id})", file=sys.stderr)
    return 0


def _cmd_static(args) -> int:
    corpus = load_corpus(args.corpus)
    config = ExtractionConfig(
        seed=args.seed,
        dim=args.dim,
        min_count=args.min_count,
        window=args.window,
        negatives=args.negatives,
        epochs=args.epochs,
        step=args.step,
    )
    path = extract_static(corpus, config, args.out)
    print(f"static: {path} (dim {config.dim}, min_count {config.min_count})", file=sys.stderr)
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(prog="capweight-extract",
                     description="produce .wemb embedding stores from transcripts")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    defaults = ExtractionConfig()

    p = sub.add_parser("contextual", help="transformer hidden-state vectors")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--model-id", default=defaults.model_id,
                   help="checkpoint id or local directory")
    p.add_argument("--composition", choices=COMPOSITIONS, default=defaults.composition)
    p.add_argument("--seed", type=int, default=defaults.seed)
    p.set_defaults(func=_cmd_contextual)

    p = sub.add_parser("static", help="per-transcript skip-gram vectors")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--dim", type=int, default=defaults.dim)
    p.add_argument("--min-count", type=int, default=defaults.min_count)
    p.add_argument("--window", type=int, default=defaults.window)
    p.add_argument("--negatives", type=int, default=defaults.negatives)
    p.add_argument("--epochs", type=int, default=defaults.epochs)
    p.add_argument("--step", type=float, default=defaults.step)
    p.add_argument("--seed", type=int, default=defaults.seed)
    p.set_defaults(func=_cmd_static)

    return parser


def main(argv=None) -> int:
    _configure_logging()
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ExtractionError, CapweightError, ValueError, OSError) as exc:
        print(f"capweight-extract: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
