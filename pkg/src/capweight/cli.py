"""Command-line surface for the caption word-importance pipeline.

One executable with subcommands: split, score, correlate, train,
predict, evaluate, wwer. Results go to --out (or stdout) as JSON with
sorted keys; human-readable summaries go to stderr. Exit codes: 0 on
success, 1 on usage errors, 2 on data or format errors. The CAPWEIGHT_LOG
environment variable (debug/info/warning/error) controls log verbosity.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .classify import TrainConfig, TrainingInstance, file_sha256, load_model, save_model, train
from .corpus import Sentence, Token, TokenKey, discretize, iter_tokens, load_corpus, split
from .embstore import lookup_subwords, read_store
from .errors import CapweightError, EmbeddingLookupError
from .evaluation import evaluate_predictions, format_confusion
from .score import merge_subwords, score_corpus, tfidf_scores
from .stats import correlate_methods
from .wwer import DELETE, INSERT, SUBSTITUTE, score_caption

log = logging.getLogger("capweight.cli")


class _Parser(argparse.ArgumentParser):
    # Usage problems exit 1; data problems exit 2 (handled in main).
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


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _json_line(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True)


def _token_key_payload(token: Token) -> dict:
    return {"t": token.transcript_id, "s": token.sentence_idx, "i": token.token_idx}


def _read_score_file(path: str) -> dict[TokenKey, float]:
    scores: dict[TokenKey, float] = {}
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                raise ValueError(f"{path}:{lineno}: blank line in score file")
            row = json.loads(line)
            try:
                key = (row["t"], row["s"], row["i"])
                scores[key] = float(row["score"])
            except (KeyError, TypeError) as exc:
                raise ValueError(f"{path}:{lineno}: bad score record: {exc}") from exc
    if not scores:
        raise ValueError(f"{path}: empty score file")
    return scores


def _token_features(store, token: Token):
    return merge_subwords(lookup_subwords(store, token))


# -- subcommands --------------------------------------------------------


def _cmd_split(args) -> int:
    corpus = load_corpus(args.corpus)
    assignment = split(corpus, args.seed)
    payload = {
        "dev": sorted(assignment.dev),
        "seed": assignment.seed,
        "test": sorted(assignment.test),
        "train": sorted(assignment.train),
    }
    _emit(json.dumps(payload, sort_keys=True, indent=2) + "\n", args.out)
    print(
        f"split: {len(assignment.train)} train / {len(assignment.dev)} dev / "
        f"{len(assignment.test)} test tokens (seed {args.seed})",
        file=sys.stderr,
    )
    return 0


def _cmd_score(args) -> int:
    corpus = load_corpus(args.corpus)
    lines = []
    if args.method == "tfidf":
        normalized = tfidf_scores(corpus)
        for token in iter_tokens(corpus):
            payload = _token_key_payload(token)
            payload["w"] = token.surface
            payload["score"] = normalized[token.key]
            lines.append(_json_line(payload))
    else:
        if not args.emb:
            raise ValueError(f"--emb is required for method {args.method}")
        store = read_store(args.emb)
        # Static stores legitimately omit below-min-count tokens: those
        # get raw 0 and are flagged. Contextual stores must cover every
        # token.
        policy = 0.0 if args.method == "word2vec" else "error"
        scored = score_corpus(corpus, store, missing=policy)
        if scored.missing:
            log.info("no embedding for %d token(s); raw 0 substituted", len(scored.missing))
        absent = set(scored.missing)
        for token in iter_tokens(corpus):
            semantic = scored.scores[token.key]
            payload = _token_key_payload(token)
            payload["w"] = token.surface
            payload["raw"] = semantic.raw
            payload["score"] = semantic.normalized
            if token.key in absent:
                payload["missing"] = True
            lines.append(_json_line(payload))
    _emit("".join(line + "\n" for line in lines), args.out)
    print(f"score: {len(lines)} tokens scored with {args.method}", file=sys.stderr)
    return 0


def _cmd_correlate(args) -> int:
    corpus = load_corpus(args.corpus)
    human = {
        token.key: token.importance
        for token in iter_tokens(corpus)
        if token.importance is not None
    }
    if not human:
        raise ValueError("corpus has no annotated tokens")
    method_a = _read_score_file(args.a)
    method_b = _read_score_file(args.b)
    if args.intersect:
        keys = set(human) & set(method_a) & set(method_b)
        if not keys:
            raise ValueError("no tokens shared by the corpus and both score files")
        human = {k: v for k, v in human.items() if k in keys}
    else:
        # score files may cover more tokens than the annotations, never fewer
        for name, scores in (("a", method_a), ("b", method_b)):
            absent = set(human) - set(scores)
            if absent:
                raise ValueError(
                    f"score file {name} is missing {len(absent)} annotated token(s); "
                    "pass --intersect to correlate on the common subset"
                )
    report = correlate_methods(human, method_a, method_b)
    payload = {
        "n": report.n_a,
        "p": report.p_value,
        "r_a": report.r_a,
        "r_b": report.r_b,
        "z": report.z_stat,
    }
    _emit(json.dumps(payload, sort_keys=True, indent=2) + "\n", args.out)
    if report.z_stat is None:
        tail = "z/p unavailable (|r| = 1 or n < 4)"
    else:
        tail = f"z={report.z_stat:.4f} p={report.p_value:.3g}"
    print(
        f"correlate: r_a={report.r_a:.4f} r_b={report.r_b:.4f} n={report.n_a} {tail}",
        file=sys.stderr,
    )
    return 0


def _training_instances(corpus, store, assignment, skip_missing: bool):
    tokens = list(iter_tokens(corpus))
    instances = []
    unannotated = 0
    missing = 0
    for idx in sorted(assignment.train):
        token = tokens[idx]
        if token.importance is None:
            unannotated += 1
            continue
        try:
            features = _token_features(store, token)
        except EmbeddingLookupError:
            if not skip_missing:
                raise
            missing += 1
            continue
        instances.append(TrainingInstance(features, discretize(token.importance)))
    return instances, unannotated, missing


def _cmd_train(args) -> int:
    corpus = load_corpus(args.corpus)
    store = read_store(args.emb)
    assignment = split(corpus, args.split_seed)
    instances, unannotated, missing = _training_instances(
        corpus, store, assignment, args.skip_missing
    )
    if unannotated:
        log.info("skipped %d unannotated train token(s)", unannotated)
    if missing:
        log.info("skipped %d train token(s) without embeddings", missing)
    config = TrainConfig(seed=args.seed)
    model = train(instances, args.kind, config)
    save_model(args.out, model, corpus_hash=file_sha256(args.corpus))
    print(
        f"train: {args.kind} fitted on {len(instances)} instances "
        f"(dim {model.dim}), written to {args.out}",
        file=sys.stderr,
    )
    return 0


def _cmd_predict(args) -> int:
    corpus = load_corpus(args.corpus)
    store = read_store(args.emb)
    model = load_model(args.model)
    lines = []
    skipped = 0
    for token in iter_tokens(corpus):
        try:
            features = _token_features(store, token)
        except EmbeddingLookupError:
            if not args.skip_missing:
                raise
            skipped += 1
            continue
        label, scores = model.predict(features)
        payload = _token_key_payload(token)
        payload["w"] = token.surface
        payload["label"] = label
        payload["scores"] = [float(v) for v in scores]
        lines.append(_json_line(payload))
    if skipped:
        log.info("skipped %d token(s) without embeddings", skipped)
    _emit("".join(line + "\n" for line in lines), args.out)
    print(f"predict: {len(lines)} tokens labeled with {model.kind}", file=sys.stderr)
    return 0


def _read_predictions(path: str) -> dict[TokenKey, int]:
    labels: dict[TokenKey, int] = {}
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                raise ValueError(f"{path}:{lineno}: blank line in predictions file")
            row = json.loads(line)
            try:
                labels[(row["t"], row["s"], row["i"])] = int(row["label"])
            except (KeyError, TypeError) as exc:
                raise ValueError(f"{path}:{lineno}: bad prediction record: {exc}") from exc
    if not labels:
        raise ValueError(f"{path}: empty predictions file")
    return labels


def _cmd_evaluate(args) -> int:
    corpus = load_corpus(args.corpus)
    predictions = _read_predictions(args.pred)
    tokens = list(iter_tokens(corpus))
    selected = range(len(tokens))
    if args.part:
        assignment = split(corpus, args.split_seed)
        selected = sorted(getattr(assignment, args.part))
    true_labels = []
    pred_labels = []
    for idx in selected:
        token = tokens[idx]
        if token.importance is None:
            continue
        if token.key not in predictions:
            raise ValueError(f"no prediction for annotated token {token.key!r}")
        true_labels.append(discretize(token.importance))
        pred_labels.append(predictions[token.key])
    if not true_labels:
        raise ValueError("nothing to evaluate: no annotated tokens selected")
    report = evaluate_predictions(true_labels, pred_labels)
    _emit(json.dumps(report.to_json_dict(), sort_keys=True, indent=2) + "\n", args.out)
    where = f" on {args.part}" if args.part else ""
    print(
        f"evaluate{where}: macro_f1={report.macro_f1:.4f} rmse={report.rmse:.4f} "
        f"({len(true_labels)} tokens)",
        file=sys.stderr,
    )
    print(format_confusion(report.confusion), file=sys.stderr)
    return 0


def _sentence_index(corpus: list[Sentence]) -> dict[tuple[str, int], Sentence]:
    return {(s.transcript_id, s.sentence_idx): s for s in corpus}


def _cmd_wwer(args) -> int:
    model = load_model(args.model)
    ref_corpus = load_corpus(args.ref)
    hyp_corpus = load_corpus(args.hyp)
    ref_store = read_store(args.ref_emb)
    hyp_store = read_store(args.hyp_emb)
    ref_by = _sentence_index(ref_corpus)
    hyp_by = _sentence_index(hyp_corpus)
    if set(ref_by) != set(hyp_by):
        only_ref = len(set(ref_by) - set(hyp_by))
        only_hyp = len(set(hyp_by) - set(ref_by))
        raise ValueError(
            f"reference and hypothesis sentences do not align "
            f"({only_ref} only in reference, {only_hyp} only in hypothesis)"
        )
    lines = []
    total_wwer = 0.0
    total_plain = 0.0
    for key in sorted(ref_by):
        result = score_caption(model, ref_by[key], ref_store, hyp_by[key], hyp_store)
        lines.append(
            _json_line(
                {
                    "t": key[0],
                    "s": key[1],
                    "wwer": result.wwer,
                    "plain_wer": result.plain_wer,
                    "S": result.op_counts[SUBSTITUTE],
                    "D": result.op_counts[DELETE],
                    "I": result.op_counts[INSERT],
                }
            )
        )
        total_wwer += result.wwer
        total_plain += result.plain_wer
    n = len(lines)
    aggregate = {
        "mean_plain_wer": total_plain / n,
        "mean_wwer": total_wwer / n,
        "pairs": n,
    }
    aggregate_line = json.dumps(aggregate, sort_keys=True) + "\n"
    if args.out:
        _emit("".join(line + "\n" for line in lines), args.out)
        sys.stdout.write(aggregate_line)
    else:
        sys.stdout.write("".join(line + "\n" for line in lines))
        sys.stdout.write(aggregate_line)
    print(
        f"wwer: {n} caption pairs, mean wwer {aggregate['mean_wwer']:.4f} "
        f"(plain {aggregate['mean_plain_wer']:.4f})",
        file=sys.stderr,
    )
    return 0


# -- parser wiring ------------------------------------------------------


def _build_parser() -> _Parser:
    parser = _Parser(prog="capweight", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    p = sub.add_parser("split", help="assign sentences to train/dev/test")
    p.add_argument("--corpus", required=True)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_split)

    p = sub.add_parser("score", help="per-token importance scores")
    p.add_argument("--corpus", required=True)
    p.add_argument("--emb", help="embedding store (.wemb); required for bert/word2vec")
    p.add_argument("--method", choices=("bert", "word2vec", "tfidf"), default="bert")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_score)

    p = sub.add_parser("correlate", help="compare two score files")
    p.add_argument("--corpus", required=True, help="corpus carrying the human annotations")
    p.add_argument("--a", required=True, help="score file of method A")
    p.add_argument("--b", required=True, help="score file of method B")
    p.add_argument(
        "--intersect",
        action="store_true",
        help="correlate on the common token subset instead of requiring full coverage",
    )
    p.add_argument("--out")
    p.set_defaults(func=_cmd_correlate)

    p = sub.add_parser("train", help="fit a classifier on the train part")
    p.add_argument("--corpus", required=True)
    p.add_argument("--emb", required=True)
    p.add_argument("--kind", choices=("logreg", "linsvm", "rforest", "mlp"), required=True)
    p.add_argument("--split-seed", type=int, default=42)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--skip-missing", action="store_true", help="ignore tokens without embeddings")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("predict", help="label every corpus token")
    p.add_argument("--corpus", required=True)
    p.add_argument("--emb", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--skip-missing", action="store_true", help="ignore tokens without embeddings")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser("evaluate", help="score predictions against truth")
    p.add_argument("--corpus", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--part", choices=("train", "dev", "test"))
    p.add_argument("--split-seed", type=int, default=42)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("wwer", help="importance-weighted word error rate")
    p.add_argument("--ref", required=True, help="reference corpus")
    p.add_argument("--hyp", required=True, help="hypothesis corpus")
    p.add_argument("--ref-emb", required=True)
    p.add_argument("--hyp-emb", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--out", help="per-pair results file; aggregate always goes to stdout")
    p.set_defaults(func=_cmd_wwer)

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
    except (CapweightError, ValueError, OSError) as exc:
        print(f"capweight: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
