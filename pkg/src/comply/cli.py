"""Command-line front end for the full pipeline.

Subcommands: build-vocab, train, hash, eval, toy. Every run is
deterministic given its flags (all randomness flows from --seed) and
every file-producing run writes a ``<output>.manifest`` of resolved
key=value settings next to its outputs.

Exit codes: 0 success, 2 usage or input error, 3 numerical abort during
training, 4 toy acceptance-check failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import __version__
from . import evaluation as ev
from . import hasher, toy, trainer, vocab
from .errors import ComplyError, EncodingError, NumericalInstabilityError
from .model import ModelMeta, WeightMode, init_weights, load_model, save_model

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3
EXIT_CHECK_FAILED = 4


def _default_threads() -> int:
    try:
        return max(1, int(os.environ.get("COMPLY_THREADS", "1")))
    except ValueError:
        return 1


def write_manifest(out_path: Path, subcommand: str, values: dict) -> None:
    lines = [f"subcommand={subcommand}", f"version={__version__}"]
    for key, val in values.items():
        lines.append(f"{key}={val}")
    manifest = out_path.with_name(out_path.name + ".manifest")
    manifest.write_text("\n".join(lines) + "\n", encoding="utf-8")


def cmd_build_vocab(args) -> int:
    if args.max_size < 1:
        raise ComplyError("--max-size must be a positive integer")
    built = vocab.build_vocab(args.corpus, args.max_size)
    vocab.save_vocab(built, args.out)
    write_manifest(
        Path(args.out),
        "build-vocab",
        {"corpus": args.corpus, "out": args.out, "max_size": args.max_size},
    )
    print(f"vocabulary size: {len(built)}")
    print(f"token occurrences: {int(built.frequency.sum())}")
    return EXIT_OK


def _train_config(args, mode: WeightMode) -> trainer.TrainConfig:
    return trainer.TrainConfig(
        epochs=args.epochs,
        lr0=args.lr,
        batch_size=args.batch_size,
        window=args.window if mode == WeightMode.REAL_FLYVEC else None,
        max_sentence_len=args.max_sentence_len,
        seed=args.seed,
        optimizer=args.optimizer,
    )


def cmd_train(args) -> int:
    mode = WeightMode.COMPLEX if args.mode == "comply" else WeightMode.REAL_FLYVEC
    if mode == WeightMode.REAL_FLYVEC and args.window is None:
        raise ComplyError("--mode flyvec requires --window")
    voc = vocab.load_vocab(args.vocab)
    config = _train_config(args, mode)
    config.validate(mode)
    sentences = vocab.read_corpus_ids(
        args.corpus, voc, config.max_sentence_len,
        pretokenized=args.corpus_format == "ids",
    )
    out = Path(args.out)
    try:
        if args.resume:
            weights, trace, meta = trainer.train_resume(
                args.resume, sentences, voc, config, run_epochs=args.run_epochs
            )
        else:
            weights = init_weights(args.K, len(voc), mode, args.seed)
            weights, trace = trainer.train(
                sentences, voc, config, weights, run_epochs=args.run_epochs
            )
            meta = ModelMeta(
                seed=args.seed,
                trained_epochs=len(trace.records),
                vocab_hash=voc.checksum(),
            )
    except NumericalInstabilityError as exc:
        if exc.last_good is not None:
            rescue = out.with_name(out.name + ".lastgood")
            save_model(
                exc.last_good,
                ModelMeta(
                    seed=args.seed,
                    trained_epochs=exc.last_good_meta["trained_epochs"],
                    vocab_hash=voc.checksum(),
                ),
                rescue,
            )
            print(f"numerical abort: {exc}", file=sys.stderr)
            print(f"last good checkpoint: {rescue}", file=sys.stderr)
        return EXIT_NUMERIC

    save_model(weights, meta, out)
    trace.write_csv(out.with_name(out.name + ".trace.csv"))
    write_manifest(
        out,
        "train",
        {
            "corpus": args.corpus,
            "vocab": args.vocab,
            "mode": args.mode,
            "K": weights.n_neurons,
            "epochs": args.epochs,
            "lr": args.lr,
            "batch_size": args.batch_size,
            "window": args.window,
            "max_sentence_len": args.max_sentence_len,
            "optimizer": args.optimizer,
            "seed": args.seed,
            "resume": args.resume or "",
            "out": args.out,
        },
    )
    print(f"trained {len(trace.records)} epochs -> {out}")
    return EXIT_OK


def cmd_hash(args) -> int:
    weights, _ = load_model(args.model)
    voc = vocab.load_vocab(args.vocab)
    if weights.vocab_size != len(voc):
        raise ComplyError("model and vocabulary sizes do not match")
    if not 1 <= args.k <= weights.n_neurons:
        raise ComplyError(f"--k must lie in [1, {weights.n_neurons}]")
    variant = args.variant or ev.default_variant(weights)
    try:
        lines = Path(args.input).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ComplyError(f"cannot read input {args.input}: {exc}") from exc

    todo = [(i, line) for i, line in enumerate(lines) if line.strip()]

    def one(item):
        index, line = item
        try:
            return index, ev.hash_sentence(
                weights, voc, line, args.k, variant, args.max_sentence_len
            )
        except EncodingError:
            return index, None

    if args.threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            results = list(pool.map(one, todo))
    else:
        results = [one(item) for item in todo]

    out_lines = []
    n_skipped = 0
    for index, code in results:
        if code is None:
            n_skipped += 1
            print(f"line {index}: no in-vocabulary token, skipped", file=sys.stderr)
            continue
        out_lines.append(hasher.format_hash_line(index, code))
    out = Path(args.out)
    out.write_text("\n".join(out_lines) + "\n", encoding="utf-8")
    write_manifest(
        out,
        "hash",
        {
            "model": args.model,
            "vocab": args.vocab,
            "input": args.input,
            "k": args.k,
            "variant": variant,
            "out": args.out,
            "skipped": n_skipped,
        },
    )
    print(f"wrote {len(out_lines)} hashes -> {out}")
    return EXIT_OK


def _parse_sweep(text: str) -> list[int]:
    try:
        ks = [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise ComplyError(f"bad --sweep list {text!r}") from exc
    if not ks:
        raise ComplyError("--sweep list is empty")
    return ks


def cmd_eval(args) -> int:
    weights, _ = load_model(args.model)
    voc = vocab.load_vocab(args.vocab)
    if weights.vocab_size != len(voc):
        raise ComplyError("model and vocabulary sizes do not match")
    if (args.k is None) == (args.sweep is None):
        raise ComplyError("exactly one of --k or --sweep is required")
    variant = args.variant or ev.default_variant(weights)
    dataset = (
        ev.load_sts_tsv(args.data) if args.task == "sts" else ev.load_pc_tsv(args.data)
    )
    threads = args.threads

    if args.sweep is not None:
        result = ev.sweep_hash_length(
            weights,
            voc,
            dataset,
            _parse_sweep(args.sweep),
            folds=args.folds,
            seed=args.seed,
            variant=variant,
            max_len=args.max_sentence_len,
            threads=threads,
        )
        for e in result.entries:
            folds = " ".join(f"{m:.4f}" for m in e.fold_metrics)
            print(f"k={e.k} mean={e.mean:.4f} std={e.std:.4f} folds=[{folds}]")
        print(
            f"selected k={result.best_k} on fold 0; "
            f"test folds mean={result.selected_mean:.4f} "
            f"std={result.selected_std:.4f}"
        )
        if args.out:
            result.write_csv(args.out)
            write_manifest(
                Path(args.out),
                "eval",
                {
                    "model": args.model,
                    "vocab": args.vocab,
                    "task": args.task,
                    "data": args.data,
                    "sweep": args.sweep,
                    "folds": args.folds,
                    "seed": args.seed,
                    "variant": variant,
                    "out": args.out,
                },
            )
        return EXIT_OK

    if args.task == "sts":
        res = ev.eval_sts(
            weights, voc, dataset, args.k, variant, args.max_sentence_len, threads
        )
        line = f"spearman_rho={res.rho:.6f} scored={res.n_scored} dropped={res.n_dropped}"
    else:
        res = ev.eval_pair_classification(
            weights, voc, dataset, args.k, variant, args.max_sentence_len, threads
        )
        line = f"average_precision={res.ap:.6f} scored={res.n_scored} dropped={res.n_dropped}"
    print(line)
    if args.out:
        out = Path(args.out)
        out.write_text(line + "\n", encoding="utf-8")
        write_manifest(
            out,
            "eval",
            {
                "model": args.model,
                "vocab": args.vocab,
                "task": args.task,
                "data": args.data,
                "k": args.k,
                "seed": args.seed,
                "variant": variant,
                "out": args.out,
            },
        )
    return EXIT_OK


def cmd_toy(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    result = toy.run_toy(seed=args.seed, steps=args.steps, lr0=args.lr)
    toy.dump_weights_csv(result.init, out_dir / "weights_init.csv")
    toy.dump_weights_csv(result.weights, out_dir / "weights_final.csv")
    result.trace.write_csv(out_dir / "trace.csv")
    toy.write_report(result, out_dir / "report.txt")
    write_manifest(
        out_dir / "toy",
        "toy",
        {
            "out_dir": str(out_dir),
            "seed": args.seed,
            "steps": args.steps,
            "lr": args.lr,
        },
    )
    for check in result.checks:
        print(f"{'PASS' if check.passed else 'FAIL'} {check.name}: {check.detail}")
    print(
        f"winners: forward={result.winner_forward} backward={result.winner_backward} "
        f"({result.seconds:.2f}s)"
    )
    if not result.passed:
        return EXIT_CHECK_FAILED
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="comply",
        description="Sequence hashing with a winner-take-all energy model.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("build-vocab", help="build a vocabulary from a text corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--max-size", type=int, required=True)
    p.set_defaults(func=cmd_build_vocab)

    p = sub.add_parser("train", help="train a model on an encoded corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--mode", choices=("comply", "flyvec"), default="comply")
    p.add_argument("--K", type=int, default=400)
    p.add_argument("--epochs", type=int, default=15)
    p.add_argument("--lr", type=float, default=4e-4)
    p.add_argument("--batch-size", type=int, default=256)
    p.add_argument("--window", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--resume", default=None, help="checkpoint to continue from")
    p.add_argument(
        "--run-epochs",
        type=int,
        default=None,
        help="stop after this many epochs (annealing still spans --epochs)",
    )
    p.add_argument("--optimizer", choices=("adam", "sgd"), default="adam")
    p.add_argument("--max-sentence-len", type=int, default=64)
    p.add_argument(
        "--corpus-format",
        choices=("text", "ids"),
        default="text",
        help="'ids': pre-tokenized, one space-separated id sequence per line",
    )
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("hash", help="hash sentences with a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--variant", choices=ev.VARIANTS, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--max-sentence-len", type=int, default=64)
    p.add_argument("--threads", type=int, default=_default_threads())
    p.set_defaults(func=cmd_hash)

    p = sub.add_parser("eval", help="score a model on a similarity dataset")
    p.add_argument("--model", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--task", choices=("sts", "pc"), required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--sweep", default=None, help="comma-separated hash lengths")
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--variant", choices=ev.VARIANTS, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--max-sentence-len", type=int, default=64)
    p.add_argument("--threads", type=int, default=_default_threads())
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("toy", help="run the built-in two-sequence demonstration")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--seed", type=int, default=toy.TOY_SEED)
    p.add_argument("--steps", type=int, default=toy.TOY_STEPS)
    p.add_argument("--lr", type=float, default=toy.TOY_LR0)
    p.set_defaults(func=cmd_toy)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NumericalInstabilityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ComplyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
