"""Command-line entry point and experiment orchestration.

Subcommands: count, train, basis, extend-category, extend-relation,
relation-experiment, learn-vector, analogy, analogy-benchmark,
capture-experiment, replay. Experiment outputs are CSV files; every
command writing an output also writes ``<out>.manifest.json``, and
``replay`` re-runs a manifest (optionally redirecting the output).

Determinism: all randomness flows from ``--seed``; ``--threads 1`` (the
default, overridable through ``SUBSPACE_KB_THREADS``) guarantees
byte-identical reruns.
"""

from __future__ import annotations

import argparse
import csv
import logging
import math
import os
import sys

import numpy as np

from . import analogy as analogy_mod
from . import corpus as corpus_mod
from . import kb_extend, subspace, training, vector_fit
from .errors import ContractError, FormatError, TrainingDivergedError
from .manifest import RunManifest, manifest_path_for



def parse_int_list(text: str) -> list[int]:
    """Accept ``3``, ``1,5,10`` or the inclusive range ``1..9``."""
    text = text.strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        values = list(range(int(lo), int(hi) + 1))
    else:
        values = [int(part) for part in text.split(",") if part]
    if not values:
        raise ContractError(f"empty integer list {text!r}")
    return values


def parse_float_list(text: str) -> list[float]:
    """Accept ``0.5``, ``0.4,0.6`` or the inclusive grid ``0.4:0.05:0.75``."""
    text = text.strip()
    if ":" in text:
        start, step, stop = (float(p) for p in text.split(":", 2))
        if step <= 0:
            raise ContractError("grid step must be positive")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        values = [start + i * step for i in range(count)]
    else:
        values = [float(part) for part in text.split(",") if part]
    if not values:
        raise ContractError(f"empty float list {text!r}")
    return values


def _write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _emit_manifest(command: str, args: argparse.Namespace, inputs, out_path) -> None:
    params = {k: v for k, v in vars(args).items() if k != "func"}
    RunManifest.create(command, params, inputs).save(manifest_path_for(out_path))


def _default_vocab_path(cooc_path: str) -> str:
    return f"{cooc_path}.vocab"


def _load_set(args, emb):
    if getattr(args, "category", None):
        return subspace.load_category(args.category, emb)
    return subspace.load_relation(args.relation, emb)


# ---------------------------------------------------------------- commands


def cmd_count(args) -> int:
    vocab = corpus_mod.build_vocabulary(args.corpus, args.min_count)
    matrix = corpus_mod.count_cooccurrences(args.corpus, vocab, args.window)
    vocab_out = args.vocab_out or _default_vocab_path(args.out)
    vocab.save(vocab_out)
    matrix.save(args.out)
    _emit_manifest("count", args, [args.corpus], args.out)
    print(f"vocabulary {len(vocab)} words -> {vocab_out}")
    print(f"co-occurrence {matrix.nnz} entries -> {args.out}")
    return 0


def cmd_train(args) -> int:
    matrix = corpus_mod.CooccurrenceMatrix.load(args.cooc)
    vocab_path = args.vocab or _default_vocab_path(args.cooc)
    vocab = corpus_mod.Vocabulary.load(vocab_path)
    if len(vocab) != matrix.n_words:
        raise ContractError(
            f"vocabulary has {len(vocab)} words but matrix expects {matrix.n_words}"
        )
    cfg = training.TrainConfig(
        d=args.dim,
        lr=args.lr,
        epochs=args.epochs,
        x_max=args.x_max,
        alpha=args.alpha,
        seed=args.seed,
    )
    emb = training.train_sn(matrix, cfg, words=vocab.words, threads=args.threads)
    emb.save(args.out)
    _emit_manifest("train", args, [args.cooc, vocab_path], args.out)
    print(
        f"trained {len(emb)} vectors (d={emb.dim}); "
        f"loss {emb.initial_loss:.6g} -> {emb.final_loss:.6g}"
    )
    return 0


def cmd_basis(args) -> int:
    emb = training.EmbeddingSet.load(args.vectors)
    group = _load_set(args, emb)
    vectors = subspace.member_vectors(group, emb)
    basis = subspace.get_basis(vectors, args.rank)
    basis.save(args.out)
    inputs = [args.vectors, args.category or args.relation]
    _emit_manifest("basis", args, inputs, args.out)
    print(f"rank-{basis.k} basis for {group.name} -> {args.out}")
    return 0


def _print_or_write_items(args, header, rows):
    if args.out:
        _write_csv(args.out, header, rows)
    else:
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def cmd_extend_category(args) -> int:
    emb = training.EmbeddingSet.load(args.vectors)
    cat = subspace.load_category(args.category, emb)
    result = kb_extend.extend_category(cat, emb, args.rank, args.delta)
    items = result.items[: args.top] if args.top else result.items
    rows = [(w, format(p, ".6f")) for w, p in items]
    _print_or_write_items(args, ["item", "projection"], rows)
    if args.out:
        _emit_manifest("extend-category", args, [args.vectors, args.category], args.out)
    return 0


def cmd_extend_relation(args) -> int:
    emb = training.EmbeddingSet.load(args.vectors)
    rel = subspace.load_relation(args.relation, emb)
    ks = parse_int_list(args.ranks)
    deltas = parse_float_list(args.deltas)
    if len(ks) != 3 or len(deltas) != 3:
        raise ContractError("--ranks and --deltas each need three values: left,right,relation")
    result = kb_extend.extend_relation(
        rel, emb, tuple(ks), tuple(deltas), pair_cap=args.pair_cap
    )
    items = result.items[: args.top] if args.top else result.items
    rows = [(a, b, format(p, ".6f")) for (a, b), p in items]
    _print_or_write_items(args, ["a", "b", "projection"], rows)
    if args.out:
        _emit_manifest("extend-relation", args, [args.vectors, args.relation], args.out)
    return 0


def cmd_relation_experiment(args) -> int:
    emb = training.EmbeddingSet.load(args.vectors)
    rel = subspace.load_relation(args.relation, emb)
    result = kb_extend.relation_accuracy_experiment(
        rel,
        emb,
        ranks=parse_int_list(args.ranks),
        deltas=parse_float_list(args.deltas),
        trials=args.trials,
        seed=args.seed,
        split=args.split,
        pair_cap=args.pair_cap,
    )
    rows = [
        (
            r.rank,
            format(r.delta, ".6g"),
            format(r.mean_accuracy, ".6f"),
            r.used_trials,
            r.empty_trials,
            r.correct,
            r.incorrect,
        )
        for r in result.rows
    ]
    _write_csv(
        args.out,
        ["rank", "delta", "mean_accuracy", "used_trials", "empty_trials", "correct", "incorrect"],
        rows,
    )
    _emit_manifest("relation-experiment", args, [args.vectors, args.relation], args.out)
    print(f"relation experiment on {rel.name}: {len(rows)} grid rows -> {args.out}")
    return 0


def cmd_capture_experiment(args) -> int:
    emb = training.EmbeddingSet.load(args.vectors)
    group = _load_set(args, emb)
    result = subspace.cv_capture_experiment(
        group,
        emb,
        ranks=parse_int_list(args.ranks),
        trials=args.trials,
        split=args.split,
        seed=args.seed,
        min_size=args.min_size,
    )
    rows = [
        (k, format(mean, ".6f"), format(std, ".6f")) for k, mean, std in result.rows
    ]
    _write_csv(args.out, ["rank", "mean_capture", "stddev"], rows)
    if args.dots_out:
        dot_rows = [
            (trial, direction, format(val, ".6f"))
            for trial, direction, val in result.direction_dots
        ]
        _write_csv(args.dots_out, ["trial", "direction", "dot"], dot_rows)
    inputs = [args.vectors, args.category or args.relation]
    _emit_manifest("capture-experiment", args, inputs, args.out)
    print(f"capture experiment on {group.name}: {len(rows)} ranks -> {args.out}")
    return 0


def cmd_learn_vector(args) -> int:
    emb = training.EmbeddingSet.load(args.vectors)
    cat = subspace.load_category(args.category, emb)
    cfg = vector_fit.FitConfig(
        k=args.rank,
        lr=args.lr,
        lam=getattr(args, "lambda"),
        min_count=args.min_count,
        epochs=args.epochs,
        seed=args.seed,
        window=args.window,
    )
    result = vector_fit.learn_vector(args.word, cat, args.corpus, emb, cfg)
    fitted = training.EmbeddingSet(
        words=[args.word], vectors=result.v_hat[None, :], z=result.z, normalized=True
    )
    if args.out:
        fitted.save(args.out)
        _emit_manifest(
            "learn-vector", args, [args.vectors, args.category, args.corpus], args.out
        )
    else:
        coords = " ".join(format(x, ".6g") for x in result.v_hat)
        print(f"{args.word} {coords}")
    if args.withhold:
        order, cosine = vector_fit.order_and_cosine(result.v_hat, args.word, emb)
        report_rows = [[order, format(cosine, ".6f"), result.y_total]]
        if args.report:
            _write_csv(args.report, ["order", "cosine", "y_total"], report_rows)
        else:
            writer = csv.writer(sys.stdout, lineterminator="\n")
            writer.writerow(["order", "cosine", "y_total"])
            writer.writerows(report_rows)
    return 0


def cmd_analogy(args) -> int:
    emb = training.EmbeddingSet.load(args.vectors)
    tags = analogy_mod.TagTable.load(args.tags) if args.tags else None
    pool = analogy_mod.filter_candidates(args.b, args.filter, tags, emb)
    answers = analogy_mod.solve_query(
        args.a,
        args.b,
        args.c,
        pool,
        args.n,
        emb,
        include_query_words=args.include_query_words,
    )
    target = emb.vector(args.b) - emb.vector(args.a) + emb.vector(args.c)
    norm = np.linalg.norm(target)
    for w in answers:
        cos = float(emb.vector(w) @ target / norm) if norm else float("nan")
        print(f"{w}\t{cos:.6f}")
    return 0


def cmd_analogy_benchmark(args) -> int:
    emb = training.EmbeddingSet.load(args.vectors)
    rel = subspace.load_relation(args.relation, emb)
    tags = analogy_mod.TagTable.load(args.tags) if args.tags else None
    modes = tuple(args.modes.split(","))
    result = analogy_mod.analogy_benchmark(
        rel, emb, tags, ns=parse_int_list(args.ns), modes=modes
    )
    rows = [
        (row.relation, row.n, row.mode, row.correct, row.total, format(row.accuracy, ".6f"))
        for row in result.rows
    ]
    _write_csv(args.out, ["relation", "N", "mode", "correct", "total", "accuracy"], rows)
    inputs = [args.vectors, args.relation] + ([args.tags] if args.tags else [])
    _emit_manifest("analogy-benchmark", args, inputs, args.out)
    print(
        f"benchmark on {rel.name}: {len(rows)} rows, "
        f"{result.query_errors} query errors -> {args.out}"
    )
    return 0


def cmd_replay(args) -> int:
    manifest = RunManifest.load(args.manifest)
    if manifest.command not in _HANDLERS or manifest.command == "replay":
        raise ContractError(f"manifest names unknown command {manifest.command!r}")
    manifest.verify_inputs()
    params = dict(manifest.parameters)
    if args.out:
        params["out"] = args.out
    ns = argparse.Namespace(**params)
    return _HANDLERS[manifest.command](ns)


# ------------------------------------------------------------------ parser


def _add_seed_threads(p, seed_default=0):
    p.add_argument("--seed", type=int, default=seed_default)
    p.add_argument(
        "--threads",
        type=int,
        default=int(os.environ.get("SUBSPACE_KB_THREADS", "1")),
        help="worker threads; 1 guarantees determinism",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="subspace-kb",
        description="Train word vectors from co-occurrence counts and extend "
        "knowledge bases through low-rank category/relation subspaces.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count", help="build vocabulary and co-occurrence counts")
    p.add_argument("--corpus", required=True)
    p.add_argument("--min-count", type=int, required=True)
    p.add_argument("--window", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--vocab-out", default=None, help="default: <out>.vocab")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("train", help="fit word vectors on a co-occurrence file")
    p.add_argument("--cooc", required=True)
    p.add_argument("--vocab", default=None, help="default: <cooc>.vocab")
    p.add_argument("--dim", type=int, default=50)
    p.add_argument("--lr", type=float, default=0.05)
    p.add_argument("--epochs", type=int, default=25)
    p.add_argument("--x-max", type=float, default=100.0)
    p.add_argument("--alpha", type=float, default=0.75)
    p.add_argument("--out", required=True)
    _add_seed_threads(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("basis", help="save a rank-k basis for a category or relation")
    p.add_argument("--vectors", required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--category")
    group.add_argument("--relation")
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_basis)

    p = sub.add_parser("extend-category", help="discover new category members")
    p.add_argument("--vectors", required=True)
    p.add_argument("--category", required=True)
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--top", type=int, default=None)
    p.add_argument("--out", default=None, help="CSV path; stdout when omitted")
    p.set_defaults(func=cmd_extend_category)

    p = sub.add_parser("extend-relation", help="discover new relation pairs")
    p.add_argument("--vectors", required=True)
    p.add_argument("--relation", required=True)
    p.add_argument("--ranks", required=True, help="kA,kB,kr")
    p.add_argument("--deltas", required=True, help="dA,dB,dr")
    p.add_argument("--top", type=int, default=None)
    p.add_argument("--pair-cap", type=int, default=10**7)
    p.add_argument("--out", default=None, help="CSV path; stdout when omitted")
    p.set_defaults(func=cmd_extend_relation)

    p = sub.add_parser(
        "relation-experiment", help="cross-validated relation-extension accuracy grid"
    )
    p.add_argument("--vectors", required=True)
    p.add_argument("--relation", required=True)
    p.add_argument("--ranks", default="1..9")
    p.add_argument("--deltas", default="0.4:0.05:0.75")
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--split", type=float, default=0.3)
    p.add_argument("--pair-cap", type=int, default=10**7)
    p.add_argument("--out", required=True)
    _add_seed_threads(p)
    p.set_defaults(func=cmd_relation_experiment)

    p = sub.add_parser(
        "capture-experiment", help="cross-validated capture rates per rank"
    )
    p.add_argument("--vectors", required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--category")
    group.add_argument("--relation")
    p.add_argument("--ranks", default="1..10")
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--split", type=float, default=0.7)
    p.add_argument("--min-size", type=int, default=2)
    p.add_argument("--out", required=True)
    p.add_argument("--dots-out", default=None, help="per-direction dot products CSV")
    _add_seed_threads(p)
    p.set_defaults(func=cmd_capture_experiment)

    p = sub.add_parser("learn-vector", help="fit a vector for a rare word")
    p.add_argument("--vectors", required=True)
    p.add_argument("--word", required=True)
    p.add_argument("--category", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--rank", type=int, default=3)
    p.add_argument("--lr", type=float, default=0.1)
    p.add_argument("--lambda", type=float, default=1.0)
    p.add_argument("--epochs", type=int, default=200)
    p.add_argument("--min-count", type=int, default=10)
    p.add_argument("--window", type=int, default=10)
    p.add_argument("--withhold", action="store_true", help="score against the stored vector")
    p.add_argument("--out", default=None, help="write a one-word vector file")
    p.add_argument("--report", default=None, help="order/cosine CSV (needs --withhold)")
    _add_seed_threads(p)
    p.set_defaults(func=cmd_learn_vector)

    p = sub.add_parser("analogy", help="solve a:b::c:? by vector arithmetic")
    p.add_argument("--vectors", required=True)
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("c")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--filter", choices=list(analogy_mod.MODES), default="none")
    p.add_argument("--tags", default=None)
    p.add_argument("--include-query-words", action="store_true")
    p.set_defaults(func=cmd_analogy)

    p = sub.add_parser("analogy-benchmark", help="all-pairs analogy accuracy table")
    p.add_argument("--vectors", required=True)
    p.add_argument("--relation", required=True)
    p.add_argument("--tags", default=None)
    p.add_argument("--ns", default="1,5,10,25,50")
    p.add_argument("--modes", default="none,pos,lex")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_analogy_benchmark)

    p = sub.add_parser("replay", help="re-run a recorded manifest")
    p.add_argument("manifest")
    p.add_argument("--out", default=None, help="redirect the main output")
    p.set_defaults(func=cmd_replay)

    return parser


_HANDLERS = {
    "count": cmd_count,
    "train": cmd_train,
    "basis": cmd_basis,
    "extend-category": cmd_extend_category,
    "extend-relation": cmd_extend_relation,
    "relation-experiment": cmd_relation_experiment,
    "capture-experiment": cmd_capture_experiment,
    "learn-vector": cmd_learn_vector,
    "analogy": cmd_analogy,
    "analogy-benchmark": cmd_analogy_benchmark,
    "replay": cmd_replay,
}


def dispatch(argv) -> int:
    """Run one subcommand; returns the process exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ContractError, FormatError, TrainingDivergedError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
