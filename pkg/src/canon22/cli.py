"""Command-line surface: extract, classify, select, bench, project2d.

Exit codes: 0 success, 2 input error, 3 internal failure. Primary
output files are byte-identical for identical inputs and seed (timing
columns in bench output are the unavoidable exception). Every stdout
summary echoes the seed.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .bench import fit_scaling, synthetic_corpus, time_extract, timing_table
from .classify import (
    LabeledFeatureMatrix,
    LengthMismatch,
    SingleClass,
    balanced_accuracy,
    sfs_top2,
    tree_fit,
    unbalanced_accuracy,
)
from .core import CANONICAL_FEATURE_NAMES, CanonError, EmptyInput, NonFiniteSample
from .dataio import (
    ClassifiedDataset,
    EmptyFile,
    IoFailure,
    MalformedLine,
    find_dataset_pairs,
    load_ucr_tsv,
    write_feature_table,
)
from .features import batch_extract, feature_matrix
from .selector import (
    PipelineConfig,
    PipelineStageError,
    run_pipeline,
    special_value_prefilter,
)

_INPUT_ERRORS = (
    IoFailure,
    EmptyFile,
    MalformedLine,
    EmptyInput,
    NonFiniteSample,
    SingleClass,
    LengthMismatch,
    FileNotFoundError,
    NotADirectoryError,
    IsADirectoryError,
)

_DEFAULT_LENGTHS = "50,100,250,500,1000,2500,5000,10000"


def _emit(summary: dict) -> None:
    sys.stdout.write(json.dumps(summary, sort_keys=True) + "\n")


def _extract_matrix(dataset: ClassifiedDataset, threads: int):
    vectors = batch_extract(dataset.series, threads=threads)
    return vectors


def cmd_extract(args) -> int:
    dataset = load_ucr_tsv(args.input)
    vectors = _extract_matrix(dataset, args.threads)
    write_feature_table(vectors, args.output, fmt=args.format)
    flagged = sum(1 for v in vectors if v.markers())
    _emit(
        {
            "command": "extract",
            "flagged_series": flagged,
            "format": args.format,
            "n_features": len(CANONICAL_FEATURE_NAMES),
            "n_series": len(vectors),
            "output": str(args.output),
            "seed": args.seed,
        }
    )
    return 0


def _dataset_to_matrix(dataset, threads, fills=None):
    vectors = batch_extract(dataset.series, threads=threads)
    rows, had_marker, fills = feature_matrix(vectors, fill_values=fills)
    return LabeledFeatureMatrix(rows=rows, labels=np.asarray(dataset.labels)), fills


def _load_side(path) -> ClassifiedDataset:
    """Load one explicit path; when the loader auto-pairs, keep only the
    side the path itself names."""
    dataset = load_ucr_tsv(path)
    if dataset.split is not None:
        stem = Path(path).stem
        if "_TRAIN" in stem:
            return dataset.subset("train")
        if "_TEST" in stem:
            return dataset.subset("test")
    return dataset


def cmd_classify(args) -> int:
    paths = args.input
    if len(paths) == 1:
        dataset = load_ucr_tsv(paths[0])
        if dataset.split is None:
            raise EmptyInput(
                "classify needs two input paths or a paired _TRAIN/_TEST file"
            )
        train_ds = dataset.subset("train")
        test_ds = dataset.subset("test")
    elif len(paths) == 2:
        train_ds = _load_side(paths[0])
        test_ds = _load_side(paths[1])
    else:
        raise EmptyInput("classify takes one paired file or two paths (train test)")
    train, fills = _dataset_to_matrix(train_ds, args.threads)
    # test markers are imputed with training-set means
    test, _ = _dataset_to_matrix(test_ds, args.threads, fills=fills)
    tree = tree_fit(train)
    pred = tree.predict(test.rows)
    report = {
        "balanced_accuracy": balanced_accuracy(test.labels, pred),
        "command": "classify",
        "n_test": len(test.labels),
        "n_train": len(train.labels),
        "seed": args.seed,
        "tree_depth": tree.depth(),
        "unbalanced_accuracy": unbalanced_accuracy(test.labels, pred),
    }
    if args.output:
        Path(args.output).write_text(json.dumps(report, sort_keys=True) + "\n")
    _emit(report)
    return 0


def cmd_select(args) -> int:
    paths = find_dataset_pairs(args.input)
    if not paths:
        raise EmptyInput(f"no dataset files under {args.input}")
    tasks = []
    task_names = []
    special_rows = []
    for p in paths:
        dataset = load_ucr_tsv(p)
        vectors = batch_extract(dataset.series, threads=args.threads)
        rows, had_marker, _ = feature_matrix(vectors)
        special_rows.append(had_marker)
        tasks.append((dataset.name, rows, np.asarray(dataset.labels)))
        task_names.append(dataset.name)
    special_by_task = np.stack(special_rows)
    kept = special_value_prefilter(special_by_task, threshold=0.8)
    feature_names = tuple(CANONICAL_FEATURE_NAMES[i] for i in kept)
    matrices = [
        LabeledFeatureMatrix(rows=rows[:, kept], labels=labels)
        for _, rows, labels in tasks
    ]
    config = PipelineConfig(
        repeats=args.repeats, alpha=args.alpha, gamma=args.gamma, seed=args.seed
    )
    result = run_pipeline(matrices, feature_names, config, task_names=task_names)
    payload = {
        "canonical": list(result.canonical),
        "config": {
            "alpha": config.alpha,
            "gamma": config.gamma,
            "repeats": config.repeats,
            "seed": config.seed,
        },
        "fisher_pvalues": {
            name: float(result.fisher_pvalues[i])
            for i, name in enumerate(result.feature_names)
        },
        "n_tasks": len(task_names),
        "prefiltered_out": [
            CANONICAL_FEATURE_NAMES[i]
            for i in range(len(CANONICAL_FEATURE_NAMES))
            if i not in set(int(k) for k in kept)
        ],
        "provenance": json.loads(result.provenance),
        "retained": [result.feature_names[i] for i in result.retained],
        "scores": result.scores,
        "significant": [result.feature_names[i] for i in result.significant],
    }
    Path(args.output).write_text(json.dumps(payload, sort_keys=True) + "\n")
    _emit(
        {
            "canonical": list(result.canonical),
            "command": "select",
            "n_canonical": len(result.canonical),
            "output": str(args.output),
            "seed": args.seed,
        }
    )
    return 0


def _lengths_list(text: str) -> list[int]:
    try:
        values = [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"lengths must be comma-separated integers, got {text!r}"
        )
    if not values:
        raise argparse.ArgumentTypeError("lengths list is empty")
    if min(values) < 5:
        raise argparse.ArgumentTypeError("lengths below 5 cannot be resampled")
    return values


def cmd_bench(args) -> int:
    lengths = args.lengths
    if args.reps < 3:
        sys.stderr.write(
            f"warning: reps={args.reps} gives noisy minima; 3 or more is recommended\n"
        )
    corpus = synthetic_corpus(seed=args.seed)
    records = time_extract(corpus, lengths, reps=args.reps)
    Path(args.output).write_text(timing_table(records))
    fit = fit_scaling(records)
    _emit(
        {
            "command": "bench",
            "exponent": fit.exponent,
            "lengths": lengths,
            "n_series": len(corpus),
            "output": str(args.output),
            "prefactor": fit.prefactor,
            "r_squared": fit.r_squared,
            "reps": args.reps,
            "seed": args.seed,
        }
    )
    return 0


def cmd_project2d(args) -> int:
    dataset = load_ucr_tsv(args.input)
    matrix, _ = _dataset_to_matrix(dataset, args.threads)
    i1, i2, acc = sfs_top2(matrix, seed=args.seed)
    n1 = CANONICAL_FEATURE_NAMES[i1]
    n2 = CANONICAL_FEATURE_NAMES[i2]
    lines = [f"{n1},{n2},label"]
    for r in range(matrix.rows.shape[0]):
        lines.append(
            f"{float(matrix.rows[r, i1])!r},{float(matrix.rows[r, i2])!r},{matrix.labels[r]}"
        )
    Path(args.output).write_text("\n".join(lines) + "\n")
    _emit(
        {
            "command": "project2d",
            "feature1": n1,
            "feature2": n2,
            "n_series": matrix.rows.shape[0],
            "output": str(args.output),
            "pair_accuracy": acc,
            "seed": args.seed,
        }
    )
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="canon22",
        description="22-feature time-series extraction, selection, and evaluation",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p, output_required=True):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--threads", type=int, default=1)
        if output_required:
            p.add_argument("--output", required=True)

    p = sub.add_parser("extract", help="write the 22-feature table for a dataset")
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    common(p)
    p.set_defaults(fn=cmd_extract)

    p = sub.add_parser("classify", help="train/test tree evaluation")
    p.add_argument(
        "--input", required=True, nargs="+",
        help="train and test paths, or one paired _TRAIN/_TEST file",
    )
    p.add_argument("--output", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(fn=cmd_classify)

    p = sub.add_parser("select", help="distill features over a task directory")
    p.add_argument("--input", required=True, help="directory of dataset files")
    p.add_argument("--repeats", type=int, default=1000)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--gamma", type=float, default=0.2)
    common(p)
    p.set_defaults(fn=cmd_select)

    p = sub.add_parser("bench", help="time extraction across lengths")
    p.add_argument("--lengths", type=_lengths_list, default=_DEFAULT_LENGTHS)
    p.add_argument("--reps", type=int, default=3)
    common(p)
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("project2d", help="best 2-feature projection table")
    p.add_argument("--input", required=True)
    common(p)
    p.set_defaults(fn=cmd_project2d)
    return parser


def _is_input_error(err: BaseException) -> bool:
    seen = set()
    cur: BaseException | None = err
    while cur is not None and id(cur) not in seen:
        seen.add(id(cur))
        if isinstance(cur, _INPUT_ERRORS):
            return True
        cur = getattr(cur, "cause", None) or cur.__cause__
    return False


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except PipelineStageError as e:
        sys.stderr.write(f"error: {e}\n")
        return 2 if _is_input_error(e) else 3
    except _INPUT_ERRORS as e:
        sys.stderr.write(f"error: {e}\n")
        return 2
    except (CanonError, ValueError, ArithmeticError, OSError) as e:
        sys.stderr.write(f"error: {e}\n")
        return 3
    except Exception as e:  # never panic to the user
        sys.stderr.write(f"internal error: {type(e).__name__}: {e}\n")
        return 3


if __name__ == "__main__":
    sys.exit(main())
