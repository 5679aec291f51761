"""Classify noisy sine waves against white noise with the 22 features.

Generates 50 + 50 series, extracts features, reports cross-validated
balanced accuracy of the full tree plus the best two-feature pair found
by forward selection, and optionally writes the 2-D projection table.
"""
import argparse
import sys

import numpy as np

from canon22 import CANONICAL_FEATURE_NAMES
from canon22.classify import LabeledFeatureMatrix, cross_validate, sfs_top2
from canon22.features import batch_extract, feature_matrix


def make_corpus(n_per, length, rng):
    series = []
    for _ in range(n_per):
        period = rng.uniform(15.0, 60.0)
        t = np.arange(length)
        series.append(np.sin(2.0 * np.pi * t / period) + 0.3 * rng.normal(size=length))
    for _ in range(n_per):
        series.append(rng.normal(size=length))
    labels = np.array(["sine"] * n_per + ["noise"] * n_per)
    return series, labels


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-per-class", type=int, default=50)
    ap.add_argument("--length", type=int, default=500)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--projection", default=None,
                    help="optional CSV path for the best-pair scatter table")
    args = ap.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    series, labels = make_corpus(args.n_per_class, args.length, rng)
    vectors = batch_extract(series, threads=args.threads)
    rows, _, _ = feature_matrix(vectors)
    matrix = LabeledFeatureMatrix(rows=rows, labels=labels)

    acc, per_fold = cross_validate(matrix, range(rows.shape[1]), seed=args.seed)
    print(f"22-feature tree: CV balanced accuracy {acc:.3f} "
          f"(folds: {' '.join(f'{a:.2f}' for a in per_fold)})")

    i1, i2, pair_acc = sfs_top2(matrix, seed=args.seed)
    n1, n2 = CANONICAL_FEATURE_NAMES[i1], CANONICAL_FEATURE_NAMES[i2]
    print(f"best pair: {n1} + {n2} -> CV balanced accuracy {pair_acc:.3f}")

    if args.projection:
        lines = [f"{n1},{n2},label"]
        for r in range(rows.shape[0]):
            lines.append(
                f"{float(rows[r, i1])!r},{float(rows[r, i2])!r},{labels[r]}"
            )
        with open(args.projection, "w") as fh:
            fh.write("\n".join(lines) + "\n")
        print(f"wrote projection table to {args.projection}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
