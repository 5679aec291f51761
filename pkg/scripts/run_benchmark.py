"""Time extraction across series lengths and fit the scaling law.

Writes the per-series timing table as CSV and prints the fitted
exponent. Three repetitions per point by default; the minimum is kept,
so background load only ever inflates, never deflates, the curve.
"""
import argparse
import sys

from canon22.bench import fit_scaling, synthetic_corpus, time_extract, timing_table


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--output", default="timings.csv")
    ap.add_argument("--lengths", default="50,100,250,500,1000,2500,5000,10000")
    ap.add_argument("--reps", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    lengths = [int(tok) for tok in args.lengths.split(",")]
    corpus = synthetic_corpus(seed=args.seed)
    records = time_extract(corpus, lengths, reps=args.reps)
    with open(args.output, "w") as fh:
        fh.write(timing_table(records))
    fit = fit_scaling(records)
    print(f"wrote {len(records)} timings to {args.output}")
    print(
        f"runtime ~ {fit.prefactor:.3e} * N^{fit.exponent:.3f}"
        f" (r^2 = {fit.r_squared:.4f})"
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
