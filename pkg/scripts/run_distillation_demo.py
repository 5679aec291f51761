"""Run the feature-distillation pipeline on a synthetic planted suite.

Ten two-class tasks over 16 candidate features: two near-duplicate
strong columns, one independent strong column, eight medium columns,
five pure noise. A correct run rejects the noise at the significance
stage, keeps only the strong family at the scoring stage, and merges
the duplicates into one cluster.
"""
import argparse
import sys
import time

import numpy as np

from canon22.classify import LabeledFeatureMatrix
from canon22.selector import PipelineConfig, run_pipeline

N_TASKS = 10
N_ROWS = 60
N_FEAT = 16


def planted_suite(seed):
    tasks = []
    root = np.random.SeedSequence(seed)
    for t, ss in enumerate(root.spawn(N_TASKS)):
        rng = np.random.default_rng(ss)
        y = np.array(["a"] * (N_ROWS // 2) + ["b"] * (N_ROWS // 2))
        sign = np.where(y == "b", 1.0, 0.0)
        cols = np.empty((N_ROWS, N_FEAT))
        # class shift swept across tasks in antiphase so the two strong
        # families have decorrelated accuracy profiles
        strong = 3.2 + 1.2 * np.sin(2 * np.pi * t / N_TASKS)
        base = sign * strong + rng.normal(size=N_ROWS)
        cols[:, 0] = base
        cols[:, 1] = base + 0.02 * rng.normal(size=N_ROWS)
        alt = 3.2 + 1.2 * np.cos(2 * np.pi * t / N_TASKS)
        cols[:, 2] = sign * alt + rng.normal(size=N_ROWS)
        for j in range(3, 11):
            cols[:, j] = sign * rng.uniform(0.8, 1.3) + rng.normal(size=N_ROWS)
        for j in range(11, N_FEAT):
            cols[:, j] = rng.normal(size=N_ROWS)
        tasks.append(LabeledFeatureMatrix(rows=cols, labels=y))
    return tasks


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=11)
    ap.add_argument("--suite-seed", type=int, default=42)
    ap.add_argument("--repeats", type=int, default=100)
    ap.add_argument("--alpha", type=float, default=0.05)
    ap.add_argument("--gamma", type=float, default=0.2)
    args = ap.parse_args(argv)

    names = tuple(f"f{i:02d}" for i in range(N_FEAT))
    tasks = planted_suite(args.suite_seed)
    config = PipelineConfig(
        repeats=args.repeats, alpha=args.alpha, gamma=args.gamma, seed=args.seed
    )
    t0 = time.monotonic()
    result = run_pipeline(tasks, names, config)
    elapsed = time.monotonic() - t0

    print(f"pipeline finished in {elapsed:.1f} s")
    print(f"significant ({len(result.significant)}):",
          " ".join(names[i] for i in result.significant))
    print(f"retained    ({len(result.retained)}):",
          " ".join(names[i] for i in result.retained))
    for cid in range(result.assignment.n_clusters):
        members = [names[result.retained[k]]
                   for k in result.assignment.members(cid)]
        rep = names[result.retained[result.assignment.representatives[cid]]]
        print(f"cluster {cid}: {{{' '.join(members)}}} -> {rep}")
    print("canonical set:", " ".join(result.canonical))
    print("provenance:", result.provenance)
    return 0


if __name__ == "__main__":
    sys.exit(main())
