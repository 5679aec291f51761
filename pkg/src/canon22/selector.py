"""Data-driven distillation of a small canonical feature set.

Three stages over a feature-by-task accuracy matrix:

A. statistical prefiltering: permutation null per (feature, task),
   one-sided Gaussian p-values, Fisher combination across tasks,
   Holm-Bonferroni control across features;
B. performance scoring: per-task normalization, row-mean combination,
   retention above mean + one standard deviation (or an explicit top
   count);
C. redundancy reduction: complete-linkage clustering of the correlation
   distance between normalized accuracy rows, one representative per
   cluster.

Every random draw derives from the run seed through SeedSequence spawn
keys, so a pipeline run is replayable bit for bit from its provenance.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np

from .classify import LabeledFeatureMatrix, cross_validate
from .core import CanonError, EmptyInput
from .kernels import chi2_sf, normal_sf

__all__ = [
    "DegenerateNull",
    "ZeroColumnMean",
    "AllMarkersRow",
    "ConstantRow",
    "CuratedNameNotInCluster",
    "PipelineStageError",
    "TaskResultMatrix",
    "NullDistribution",
    "ClusterAssignment",
    "PipelineConfig",
    "PipelineResult",
    "special_value_prefilter",
    "permutation_null",
    "gaussian_pvalue",
    "empirical_pvalue",
    "fisher_combine",
    "holm_bonferroni",
    "normalize_accuracies",
    "combine_scores",
    "threshold_top",
    "top_beta",
    "performance_correlation_distance",
    "complete_linkage_cluster",
    "select_representatives",
    "run_pipeline",
]

_P_FLOOR = 1e-300  # zero p-values are clamped here before taking logs


class DegenerateNull(CanonError):
    """Null distribution has zero spread; a z-score is undefined."""


class ZeroColumnMean(CanonError):
    """A task column has no computed entries or a zero mean."""


class AllMarkersRow(CanonError):
    """A feature row has no computed entries to combine."""


class ConstantRow(CanonError):
    """Pearson correlation undefined: a row is constant on the shared tasks."""


class CuratedNameNotInCluster(CanonError):
    """A curated representative does not belong to the cluster it names."""


class PipelineStageError(CanonError):
    """Wraps a failure with the pipeline stage where it happened."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage {stage}: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass(frozen=True)
class TaskResultMatrix:
    """(features x tasks) accuracies with a computed-entry mask.

    accuracies[i, j] is meaningful only where computed[i, j]; marker
    positions hold NaN.
    """

    accuracies: np.ndarray
    computed: np.ndarray
    feature_names: tuple[str, ...]
    task_names: tuple[str, ...]

    def __post_init__(self):
        acc = np.asarray(self.accuracies, dtype=np.float64)
        comp = np.asarray(self.computed, dtype=bool)
        if acc.shape != comp.shape or acc.ndim != 2:
            raise ValueError("accuracies and computed must share a 2-D shape")
        if acc.shape != (len(self.feature_names), len(self.task_names)):
            raise ValueError("shape does not match the name tuples")
        acc.setflags(write=False)
        comp.setflags(write=False)
        object.__setattr__(self, "accuracies", acc)
        object.__setattr__(self, "computed", comp)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        object.__setattr__(self, "task_names", tuple(self.task_names))


@dataclass(frozen=True)
class NullDistribution:
    """Accuracies of a feature on label-shuffled data."""

    values: np.ndarray
    seed: int

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim != 1 or vals.size < 100:
            raise ValueError("a null distribution needs at least 100 repeats")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def repeats(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True)
class ClusterAssignment:
    """cluster_of[i] = cluster id of feature i; ids are 0..n_clusters-1 in
    order of each cluster's smallest member index."""

    cluster_of: np.ndarray
    gamma: float
    representatives: tuple[int, ...] | None = None

    def __post_init__(self):
        c = np.asarray(self.cluster_of, dtype=np.int64)
        c.setflags(write=False)
        object.__setattr__(self, "cluster_of", c)

    @property
    def n_clusters(self) -> int:
        return int(self.cluster_of.max()) + 1 if self.cluster_of.size else 0

    def members(self, cluster_id: int) -> np.ndarray:
        return np.flatnonzero(self.cluster_of == cluster_id)


@dataclass(frozen=True)
class PipelineConfig:
    repeats: int = 1000
    alpha: float = 0.05
    gamma: float = 0.2
    seed: int = 0
    beta: int | None = None  # explicit retained-set size; None → mean + std rule
    pvalue_mode: str = "gaussian"  # or "empirical"

    def __post_init__(self):
        if self.repeats < 100:
            raise ValueError("repeats must be at least 100")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        if not 0.0 < self.gamma < 2.0:
            raise ValueError("gamma must lie in (0, 2)")
        if self.beta is not None and self.beta < 1:
            raise ValueError("beta must be positive when given")
        if self.pvalue_mode not in ("gaussian", "empirical"):
            raise ValueError("pvalue_mode must be 'gaussian' or 'empirical'")


@dataclass(frozen=True)
class PipelineResult:
    config: PipelineConfig
    feature_names: tuple[str, ...]
    task_names: tuple[str, ...]
    observed: TaskResultMatrix
    fisher_pvalues: np.ndarray
    significant: tuple[int, ...]
    scores: dict[str, float]
    retained: tuple[int, ...]
    assignment: ClusterAssignment
    canonical: tuple[str, ...]
    provenance: str = field(repr=False)


def special_value_prefilter(
    special_by_task: np.ndarray, threshold: float = 0.8
) -> np.ndarray:
    """Drop features with marker outputs in more than `threshold` of
    tasks (strict). special_by_task is (tasks x features) boolean.
    Returns retained feature indices."""
    flags = np.asarray(special_by_task, dtype=bool)
    if flags.ndim != 2 or flags.size == 0:
        raise EmptyInput("need a (tasks x features) boolean matrix")
    frac = flags.mean(axis=0)
    return np.flatnonzero(~(frac > threshold))


def permutation_null(
    matrix: LabeledFeatureMatrix,
    feature_index: int,
    repeats: int = 1000,
    seed: int = 0,
) -> NullDistribution:
    """CV accuracy of one feature on label-shuffled copies of the task.

    Repeat r derives its generator from seed XOR r, so any repeat can be
    reproduced in isolation.
    """
    if repeats < 100:
        raise ValueError("repeats must be at least 100")
    vals = np.empty(repeats)
    for r in range(repeats):
        rep_seed = int(seed) ^ r
        rng = np.random.Generator(np.random.PCG64(rep_seed))
        shuffled = matrix.labels[rng.permutation(len(matrix.labels))]
        shuffled_matrix = LabeledFeatureMatrix(rows=matrix.rows, labels=shuffled)
        vals[r], _ = cross_validate(shuffled_matrix, [feature_index], rep_seed)
    return NullDistribution(values=vals, seed=int(seed))


def gaussian_pvalue(null: NullDistribution, observed: float) -> float:
    """One-sided p-value from a Gaussian fit to the null."""
    mu = float(null.values.mean())
    sd = float(null.values.std(ddof=1))
    if sd == 0.0:
        raise DegenerateNull("null distribution has zero spread")
    return normal_sf((observed - mu) / sd)


def empirical_pvalue(null: NullDistribution, observed: float) -> float:
    """Add-one empirical tail probability; resolution limited by repeats."""
    exceed = int((null.values >= observed).sum())
    return (1 + exceed) / (null.repeats + 1)


def fisher_combine(pvalues) -> float:
    """Fisher's method: -2 sum(ln p) against chi-squared with 2M dof."""
    ps = np.asarray(pvalues, dtype=np.float64)
    if ps.size == 0:
        raise EmptyInput("no p-values to combine")
    if (ps < 0.0).any() or (ps > 1.0).any():
        raise ValueError("p-values must lie in [0, 1]")
    ps = np.clip(ps, _P_FLOOR, 1.0)
    stat = float(-2.0 * np.log(ps).sum())
    return chi2_sf(stat, 2 * ps.size)


def holm_bonferroni(pvalues, alpha: float = 0.05) -> np.ndarray:
    """Step-down Holm rejection flags controlling FWER at alpha."""
    ps = np.asarray(pvalues, dtype=np.float64)
    if ps.size == 0:
        raise EmptyInput("no p-values to test")
    m = ps.size
    order = np.argsort(ps, kind="mergesort")
    out = np.zeros(m, dtype=bool)
    for rank, idx in enumerate(order):
        if ps[idx] < alpha / (m - rank):
            out[idx] = True
        else:
            break
    return out


def normalize_accuracies(matrix: TaskResultMatrix) -> TaskResultMatrix:
    """Divide each task column by its mean over computed entries."""
    acc = matrix.accuracies.copy()
    for j in range(acc.shape[1]):
        comp = matrix.computed[:, j]
        if not comp.any():
            raise ZeroColumnMean(f"task {matrix.task_names[j]!r} has no computed entries")
        mean = acc[comp, j].mean()
        if mean == 0.0:
            raise ZeroColumnMean(f"task {matrix.task_names[j]!r} has zero mean accuracy")
        acc[comp, j] = acc[comp, j] / mean
    return TaskResultMatrix(
        accuracies=acc,
        computed=matrix.computed,
        feature_names=matrix.feature_names,
        task_names=matrix.task_names,
    )


def combine_scores(matrix: TaskResultMatrix) -> np.ndarray:
    """Mean over computed tasks per feature row."""
    out = np.empty(len(matrix.feature_names))
    for i in range(out.size):
        comp = matrix.computed[i]
        if not comp.any():
            raise AllMarkersRow(
                f"feature {matrix.feature_names[i]!r} has no computed entries"
            )
        out[i] = matrix.accuracies[i, comp].mean()
    return out


def threshold_top(scores) -> np.ndarray:
    """Indices scoring strictly above mean + sample standard deviation."""
    s = np.asarray(scores, dtype=np.float64)
    if s.size < 2:
        raise EmptyInput("need at least 2 scores")
    cut = s.mean() + s.std(ddof=1)
    return np.flatnonzero(s > cut)


def top_beta(scores, beta: int) -> np.ndarray:
    """Indices of the beta best scores (ties resolved to lower index),
    returned in ascending index order."""
    s = np.asarray(scores, dtype=np.float64)
    if not 1 <= beta <= s.size:
        raise ValueError("beta must lie in [1, number of scores]")
    order = np.argsort(-s, kind="mergesort")  # stable → ties favor lower index
    return np.sort(order[:beta])


def performance_correlation_distance(matrix: TaskResultMatrix) -> np.ndarray:
    """d_ij = 1 - Pearson(row_i, row_j) over tasks computed in both rows
    (pairwise complete, at least 3 shared tasks)."""
    acc = matrix.accuracies
    comp = matrix.computed
    f = acc.shape[0]
    out = np.zeros((f, f))
    for i in range(f):
        for j in range(i + 1, f):
            shared = comp[i] & comp[j]
            a = acc[i, shared]
            b = acc[j, shared]
            if shared.any() and np.array_equal(a, b):
                # identical profiles are distance 0 even when constant or
                # sparsely shared (the correlation itself would be 0/0)
                continue
            if shared.sum() < 3:
                raise ConstantRow(
                    f"rows {i} and {j} share fewer than 3 computed tasks"
                )
            da = a - a.mean()
            db = b - b.mean()
            va = float(da @ da)
            vb = float(db @ db)
            if va == 0.0 or vb == 0.0:
                raise ConstantRow(
                    f"row {i if va == 0.0 else j} is constant on the shared tasks"
                )
            r = float(da @ db) / np.sqrt(va * vb)
            out[i, j] = out[j, i] = 1.0 - r
    return out


def complete_linkage_cluster(distances: np.ndarray, gamma: float = 0.2) -> ClusterAssignment:
    """Agglomerate while the smallest complete-linkage distance is below
    gamma (strict); equal-height merges favor the lexicographically
    smallest member tuples."""
    d = np.asarray(distances, dtype=np.float64)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise ValueError("distances must be square")
    n = d.shape[0]
    if n == 0:
        raise EmptyInput("no items to cluster")
    clusters: list[tuple[int, ...]] = [(i,) for i in range(n)]
    while len(clusters) > 1:
        best_key = None
        best_pair = None
        for ai in range(len(clusters)):
            for bi in range(ai + 1, len(clusters)):
                a, b = clusters[ai], clusters[bi]
                h = max(d[i, j] for i in a for j in b)
                key = (h, a, b)
                if best_key is None or key < best_key:
                    best_key = key
                    best_pair = (ai, bi)
        if best_key[0] >= gamma:
            break
        ai, bi = best_pair
        merged = tuple(sorted(clusters[ai] + clusters[bi]))
        clusters = [c for k, c in enumerate(clusters) if k not in (ai, bi)]
        clusters.append(merged)
        clusters.sort()
    clusters.sort()
    cluster_of = np.empty(n, dtype=np.int64)
    for cid, members in enumerate(clusters):
        for i in members:
            cluster_of[i] = cid
    return ClusterAssignment(cluster_of=cluster_of, gamma=float(gamma))


def select_representatives(
    assignment: ClusterAssignment,
    scores,
    mode: str = "best_score",
    curated: dict[int, int] | None = None,
) -> ClusterAssignment:
    """Pick one feature per cluster: the highest score (ties to the lower
    index), or a curated member index per cluster id."""
    if mode not in ("best_score", "curated_list"):
        raise ValueError("mode must be 'best_score' or 'curated_list'")
    if mode == "curated_list" and curated is None:
        raise ValueError("curated_list mode needs a curated mapping")
    s = np.asarray(scores, dtype=np.float64)
    reps = []
    for cid in range(assignment.n_clusters):
        members = assignment.members(cid)
        if mode == "curated_list" and cid in curated:
            choice = int(curated[cid])
            if choice not in members:
                raise CuratedNameNotInCluster(
                    f"feature {choice} is not a member of cluster {cid}"
                )
            reps.append(choice)
            continue
        best = members[int(np.argmax(s[members]))]  # first max → lower index
        reps.append(int(best))
    return replace(assignment, representatives=tuple(reps))


def _task_seed(base_seed: int, stage: int, i: int, j: int) -> int:
    """Stable per-(stage, feature, task) seed derived from the run seed."""
    ss = np.random.SeedSequence(entropy=int(base_seed), spawn_key=(stage, i, j))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def run_pipeline(
    tasks: list[LabeledFeatureMatrix],
    feature_names,
    config: PipelineConfig,
    task_names=None,
) -> PipelineResult:
    """Run stages A, B, C over per-task labeled feature matrices.

    All matrices must share the same feature columns (named by
    feature_names). Returns the canonical feature subset plus full
    intermediate results and a provenance string that replays the run.
    """
    feature_names = tuple(feature_names)
    if not tasks:
        raise EmptyInput("no tasks given")
    if task_names is None:
        task_names = tuple(f"task{j}" for j in range(len(tasks)))
    task_names = tuple(task_names)
    n_feat = len(feature_names)
    n_task = len(tasks)
    for t in tasks:
        if t.rows.shape[1] != n_feat:
            raise ValueError("a task matrix does not match feature_names")

    # Stage A: observed accuracies, permutation nulls, combined p-values
    try:
        observed = np.empty((n_feat, n_task))
        pvals = np.empty((n_feat, n_task))
        for j, task in enumerate(tasks):
            for i in range(n_feat):
                obs_seed = _task_seed(config.seed, 1, i, j)
                observed[i, j], _ = cross_validate(task, [i], obs_seed)
                null = permutation_null(
                    task, i, repeats=config.repeats,
                    seed=_task_seed(config.seed, 2, i, j),
                )
                if config.pvalue_mode == "gaussian":
                    pvals[i, j] = gaussian_pvalue(null, observed[i, j])
                else:
                    pvals[i, j] = empirical_pvalue(null, observed[i, j])
        fisher = np.array([fisher_combine(pvals[i]) for i in range(n_feat)])
        reject = holm_bonferroni(fisher, alpha=config.alpha)
        significant = tuple(int(i) for i in np.flatnonzero(reject))
    except CanonError as e:
        raise PipelineStageError("A (statistical prefiltering)", e) from e
    obs_matrix = TaskResultMatrix(
        accuracies=observed,
        computed=np.ones_like(observed, dtype=bool),
        feature_names=feature_names,
        task_names=task_names,
    )
    if not significant:
        raise PipelineStageError(
            "A (statistical prefiltering)",
            EmptyInput("no feature survived the significance filter"),
        )

    # Stage B: normalize within the surviving set, combine, retain the top
    try:
        sub = TaskResultMatrix(
            accuracies=observed[list(significant)],
            computed=np.ones((len(significant), n_task), dtype=bool),
            feature_names=tuple(feature_names[i] for i in significant),
            task_names=task_names,
        )
        normed = normalize_accuracies(sub)
        scores = combine_scores(normed)
        if config.beta is None:
            if scores.size < 2:
                kept_local = tuple(range(scores.size))
            else:
                kept_local = threshold_top(scores)
            if len(kept_local) == 0:
                # degenerate score spread (e.g. all significant features
                # tie): nothing sits strictly above mean + std, so fall
                # back to keeping the whole significant set
                kept_local = tuple(range(scores.size))
        else:
            kept_local = top_beta(scores, min(config.beta, scores.size))
        retained = tuple(int(significant[k]) for k in kept_local)
    except CanonError as e:
        raise PipelineStageError("B (performance scoring)", e) from e
    if not retained:
        raise PipelineStageError(
            "B (performance scoring)", EmptyInput("no feature scored above threshold")
        )

    # Stage C: cluster the retained rows, pick representatives
    try:
        kept_matrix = TaskResultMatrix(
            accuracies=normed.accuracies[list(kept_local)],
            computed=np.ones((len(retained), n_task), dtype=bool),
            feature_names=tuple(feature_names[i] for i in retained),
            task_names=task_names,
        )
        dist = performance_correlation_distance(kept_matrix)
        assignment = complete_linkage_cluster(dist, gamma=config.gamma)
        assignment = select_representatives(
            assignment, scores[list(kept_local)], mode="best_score"
        )
        canonical = tuple(
            feature_names[retained[r]] for r in assignment.representatives
        )
    except CanonError as e:
        raise PipelineStageError("C (redundancy reduction)", e) from e

    scores_by_name = {
        feature_names[significant[k]]: float(scores[k]) for k in range(scores.size)
    }
    provenance = json.dumps(
        {
            "alpha": config.alpha,
            "beta": config.beta,
            "canonical": list(canonical),
            "gamma": config.gamma,
            "n_clusters": assignment.n_clusters,
            "n_features": n_feat,
            "n_retained": len(retained),
            "n_significant": len(significant),
            "n_tasks": n_task,
            "pvalue_mode": config.pvalue_mode,
            "repeats": config.repeats,
            "seed": config.seed,
        },
        sort_keys=True,
    )
    return PipelineResult(
        config=config,
        feature_names=feature_names,
        task_names=task_names,
        observed=obs_matrix,
        fisher_pvalues=fisher,
        significant=significant,
        scores=scores_by_name,
        retained=retained,
        assignment=assignment,
        canonical=canonical,
        provenance=provenance,
    )
