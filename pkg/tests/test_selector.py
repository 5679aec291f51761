import json

import numpy as np
import pytest
import scipy.stats

from canon22 import EmptyInput
from canon22.classify import LabeledFeatureMatrix
from canon22.selector import (
    AllMarkersRow,
    ClusterAssignment,
    ConstantRow,
    CuratedNameNotInCluster,
    DegenerateNull,
    NullDistribution,
    PipelineConfig,
    PipelineStageError,
    TaskResultMatrix,
    combine_scores,
    complete_linkage_cluster,
    empirical_pvalue,
    fisher_combine,
    gaussian_pvalue,
    holm_bonferroni,
    normalize_accuracies,
    performance_correlation_distance,
    permutation_null,
    run_pipeline,
    select_representatives,
    special_value_prefilter,
    threshold_top,
    top_beta,
)


def trm(acc, computed=None):
    acc = np.asarray(acc, dtype=np.float64)
    if computed is None:
        computed = np.isfinite(acc)
    names = tuple(f"f{i}" for i in range(acc.shape[0]))
    tasks = tuple(f"t{j}" for j in range(acc.shape[1]))
    return TaskResultMatrix(acc, np.asarray(computed, dtype=bool), names, tasks)


# -- prefilter -----------------------------------------------------------

def test_prefilter_boundary_is_strictly_greater():
    special = np.zeros((10, 3), dtype=bool)
    special[:9, 0] = True   # 9 of 10 tasks -> dropped
    special[:8, 1] = True   # 8 of 10 tasks -> retained
    kept = special_value_prefilter(special, threshold=0.8)
    assert 0 not in kept
    assert 1 in kept
    assert 2 in kept


# -- permutation null ----------------------------------------------------

def _labeled(seed, n, n_classes=2):
    rng = np.random.default_rng(seed)
    rows = rng.normal(size=(n, 1))
    labels = [f"c{i % n_classes}" for i in range(n)]
    return LabeledFeatureMatrix(rows, labels)


def test_permutation_null_two_class_chance_level():
    null = permutation_null(_labeled(0, 60), 0, repeats=150, seed=1)
    assert null.repeats == 150
    assert abs(np.mean(null.values) - 0.5) < 0.05


def test_permutation_null_four_class_chance_level():
    null = permutation_null(_labeled(1, 80, 4), 0, repeats=150, seed=2)
    assert abs(np.mean(null.values) - 0.25) < 0.05


def test_permutation_null_seed_determinism():
    m = _labeled(2, 40)
    a = permutation_null(m, 0, repeats=120, seed=9)
    b = permutation_null(m, 0, repeats=120, seed=9)
    c = permutation_null(m, 0, repeats=120, seed=10)
    assert np.array_equal(a.values, b.values)
    assert not np.array_equal(a.values, c.values)


def test_null_distribution_requires_100_repeats():
    with pytest.raises(ValueError):
        NullDistribution(np.full(99, 0.5), seed=0)


# -- p-values ------------------------------------------------------------

def _null_from(values):
    return NullDistribution(np.asarray(values, dtype=np.float64), seed=0)


def test_gaussian_pvalue_at_mean_is_half():
    rng = np.random.default_rng(3)
    vals = rng.normal(0.5, 0.05, size=200)
    assert abs(gaussian_pvalue(_null_from(vals), float(vals.mean())) - 0.5) < 1e-12


def test_gaussian_pvalue_two_sigma():
    vals = np.random.default_rng(4).normal(0.5, 0.04, size=500)
    obs = float(vals.mean() + 2.0 * vals.std(ddof=1))
    assert abs(gaussian_pvalue(_null_from(vals), obs) - 0.02275) < 1e-4


def test_gaussian_pvalue_far_below_mean_near_one():
    vals = np.random.default_rng(5).normal(0.5, 0.04, size=500)
    obs = float(vals.mean() - 5.0 * vals.std(ddof=1))
    assert gaussian_pvalue(_null_from(vals), obs) > 0.999999


def test_gaussian_pvalue_degenerate_null():
    with pytest.raises(DegenerateNull):
        gaussian_pvalue(_null_from(np.full(150, 0.5)), 0.7)


def test_empirical_pvalue_add_one_rule():
    vals = np.linspace(0.0, 1.0, 199)  # 199 null values
    null = _null_from(vals)
    # 100 values >= 0.495 -> (1+100)/200
    assert abs(empirical_pvalue(null, 0.495) - 101.0 / 200.0) < 1e-12
    assert abs(empirical_pvalue(null, 2.0) - 1.0 / 200.0) < 1e-12


# -- Fisher combination --------------------------------------------------

def test_fisher_half_half():
    assert abs(fisher_combine([0.5, 0.5]) - 0.5966) < 1e-4


def test_fisher_single_one_is_one():
    assert fisher_combine([1.0]) == 1.0


def test_fisher_ten_nominal():
    got = fisher_combine([0.05] * 10)
    x = -2.0 * 10 * np.log(0.05)
    ref = scipy.stats.chi2.sf(x, 20)
    assert abs(got - ref) < 1e-12
    assert abs(got - 7.2e-6) < 2e-7


def test_fisher_zero_pvalue_clamped_not_raised():
    got = fisher_combine([0.0, 0.5])
    ref = fisher_combine([1e-300, 0.5])
    assert got == ref
    assert 0.0 <= got < 1e-100


# -- Holm-Bonferroni -----------------------------------------------------

def test_holm_example_stops_at_first_failure():
    flags = holm_bonferroni([0.01, 0.04, 0.03], alpha=0.05)
    assert list(flags) == [True, False, False]


def test_holm_all_ones_rejects_nothing():
    assert not any(holm_bonferroni([1.0] * 7, alpha=0.05))


def test_holm_contains_bonferroni_rejections():
    rng = np.random.default_rng(6)
    for _ in range(50):
        p = rng.random(12)
        p[: rng.integers(0, 4)] *= 1e-4
        holm = holm_bonferroni(p, alpha=0.05)
        bonf = p < 0.05 / len(p)
        assert np.all(holm[bonf])


# -- normalization and combination ----------------------------------------

def test_normalize_column_example():
    out = normalize_accuracies(trm([[0.5], [1.0]]))
    np.testing.assert_allclose(out.accuracies[:, 0], [2.0 / 3.0, 4.0 / 3.0], atol=1e-12)


def test_normalize_equal_column_all_ones():
    out = normalize_accuracies(trm([[0.7, 0.3], [0.7, 0.3]]))
    np.testing.assert_allclose(out.accuracies, 1.0, atol=1e-12)


def test_normalize_output_column_means_are_one():
    acc = np.random.default_rng(7).uniform(0.2, 1.0, size=(15, 9))
    out = normalize_accuracies(trm(acc)).accuracies
    np.testing.assert_allclose(out.mean(axis=0), 1.0, atol=1e-12)


def test_normalize_preserves_within_task_ranking():
    acc = np.random.default_rng(8).uniform(0.2, 1.0, size=(12, 5))
    out = normalize_accuracies(trm(acc)).accuracies
    for j in range(acc.shape[1]):
        assert list(np.argsort(acc[:, j])) == list(np.argsort(out[:, j]))


def test_normalize_skips_markers_in_column_mean():
    acc = np.array([[0.5, 0.4], [np.nan, 0.6], [1.0, 0.5]])
    out = normalize_accuracies(trm(acc))
    np.testing.assert_allclose(out.accuracies[0, 0], 0.5 / 0.75, atol=1e-12)
    assert not out.computed[1, 0]


def test_combine_scores_examples():
    m = trm([[1.0, 1.0], [0.8, 1.2]])
    np.testing.assert_allclose(combine_scores(m), [1.0, 1.0], atol=1e-15)


def test_combine_scores_skips_markers_and_matches_mean():
    acc = np.array([[0.9, np.nan, 0.7], [0.5, 0.6, 0.4]])
    got = combine_scores(trm(acc))
    assert abs(got[0] - 0.8) < 1e-15
    assert abs(got[1] - 0.5) < 1e-15


def test_combine_scores_all_markers_row_raises():
    acc = np.array([[np.nan, np.nan], [0.5, 0.6]])
    with pytest.raises(AllMarkersRow):
        combine_scores(trm(acc))


def test_combine_scores_task_permutation_invariant():
    acc = np.random.default_rng(9).uniform(size=(6, 8))
    perm = np.random.default_rng(10).permutation(8)
    a = combine_scores(trm(acc))
    b = combine_scores(trm(acc[:, perm]))
    np.testing.assert_allclose(a, b, atol=1e-15)


# -- thresholding ---------------------------------------------------------

def test_threshold_top_example():
    kept = threshold_top(np.array([1.0, 1.0, 1.0, 2.0]))
    assert list(kept) == [3]


def test_threshold_top_all_equal_keeps_none():
    assert len(threshold_top(np.full(6, 1.0))) == 0


def test_threshold_top_normal_tail_fraction():
    scores = np.random.default_rng(11).normal(size=1000)
    frac = len(threshold_top(scores)) / 1000.0
    assert abs(frac - 0.159) < 0.03


def test_top_beta_stable_selection():
    scores = np.array([0.5, 0.9, 0.9, 0.1])
    assert list(top_beta(scores, 2)) == [1, 2]
    assert list(top_beta(scores, 3)) == [0, 1, 2]


# -- distances and clustering ----------------------------------------------

def test_distance_identical_and_anticorrelated():
    a = np.array([0.1, 0.5, 0.9, 0.3])
    m = trm(np.vstack([a, a, 1.0 - a]))
    d = performance_correlation_distance(m)
    assert abs(d[0, 1]) < 1e-12
    assert abs(d[0, 2] - 2.0) < 1e-12
    assert np.allclose(np.diag(d), 0.0)
    assert np.allclose(d, d.T)


def test_distance_matches_covariance_formula():
    acc = np.random.default_rng(12).uniform(size=(8, 93))
    d = performance_correlation_distance(trm(acc))
    ref = 1.0 - np.corrcoef(acc)
    np.testing.assert_allclose(d, ref, atol=1e-12)


def test_distance_pairwise_complete_with_markers():
    acc = np.random.default_rng(13).uniform(size=(3, 10))
    acc[0, 0] = np.nan
    acc[1, 5] = np.nan
    d = performance_correlation_distance(trm(acc))
    shared = [j for j in range(10) if j not in (0, 5)]
    ref = 1.0 - np.corrcoef(acc[0, shared], acc[1, shared])[0, 1]
    assert abs(d[0, 1] - ref) < 1e-12


def test_distance_constant_row_raises():
    acc = np.vstack([np.full(5, 0.5), np.random.default_rng(14).uniform(size=5)])
    with pytest.raises(ConstantRow):
        performance_correlation_distance(trm(acc))


def _naive_complete_linkage(dist, gamma):
    n = dist.shape[0]
    clusters = [frozenset([i]) for i in range(n)]
    while len(clusters) > 1:
        best = None
        for a in range(len(clusters)):
            for b in range(a + 1, len(clusters)):
                h = max(dist[i, j] for i in clusters[a] for j in clusters[b])
                key = (h, tuple(sorted(clusters[a] | clusters[b])))
                if best is None or key < best[0:2]:
                    best = (h, key[1], a, b)
        if best[0] >= gamma:
            break
        h, _, a, b = best
        merged = clusters[a] | clusters[b]
        clusters = [c for k, c in enumerate(clusters) if k not in (a, b)]
        clusters.append(merged)
    return sorted(tuple(sorted(c)) for c in clusters)


def test_cluster_three_close_points():
    d = np.full((3, 3), 0.1)
    np.fill_diagonal(d, 0.0)
    asg = complete_linkage_cluster(d, gamma=0.2)
    assert asg.n_clusters == 1


def test_cluster_two_distant_points():
    d = np.array([[0.0, 0.5], [0.5, 0.0]])
    asg = complete_linkage_cluster(d, gamma=0.2)
    assert asg.n_clusters == 2


def test_cluster_matches_naive_oracle_on_random_matrices():
    for seed in (15, 16, 17):
        rng = np.random.default_rng(seed)
        pts = rng.normal(size=(50, 4))
        d = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1))
        d = d / d.max()
        asg = complete_linkage_cluster(d, gamma=0.35)
        got = sorted(
            tuple(sorted(asg.members(c))) for c in range(asg.n_clusters)
        )
        assert got == _naive_complete_linkage(d, 0.35)


def test_cluster_within_distance_bounded_by_gamma():
    rng = np.random.default_rng(18)
    acc = rng.uniform(0.3, 1.0, size=(20, 12))
    d = performance_correlation_distance(trm(acc))
    gamma = 0.6
    asg = complete_linkage_cluster(d, gamma=gamma)
    for c in range(asg.n_clusters):
        members = asg.members(c)
        for i in members:
            for j in members:
                assert d[i, j] <= gamma


# -- representatives -------------------------------------------------------

def _assignment_two_clusters():
    return ClusterAssignment(cluster_of=np.array([0, 0, 1]), gamma=0.2)


def test_representative_best_score():
    asg = select_representatives(
        _assignment_two_clusters(), np.array([1.1, 1.3, 0.9]), mode="best_score"
    )
    assert asg.representatives == (1, 2)


def test_representative_curated_accepts_member():
    asg = select_representatives(
        _assignment_two_clusters(),
        np.array([1.1, 1.3, 0.9]),
        mode="curated_list",
        curated={0: 0, 1: 2},
    )
    assert asg.representatives == (0, 2)


def test_representative_curated_rejects_foreign_member():
    with pytest.raises(CuratedNameNotInCluster):
        select_representatives(
            _assignment_two_clusters(),
            np.array([1.1, 1.3, 0.9]),
            mode="curated_list",
            curated={0: 2, 1: 1},
        )


# -- whole pipeline ---------------------------------------------------------

def _make_task(seed, strong_cols, n=40, n_feat=5):
    rng = np.random.default_rng(seed)
    rows = rng.normal(size=(n, n_feat))
    labels = ["a"] * (n // 2) + ["b"] * (n // 2)
    for c in strong_cols:
        rows[: n // 2, c] -= 2.5
        rows[n // 2 :, c] += 2.5
    return LabeledFeatureMatrix(rows, labels)


def test_pipeline_identical_features_single_cluster():
    task = _make_task(19, strong_cols=(0, 1))
    task = LabeledFeatureMatrix(task.rows[:, [0, 1]].copy(), list(task.labels))
    # make the two columns exactly identical
    rows = task.rows.copy()
    rows[:, 1] = rows[:, 0]
    task = LabeledFeatureMatrix(rows, list(task.labels))
    cfg = PipelineConfig(repeats=120, alpha=0.05, gamma=0.2, seed=3)
    res = run_pipeline([task], ["fa", "fb"], cfg)
    assert res.assignment.n_clusters == 1
    assert len(res.canonical) == 1


def test_pipeline_rejects_pure_noise():
    tasks = [_make_task(20 + j, strong_cols=()) for j in range(3)]
    cfg = PipelineConfig(repeats=120, alpha=0.05, gamma=0.2, seed=4)
    with pytest.raises(PipelineStageError) as exc:
        run_pipeline(tasks, [f"f{i}" for i in range(5)], cfg)
    assert "A" in exc.value.stage


def test_pipeline_finds_planted_feature_and_replays():
    tasks = [_make_task(30 + j, strong_cols=(2,)) for j in range(4)]
    cfg = PipelineConfig(repeats=120, alpha=0.05, gamma=0.2, seed=5)
    names = [f"f{i}" for i in range(5)]
    res1 = run_pipeline(tasks, names, cfg)
    assert "f2" in res1.canonical
    res2 = run_pipeline(tasks, names, cfg)
    assert res1.canonical == res2.canonical
    assert res1.provenance == res2.provenance
    assert np.array_equal(res1.fisher_pvalues, res2.fisher_pvalues)
    prov = json.loads(res1.provenance)
    assert prov["seed"] == 5
    assert prov["repeats"] == 120


def test_pipeline_config_validation():
    with pytest.raises(ValueError):
        PipelineConfig(repeats=50)
    with pytest.raises(ValueError):
        PipelineConfig(alpha=0.0)
    with pytest.raises(ValueError):
        PipelineConfig(gamma=-0.1)
    with pytest.raises(ValueError):
        PipelineConfig(pvalue_mode="bogus")


def test_pipeline_requires_tasks():
    with pytest.raises(EmptyInput):
        run_pipeline([], ["f0", "f1"], PipelineConfig(repeats=100))
