"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines and measured values.
"""

import time

import numpy as np
import pytest

from fpcluster import (
    BasisConfig,
    KmeansConfig,
    PlantedSpec,
    align_and_score,
    bound_diagnostics,
    consistency_check,
    evaluate_basis,
    exact_kmeans_optimum,
    fit_coefficients,
    fit_fpca,
    kmeans,
    objective_frobenius,
    objective_sumsq,
    planted_features,
    planted_images,
    reconstruct,
    sample_features,
    select,
    selected_feature_count,
    sketch_for_plan,
    synthesize_image,
    transform,
)
from fpcluster.clustering import ClusterAssignment, indicator_matrix
from fpcluster.evaluation import EvaluationReport
from fpcluster.selection import FeatureMatrix


def _report(number: int, ok: bool, detail: str, elapsed: float) -> str:
    line = f"[criterion {number:02d}] {'PASS' if ok else 'FAIL'} — {detail} (runtime {elapsed:.2f}s)"
    print(line)
    return line


def _random_assignment(rng, m, k):
    labels = np.concatenate([np.arange(1, k + 1), rng.integers(1, k + 1, m - k)])
    X, sizes = indicator_matrix(labels, k)
    return labels, ClusterAssignment(
        labels=labels, k=k, objective=0.0, indicator=X, cluster_sizes=sizes
    )


def test_criterion_01_objective_identity():
    start = time.time()
    rng = np.random.default_rng(101)
    worst = 0.0
    for _ in range(500):
        m = int(rng.integers(2, 51))
        n = int(rng.integers(1, 21))
        k = int(rng.integers(1, min(m, 6) + 1))
        A = rng.standard_normal((m, n))
        labels, assignment = _random_assignment(rng, m, k)
        dev = abs(objective_sumsq(A, labels) - objective_frobenius(A, assignment))
        worst = max(worst, dev / max(1.0, (A**2).sum()))
    elapsed = time.time() - start
    ok = worst <= 1e-8 and elapsed < 5.0
    line = _report(1, ok, f"Eq.15 == Eq.16 on 500 instances, worst relative deviation {worst:.2e}", elapsed)
    assert ok, line


def test_criterion_02_bruteforce_kmeans_optimality():
    start = time.time()
    rng = np.random.default_rng(2024)
    hits = 0
    for i in range(50):
        m = int(rng.integers(4, 9))
        n = int(rng.integers(2, 6))
        A = rng.standard_normal((m, n))
        f_opt, _ = exact_kmeans_optimum(A, 2)
        assignment = kmeans(A, KmeansConfig(k=2, restarts=50, seed=i))
        if assignment.objective <= f_opt + 1e-9:
            hits += 1
    elapsed = time.time() - start
    ok = hits >= 48 and elapsed < 30.0
    line = _report(2, ok, f"multi-restart k-means attained the exhaustive optimum in {hits}/50", elapsed)
    assert ok, line


def test_criterion_03_fpca_matches_dense_eigensolver():
    start = time.time()
    rng = np.random.default_rng(303)
    worst_val, worst_vec = 0.0, 0.0
    for _ in range(20):
        N = int(rng.integers(3, 11))
        K = int(rng.choice([1, 3, 5]))
        coeffs = rng.standard_normal((N, K * K))
        J = min(N - 1, K * K)
        model = fit_fpca(coeffs, J)

        # independent oracle: SVD of the centered matrix
        centered = coeffs - coeffs.mean(axis=0)
        _, svals, Vt = np.linalg.svd(centered, full_matrices=False)
        evals = np.zeros(K * K)
        evals[: svals.size] = svals**2 / N
        V = Vt.T
        for j in range(V.shape[1]):
            if V[np.argmax(np.abs(V[:, j])), j] < 0:
                V[:, j] = -V[:, j]
        worst_val = max(worst_val, np.abs(model.eigenvalues - evals[:J]).max())
        worst_vec = max(worst_vec, np.abs(model.eigenvectors - V[:, :J]).max())
    elapsed = time.time() - start
    ok = worst_val < 1e-9 and worst_vec < 1e-8 and elapsed < 5.0
    line = _report(
        3, ok, f"eigenvalues within {worst_val:.2e}, eigenvectors within {worst_vec:.2e} of SVD oracle", elapsed
    )
    assert ok, line


def test_criterion_04_score_quadrature():
    start = time.time()
    ds, _ = planted_images(
        N=10, height=64, width=64, K=5, k_groups=2, separation=8.0, noise_sd=0.5, seed=3
    )
    coeffs = fit_coefficients(ds, BasisConfig(5))
    model = fit_fpca(coeffs, 9)
    scores = transform(model, coeffs)
    stack = ds.pixel_stack()
    centered = stack - stack.mean(axis=0)
    phi = evaluate_basis(5, 64).values
    worst = 0.0
    for j in range(model.J):
        beta = phi @ model.eigenvectors[:, j].reshape(5, 5) @ phi.T
        for i in range(10):
            quad = (centered[i] * beta).sum() / (64 * 64)
            rel = abs(quad - scores[i, j]) / max(abs(scores[i, j]), 1e-6)
            worst = max(worst, rel)
    elapsed = time.time() - start
    ok = worst <= 1e-3 and elapsed < 10.0
    line = _report(4, ok, f"Riemann-sum scores agree within relative {worst:.2e}", elapsed)
    assert ok, line


def test_criterion_05_reconstruction_monotone():
    start = time.time()
    ds, _ = planted_images(
        N=8, height=24, width=24, K=3, k_groups=2, separation=6.0, noise_sd=0.4, seed=4
    )
    config = BasisConfig(3)
    coeffs = fit_coefficients(ds, config)
    J = min(len(ds) - 1, 9)
    model = fit_fpca(coeffs, J)
    scores = transform(model, coeffs)
    monotone = True
    worst_final = 0.0
    for i in range(len(ds)):
        errors = [
            float(np.linalg.norm(
                ds.images[i].pixels
                - synthesize_image(reconstruct(model, scores[i], j), config, 24, 24)
            ))
            for j in range(J + 1)
        ]
        monotone &= all(errors[j + 1] <= errors[j] + 1e-9 for j in range(J))
        worst_final = max(worst_final, errors[-1])
    elapsed = time.time() - start
    ok = monotone and worst_final <= 1e-6 and elapsed < 10.0
    line = _report(
        5, ok, f"errors non-increasing for all images, full-rank error {worst_final:.2e}", elapsed
    )
    assert ok, line


def test_criterion_06_leverage_sampling():
    start = time.time()
    ok = True
    details = []

    # probability normalization and rescaling identity on real plans
    rng = np.random.default_rng(606)
    for seed in range(5):
        A = rng.standard_normal((15, 30))
        plan, _ = select(A, k=2, epsilon=0.5, seed=seed)
        ok &= abs(plan.probabilities.sum() - 1.0) <= 1e-12
        ok &= np.abs(
            plan.scale * np.sqrt(plan.r * plan.probabilities[plan.sampled_indices - 1]) - 1.0
        ).max() <= 1e-12
    details.append("sum(P)=1 and S*sqrt(rP)=1 on 5 plans")

    # 4000-draw empirical frequencies within 4-sigma binomial bounds
    P = np.array([0.25, 0.75])
    r = 4000
    for seed in range(5):
        idx, _ = sample_features(P, r, seed=seed)
        for value, p in ((1, 0.25), (2, 0.75)):
            freq = (idx == value).mean()
            bound = 4.0 * np.sqrt(p * (1 - p) / r)
            ok &= abs(freq - p) <= bound
    details.append("4000-draw frequencies within 4-sigma for 5 seeds")
    elapsed = time.time() - start
    ok = ok and elapsed < 10.0
    line = _report(6, ok, "; ".join(details), elapsed)
    assert ok, line


_PLANT = dict(m=40, n=200, k=2, informative=4, separation=20.0, noise_sd=1.0)
_SEEDS = range(20)


def _planted_instance(seed):
    A, truth = planted_features(PlantedSpec(seed=seed, **_PLANT))
    return A, truth


def test_criterion_07a_selection_draw_hit_rate():
    # Stated threshold: >= 95% of sampled draws hit informative features.
    # The exact-SVD leverage mass of this instance averages ~0.953 and the
    # sketched distribution the selector actually samples from sits lower,
    # so the aggregate measured below is expected to miss the 0.95 bar;
    # see the decisions ledger for the full analysis.
    start = time.time()
    hits = total = 0
    exact_mass = []
    for seed in _SEEDS:
        A, _ = _planted_instance(seed)
        Z = np.linalg.svd(A.values, full_matrices=False)[2][:2].T
        exact_mass.append(((Z**2).sum(axis=1) / 2.0)[:4].sum())
        plan, _ = select(A, k=2, epsilon=1 / 3, seed=seed)
        hits += int((plan.sampled_indices <= 4).sum())
        total += plan.r
    fraction = hits / total
    elapsed = time.time() - start
    ok = fraction >= 0.95 and elapsed < 60.0
    line = _report(
        7, ok,
        f"7a: informative draw fraction {fraction:.4f} (need >= 0.95; "
        f"exact-SVD leverage mass mean {np.mean(exact_mass):.4f})",
        elapsed,
    )
    assert ok, line


def test_criterion_07b_post_selection_accuracy():
    # Stated threshold: post-selection k-means accuracy >= 0.95.  The
    # 1/sqrt(rP) rescaling amplifies rarely-drawn noise columns enough to
    # flip the optimal partition on some seeds (the found partition has a
    # LOWER selected-feature objective than the truth partition), so the
    # mean accuracy is expected to miss 0.95; see the decisions ledger.
    start = time.time()
    accuracies = []
    for seed in _SEEDS:
        A, truth = _planted_instance(seed)
        plan, C = select(A, k=2, epsilon=1 / 3, seed=seed)
        assignment = kmeans(C, KmeansConfig(k=2, restarts=50, seed=seed))
        accuracies.append(align_and_score(truth, assignment).accuracy)
    mean_acc = float(np.mean(accuracies))
    elapsed = time.time() - start
    ok = mean_acc >= 0.95 and elapsed < 60.0
    line = _report(
        7, ok,
        f"7b: post-selection k-means accuracy mean {mean_acc:.4f}, min {min(accuracies):.4f} (need >= 0.95)",
        elapsed,
    )
    assert ok, line


def test_criterion_07c_gamma_bound():
    start = time.time()
    gammas = []
    for seed in _SEEDS:
        A, truth = _planted_instance(seed)
        sub = np.concatenate([np.flatnonzero(truth == 1)[:6], np.flatnonzero(truth == 2)[:6]])
        A12 = FeatureMatrix(A.values[sub])
        plan, C = select(A12, k=2, epsilon=1 / 3, seed=seed)
        assignment = kmeans(C, KmeansConfig(k=2, restarts=50, seed=seed))
        diag = bound_diagnostics(A12, plan, sketch_for_plan(A12, plan), assignment)
        gammas.append(diag.gamma_hat)
    worst = max(gammas)
    elapsed = time.time() - start
    ok = worst <= 3.0 and elapsed < 60.0
    line = _report(
        7, ok, f"7c: gamma_hat over 20 exact sub-instances: max {worst:.3f}, mean {np.mean(gammas):.3f} (need <= 3)",
        elapsed,
    )
    assert ok, line


def _binary_report(acc, sens, spec):
    return EvaluationReport(
        confusion=np.zeros((2, 2), dtype=int),
        alignment=(1, 2),
        accuracy=acc,
        sensitivity=sens,
        specificity=spec,
        per_group_rates=np.array([sens, spec]),
    )


# (table, method) -> (accuracy, sensitivity, specificity); transcribed rows
_KIRC_ROWS = {
    ("T1", "fpca"): (0.835, 0.926, 0.672),
    ("T1", "descriptor"): (0.681, 0.587, 0.701),
    ("T1", "fourier"): (0.803, 0.917, 0.597),
    ("T2", "kmeans"): (0.681, 0.587, 0.701),
    ("T2", "sparse"): (0.585, 0.620, 0.522),
    ("T2", "randomized"): (0.729, 0.818, 0.567),
    ("T3", "kmeans"): (0.809, 0.917, 0.612),
    ("T3", "sparse"): (0.819, 0.819, 0.642),
    ("T3", "randomized"): (0.835, 0.926, 0.672),
}
_OVARIAN_ROWS = {
    ("T1", "fpca"): (0.570, 0.660, 0.400),
    ("T1", "descriptor"): (0.557, 0.547, 0.547),
    ("T1", "fourier"): (0.557, 0.557, 0.557),
    ("T2", "kmeans"): (0.557, 0.547, 0.547),
    ("T2", "sparse"): (0.545, 0.472, 0.657),
    ("T2", "randomized"): (0.608, 0.708, 0.457),
    ("T3", "kmeans"): (0.574, 0.660, 0.400),
    ("T3", "sparse"): (0.585, 0.670, 0.457),
    ("T3", "randomized"): (0.653, 0.793, 0.486),
}
# frozen audit outcomes (desk arithmetic on the published 3-decimal rates)
_KIRC_EXPECTED = {
    ("T1", "fpca"): True,
    ("T1", "descriptor"): False,
    ("T1", "fourier"): True,
    ("T2", "kmeans"): False,
    ("T2", "sparse"): True,
    ("T2", "randomized"): True,
    ("T3", "kmeans"): True,
    ("T3", "sparse"): False,
    ("T3", "randomized"): True,
}
_OVARIAN_EXPECTED_70 = {
    ("T1", "fpca"): False,
    ("T1", "descriptor"): False,
    ("T1", "fourier"): True,
    ("T2", "kmeans"): False,
    ("T2", "sparse"): True,
    ("T2", "randomized"): True,
    ("T3", "kmeans"): False,
    ("T3", "sparse"): True,
    ("T3", "randomized"): False,
}
_OVARIAN_EXPECTED_76 = {
    ("T1", "fpca"): False,
    ("T1", "descriptor"): False,
    ("T1", "fourier"): True,
    ("T2", "kmeans"): False,
    ("T2", "sparse"): True,
    ("T2", "randomized"): True,
    ("T3", "kmeans"): False,
    ("T3", "sparse"): True,
    ("T3", "randomized"): False,
}


def test_criterion_08_published_table_consistency():
    start = time.time()
    ok = True
    # spec-pinned row: the binary rates of the strongest KIRC row cohere
    ok &= consistency_check(_binary_report(0.835, 0.926, 0.672), 121, 67)

    # full audit: the checker must reproduce the desk arithmetic on every row
    mismatches = []
    for key, (acc, sens, spec) in _KIRC_ROWS.items():
        got = consistency_check(_binary_report(acc, sens, spec), 121, 67)
        if got != _KIRC_EXPECTED[key]:
            mismatches.append(("KIRC", key, got))
    for key, (acc, sens, spec) in _OVARIAN_ROWS.items():
        got70 = consistency_check(_binary_report(acc, sens, spec), 106, 70)
        got76 = consistency_check(_binary_report(acc, sens, spec), 106, 76)
        if got70 != _OVARIAN_EXPECTED_70[key]:
            mismatches.append(("ovarian/70", key, got70))
        if got76 != _OVARIAN_EXPECTED_76[key]:
            mismatches.append(("ovarian/76", key, got76))
    ok &= not mismatches

    n70 = sum(_OVARIAN_EXPECTED_70.values())
    n76 = sum(_OVARIAN_EXPECTED_76.values())
    print(
        "[criterion 08] note: the source reports 70 resistant samples in one "
        f"place and 76 in another; consistent ovarian rows: {n70}/9 under "
        f"(106,70) vs {n76}/9 under (106,76) — discrepancy reported, not resolved"
    )

    # three-group confusion reproduces the published accuracy 40.80% +- 0.5%
    confusion_true_by_assigned = np.array([[17, 12, 0], [15, 12, 1], [7, 7, 0]])
    truth, labels = [], []
    for g in range(3):
        for c in range(3):
            truth.extend([g + 1] * confusion_true_by_assigned[g][c])
            labels.extend([c + 1] * confusion_true_by_assigned[g][c])
    truth, labels = np.array(truth), np.array(labels)
    X, sizes = indicator_matrix(labels, 3)
    assignment = ClusterAssignment(labels=labels, k=3, objective=0.0, indicator=X, cluster_sizes=sizes)
    report = align_and_score(truth, assignment)
    ok &= report.accuracy == pytest.approx(29 / 71, abs=1e-12)
    ok &= abs(report.accuracy - 0.4080) <= 0.005

    elapsed = time.time() - start
    ok = ok and elapsed < 1.0
    line = _report(
        8, ok,
        f"table audit matched frozen arithmetic ({len(mismatches)} mismatches); "
        f"3-group accuracy {report.accuracy:.4f} vs 0.4080",
        elapsed,
    )
    assert ok, line


def test_criterion_09_pipeline_determinism(tmp_path):
    start = time.time()
    from fpcluster.cli import main

    data = tmp_path / "data"
    assert main([
        "synth", "--out", str(data), "--n", "14", "--height", "24", "--width", "24",
        "--K", "3", "--groups", "2", "--separation", "12", "--noise-sd", "0.5", "--seed", "21",
    ]) == 0
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        f"manifest_path={data / 'manifest.csv'}\n"
        f"output_dir={tmp_path / 'a'}\n"
        "basis_K=3\nfeature_source=fpc_scores\nfpca_J=5\n"
        "selector.method=randomized\nselector.k=2\n"
        "selector.epsilon=0.3333333333333333\nselector.seed=17\n"
        "clusterer.method=kmeans\nclusterer.k=2\nclusterer.seed=23\n",
        encoding="utf-8",
    )
    assert main(["pipeline", "--config", str(cfg)]) == 0
    assert main(["pipeline", "--config", str(cfg), "--set", f"output_dir={tmp_path / 'b'}"]) == 0
    identical = all(
        (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
        for name in ("plan.json", "assignment.csv", "summary.csv")
    )
    elapsed = time.time() - start
    ok = identical and elapsed < 30.0
    line = _report(9, ok, "two pipeline runs produced byte-identical plan, assignment, summary", elapsed)
    assert ok, line


def test_criterion_10_selected_count_formula():
    start = time.time()
    rng = np.random.default_rng(10)
    A = rng.standard_normal((12, 15))
    plan_a, _ = select(A, k=2, epsilon=1 / 3, seed=1)
    plan_b, _ = select(A, k=3, epsilon=0.5, seed=1)
    ok = (
        plan_a.r == 9
        and plan_b.r == 10
        and selected_feature_count(2, 1 / 3) == 9
        and selected_feature_count(3, 0.5) == 10
    )
    elapsed = time.time() - start
    ok = ok and elapsed < 1.0
    line = _report(10, ok, f"r(k=2, eps=1/3) = {plan_a.r}; r(k=3, eps=0.5) = {plan_b.r}", elapsed)
    assert ok, line
