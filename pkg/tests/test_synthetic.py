import numpy as np
import pytest

from fpcluster import (
    BasisConfig,
    KmeansConfig,
    PlantedSpec,
    align_and_score,
    exact_kmeans_optimum,
    fit_coefficients,
    fit_fpca,
    kmeans,
    planted_features,
    planted_images,
    transform,
)
from fpcluster.errors import InvalidArg


def test_zero_noise_samples_equal_centroids():
    spec = PlantedSpec(m=6, n=5, k=2, informative=3, separation=4.0, noise_sd=0.0, seed=0)
    A, labels = planted_features(spec)
    assert np.array_equal(labels, [1, 1, 1, 2, 2, 2])
    for lab in (1, 2):
        block = A.values[labels == lab]
        assert np.all(block == block[0])
    f_opt, _ = exact_kmeans_optimum(A.values, 2)
    assert f_opt == pytest.approx(0.0, abs=1e-12)


def test_centroid_pairwise_distances_equal_separation():
    for k in (2, 3, 4):
        spec = PlantedSpec(m=2 * k, n=10, k=k, informative=k, separation=7.5, noise_sd=0.0, seed=1)
        A, labels = planted_features(spec)
        centroids = np.array([A.values[labels == j][0] for j in range(1, k + 1)])
        for i in range(k):
            for j in range(i + 1, k):
                assert np.linalg.norm(centroids[i] - centroids[j]) == pytest.approx(7.5, rel=1e-12)
        # nothing planted outside the informative block
        assert np.all(A.values[:, k:] == 0.0)


def test_zero_separation_coincident_centroids():
    spec = PlantedSpec(m=4, n=6, k=2, informative=3, separation=0.0, noise_sd=0.0, seed=2)
    A, _ = planted_features(spec)
    assert np.all(A.values == 0.0)


def test_balanced_sizes_remainder_to_low_clusters():
    spec = PlantedSpec(m=11, n=4, k=3, informative=3, separation=1.0, noise_sd=0.0, seed=3)
    _, labels = planted_features(spec)
    sizes = np.bincount(labels)[1:]
    assert sizes.tolist() == [4, 4, 3]


def test_leverage_mass_concentrates_on_informative_features():
    # oracle: exact SVD of the generated instance (seed verified in development)
    spec = PlantedSpec(m=40, n=200, k=2, informative=4, separation=20.0, noise_sd=1.0, seed=1)
    A, _ = planted_features(spec)
    Z = np.linalg.svd(A.values, full_matrices=False)[2][:2].T
    P = (Z**2).sum(axis=1) / 2.0
    assert P[:4].sum() > 0.95


def test_determinism_and_seed_sensitivity():
    spec = PlantedSpec(m=8, n=6, k=2, informative=2, separation=3.0, noise_sd=1.0, seed=11)
    A1, _ = planted_features(spec)
    A2, _ = planted_features(spec)
    assert np.array_equal(A1.values, A2.values)
    A3, _ = planted_features(
        PlantedSpec(m=8, n=6, k=2, informative=2, separation=3.0, noise_sd=1.0, seed=12)
    )
    assert np.any(A1.values != A3.values)


def test_planted_features_validation():
    with pytest.raises(InvalidArg):
        PlantedSpec(m=4, n=3, k=2, informative=5, separation=1.0, noise_sd=0.0, seed=0)
    with pytest.raises(InvalidArg):
        PlantedSpec(m=4, n=8, k=3, informative=2, separation=1.0, noise_sd=0.0, seed=0)
    with pytest.raises(InvalidArg):
        PlantedSpec(m=2, n=4, k=3, informative=3, separation=1.0, noise_sd=0.0, seed=0)


def test_planted_images_zero_noise_identical_within_group():
    ds, labels = planted_images(
        N=6, height=16, width=16, K=3, k_groups=2, separation=5.0, noise_sd=0.0, seed=4
    )
    stack = ds.pixel_stack()
    for lab in (1, 2):
        block = stack[labels == lab]
        assert np.abs(block - block[0]).max() < 1e-12
    assert ds.labels == labels.tolist()


def test_planted_images_pipeline_reaches_perfect_accuracy():
    ds, labels = planted_images(
        N=10, height=24, width=24, K=3, k_groups=2, separation=25.0, noise_sd=1.0, seed=5
    )
    coeffs = fit_coefficients(ds, BasisConfig(3))
    model = fit_fpca(coeffs, 3)
    scores = transform(model, coeffs)
    assignment = kmeans(scores, KmeansConfig(k=2, restarts=20, seed=6))
    report = align_and_score(labels, assignment)
    assert report.accuracy == 1.0
    # exhaustive oracle confirms the found optimum on this small instance
    f_opt, _ = exact_kmeans_optimum(scores, 2)
    assert assignment.objective == pytest.approx(f_opt, abs=1e-9)


def test_fpca_first_score_separates_groups():
    ds, labels = planted_images(
        N=12, height=24, width=24, K=3, k_groups=2, separation=20.0, noise_sd=1.0, seed=7
    )
    coeffs = fit_coefficients(ds, BasisConfig(3))
    model = fit_fpca(coeffs, 4)
    scores = transform(model, coeffs)
    col = scores[:, 0]
    overall = col.var()
    within = sum(col[labels == g].var() * (labels == g).sum() for g in (1, 2)) / len(col)
    between_fraction = 1.0 - within / overall
    assert between_fraction > 0.9


def test_affine_rescaling_preserves_relative_geometry():
    ds, _ = planted_images(
        N=6, height=16, width=16, K=3, k_groups=2, separation=8.0, noise_sd=0.5, seed=8
    )
    coeffs = fit_coefficients(ds, BasisConfig(3))
    stack = ds.pixel_stack().reshape(6, -1)
    ratios = []
    for i in range(6):
        for j in range(i + 1, 6):
            d_pix = np.linalg.norm(stack[i] - stack[j])
            d_coeff = np.linalg.norm(coeffs[i] - coeffs[j])
            if d_coeff > 1e-12:
                ratios.append(d_pix / d_coeff)
    ratios = np.array(ratios)
    assert np.abs(ratios - ratios[0]).max() <= 1e-8 * ratios[0]


def test_planted_images_pixels_in_unit_interval():
    ds, _ = planted_images(
        N=5, height=12, width=12, K=3, k_groups=2, separation=30.0, noise_sd=2.0, seed=9
    )
    stack = ds.pixel_stack()
    assert stack.min() >= 0.0 and stack.max() <= 1.0
