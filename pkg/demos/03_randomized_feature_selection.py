# Randomized leverage-score column selection on a planted-cluster matrix.
#
# Walks through the selector stage by stage: Gaussian sketch of the top
# right-singular subspace, leverage probabilities, with-replacement column
# sampling with 1/sqrt(rP) rescaling, and the error-bound diagnostics on a
# small instance where the exact optimum is enumerable.

import numpy as np

from fpcluster import (
    FeatureMatrix,
    KmeansConfig,
    PlantedSpec,
    bound_diagnostics,
    kmeans,
    leverage_probabilities,
    planted_features,
    select,
    selected_feature_count,
    sketch_for_plan,
)

spec = PlantedSpec(m=40, n=200, k=2, informative=4, separation=20.0, noise_sd=1.0, seed=1)
A, truth = planted_features(spec)
print(f"matrix: {spec.m} samples x {spec.n} features, {spec.informative} informative")

# exact leverage scores, for reference
Z_exact = np.linalg.svd(A.values, full_matrices=False)[2][: spec.k].T
P_exact = leverage_probabilities(Z_exact)
print(f"exact leverage mass on the informative block: {P_exact[:4].sum():.4f}")

# the full randomized selection
k, epsilon, seed = 2, 1 / 3, 5
r = selected_feature_count(k, epsilon)
print(f"\nselecting r = k + ceil(k/eps) + 1 = {r} columns (k={k}, eps=1/3)")
plan, C = select(A, k=k, epsilon=epsilon, seed=seed)
print("sampled feature indices:", plan.sampled_indices.tolist())
print("rescaling factors:      ", np.round(plan.scale, 3).tolist())
hit = (plan.sampled_indices <= spec.informative).mean()
print(f"fraction of draws on informative features: {hit:.2f}")

# diagnostics need an instance small enough to enumerate every partition
sub = np.concatenate([np.flatnonzero(truth == 1)[:6], np.flatnonzero(truth == 2)[:6]])
A12 = FeatureMatrix(A.values[sub])
plan12, C12 = select(A12, k=k, epsilon=epsilon, seed=seed)
assignment = kmeans(C12, KmeansConfig(k=2, restarts=50, seed=3))
diag = bound_diagnostics(A12, plan12, sketch_for_plan(A12, plan12), assignment)
print("\ndiagnostics on a 12-sample sub-instance (exact brute force):")
print(f"  exact optimal objective      f_opt      = {diag.f_opt:.3f}")
print(f"  selected-feature clustering  f_selected = {diag.f_selected:.3f}")
print(f"  empirical approximation ratio gamma     = {diag.gamma_hat:.3f}")
print(f"  sketch residual ||A - A Z Z^T||_F       = {diag.residual_norm:.3f}")
print(f"  sigma_k of the sampled sketch           = {diag.sigma_k_ZOS:.3f}")
