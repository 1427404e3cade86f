"""Randomized leverage-score feature selection.

Given a sample-by-feature matrix A and a cluster count k, the selector
sketches the dominant right-singular subspace with a Gaussian projection,
converts the row norms of the top-k right singular vectors into sampling
probabilities, and draws r = k + ceil(k/eps) + 1 feature columns with
replacement, rescaling each drawn column by 1/sqrt(r * P).  Diagnostics
compare the k-means objective reached on the selected columns against the
exact optimum on the full matrix (brute force on small instances).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .clustering import (
    ClusterAssignment,
    KmeansConfig,
    feature_values,
    kmeans,
    objective_frobenius,
)
from .errors import (
    DegenerateInput,
    DegenerateOptimum,
    InvalidArg,
    RankTooLow,
    TooLarge,
)
from .rng import categorical, make_rng, stream_rng
from .serialize import read_json, write_json

_RANK_TOL = 1e-12
_EXACT_OPT_MAX_M = 12


@dataclass
class FeatureMatrix:
    """Samples in rows, features in columns, with optional feature names."""

    values: np.ndarray
    feature_names: list[str] | None = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2 or values.shape[0] < 2 or values.shape[1] < 1:
            raise InvalidArg(f"feature matrix must be m>=2 by n>=1, got {values.shape}")
        if not np.all(np.isfinite(values)):
            raise InvalidArg("feature matrix entries must be finite")
        if self.feature_names is not None and len(self.feature_names) != values.shape[1]:
            raise InvalidArg("feature_names length must match the column count")
        self.values = values

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


@dataclass
class SelectionPlan:
    """Everything needed to replay one selection deterministically.

    ``sampled_indices`` are 1-based feature indices (duplicates permitted);
    ``scale[t]`` is 1/sqrt(r * P[i_t]).
    """

    k: int
    epsilon: float
    r: int
    probabilities: np.ndarray
    sampled_indices: np.ndarray
    scale: np.ndarray
    seed: int


@dataclass
class SelectionDiagnostics:
    """Empirical check of the selection error-bound machinery."""

    gamma_hat: float
    f_opt: float
    f_selected: float
    residual_norm: float
    sigma_k_ZOS: float
    f_opt_exact: bool


def selected_feature_count(k: int, epsilon: float) -> int:
    """r = k + ceil(k/epsilon) + 1, robust to float quotients a hair above
    an integer (e.g. k=2, epsilon=1/3 must give ceil 6, not 7)."""
    if not 0.0 < epsilon <= 1.0:
        raise InvalidArg(f"epsilon must lie in (0, 1], got {epsilon}")
    q = k / epsilon
    nearest = round(q)
    ceil_q = nearest if abs(q - nearest) <= 1e-9 * max(1.0, abs(q)) else math.ceil(q)
    return k + int(ceil_q) + 1


def approx_top_right_singular_vectors(
    A, k: int, sketch_width: int, seed
) -> np.ndarray:
    """Sketched top-k right singular vectors (n x k, orthonormal columns).

    The Gaussian test matrix is filled in column-major order from the
    seeded stream; the sketch basis keeps only QR columns whose pivot
    magnitude clears 1e-12 times ||Y||_F.  Column signs are normalized so
    the largest-magnitude entry is positive.
    """
    values = feature_values(A)
    m, n = values.shape
    if not 1 <= k <= min(m, n):
        raise InvalidArg(f"k must lie in [1, {min(m, n)}], got {k}")
    if sketch_width < k:
        raise InvalidArg(f"sketch width {sketch_width} below k={k}")

    rng = make_rng(seed)
    R = rng.standard_normal((sketch_width, n)).T  # column-major fill of n x r
    Y = values @ R
    normY = np.linalg.norm(Y)
    if normY == 0.0:
        raise RankTooLow("matrix maps the sketch to zero (rank 0)")
    Q, Rfac, _ = scipy.linalg.qr(Y, mode="economic", pivoting=True)
    keep = np.abs(np.diag(Rfac)) >= _RANK_TOL * normY
    Q = Q[:, : int(keep.sum())]
    if Q.shape[1] == 0:
        raise RankTooLow("sketch basis is numerically empty")

    _, svals, Vt = np.linalg.svd(Q.T @ values, full_matrices=False)
    if svals.size == 0 or (svals > _RANK_TOL * svals[0]).sum() < k:
        raise RankTooLow(f"numerical rank below k={k}")
    Z = Vt[:k].T.copy()
    for j in range(k):
        if Z[np.argmax(np.abs(Z[:, j])), j] < 0:
            Z[:, j] = -Z[:, j]
    return Z


def leverage_probabilities(Z: np.ndarray) -> np.ndarray:
    """Sampling probabilities P_i = ||row i of Z||^2 / ||Z||_F^2."""
    Z = np.asarray(Z, dtype=float)
    row_sq = (Z**2).sum(axis=1) if Z.ndim == 2 else Z**2
    total = row_sq.sum()
    if total <= 0.0:
        raise DegenerateInput("zero matrix has no leverage distribution")
    return row_sq / total


def sample_features(P: np.ndarray, r: int, seed) -> tuple[np.ndarray, np.ndarray]:
    """Draw r features i.i.d. from P (with replacement) and their rescalings.

    Returns 1-based indices and scale[t] = 1/sqrt(r * P[i_t]).  Inverse-CDF
    sampling consumes exactly one uniform per draw and never lands on a
    zero-probability feature.
    """
    if r < 1:
        raise InvalidArg(f"r must be >= 1, got {r}")
    P = np.asarray(P, dtype=float)
    if P.min() < -1e-12 or abs(P.sum() - 1.0) > 1e-9:
        raise InvalidArg("P is not a probability distribution")
    rng = make_rng(seed)
    idx = categorical(rng, np.cumsum(P), r)
    # the clip inside categorical() can land on a trailing zero-probability
    # index when the cumulative sum rounds below 1; push back to support
    last_pos = int(np.flatnonzero(P > 0)[-1])
    idx = np.where(P[idx] > 0, idx, last_pos)
    scale = 1.0 / np.sqrt(r * P[idx])
    return idx + 1, scale


def select(A, k: int, epsilon: float, seed: int) -> tuple[SelectionPlan, FeatureMatrix]:
    """Full randomized selection: sketch, leverage probabilities, sampling.

    The sketch and the sampler use independent streams derived from the
    seed (counter jumps 0 and 1), so the plan replays bit-for-bit.
    """
    values = feature_values(A)
    m, n = values.shape
    if not 1 <= k <= min(m, n):
        raise InvalidArg(f"k must lie in [1, {min(m, n)}], got {k}")
    r = selected_feature_count(k, epsilon)

    Z = approx_top_right_singular_vectors(values, k, r, stream_rng(seed, 0))
    P = leverage_probabilities(Z)
    indices, scale = sample_features(P, r, stream_rng(seed, 1))

    reduced = values[:, indices - 1] * scale[None, :]
    names = getattr(A, "feature_names", None)
    reduced_names = [names[i - 1] for i in indices] if names is not None else None
    plan = SelectionPlan(
        k=k,
        epsilon=float(epsilon),
        r=r,
        probabilities=P,
        sampled_indices=indices,
        scale=scale,
        seed=int(seed),
    )
    return plan, FeatureMatrix(reduced, reduced_names)


def sketch_for_plan(A, plan: SelectionPlan) -> np.ndarray:
    """Regenerate the Z a plan's selection was based on (same seed stream)."""
    return approx_top_right_singular_vectors(
        A, plan.k, plan.r, stream_rng(plan.seed, 0)
    )


def _partitions_into(m: int, k: int):
    """All partitions of m items into exactly k non-empty blocks.

    Yields 0-based label arrays in restricted-growth order, so each
    partition appears once regardless of block numbering.
    """
    labels = np.zeros(m, dtype=int)

    def rec(i: int, used: int):
        if m - i < k - used:
            return
        if i == m:
            if used == k:
                yield labels.copy()
            return
        for b in range(min(used + 1, k)):
            labels[i] = b
            yield from rec(i + 1, max(used, b + 1))

    yield from rec(1, 1)  # item 0 always opens block 0


def exact_kmeans_optimum(values: np.ndarray, k: int) -> tuple[float, np.ndarray]:
    """Brute-force minimum of the k-means objective over all k-partitions."""
    values = feature_values(values)
    m = values.shape[0]
    if not 1 <= k <= m:
        raise InvalidArg(f"k must lie in [1, {m}], got {k}")
    best_obj, best_labels = np.inf, None
    total_sq = float((values**2).sum())
    for labels in _partitions_into(m, k):
        obj = total_sq
        for j in range(k):
            block = values[labels == j]
            obj -= float((block.sum(axis=0) ** 2).sum()) / block.shape[0]
        if obj < best_obj:
            best_obj, best_labels = obj, labels + 1
    return max(best_obj, 0.0), best_labels


def assemble_ZOS(Z: np.ndarray, plan: SelectionPlan) -> np.ndarray:
    """The k x r matrix Z^T Omega S implied by a selection plan."""
    cols = Z[plan.sampled_indices - 1, :].T * plan.scale[None, :]
    return cols


def bound_diagnostics(
    A,
    plan: SelectionPlan,
    Z: np.ndarray,
    labels_selected: ClusterAssignment,
    exact: bool = True,
) -> SelectionDiagnostics:
    """Compare the selected-feature clustering against the exact optimum.

    ``f_opt`` is the brute-force optimum for m <= 12; with ``exact=False``
    larger instances substitute the best of 200 seeded Lloyd restarts and
    flag the estimate via ``f_opt_exact=False``.  ``f_selected`` evaluates
    the selected-feature labels on the FULL matrix.
    """
    values = feature_values(A)
    m = values.shape[0]
    k = plan.k
    if exact and m > _EXACT_OPT_MAX_M:
        raise TooLarge(f"exact optimum capped at m={_EXACT_OPT_MAX_M}, got m={m}")

    if m <= _EXACT_OPT_MAX_M:
        f_opt, _ = exact_kmeans_optimum(values, k)
        f_opt_exact = True
    else:
        cfg = KmeansConfig(k=k, restarts=200, seed=plan.seed)
        f_opt = kmeans(values, cfg).objective
        f_opt_exact = False

    f_selected = objective_frobenius(values, labels_selected)
    scale_sq = max(1.0, float((values**2).sum()))
    if f_opt <= 1e-12 * scale_sq:
        if f_selected <= 1e-9:
            gamma_hat = 1.0
        else:
            raise DegenerateOptimum(
                f"f_opt is zero but f_selected={f_selected}; ratio undefined"
            )
    else:
        # f_selected >= f_opt mathematically; max() absorbs round-off from
        # the two different objective evaluation paths
        gamma_hat = max(1.0, f_selected / f_opt)

    residual = values - (values @ Z) @ Z.T
    svals = np.linalg.svd(assemble_ZOS(Z, plan), compute_uv=False)
    sigma_k = float(svals[k - 1]) if svals.size >= k else 0.0
    return SelectionDiagnostics(
        gamma_hat=float(gamma_hat),
        f_opt=float(f_opt),
        f_selected=float(f_selected),
        residual_norm=float(np.linalg.norm(residual)),
        sigma_k_ZOS=sigma_k,
        f_opt_exact=f_opt_exact,
    )


def save_plan(plan: SelectionPlan, path) -> None:
    write_json(
        path,
        {
            "k": plan.k,
            "epsilon": plan.epsilon,
            "r": plan.r,
            "seed": plan.seed,
            "probabilities": plan.probabilities.tolist(),
            "sampled_indices": plan.sampled_indices.tolist(),
            "scale": plan.scale.tolist(),
        },
    )


def load_plan(path) -> SelectionPlan:
    doc = read_json(path)
    return SelectionPlan(
        k=int(doc["k"]),
        epsilon=float(doc["epsilon"]),
        r=int(doc["r"]),
        probabilities=np.asarray(doc["probabilities"], dtype=float),
        sampled_indices=np.asarray(doc["sampled_indices"], dtype=int),
        scale=np.asarray(doc["scale"], dtype=float),
        seed=int(doc["seed"]),
    )
