"""Lloyd's k-means and normalized spectral clustering.

Both clusterers accept any sample-by-feature matrix (raw coefficients,
principal component scores, or selected columns).  The k-means objective
is the within-cluster sum of squares; with the normalized indicator matrix
X (entries 1/sqrt(cluster size)) it equals ||A - X X^T A||_F^2, and both
forms are exposed so the identity can be checked directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (
    DegenerateAffinity,
    InvalidArg,
    InvalidConfig,
    NumericalFailure,
    ShapeMismatch,
)
from .rng import categorical, stream_rng

_TINY = 1e-300


def feature_values(A) -> np.ndarray:
    """Accept a FeatureMatrix or a plain 2-D array and return the array."""
    values = getattr(A, "values", A)
    values = np.asarray(values, dtype=float)
    if values.ndim != 2:
        raise ShapeMismatch("feature matrix must be 2-D")
    return values


@dataclass(frozen=True)
class KmeansConfig:
    k: int
    restarts: int = 20
    max_iters: int = 300
    tol: float = 1e-9
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise InvalidConfig(f"k must be >= 1, got {self.k}")
        if self.restarts < 1 or self.max_iters < 1:
            raise InvalidConfig("restarts and max_iters must be >= 1")
        if self.tol < 0:
            raise InvalidConfig("tol must be >= 0")


@dataclass(frozen=True)
class SpectralConfig:
    k: int
    sigma: float | str = "median"
    seed: int = 0
    kmeans: KmeansConfig | None = None  # inner solver for the embedded rows

    def __post_init__(self):
        if self.k < 1:
            raise InvalidConfig(f"k must be >= 1, got {self.k}")
        if not (self.sigma == "median" or (np.isreal(self.sigma) and self.sigma > 0)):
            raise InvalidConfig("sigma must be a positive real or 'median'")


@dataclass
class ClusterAssignment:
    """Labels in {1..k} plus the normalized indicator matrix and objective."""

    labels: np.ndarray
    k: int
    objective: float
    indicator: np.ndarray
    cluster_sizes: np.ndarray


def indicator_matrix(labels: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Normalized m x k cluster-membership matrix and the cluster sizes."""
    labels = np.asarray(labels, dtype=int)
    m = labels.size
    sizes = np.bincount(labels - 1, minlength=k)
    if sizes.min() < 1:
        raise InvalidArg("every cluster must be non-empty")
    X = np.zeros((m, k))
    X[np.arange(m), labels - 1] = 1.0 / np.sqrt(sizes[labels - 1])
    return X, sizes


def objective_sumsq(values: np.ndarray, labels: np.ndarray) -> float:
    """Within-cluster sum of squared distances to the cluster means."""
    values = feature_values(values)
    labels = np.asarray(labels, dtype=int)
    total = 0.0
    for lab in np.unique(labels):
        block = values[labels == lab]
        total += float(((block - block.mean(axis=0)) ** 2).sum())
    return total


def objective_frobenius(A, assignment: ClusterAssignment) -> float:
    """The same objective in projector form, ||A - X X^T A||_F^2."""
    values = feature_values(A)
    labels = np.asarray(assignment.labels, dtype=int)
    if labels.size != values.shape[0]:
        raise ShapeMismatch("assignment length does not match the matrix rows")
    X, _ = indicator_matrix(labels, assignment.k)
    residual = values - X @ (X.T @ values)
    return float((residual**2).sum())


def _kmeanspp_centers(values: np.ndarray, k: int, rng) -> np.ndarray:
    """k-means++ seeding; every categorical draw consumes one uniform."""
    m = values.shape[0]
    centers = np.empty((k, values.shape[1]))
    centers[0] = values[int(rng.integers(m))]
    if k == 1:
        return centers
    d2 = ((values - centers[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        total = d2.sum()
        if total > 0:
            probs = d2 / total
        else:
            probs = np.full(m, 1.0 / m)
        idx = int(categorical(rng, np.cumsum(probs), 1)[0])
        centers[j] = values[idx]
        if j < k - 1:
            d2 = np.minimum(d2, ((values - centers[j]) ** 2).sum(axis=1))
    return centers


def _lloyd(values: np.ndarray, k: int, rng, max_iters: int, tol: float):
    """One seeded k-means++/Lloyd run.

    Returns (labels 0-based, objective, per-iteration objective trace).
    Ties in the assignment step go to the lowest cluster index; an empty
    cluster steals the point farthest from its current centroid.
    """
    m = values.shape[0]
    centers = _kmeanspp_centers(values, k, rng)
    prev = np.inf
    trace: list[float] = []
    labels = np.zeros(m, dtype=int)
    for _ in range(max_iters):
        d2 = (
            (values**2).sum(axis=1)[:, None]
            + (centers**2).sum(axis=1)[None, :]
            - 2.0 * values @ centers.T
        )
        labels = d2.argmin(axis=1)
        own = d2[np.arange(m), labels]
        sizes = np.bincount(labels, minlength=k)
        for j in range(k):
            if sizes[j] == 0:
                donors = np.where(sizes[labels] >= 2)[0]
                p = donors[np.argmax(own[donors])]
                sizes[labels[p]] -= 1
                labels[p] = j
                sizes[j] = 1
                own[p] = -np.inf
        for j in range(k):
            centers[j] = values[labels == j].mean(axis=0)
        obj = objective_sumsq(values, labels + 1)
        trace.append(obj)
        if not np.isfinite(obj):
            raise NumericalFailure("non-finite k-means objective")
        if prev - obj <= tol * max(prev, _TINY):
            break
        prev = obj
    return labels, trace[-1], trace


@dataclass
class KmeansRun:
    """Bookkeeping for one multi-restart k-means invocation."""

    assignment: ClusterAssignment
    best_restart: int
    iterations: list[int] = field(default_factory=list)
    objectives: list[float] = field(default_factory=list)
    traces: list[list[float]] = field(default_factory=list)


def run_kmeans(A, config: KmeansConfig) -> KmeansRun:
    """Best of ``config.restarts`` seeded runs; restart i draws from stream i.

    Ties on the objective keep the lowest restart index, so results do not
    depend on execution order.
    """
    values = feature_values(A)
    m = values.shape[0]
    if config.k > m:
        raise InvalidArg(f"k={config.k} exceeds number of samples m={m}")
    best = None
    run = KmeansRun(assignment=None, best_restart=-1)  # filled below
    for r in range(config.restarts):
        rng = stream_rng(config.seed, r)
        labels, obj, trace = _lloyd(values, config.k, rng, config.max_iters, config.tol)
        run.iterations.append(len(trace))
        run.objectives.append(obj)
        run.traces.append(trace)
        if best is None or obj < best[0]:
            best = (obj, labels, r)
    obj, labels, r = best
    X, sizes = indicator_matrix(labels + 1, config.k)
    run.assignment = ClusterAssignment(
        labels=labels + 1, k=config.k, objective=obj, indicator=X, cluster_sizes=sizes
    )
    run.best_restart = r
    return run


def kmeans(A, config: KmeansConfig) -> ClusterAssignment:
    """Multi-restart Lloyd's k-means with k-means++ seeding."""
    return run_kmeans(A, config).assignment


def pairwise_sq_distances(values: np.ndarray) -> np.ndarray:
    sq = (values**2).sum(axis=1)
    return np.maximum(sq[:, None] + sq[None, :] - 2.0 * values @ values.T, 0.0)


def median_bandwidth(values: np.ndarray) -> float:
    """Median of the nonzero pairwise distances."""
    values = feature_values(values)
    d2 = pairwise_sq_distances(values)
    upper = d2[np.triu_indices(values.shape[0], k=1)]
    positive = upper[upper > 0]
    if positive.size == 0:
        raise DegenerateAffinity("all pairwise distances are zero")
    return float(np.median(np.sqrt(positive)))


def gaussian_affinity(values: np.ndarray, sigma: float) -> np.ndarray:
    """W_ij = exp(-||a_i - a_j||^2 / (2 sigma^2)), zero diagonal."""
    values = feature_values(values)
    W = np.exp(-pairwise_sq_distances(values) / (2.0 * sigma**2))
    np.fill_diagonal(W, 0.0)
    return W


def spectral(A, config: SpectralConfig) -> ClusterAssignment:
    """Symmetric-normalized spectral clustering with a Gaussian affinity.

    The reported objective is the k-means objective of the resulting labels
    on the ORIGINAL features, so results are comparable across methods.
    """
    values = feature_values(A)
    m = values.shape[0]
    if m < 3:
        raise InvalidArg("spectral clustering needs at least 3 samples")
    if config.k > m:
        raise InvalidArg(f"k={config.k} exceeds number of samples m={m}")

    sigma = median_bandwidth(values) if config.sigma == "median" else float(config.sigma)
    W = gaussian_affinity(values, sigma)
    deg = W.sum(axis=1)
    inv_sqrt = np.where(deg > 0, 1.0 / np.sqrt(np.where(deg > 0, deg, 1.0)), 0.0)
    L = np.eye(m) - inv_sqrt[:, None] * W * inv_sqrt[None, :]
    L = (L + L.T) / 2.0
    try:
        _, vecs = np.linalg.eigh(L)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"Laplacian eigendecomposition failed: {exc}") from exc
    U = vecs[:, : config.k].copy()
    for j in range(U.shape[1]):
        if U[np.argmax(np.abs(U[:, j])), j] < 0:
            U[:, j] = -U[:, j]
    norms = np.linalg.norm(U, axis=1)
    rows = np.where(norms[:, None] > 0, U / np.where(norms > 0, norms, 1.0)[:, None], 0.0)

    inner = config.kmeans or KmeansConfig(k=config.k, seed=config.seed)
    if inner.k != config.k:
        inner = replace(inner, k=config.k)
    embedded = kmeans(rows, inner)
    obj = objective_sumsq(values, embedded.labels)
    return ClusterAssignment(
        labels=embedded.labels,
        k=config.k,
        objective=obj,
        indicator=embedded.indicator,
        cluster_sizes=embedded.cluster_sizes,
    )
