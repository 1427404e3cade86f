"""Seeded synthetic datasets with known ground truth.

Planted feature matrices put cluster centroids at scaled standard-simplex
vertices inside a designated informative subspace (the first coordinates),
with isotropic Gaussian noise everywhere; planted image sets put the same
structure in basis-coefficient space and synthesize pixels through the
Fourier expansion, so cluster geometry lives exactly where the functional
PCA looks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import BasisConfig, synthesize_image
from .errors import InvalidArg
from .image_io import Dataset, ImageGrid
from .rng import make_rng
from .selection import FeatureMatrix


@dataclass(frozen=True)
class PlantedSpec:
    m: int
    n: int
    k: int
    informative: int
    separation: float
    noise_sd: float
    seed: int

    def __post_init__(self):
        if self.m < 2 or self.n < 1:
            raise InvalidArg("need m >= 2 samples and n >= 1 features")
        if not 1 <= self.k <= self.m:
            raise InvalidArg(f"k must lie in [1, m], got {self.k}")
        if self.informative > self.n or self.informative < 0:
            raise InvalidArg("informative must lie in [0, n]")
        if self.separation < 0 or self.noise_sd < 0:
            raise InvalidArg("separation and noise_sd must be >= 0")
        if self.k > 1 and self.separation > 0 and self.informative < self.k:
            raise InvalidArg(
                f"simplex with k={self.k} vertices needs informative >= k"
            )


def _balanced_labels(m: int, k: int) -> np.ndarray:
    """1-based block labels with sizes m//k (+1 for the first m%k clusters)."""
    sizes = [m // k + (1 if j < m % k else 0) for j in range(k)]
    return np.repeat(np.arange(1, k + 1), sizes)


def _simplex_centroids(k: int, n: int, informative: int, separation: float) -> np.ndarray:
    """k centroids at scaled standard-simplex vertices, zero outside the
    informative block.  Vertex j is (separation/sqrt(2)) * e_j, so all
    pairwise distances equal ``separation``."""
    centroids = np.zeros((k, n))
    if k > 1 and separation > 0:
        alpha = separation / np.sqrt(2.0)
        centroids[np.arange(k), np.arange(k)] = alpha
    return centroids


def planted_features(spec: PlantedSpec) -> tuple[FeatureMatrix, np.ndarray]:
    """Planted-cluster feature matrix and its ground-truth labels."""
    labels = _balanced_labels(spec.m, spec.k)
    centroids = _simplex_centroids(spec.k, spec.n, spec.informative, spec.separation)
    rng = make_rng(spec.seed)
    noise = rng.standard_normal((spec.m, spec.n)) * spec.noise_sd
    values = centroids[labels - 1] + noise
    return FeatureMatrix(values), labels


def planted_images(
    N: int,
    height: int,
    width: int,
    K: int,
    k_groups: int,
    separation: float,
    noise_sd: float,
    seed: int,
) -> tuple[Dataset, np.ndarray]:
    """Image dataset whose group structure is planted in coefficient space.

    Every image is synthesized from (group centroid + Gaussian coefficient
    noise) and all images share one affine rescaling into [0, 1], so
    pairwise geometry is preserved up to a single common factor.
    """
    config = BasisConfig(K)
    config.validate_grid(height, width)
    if N < 2:
        raise InvalidArg("need at least 2 images")
    if not 1 <= k_groups <= N:
        raise InvalidArg(f"k_groups must lie in [1, N], got {k_groups}")
    p = K * K
    if k_groups > 1 and separation > 0 and p < k_groups:
        raise InvalidArg(f"K^2={p} too small for {k_groups} simplex vertices")

    labels = _balanced_labels(N, k_groups)
    centroids = _simplex_centroids(k_groups, p, p, separation)
    rng = make_rng(seed)
    coeffs = centroids[labels - 1] + rng.standard_normal((N, p)) * noise_sd

    raw = np.stack(
        [synthesize_image(coeffs[i], config, height, width) for i in range(N)]
    )
    lo, hi = float(raw.min()), float(raw.max())
    if hi - lo < 1e-12:
        pixels = np.full_like(raw, 0.5)
    else:
        pixels = (raw - lo) / (hi - lo)

    images = [
        ImageGrid(id=f"img{i + 1:04d}", pixels=pixels[i]) for i in range(N)
    ]
    return Dataset(images=images, labels=labels.tolist()), labels
