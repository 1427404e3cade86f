"""Two-dimensional functional PCA in coefficient space.

With orthonormal tensor-product basis functions, the covariance operator's
eigenproblem reduces to the discrete symmetric eigenproblem

    (1/N) C_c^T C_c  b = lambda b,

where C_c is the column-centered N x K^2 coefficient matrix.  Principal
component scores are inner products of centered coefficient rows with the
eigenvectors, which equals the double integral of the centered image
against the principal component function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .basis import BasisConfig
from .errors import InvalidArg, NumericalFailure, RankDeficient, ShapeMismatch
from .serialize import read_json, write_json

_EIG_CLAMP = 1e-10


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip each column so its largest-magnitude entry is positive.

    np.argmax returns the first maximum, so ties go to the lowest index.
    """
    out = vectors.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        if col[np.argmax(np.abs(col))] < 0:
            out[:, j] = -col
    return out


@dataclass
class FpcaModel:
    """Fitted model: mean coefficients, top-J eigenpairs, basis geometry."""

    mean_coeffs: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # K^2 x J, orthonormal columns
    basis_config: BasisConfig
    J: int
    total_variance: float  # trace of (1/N) C_c^T C_c

    @property
    def K(self) -> int:
        return self.basis_config.K

    def variance_explained(self) -> np.ndarray:
        """Fraction of total variance carried by each retained component."""
        if self.total_variance <= 0:
            return np.zeros(self.J)
        return self.eigenvalues / self.total_variance


def fit_fpca(coeffs: np.ndarray, J: int) -> FpcaModel:
    """Eigendecompose the coefficient covariance and keep the top J pairs.

    Eigenvalues are sorted non-increasing; tiny negative values (round-off,
    above -1e-10) are clamped to zero.  Eigenvector signs follow the
    largest-magnitude-entry-positive rule so fits are reproducible.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.ndim != 2:
        raise ShapeMismatch("coefficient matrix must be 2-D")
    N, p = coeffs.shape
    if N < 2:
        raise InvalidArg("need at least 2 samples")
    K = math.isqrt(p)
    if K * K != p or K % 2 == 0:
        raise ShapeMismatch(f"column count {p} is not an odd K squared")
    if J < 1 or J > min(N - 1, p):
        raise RankDeficient(f"J={J} exceeds min(N-1, K^2)={min(N - 1, p)}")

    mean = coeffs.mean(axis=0)
    centered = coeffs - mean
    M = centered.T @ centered / N
    try:
        evals, evecs = np.linalg.eigh(M)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigendecomposition failed: {exc}") from exc
    evals, evecs = evals[::-1], evecs[:, ::-1]
    if evals.min() < -_EIG_CLAMP:
        raise NumericalFailure(f"eigenvalue {evals.min()} below round-off tolerance")
    evals = np.clip(evals, 0.0, None)

    return FpcaModel(
        mean_coeffs=mean,
        eigenvalues=evals[:J].copy(),
        eigenvectors=_fix_signs(evecs[:, :J]),
        basis_config=BasisConfig(K),
        J=J,
        total_variance=float(np.trace(M)),
    )


def transform(model: FpcaModel, coeffs: np.ndarray) -> np.ndarray:
    """Project coefficient rows onto the principal components.

    Returns the N x J score matrix in input row order.
    """
    coeffs = np.atleast_2d(np.asarray(coeffs, dtype=float))
    if coeffs.shape[1] != model.mean_coeffs.size:
        raise ShapeMismatch(
            f"expected {model.mean_coeffs.size} columns, got {coeffs.shape[1]}"
        )
    return (coeffs - model.mean_coeffs) @ model.eigenvectors


def reconstruct(model: FpcaModel, scores: np.ndarray, J_use: int) -> np.ndarray:
    """Coefficient vector rebuilt from the first ``J_use`` score components."""
    scores = np.asarray(scores, dtype=float).ravel()
    if scores.size != model.J:
        raise ShapeMismatch(f"expected {model.J} scores, got {scores.size}")
    if J_use < 0 or J_use > model.J:
        raise ShapeMismatch(f"J_use={J_use} outside [0, {model.J}]")
    return model.mean_coeffs + model.eigenvectors[:, :J_use] @ scores[:J_use]


def save_model(model: FpcaModel, path) -> None:
    """Serialize a model to JSON (eigenvectors stored column-major)."""
    write_json(
        path,
        {
            "K": model.K,
            "J": model.J,
            "mean": model.mean_coeffs.tolist(),
            "eigenvalues": model.eigenvalues.tolist(),
            "eigenvectors": model.eigenvectors.T.tolist(),
            "total_variance": model.total_variance,
        },
    )


def load_model(path) -> FpcaModel:
    doc = read_json(path)
    eigenvectors = np.asarray(doc["eigenvectors"], dtype=float).T
    return FpcaModel(
        mean_coeffs=np.asarray(doc["mean"], dtype=float),
        eigenvalues=np.asarray(doc["eigenvalues"], dtype=float),
        eigenvectors=eigenvectors,
        basis_config=BasisConfig(int(doc["K"])),
        J=int(doc["J"]),
        total_variance=float(doc["total_variance"]),
    )
