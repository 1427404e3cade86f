"""Tensor-product Fourier basis on the unit square.

The 1-D family on [0, 1] is the constant function followed by paired
sine/cosine harmonics,

    phi_1(u) = 1,
    phi_2j(u) = sqrt(2) sin(2 pi j u),   phi_2j+1(u) = sqrt(2) cos(2 pi j u),

evaluated on the midpoint grid u_g = (g - 1/2)/G.  With this scaling the
columns are orthonormal under midpoint quadrature, so tensor-product
expansion coefficients behave like coordinates in an orthonormal system.
An image X (height x width) is modeled as Phi_s B Phi_t^T and the K x K
coefficient block B is fit by least squares; coefficient vectors store B
in row-major order, i.e. entry (k-1)*K + l multiplies phi_k(s) phi_l(t).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidConfig, NumericalFailure, ShapeMismatch
from .image_io import Dataset


@dataclass(frozen=True)
class BasisConfig:
    """Number of 1-D basis functions per axis; must be odd so sin/cos pair up."""

    K: int

    def __post_init__(self):
        if self.K < 1 or self.K % 2 == 0:
            raise InvalidConfig(f"K must be an odd positive integer, got {self.K}")

    def validate_grid(self, height: int, width: int) -> None:
        if self.K > min(height, width):
            raise InvalidConfig(
                f"K={self.K} exceeds min grid dimension {min(height, width)}"
            )


@dataclass(frozen=True)
class BasisMatrix:
    """Basis functions evaluated on a midpoint grid: values[g, k] = phi_k(u_g)."""

    values: np.ndarray
    grid_points: np.ndarray


def evaluate_basis(K: int, G: int) -> BasisMatrix:
    """Evaluate the K-function Fourier family on the G-point midpoint grid."""
    if K < 1 or K % 2 == 0:
        raise InvalidConfig(f"K must be an odd positive integer, got {K}")
    if K > G:
        raise InvalidConfig(f"K={K} exceeds grid size G={G}")
    u = (np.arange(1, G + 1) - 0.5) / G
    cols = [np.ones(G)]
    for j in range(1, (K - 1) // 2 + 1):
        w = 2.0 * np.pi * j * u
        cols.append(np.sqrt(2.0) * np.sin(w))
        cols.append(np.sqrt(2.0) * np.cos(w))
    return BasisMatrix(values=np.column_stack(cols), grid_points=u)


def fit_coefficients(dataset: Dataset, config: BasisConfig) -> np.ndarray:
    """Least-squares tensor-product coefficients for every image.

    Returns an N x K^2 matrix whose i-th row is the row-major vec of the
    coefficient block B_i minimizing ||X_i - Phi_s B Phi_t^T||_F.  Rows
    follow dataset order.
    """
    config.validate_grid(dataset.height, dataset.width)
    K = config.K
    phi_s = evaluate_basis(K, dataset.height).values
    phi_t = evaluate_basis(K, dataset.width).values
    try:
        ps = np.linalg.pinv(phi_s)
        pt = np.linalg.pinv(phi_t)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"pseudoinverse failed: {exc}") from exc
    stack = dataset.pixel_stack()
    blocks = np.einsum("kh,nhw,lw->nkl", ps, stack, pt)
    coeffs = blocks.reshape(len(dataset), K * K)
    if not np.all(np.isfinite(coeffs)):
        raise NumericalFailure("non-finite expansion coefficients")
    return coeffs


def synthesize_image(
    coeffs: np.ndarray, config: BasisConfig, height: int, width: int
) -> np.ndarray:
    """Evaluate the expansion with the given coefficients on a pixel grid.

    The result is Phi_s B Phi_t^T and may lie outside [0, 1]; clamping is
    left to the image writer.
    """
    K = config.K
    coeffs = np.asarray(coeffs, dtype=float).ravel()
    if coeffs.size != K * K:
        raise ShapeMismatch(f"expected {K * K} coefficients, got {coeffs.size}")
    B = coeffs.reshape(K, K)
    phi_s = evaluate_basis(K, height).values
    phi_t = evaluate_basis(K, width).values
    return phi_s @ B @ phi_t.T
