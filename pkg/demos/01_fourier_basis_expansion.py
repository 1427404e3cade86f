# Tensor-product Fourier expansion of a grayscale image.
#
# Shows the 1-D basis family on the unit interval, checks its discrete
# orthonormality on the midpoint grid, then fits and rebuilds an image
# from its coefficient block.

import numpy as np

from fpcluster import (
    BasisConfig,
    Dataset,
    ImageGrid,
    evaluate_basis,
    fit_coefficients,
    synthesize_image,
)

# ---------------------------------------------------------------------------
# 1. The 1-D basis: constant + sqrt(2) sin/cos pairs on the midpoint grid
# ---------------------------------------------------------------------------
K, G = 5, 64
bm = evaluate_basis(K, G)
print(f"basis matrix: {bm.values.shape[0]} grid points x {bm.values.shape[1]} functions")
print("first grid point:", bm.grid_points[0])

gram = bm.values.T @ bm.values / G
print("max deviation from orthonormality:", np.abs(gram - np.eye(K)).max())

# ---------------------------------------------------------------------------
# 2. Synthesize an image from a known coefficient block, then fit it back
# ---------------------------------------------------------------------------
rng = np.random.default_rng(0)
block = rng.uniform(-0.02, 0.02, (K, K))
block[0, 0] = 0.5  # constant term keeps pixels inside [0, 1]

height, width = 48, 40
pixels = synthesize_image(block.ravel(), BasisConfig(K), height, width)
print("synthesized image range:", pixels.min(), "to", pixels.max())

dataset = Dataset(images=[ImageGrid(id="demo", pixels=pixels)] * 2)
coeffs = fit_coefficients(dataset, BasisConfig(K))
print("coefficient recovery error:", np.abs(coeffs[0] - block.ravel()).max())

# ---------------------------------------------------------------------------
# 3. A natural (non-representable) image: the fit is a smooth approximation
# ---------------------------------------------------------------------------
yy, xx = np.mgrid[0:height, 0:width]
photo = 0.5 + 0.4 * np.sin(2 * np.pi * yy / height) * (xx / width) ** 2
dataset2 = Dataset(images=[ImageGrid(id="photo", pixels=photo)] * 2)
coeffs2 = fit_coefficients(dataset2, BasisConfig(K))
approx = synthesize_image(coeffs2[0], BasisConfig(K), height, width)
rel = np.linalg.norm(photo - approx) / np.linalg.norm(photo)
print(f"relative L2 error of the K={K} expansion on a smooth test image: {rel:.4f}")
