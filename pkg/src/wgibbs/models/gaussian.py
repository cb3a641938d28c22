"""Multivariate normal target with exact single-site conditionals.

Conditionals come from the precision matrix L = Sigma^{-1}:

    x_i | x_{-i}  ~  N( mu_i - sum_{j != i} L_ij (x_j - mu_j) / L_ii ,  1 / L_ii )

The low-rank-plus-ridge construction used in the experiments is
Sigma = ridge * I + eps * Y Y^T with Y a (dim, rank) standard normal draw;
small rank with large eps gives a few dominant directions and strongly
heterogeneous marginal variances, full rank with small eps is near isotropic.
"""

from __future__ import annotations

import numpy as np

from ..engine import GibbsModel

__all__ = ["GaussianTarget", "make_covariance"]


def make_covariance(dim: int, rank: int, eps: float, ridge: float,
                    rng: np.random.Generator) -> np.ndarray:
    """ridge * I + eps * Y Y^T, Y ~ iid standard normal of shape (dim, rank)."""
    if dim < 1 or rank < 1:
        raise ValueError("dim and rank must be positive")
    if rank > dim:
        raise ValueError(f"rank {rank} exceeds dim {dim}")
    if eps < 0 or ridge <= 0:
        raise ValueError("need eps >= 0 and ridge > 0")
    y = rng.normal(size=(dim, rank))
    return ridge * np.eye(dim) + eps * (y @ y.T)


class GaussianTarget(GibbsModel):

    def __init__(self, mean: np.ndarray, cov: np.ndarray):
        mean = np.asarray(mean, dtype=np.float64)
        cov = np.asarray(cov, dtype=np.float64)
        if mean.ndim != 1 or cov.shape != (mean.size, mean.size):
            raise ValueError("mean must be 1-d and cov square to match")
        if np.max(np.abs(cov - cov.T)) > 1e-10:
            raise ValueError("cov must be symmetric")
        self.dim = mean.size
        self.mean = mean
        self.cov = cov
        # raises LinAlgError if cov is not positive definite
        self._chol = np.linalg.cholesky(cov)
        self.precision = np.linalg.inv(cov)
        self._cond_var = 1.0 / np.diag(self.precision)
        self._cond_sd = np.sqrt(self._cond_var)

    def conditional_mean(self, state: np.ndarray, index: int) -> float:
        dev = state - self.mean
        cross = self.precision[index] @ dev - self.precision[index, index] * dev[index]
        return float(self.mean[index] - self._cond_var[index] * cross)

    def conditional_sample(self, state: np.ndarray, index: int,
                           rng: np.random.Generator) -> float:
        return self.conditional_mean(state, index) + self._cond_sd[index] * rng.normal()

    def unnormalized_log_density(self, state: np.ndarray) -> float:
        dev = state - self.mean
        return float(-0.5 * dev @ self.precision @ dev)

    def direct_samples(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """iid draws via the Cholesky factor, for baselines and oracles."""
        return self.mean + rng.normal(size=(n, self.dim)) @ self._chol.T

    def overdispersed_start(self) -> np.ndarray:
        """Deterministic initial state a few marginal deviations off center."""
        return self.mean + 3.0 * np.sqrt(np.diag(self.cov))
