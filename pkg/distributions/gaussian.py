"""Multivariate Gaussian members of Θ, conditioning, and the standard normal quantile."""

import logging
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import special

from config.settings import PSD_TOLERANCE, SYMMETRY_TOLERANCE
from core.errors import DegenerateCovarianceError, DistributionError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class MultivariateGaussian:
    """Per-record attribute distribution N(mu, V)."""

    mu: np.ndarray
    cov: np.ndarray
    id: str = ""

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=float)
        cov = np.asarray(self.cov, dtype=float)
        m = mu.size
        if mu.ndim != 1 or cov.shape != (m, m):
            raise DistributionError(f"mean of length {m} needs an {m}x{m} covariance, got {cov.shape}")
        if np.max(np.abs(cov - cov.T)) > SYMMETRY_TOLERANCE:
            raise DistributionError(f"covariance of '{self.id}' is not symmetric")
        eigenvalues = np.linalg.eigvalsh(cov)
        if eigenvalues.min() < -PSD_TOLERANCE:
            raise DistributionError(
                f"covariance of '{self.id}' is not positive semidefinite (min eigenvalue {eigenvalues.min():.3g})"
            )
        if np.any(np.diag(cov) <= 0):
            raise DegenerateCovarianceError(f"covariance of '{self.id}' has a non-positive variance on its diagonal")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "cov", cov)

    @classmethod
    def from_document(cls, doc: dict) -> "MultivariateGaussian":
        return cls(np.array(doc["mu"], dtype=float), np.array(doc["cov"], dtype=float), id=str(doc.get("id", "")))

    @property
    def m(self) -> int:
        return self.mu.size


@dataclass(frozen=True)
class ConditionalGaussian:
    """N(mean, variance) law of F(X) given one secret value."""

    mean: float
    variance: float

    def __post_init__(self):
        if self.variance < 0:
            raise DistributionError(f"conditional variance {self.variance} is negative")


def conditional_of_linear(theta: MultivariateGaussian, n: int, j: int, i: int, a: float,
                          query_scale: float = 1.0, secret_scale: float = 1.0) -> ConditionalGaussian:
    """Law of F(X) given g_i(X_i) = a when F and g_i are linear column statistics.

    F = query_scale * mean(X_j), g_i = secret_scale * mean(X_i); scale 1 is a column
    mean, scale n a column sum.
    """
    v_ii = theta.cov[i, i]
    if v_ii <= 0:
        raise DegenerateCovarianceError(f"V_ii = {v_ii} for attribute {i + 1}; cannot condition on it")
    v_ij = theta.cov[i, j]
    slope = v_ij / v_ii
    mean = theta.mu[j] + slope * (a / secret_scale - theta.mu[i])
    # clamp rounding noise; the Schur complement of a PSD matrix is PSD
    variance = max(0.0, (theta.cov[j, j] - v_ij * v_ij / v_ii) / n)
    return ConditionalGaussian(query_scale * mean, query_scale ** 2 * variance)


def gaussian_inverse_cdf(p: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """Standard normal quantile Φ⁻¹(p) for p in the open interval (0, 1)."""
    arr = np.asarray(p, dtype=float)
    if np.any(~((arr > 0) & (arr < 1))):
        raise DistributionError("gaussian_inverse_cdf needs 0 < p < 1")
    result = special.ndtri(arr)
    return float(result) if np.ndim(p) == 0 else result


def gaussian_cdf(x: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    result = special.ndtr(x)
    return float(result) if np.ndim(x) == 0 else result
