"""Max-divergence, η-approximate max-divergence and binned estimates of the
divergence between an output distribution and its Gaussian approximation."""

import logging
import math
from dataclasses import dataclass

import numpy as np

from config.settings import GAUSSIAN_WINDOW_SDS
from core.errors import ConfigurationError, DistributionError
from distributions.discrete import DiscreteDistribution
from distributions.gaussian import gaussian_cdf

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GaussianApprox:
    """Gaussian stand-in for the law of F(X) given one secret under one θ."""

    mean: float
    variance: float
    secret: str = ""
    theta: str = ""

    def __post_init__(self):
        if not self.variance > 0:
            raise DistributionError(
                f"approximation for ({self.secret}, {self.theta}) needs a positive variance, got {self.variance}"
            )

    @property
    def sd(self) -> float:
        return math.sqrt(self.variance)


@dataclass(frozen=True)
class DivergenceBudget:
    eta: float
    lambda_eta: float

    def __post_init__(self):
        if not 0 < self.eta < 1:
            raise ConfigurationError(f"eta must lie in (0, 1), got {self.eta}")
        if not self.lambda_eta >= 0:
            raise ConfigurationError(f"lambda_eta must be nonnegative, got {self.lambda_eta}")


def _check_shared_support(p: DiscreteDistribution, q: DiscreteDistribution):
    if len(p) != len(q) or not np.array_equal(p.support, q.support):
        raise DistributionError("divergence needs both distributions on the same support points")


def max_divergence(p: DiscreteDistribution, q: DiscreteDistribution) -> float:
    """sup over events T of ln(P_p(T) / P_q(T)); attained at a single atom."""
    _check_shared_support(p, q)
    best = -math.inf
    for px, qx in zip(p.probs, q.probs):
        if px <= 0:
            continue
        if qx <= 0:
            return math.inf
        best = max(best, math.log(px / qx))
    return best


def approx_max_divergence(p: DiscreteDistribution, q: DiscreteDistribution, eta: float) -> float:
    """sup over T with P_p(T) >= eta of ln((P_p(T) - eta) / P_q(T)).

    The maximizer is a superlevel set of p_x / q_x, so scanning the prefixes of
    the atoms sorted by decreasing ratio is exhaustive. Returns -inf when no
    event is feasible.
    """
    _check_shared_support(p, q)
    if not 0 < eta < 1:
        raise ConfigurationError(f"eta must lie in (0, 1), got {eta}")

    ratios = np.full(len(p), -1.0)
    positive_q = q.probs > 0
    ratios[positive_q] = p.probs[positive_q] / q.probs[positive_q]
    ratios[~positive_q & (p.probs > 0)] = math.inf
    order = np.argsort(-ratios, kind="stable")

    best = -math.inf
    mass_p = mass_q = 0.0
    for k in order:
        mass_p += p.probs[k]
        mass_q += q.probs[k]
        excess = mass_p - eta
        if excess < 0:
            continue
        if mass_q <= 0:
            if excess > 0:
                return math.inf
            continue
        if excess > 0:
            best = max(best, math.log(excess / mass_q))
    return best


def symmetric_approx_divergence(p: DiscreteDistribution, q: DiscreteDistribution, eta: float) -> float:
    return max(approx_max_divergence(p, q, eta), approx_max_divergence(q, p, eta))


def certification_edges(f: DiscreteDistribution, f_tilde: GaussianApprox, bins: int) -> np.ndarray:
    """Equal-width cell edges over f's support widened by the window of f̃'s standard deviations."""
    half = GAUSSIAN_WINDOW_SDS * f_tilde.sd
    return np.linspace(f.support[0] - half, f.support[-1] + half, bins + 1)


def bin_distribution(f: DiscreteDistribution, edges: np.ndarray) -> DiscreteDistribution:
    """Assign each atom of f to its cell; the result lives on cell centers."""
    masses, _ = np.histogram(f.support, bins=edges, weights=f.probs)
    centers = (edges[:-1] + edges[1:]) / 2
    return DiscreteDistribution(centers, masses / masses.sum())


def bin_gaussian(f_tilde: GaussianApprox, edges: np.ndarray) -> DiscreteDistribution:
    """Gaussian cell masses, renormalized to the window."""
    masses = np.diff(gaussian_cdf((edges - f_tilde.mean) / f_tilde.sd))
    masses = np.clip(masses, 0.0, None)
    centers = (edges[:-1] + edges[1:]) / 2
    return DiscreteDistribution(centers, masses / masses.sum())


def certify_approximation(f: DiscreteDistribution, f_tilde: GaussianApprox, eta: float, bins: int) -> float:
    """Estimate of λ_η such that the symmetric η-divergence of f and f̃ is at most λ_η.

    Both distributions are binned on a common grid; the result is an estimate,
    not a sound bound, and is clamped at 0.
    """
    if bins < 2:
        raise ConfigurationError(f"bins must be at least 2, got {bins}")
    edges = certification_edges(f, f_tilde, bins)
    binned_f = bin_distribution(f, edges)
    binned_tilde = bin_gaussian(f_tilde, edges)
    estimate = symmetric_approx_divergence(binned_f, binned_tilde, eta)
    logger.debug("certify: bins=%d eta=%.4g raw divergence=%.6g", bins, eta, estimate)
    return max(0.0, estimate)
