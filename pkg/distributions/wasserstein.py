"""∞-Wasserstein distance between finite distributions on the real line."""

import logging

import numpy as np

from config.settings import CUMULATIVE_TOLERANCE
from distributions.discrete import DiscreteDistribution

logger = logging.getLogger(__name__)


def w_infinity(mu: DiscreteDistribution, nu: DiscreteDistribution) -> float:
    """W∞(mu, nu) via the monotone (quantile) coupling, which is optimal on ℝ.

    The cumulative masses of both laws are merged into common quantile
    segments; each segment of positive length pairs one atom of mu with one atom
    of nu and the distance is the largest displacement over those pairs.
    """
    cum_mu = np.minimum(np.cumsum(mu.probs), 1.0)
    cum_nu = np.minimum(np.cumsum(nu.probs), 1.0)
    cum_mu[-1] = cum_nu[-1] = 1.0

    upper = np.union1d(cum_mu, cum_nu)
    lower = np.concatenate(([0.0], upper[:-1]))
    keep = (upper - lower) > CUMULATIVE_TOLERANCE
    midpoints = (lower[keep] + upper[keep]) / 2

    i = np.minimum(np.searchsorted(cum_mu, midpoints, side="left"), len(mu) - 1)
    j = np.minimum(np.searchsorted(cum_nu, midpoints, side="left"), len(nu) - 1)
    if midpoints.size == 0:
        return 0.0
    return float(np.max(np.abs(mu.support[i] - nu.support[j])))
