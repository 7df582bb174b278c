"""Finite probability distributions on the real line."""

import logging
from dataclasses import dataclass
from typing import Dict, Iterable, Sequence, Tuple

import numpy as np
from scipy import stats

from config.settings import PROBABILITY_TOLERANCE
from core.errors import DistributionError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class DiscreteDistribution:
    """Atoms (support[k], probs[k]) with strictly increasing support."""

    support: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        support = np.asarray(self.support, dtype=float)
        probs = np.asarray(self.probs, dtype=float)
        if support.ndim != 1 or support.shape != probs.shape or support.size == 0:
            raise DistributionError(f"support and probabilities must be equal-length vectors, got "
                                    f"{support.shape} and {probs.shape}")
        if not np.all(np.isfinite(support)):
            raise DistributionError("support points must be finite")
        if np.any(np.diff(support) <= 0):
            raise DistributionError("support points must be strictly increasing")
        if np.any(probs < 0):
            raise DistributionError(f"negative probability {probs.min()}")
        total = probs.sum()
        if abs(total - 1.0) > PROBABILITY_TOLERANCE:
            raise DistributionError(f"probabilities sum to {total}, expected 1")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def from_atoms(cls, atoms: Iterable[Tuple[float, float]], normalize: bool = False) -> "DiscreteDistribution":
        """Build from (point, probability) pairs in any order; repeated points are merged."""
        merged: Dict[float, float] = {}
        for x, p in atoms:
            merged[float(x)] = merged.get(float(x), 0.0) + float(p)
        if not merged:
            raise DistributionError("a distribution needs at least one atom")
        support = np.array(sorted(merged))
        probs = np.array([merged[x] for x in support])
        if normalize:
            total = probs.sum()
            if total <= 0:
                raise DistributionError("cannot normalize a distribution with zero total mass")
            probs = probs / total
        return cls(support, probs)

    @classmethod
    def point(cls, x: float) -> "DiscreteDistribution":
        return cls(np.array([float(x)]), np.array([1.0]))

    @classmethod
    def binomial(cls, n: int, p: float) -> "DiscreteDistribution":
        if not 0.0 <= p <= 1.0:
            raise DistributionError(f"Bernoulli parameter {p} outside [0, 1]")
        k = np.arange(n + 1)
        return cls(k.astype(float), stats.binom.pmf(k, n, p))

    @classmethod
    def from_document(cls, doc: dict) -> "DiscreteDistribution":
        if "support" not in doc or "probs" not in doc:
            raise DistributionError("distribution document needs 'support' and 'probs'")
        return cls.from_atoms(zip(doc["support"], doc["probs"]))

    def to_document(self) -> dict:
        return {"support": self.support.tolist(), "probs": self.probs.tolist()}

    def __len__(self) -> int:
        return self.support.size

    def mean(self) -> float:
        return float(np.dot(self.support, self.probs))

    def variance(self) -> float:
        mu = self.mean()
        return float(np.dot((self.support - mu) ** 2, self.probs))

    def affine(self, scale: float, shift: float = 0.0) -> "DiscreteDistribution":
        """Distribution of scale * X + shift."""
        if scale == 0:
            return DiscreteDistribution.point(shift)
        return DiscreteDistribution.from_atoms(zip(self.support * scale + shift, self.probs))

    def convolve(self, other: "DiscreteDistribution") -> "DiscreteDistribution":
        """Distribution of X + Y for independent X ~ self, Y ~ other."""
        sums = np.add.outer(self.support, other.support).ravel()
        masses = np.multiply.outer(self.probs, other.probs).ravel()
        return DiscreteDistribution.from_atoms(zip(sums, masses), normalize=True)

    def convolution_power(self, n: int) -> "DiscreteDistribution":
        """Distribution of the sum of n independent copies."""
        if n < 1:
            raise DistributionError(f"convolution power needs n >= 1, got {n}")
        result, base = None, self
        while n:
            if n & 1:
                result = base if result is None else result.convolve(base)
            n >>= 1
            if n:
                base = base.convolve(base)
        return result

    def probability(self, predicate) -> float:
        """P(predicate(X)) for a vectorized boolean predicate."""
        mask = np.asarray(predicate(self.support), dtype=bool)
        return float(self.probs[mask].sum())


def mixture(components: Sequence[DiscreteDistribution], weights: Sequence[float]) -> DiscreteDistribution:
    """Weighted mixture; weights are renormalized and zero-weight components dropped."""
    weights = np.asarray(weights, dtype=float)
    if len(components) != weights.size or weights.size == 0:
        raise DistributionError("mixture needs one weight per component")
    total = weights.sum()
    if total <= 0:
        raise DistributionError("mixture weights sum to zero")
    atoms = []
    for dist, w in zip(components, weights / total):
        if w > 0:
            atoms.extend(zip(dist.support, dist.probs * w))
    return DiscreteDistribution.from_atoms(atoms, normalize=True)
