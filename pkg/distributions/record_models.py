"""Binary two-attribute record models and the output laws of a column count under them."""

import logging
from dataclasses import dataclass, replace
from typing import Optional, Tuple

from core.errors import ConfigurationError, DistributionError
from distributions.discrete import DiscreteDistribution

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BinaryDependenceModel:
    """Records (X_1, X_2) with P(X_1=1 | X_2=1) = p1, P(X_1=1 | X_2=0) = p2 and P(X_2=1) = q."""

    n: int = 1
    p1: float = 0.5
    p2: float = 0.5
    q: float = 0.5
    id: str = ""

    def __post_init__(self):
        for name in ("p1", "p2", "q"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise DistributionError(f"{name} = {value} outside [0, 1]")
        if self.n < 1:
            raise DistributionError(f"record count must be at least 1, got {self.n}")

    @classmethod
    def from_document(cls, doc: dict) -> "BinaryDependenceModel":
        return cls(p1=float(doc["p1"]), p2=float(doc["p2"]), q=float(doc.get("q", 0.5)),
                   id=str(doc.get("id", f"p1={doc['p1']},p2={doc['p2']}")))

    def with_records(self, n: int) -> "BinaryDependenceModel":
        return replace(self, n=n)

    def swapped(self) -> "BinaryDependenceModel":
        """The same joint law with the roles of X_1 and X_2 exchanged (Bayes' rule).

        A conditional whose conditioning value has probability zero is never
        used and is set to 0.
        """
        q = self.p1 * self.q + self.p2 * (1.0 - self.q)
        p1 = self.p1 * self.q / q if q > 0 else 0.0
        p2 = (1.0 - self.p1) * self.q / (1.0 - q) if q < 1 else 0.0
        return replace(self, p1=min(1.0, p1), p2=min(1.0, p2), q=min(1.0, max(0.0, q)))


def conditional_count_distribution(model: BinaryDependenceModel, a: int) -> DiscreteDistribution:
    """Law of sum_j X_1^j given that exactly a records have X_2 = 1."""
    if not 0 <= a <= model.n or int(a) != a:
        raise ConfigurationError(f"secret value a = {a} outside 0..{model.n}")
    a = int(a)
    ones = DiscreteDistribution.binomial(a, model.p1)
    zeros = DiscreteDistribution.binomial(model.n - a, model.p2)
    return ones.convolve(zeros)


@dataclass(frozen=True)
class AffineMapping:
    """phi_1 = alpha + beta * phi_2."""

    alpha: float
    beta: float

    def __call__(self, phi2: float) -> float:
        return self.alpha + self.beta * phi2

    @classmethod
    def from_dependence(cls, p1: float, p2: float) -> "AffineMapping":
        """phi_1 = p1 * phi_2 + p2 * (1 - phi_2) for the binary dependence model."""
        return cls(alpha=p2, beta=p1 - p2)


def conditional_count_distribution_param(n: int, phi2: float, mapping: AffineMapping,
                                         support: Optional[Tuple[float, float]] = None) -> DiscreteDistribution:
    """Law of sum_j X_1^j when X_1's Bernoulli parameter is mapping(phi2)."""
    if support is not None and not support[0] <= phi2 <= support[1]:
        raise ConfigurationError(f"phi_2 = {phi2} outside its declared support {list(support)}")
    phi1 = mapping(phi2)
    if not 0.0 <= phi1 <= 1.0:
        raise DistributionError(f"phi_1 = {phi1} outside [0, 1] for phi_2 = {phi2}")
    return DiscreteDistribution.binomial(n, phi1)
