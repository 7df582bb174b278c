"""Pufferfish framework model: secrets, secret pairs, privacy parameters and the
distribution class Θ."""

import logging
import math
from dataclasses import dataclass
from itertools import combinations
from typing import Any, FrozenSet, Iterable, List, Optional, Tuple

from core.domains import AttributeDomain
from core.errors import ConfigurationError, UnboundedSensitivityError, UnsupportedMechanismError
from core.query import COLUMN_MEAN, COLUMN_SUM, QuerySpec
from distributions.gaussian import MultivariateGaussian
from distributions.record_models import BinaryDependenceModel
from graphs.bayes_net import BayesNet, ParameterFamily, share_supports

logger = logging.getLogger(__name__)

DATASET = "dataset"
DISTRIBUTIONAL = "distributional"
NOTIONS = (DATASET, DISTRIBUTIONAL)

GAUSSIAN = "gaussian"
PARAMETER_NETWORK = "parameter_network"
DISCRETE_RECORD = "discrete_record"
VALUE_NETWORK = "value_network"
VARIANTS = (GAUSSIAN, PARAMETER_NETWORK, DISCRETE_RECORD, VALUE_NETWORK)

_MEMBER_TYPES = {
    GAUSSIAN: MultivariateGaussian,
    PARAMETER_NETWORK: ParameterFamily,
    DISCRETE_RECORD: BinaryDependenceModel,
    VALUE_NETWORK: BayesNet,
}


@dataclass(frozen=True)
class SecretEvent:
    """One event U_a (or Φ_a): a closed interval or a finite set of points."""

    id: str
    interval: Optional[Tuple[float, float]] = None
    points: Tuple[Any, ...] = ()

    def __post_init__(self):
        if (self.interval is None) == (not self.points):
            raise ConfigurationError(f"event '{self.id}' must declare exactly one of an interval or points")
        if self.interval is not None:
            lo, hi = self.interval
            if math.isnan(lo) or math.isnan(hi) or lo > hi:
                raise ConfigurationError(f"event '{self.id}' has an invalid interval [{lo}, {hi}]")

    def contains(self, x: Any) -> bool:
        if self.interval is not None:
            return isinstance(x, (int, float)) and self.interval[0] <= x <= self.interval[1]
        return any(_equal(x, p) for p in self.points)

    def select(self, values: Iterable[Any]) -> List[int]:
        """Indices of the values that fall in the event."""
        return [k for k, v in enumerate(values) if self.contains(v)]

    @property
    def bounds(self) -> Tuple[float, float]:
        if self.interval is not None:
            return self.interval
        if not all(isinstance(p, (int, float)) for p in self.points):
            raise UnboundedSensitivityError(f"event '{self.id}' holds labels and has no numeric extent")
        return min(self.points), max(self.points)

    def overlaps(self, other: "SecretEvent") -> bool:
        if self.interval is not None and other.interval is not None:
            return max(self.interval[0], other.interval[0]) <= min(self.interval[1], other.interval[1])
        if self.interval is not None:
            return any(self.contains(p) for p in other.points)
        return any(other.contains(p) for p in self.points)

    def to_document(self) -> dict:
        if self.interval is not None:
            return {"id": self.id, "interval": list(self.interval)}
        return {"id": self.id, "points": list(self.points)}


def _equal(a: Any, b: Any) -> bool:
    if isinstance(a, (int, float)) and isinstance(b, (int, float)):
        return math.isclose(a, b, rel_tol=0.0, abs_tol=1e-12)
    return a == b


@dataclass(frozen=True)
class SecretSpec:
    """Secrets about one sensitive attribute.

    Dataset-level secrets are events on g_i(X_i), a column mean or sum;
    distributional secrets are events on the parameter φ_i.
    """

    attribute: int
    notion: str
    events: Tuple[SecretEvent, ...]
    function: str = COLUMN_MEAN

    def __post_init__(self):
        if self.notion not in NOTIONS:
            raise ConfigurationError(f"Unknown secret notion: {self.notion}. Available: {list(NOTIONS)}")
        if self.notion == DATASET and self.function not in (COLUMN_MEAN, COLUMN_SUM):
            raise ConfigurationError(f"dataset secrets protect a column mean or sum, got {self.function}")
        if len(self.events) < 2:
            raise ConfigurationError(f"attribute {self.attribute + 1} needs at least 2 secret events")
        ids = [e.id for e in self.events]
        if len(set(ids)) != len(ids):
            raise ConfigurationError(f"duplicate secret event ids: {ids}")
        for a, b in combinations(self.events, 2):
            if a.overlaps(b):
                raise ConfigurationError(f"secret events '{a.id}' and '{b.id}' are not disjoint")

    def pairs(self) -> List[Tuple[SecretEvent, SecretEvent]]:
        return list(combinations(self.events, 2))

    def diameter(self) -> float:
        """max |a - b| over the union of the declared events."""
        bounds = [e.bounds for e in self.events]
        lo = min(b[0] for b in bounds)
        hi = max(b[1] for b in bounds)
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise UnboundedSensitivityError(f"unbounded sensitivity: secret events of attribute "
                                            f"{self.attribute + 1} are unbounded")
        return hi - lo


@dataclass(frozen=True)
class PrivacyParams:
    epsilon: float
    delta: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.epsilon) and self.epsilon > 0):
            raise ConfigurationError(f"epsilon must be positive, got {self.epsilon}")
        if not 0 <= self.delta < 1:
            raise ConfigurationError(f"delta must lie in [0, 1), got {self.delta}")

    @property
    def c(self) -> float:
        """sqrt(2 ln(1.25 / delta))."""
        if self.delta <= 0:
            raise UnsupportedMechanismError("Gaussian mechanism requires δ>0")
        return math.sqrt(2.0 * math.log(1.25 / self.delta))


@dataclass(frozen=True)
class DistributionClass:
    """Finite Θ; every member shares m and the attribute domains."""

    variant: str
    members: Tuple[Any, ...]
    grid_step: Optional[float] = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ConfigurationError(f"Unknown distribution class: {self.variant}. Available: {list(VARIANTS)}")
        if not self.members:
            raise ConfigurationError("distribution class Θ is empty")
        expected = _MEMBER_TYPES[self.variant]
        for member in self.members:
            if not isinstance(member, expected):
                raise ConfigurationError(f"{self.variant} Θ holds a {type(member).__name__}")
        ids = self.member_ids
        if len(set(ids)) != len(ids):
            raise ConfigurationError(f"duplicate θ ids: {ids}")
        if self.variant == GAUSSIAN:
            sizes = {theta.m for theta in self.members}
            if len(sizes) > 1:
                raise ConfigurationError(f"Gaussian members disagree on m: {sorted(sizes)}")
        elif self.variant == PARAMETER_NETWORK:
            share_supports([theta.net for theta in self.members], "parameter network")
            if len({tuple(sorted(theta.attribute_nodes.items())) for theta in self.members}) > 1:
                raise ConfigurationError("parameter network members map attributes to different nodes")
        elif self.variant == VALUE_NETWORK:
            share_supports(list(self.members), "value network")

    @property
    def member_ids(self) -> List[str]:
        return [theta.id for theta in self.members]

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)


@dataclass(frozen=True)
class PufferfishFramework:
    """Attributes, sensitive set C, secrets, Θ and the query under release."""

    names: Tuple[str, ...]
    domains: Tuple[AttributeDomain, ...]
    sensitive: FrozenSet[int]
    secrets: Tuple[SecretSpec, ...]
    theta: DistributionClass
    query: Optional[QuerySpec] = None
    framework_id: str = ""
    description: str = ""

    def __post_init__(self):
        m = len(self.names)
        if len(self.domains) != m:
            raise ConfigurationError(f"{m} attribute names but {len(self.domains)} domains")
        if len(set(self.names)) != m:
            raise ConfigurationError(f"duplicate attribute names: {list(self.names)}")
        bad = sorted(i + 1 for i in self.sensitive if not 0 <= i < m)
        if bad:
            raise ConfigurationError(f"sensitive attribute index(es) {bad} outside 1..{m}")
        if self.theta.variant != VALUE_NETWORK and not self.sensitive:
            raise ConfigurationError("the sensitive attribute set C is empty")

        for spec in self.secrets:
            if spec.attribute not in self.sensitive:
                raise ConfigurationError(f"secret attribute '{self.names[spec.attribute]}' is not in C")
        attrs = [s.attribute for s in self.secrets]
        if len(set(attrs)) != len(attrs):
            raise ConfigurationError("each sensitive attribute takes one secret specification")
        notions = {s.notion for s in self.secrets}
        if len(notions) > 1:
            raise ConfigurationError(f"secrets mix notions {sorted(notions)}")
        if DISTRIBUTIONAL in notions and self.theta.variant != PARAMETER_NETWORK:
            raise ConfigurationError("distributional secrets need a parameter_network Θ")
        if DATASET in notions and self.theta.variant not in (GAUSSIAN, DISCRETE_RECORD):
            raise ConfigurationError(f"dataset secrets cannot be used with a {self.theta.variant} Θ")

        if self.theta.variant == GAUSSIAN and self.theta.members[0].m != m:
            raise ConfigurationError(f"Gaussian members have m={self.theta.members[0].m}, framework has {m}")
        if self.theta.variant == PARAMETER_NETWORK:
            mapped = set(self.theta.members[0].attribute_nodes)
            if mapped != set(self.names):
                raise ConfigurationError(f"parameter network governs {sorted(mapped)}, "
                                         f"framework attributes are {sorted(self.names)}")
        if self.query is not None:
            self.query.validate(self.domains, self.names)

    @property
    def notion(self) -> Optional[str]:
        return self.secrets[0].notion if self.secrets else None

    def secret_for(self, i: int) -> SecretSpec:
        for spec in self.secrets:
            if spec.attribute == i:
                return spec
        raise ConfigurationError(f"no secrets declared for attribute '{self.names[i]}'")

    def index_of(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise ConfigurationError(f"Unknown attribute: {name}. Available: {list(self.names)}")

    @property
    def attributes(self) -> List[Tuple[str, AttributeDomain]]:
        return list(zip(self.names, self.domains))

    def check_dataset(self, X) -> None:
        """The dataset must carry the framework's attributes, in order, with the same domains."""
        if tuple(X.names) != self.names:
            raise ConfigurationError(f"dataset attributes {list(X.names)} do not match framework "
                                     f"attributes {list(self.names)}")
        if tuple(X.domains) != self.domains:
            raise ConfigurationError("dataset domains differ from the framework's declared domains")

    def require_query(self, F: Optional[QuerySpec] = None) -> QuerySpec:
        F = F if F is not None else self.query
        if F is None:
            raise ConfigurationError("no query given and the framework declares none")
        F.validate(self.domains, self.names)
        return F

    def require_variant(self, *variants: str, mechanism: str = "") -> None:
        if self.theta.variant not in variants:
            raise UnsupportedMechanismError(
                f"{mechanism or 'this mechanism'} needs a {' or '.join(variants)} Θ, got {self.theta.variant}"
            )
