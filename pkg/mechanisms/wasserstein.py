"""Wasserstein mechanism: Laplace noise scaled by the worst ∞-Wasserstein distance
between conditional output laws of F(X) across secret pairs and θ."""

import logging
import math
from dataclasses import asdict, dataclass, field
from itertools import product
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy import stats

from core.dataset import Dataset
from core.domains import FINITE, AttributeDomain
from core.errors import ConfigurationError, UnsupportedMechanismError, VacuousSecretError
from core.framework import (
    DISCRETE_RECORD,
    PARAMETER_NETWORK,
    PufferfishFramework,
    SecretEvent,
    SecretSpec,
)
from core.query import COLUMN_MEAN, COLUMN_SUM, THRESHOLD_COUNT, QuerySpec, evaluate_query
from distributions.discrete import DiscreteDistribution, mixture
from distributions.record_models import BinaryDependenceModel, conditional_count_distribution
from distributions.wasserstein import w_infinity
from graphs.bayes_net import ParameterFamily
from graphs.inference import conditional_on
from mechanisms.markov_quilt import release_laplace

logger = logging.getLogger(__name__)


@dataclass
class PairDistance:
    attribute: str
    secret_a: str
    secret_b: str
    theta: str
    distance: float


@dataclass
class WassersteinReport:
    mechanism: str
    framework_id: str
    query: str
    epsilon: float
    distances: List[PairDistance]
    W: float
    scale: float
    output: float
    seed: int
    grid_step: Optional[float] = None
    skipped: int = 0
    noise: float = 0.0
    extras: dict = field(default_factory=dict)

    @property
    def exact(self) -> bool:
        return self.scale == 0

    def to_document(self, reveal_noise: bool = False) -> dict:
        doc = {
            "mechanism": self.mechanism,
            "framework_id": self.framework_id,
            "query": self.query,
            "epsilon": self.epsilon,
            "per_pair_distances": [asdict(d) for d in self.distances],
            "W": self.W,
            "scale": self.scale,
            "exact": self.exact,
            "grid_step": self.grid_step,
            "skipped_pairs": self.skipped,
            "output": self.output,
            "seed": self.seed,
        }
        doc.update(self.extras)
        if reveal_noise:
            doc["noise"] = self.noise
        return doc


def _is_binary(domain: AttributeDomain) -> bool:
    return domain.kind == FINITE and domain.is_numeric and set(domain.values) == {0.0, 1.0}


def _count_to_query(law: DiscreteDistribution, F: QuerySpec, n: int) -> DiscreteDistribution:
    """Push the law of sum_j X^j through F, which reads only that binary column."""
    if F.kind == COLUMN_SUM:
        return law
    if F.kind == COLUMN_MEAN:
        return law.affine(1.0 / n)
    predicate = F.predicates[0]
    on_one, on_zero = predicate.holds(1.0), predicate.holds(0.0)
    if on_one and on_zero:
        return DiscreteDistribution.point(n)
    if on_one:
        return law
    if on_zero:
        return law.affine(-1.0, n)
    return DiscreteDistribution.point(0.0)


class RecordModelLaws:
    """Output laws under the binary dependence model.

    The model conditions the first attribute on the second; a secret on the
    first attribute is handled by the swapped model.
    """

    def __init__(self, framework: PufferfishFramework, F: QuerySpec, n: int):
        if len(framework.names) != 2 or not all(_is_binary(d) for d in framework.domains):
            raise UnsupportedMechanismError("discrete_record Θ needs exactly two binary {0, 1} attributes")
        self.F = F
        self.n = n
        self._cache: Dict[Tuple[str, int, int], DiscreteDistribution] = {}

    def law(self, spec: SecretSpec, event: SecretEvent, theta: BinaryDependenceModel) -> Optional[DiscreteDistribution]:
        if self.F.attributes & {spec.attribute}:
            raise UnsupportedMechanismError("the released query must not read the sensitive column directly")
        n = self.n
        model = (theta if spec.attribute == 1 else theta.swapped()).with_records(n)
        values = np.arange(n + 1)
        g = values.astype(float) if spec.function == COLUMN_SUM else values / n
        chosen = [int(a) for a, x in zip(values, g) if event.contains(float(x))]
        weights = stats.binom.pmf(chosen, n, model.q) if chosen else np.array([])
        if not chosen or weights.sum() <= 0:
            return None
        components = []
        for a in chosen:
            key = (theta.id, spec.attribute, a)
            if key not in self._cache:
                self._cache[key] = _count_to_query(conditional_count_distribution(model, a), self.F, n)
            components.append(self._cache[key])
        return mixture(components, weights)


class ParameterNetworkLaws:
    """Output laws when records are i.i.d. given the parameters and attributes are
    independent given the parameters."""

    def __init__(self, framework: PufferfishFramework, F: QuerySpec, n: int):
        self.framework = framework
        self.F = F
        self.n = n
        self._cache: Dict[tuple, DiscreteDistribution] = {}

    def _given_parameters(self, family: ParameterFamily, indices: Dict[str, int]) -> DiscreteDistribution:
        names = self.framework.names
        F, n = self.F, self.n
        if F.kind == THRESHOLD_COUNT:
            p = 1.0
            for pred in F.predicates:
                attribute = names[pred.attribute]
                law = family.likelihood(attribute, indices[attribute])
                p *= law.probability(pred.mask)
            return DiscreteDistribution.binomial(n, min(1.0, max(0.0, p)))
        attribute = names[F.attribute]
        total = family.likelihood(attribute, indices[attribute]).convolution_power(n)
        return total if F.kind == COLUMN_SUM else total.affine(1.0 / n)

    def law(self, spec: SecretSpec, event: SecretEvent, family: ParameterFamily) -> Optional[DiscreteDistribution]:
        names = self.framework.names
        secret_attribute = names[spec.attribute]
        secret_node = family.node_for(secret_attribute)
        query_attributes = sorted({names[j] for j in self.F.attributes})
        targets = sorted({family.node_for(a) for a in query_attributes} - {secret_node})

        selected = event.select(family.net.supports[secret_node])
        if not selected:
            raise ConfigurationError(f"secret event '{event.id}' selects no value of '{secret_node}'")
        prior, cond = conditional_on(family.net, secret_node, targets)
        if prior[selected].sum() <= 0:
            return None

        components, weights = [], []
        configurations = product(*(range(family.net.card(t)) for t in targets))
        for config in configurations:
            for v in selected:
                weight = prior[v] * cond[(v,) + config]
                if weight <= 0:
                    continue
                nodes = dict(zip(targets, config))
                nodes[secret_node] = v
                indices = {a: nodes[family.node_for(a)] for a in query_attributes}
                key = (family.id, tuple(sorted(indices.items())))
                if key not in self._cache:
                    self._cache[key] = self._given_parameters(family, indices)
                components.append(self._cache[key])
                weights.append(weight)
        return mixture(components, weights)


def conditional_laws(framework: PufferfishFramework, F: QuerySpec, n: int):
    if framework.theta.variant == DISCRETE_RECORD:
        return RecordModelLaws(framework, F, n)
    if framework.theta.variant == PARAMETER_NETWORK:
        return ParameterNetworkLaws(framework, F, n)
    raise UnsupportedMechanismError(
        f"no computable conditional output distribution for a {framework.theta.variant} Θ; "
        "the Wasserstein mechanism needs discrete_record or parameter_network"
    )


SecretLaws = Dict[Tuple[str, str, str], Optional[DiscreteDistribution]]


def secret_laws(framework: PufferfishFramework, F: QuerySpec, n: int) -> SecretLaws:
    """{(attribute, event id, θ id): law of F(X) | event, θ}; None when the event has probability 0."""
    builder = conditional_laws(framework, F, n)
    laws = {}
    for spec in framework.secrets:
        attribute = framework.names[spec.attribute]
        for theta in framework.theta:
            for event in spec.events:
                laws[(attribute, event.id, theta.id)] = builder.law(spec, event, theta)
    return laws


def pair_distances(framework: PufferfishFramework, F: QuerySpec, n: int,
                   laws: Optional[SecretLaws] = None) -> Tuple[List[PairDistance], int]:
    """W∞ for every (secret pair, θ) where both secrets have positive probability."""
    if laws is None:
        laws = secret_laws(framework, F, n)
    distances, skipped = [], 0
    for spec in framework.secrets:
        attribute = framework.names[spec.attribute]
        for theta in framework.theta:
            for a, b in spec.pairs():
                mu, nu = laws[(attribute, a.id, theta.id)], laws[(attribute, b.id, theta.id)]
                if mu is None or nu is None:
                    skipped += 1
                    continue
                distance = w_infinity(mu, nu)
                logger.debug("W∞(%s, %s | %s) = %.6g", a.id, b.id, theta.id, distance)
                distances.append(PairDistance(attribute, a.id, b.id, theta.id, distance))
    if skipped:
        logger.warning("skipped %d (secret pair, θ) combination(s) with a zero-probability secret", skipped)
    if not distances:
        raise VacuousSecretError("every secret pair has a zero-probability secret under every θ")
    return distances, skipped


def wasserstein_mechanism(X: Dataset, F: QuerySpec, framework: PufferfishFramework, epsilon: float,
                          rng_seed: int) -> WassersteinReport:
    """F(X) + Lap(W / ε) with W the supremum of the pairwise ∞-Wasserstein distances."""
    if not (math.isfinite(epsilon) and epsilon > 0):
        raise ConfigurationError(f"epsilon must be positive, got {epsilon}")
    framework.check_dataset(X)
    F = framework.require_query(F)
    distances, skipped = pair_distances(framework, F, X.n)
    W = max(d.distance for d in distances)
    scale = W / epsilon
    output, noise = release_laplace(evaluate_query(F, X), scale, rng_seed)
    logger.info("wasserstein: W=%.6g over %d pair distance(s), scale=%.6g", W, len(distances), scale)
    return WassersteinReport("wasserstein", framework.framework_id, F.describe(framework.names), epsilon,
                             distances, W, scale, output, rng_seed, grid_step=framework.theta.grid_step,
                             skipped=skipped, noise=noise)
