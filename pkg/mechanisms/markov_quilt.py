"""Markov quilt mechanisms: the attribute-private version over parameter networks
and the entry-level baseline over value networks."""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional

from core.dataset import Dataset
from core.errors import ConfigurationError, UnsupportedMechanismError
from core.framework import DATASET, PARAMETER_NETWORK, VALUE_NETWORK, PufferfishFramework
from core.query import QuerySpec, column_sensitivity, evaluate_query
from graphs.influence import max_influence, variable_max_influence
from graphs.quilts import MarkovQuilt, enumerate_quilts
from mechanisms.noise import NoiseStream

logger = logging.getLogger(__name__)


@dataclass
class QuiltCandidate:
    quilt: MarkovQuilt
    influence: float
    sensitivity: float
    # sensitivity / (ε - influence) when admissible, else inf
    scale: float

    @property
    def admissible(self) -> bool:
        return math.isfinite(self.scale)

    def to_document(self) -> dict:
        doc = self.quilt.to_document()
        doc.update({"influence": _finite_or_str(self.influence), "admissible": self.admissible,
                    "sensitivity": self.sensitivity, "scale": _finite_or_str(self.scale)})
        return doc


@dataclass
class NodeChoice:
    """Noise scale b for one protected node and the quilt that set it."""

    attribute: str
    node: str
    fallback: float
    candidates: List[QuiltCandidate]
    scale: float
    chosen: Optional[QuiltCandidate] = None

    def to_document(self) -> dict:
        return {
            "attribute": self.attribute,
            "node": self.node,
            "fallback": _finite_or_str(self.fallback),
            "scale": _finite_or_str(self.scale),
            "quilt": self.chosen.quilt.to_document() if self.chosen else None,
            "influence": _finite_or_str(self.chosen.influence) if self.chosen else None,
            "candidates": [c.to_document() for c in self.candidates],
        }


@dataclass
class QuiltReport:
    mechanism: str
    framework_id: str
    query: str
    epsilon: float
    choices: List[NodeChoice]
    scale: float
    output: float
    seed: int
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
            "quilts": [c.to_document() for c in self.choices],
            "scale": self.scale,
            "exact": self.exact,
            "output": self.output,
            "seed": self.seed,
        }
        doc.update(self.extras)
        if reveal_noise:
            doc["noise"] = self.noise
        return doc


def _finite_or_str(x: float):
    """JSON has no infinity; unbounded values are written as the string "inf"."""
    return x if math.isfinite(x) else "inf"


def release_laplace(value: float, scale: float, seed: int):
    if scale <= 0:
        return value, 0.0
    noise = NoiseStream(seed).laplace(scale)
    return value + noise, noise


def _best(fallback: float, candidates: List[QuiltCandidate]):
    scale, chosen = fallback, None
    for cand in candidates:
        if cand.scale < scale:
            scale, chosen = cand.scale, cand
    return scale, chosen


def quilt_choices(X: Dataset, F: QuerySpec, framework: PufferfishFramework, epsilon: float,
                  max_quilt_size: int) -> List[NodeChoice]:
    """Per sensitive attribute: fallback Δ_A F / ε and every quilt's candidate Δ_{A∩N} F / (ε - e)."""
    framework.require_variant(PARAMETER_NETWORK, mechanism="apmqm")
    if framework.notion == DATASET:
        raise UnsupportedMechanismError("apmqm protects distributional secrets")
    if not framework.sensitive:
        raise ConfigurationError("the sensitive attribute set C is empty")
    if not epsilon > 0:
        raise ConfigurationError(f"epsilon must be positive, got {epsilon}")

    members = list(framework.theta)
    family = members[0]
    net = family.net
    A = F.attributes
    fallback = column_sensitivity(F, A, X.shape) / epsilon

    choices = []
    for i in sorted(framework.sensitive):
        name = framework.names[i]
        node = family.node_for(name)
        candidates = []
        for quilt in enumerate_quilts(net, node, max_quilt_size):
            e = max_influence(family, node, quilt.Q, theta=members)
            near = {j for j in A if family.node_for(framework.names[j]) in quilt.N}
            sensitivity = column_sensitivity(F, near, X.shape)
            scale = sensitivity / (epsilon - e) if e < epsilon else math.inf
            candidates.append(QuiltCandidate(quilt, e, sensitivity, scale))
            logger.debug("%s: %s e=%.6g candidate=%s", name, quilt.describe(), e, scale)
        scale, chosen = _best(fallback, candidates)
        logger.info("apmqm %s: b=%.6g via %s", name, scale, chosen.quilt.describe() if chosen else "fallback")
        choices.append(NodeChoice(name, node, fallback, candidates, scale, chosen))
    return choices


def apmqm(X: Dataset, F: QuerySpec, framework: PufferfishFramework, epsilon: float, max_quilt_size: int,
          rng_seed: int) -> QuiltReport:
    """F(X) + Lap(max_i b_i)."""
    framework.check_dataset(X)
    F = framework.require_query(F)
    choices = quilt_choices(X, F, framework, epsilon, max_quilt_size)
    scale = max(c.scale for c in choices)
    output, noise = release_laplace(evaluate_query(F, X), scale, rng_seed)
    return QuiltReport("apmqm", framework.framework_id, F.describe(framework.names), epsilon, choices,
                       scale, output, rng_seed, noise)


def entry_choices(Y: Dataset, framework: PufferfishFramework, epsilon: float,
                  max_quilt_size: int) -> List[NodeChoice]:
    """Per entry Y_i: b_i = min over admissible quilts of |N| / (ε - e^v).

    The trivial quilt (Q = ∅, N = every entry, R = ∅) has e^v = 0 and is always
    a candidate, so b_i <= |Y| / ε.
    """
    framework.require_variant(VALUE_NETWORK, mechanism="mqm-baseline")
    if not epsilon > 0:
        raise ConfigurationError(f"epsilon must be positive, got {epsilon}")
    members = list(framework.theta)
    net = members[0]
    entries = Y.entry_names()
    if sorted(entries) != sorted(net.nodes):
        raise ConfigurationError(f"value network nodes {net.nodes} do not match dataset entries {entries}")

    choices = []
    everything = frozenset(net.nodes)
    for node in net.nodes:
        trivial = MarkovQuilt(node, frozenset(), everything, frozenset())
        candidates = [QuiltCandidate(trivial, 0.0, float(len(everything)), len(everything) / epsilon)]
        for quilt in enumerate_quilts(net, node, max_quilt_size):
            e = variable_max_influence(net, node, quilt.Q, theta=members)
            size = float(len(quilt.N))
            scale = size / (epsilon - e) if e < epsilon else math.inf
            candidates.append(QuiltCandidate(quilt, e, size, scale))
        scale, chosen = _best(math.inf, candidates)
        choices.append(NodeChoice(node, node, math.inf, candidates, scale, chosen))
    return choices


def baseline_mqm(Y: Dataset, F: QuerySpec, L: float, framework: PufferfishFramework, epsilon: float,
                 rng_seed: int, max_quilt_size: int = 3) -> QuiltReport:
    """F(Y) + Lap(L · max_i b_i) for an L-Lipschitz F over value-network entries."""
    if not (math.isfinite(L) and L >= 0):
        raise ConfigurationError(f"Lipschitz constant must be finite and nonnegative, got {L}")
    framework.check_dataset(Y)
    F = framework.require_query(F)
    choices = entry_choices(Y, framework, epsilon, max_quilt_size)
    b_max = max(c.scale for c in choices)
    scale = L * b_max if L > 0 else 0.0
    output, noise = release_laplace(evaluate_query(F, Y), scale, rng_seed)
    logger.info("mqm-baseline: b_max=%s, scale=%.6g", b_max, scale)
    return QuiltReport("mqm-baseline", framework.framework_id, F.describe(framework.names), epsilon, choices,
                       scale, output, rng_seed, noise, extras={"lipschitz": L, "b_max": b_max})
