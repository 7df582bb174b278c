"""Discrete Bayesian networks and parameter families built on them."""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from config.settings import PROBABILITY_TOLERANCE
from core.errors import ConfigurationError, DistributionError
from distributions.discrete import DiscreteDistribution

logger = logging.getLogger(__name__)

UNIFORM = "uniform"


def _same_value(a: Any, b: Any) -> bool:
    if isinstance(a, (int, float)) and isinstance(b, (int, float)):
        return math.isclose(a, b, rel_tol=0.0, abs_tol=1e-12)
    return a == b


class BayesNet:
    """DAG over finite-support variables with one CPT per node.

    A node's parents are ordered by their first appearance in the edge list.
    Its CPT is stored with one axis per parent (in that order) followed by the
    node's own axis, so `cpts[v][pa_1, ..., pa_k, :]` is one row.
    """

    def __init__(self, nodes: Sequence[Tuple[str, Sequence[Any]]], edges: Sequence[Tuple[str, str]],
                 cpts: Mapping[str, Any], id: str = ""):
        self.id = id
        self.graph = nx.DiGraph()
        self.supports: Dict[str, Tuple[Any, ...]] = {}
        for name, support in nodes:
            name = str(name)
            if name in self.supports:
                raise ConfigurationError(f"duplicate network node '{name}'")
            support = tuple(support)
            if len(support) < 1:
                raise ConfigurationError(f"node '{name}' needs a nonempty support")
            self.supports[name] = support
            self.graph.add_node(name)

        self.parents: Dict[str, List[str]] = {v: [] for v in self.supports}
        for u, v in edges:
            u, v = str(u), str(v)
            unknown = [x for x in (u, v) if x not in self.supports]
            if unknown:
                raise ConfigurationError(f"Unknown node(s) in edge {u}->{v}: {unknown}. Available: {self.nodes}")
            if u in self.parents[v]:
                raise ConfigurationError(f"duplicate edge {u}->{v}")
            self.parents[v].append(u)
            self.graph.add_edge(u, v)
        if not nx.is_directed_acyclic_graph(self.graph):
            raise ConfigurationError(f"network '{id}' contains a directed cycle")

        self.cpts: Dict[str, np.ndarray] = {}
        for v in self.nodes:
            if v not in cpts:
                raise DistributionError(f"network '{id}' has no CPT for node '{v}'")
            self.cpts[v] = self._build_cpt(v, cpts[v])

    @property
    def nodes(self) -> List[str]:
        return list(self.supports)

    def card(self, node: str) -> int:
        return len(self.supports[node])

    def parent_cards(self, node: str) -> Tuple[int, ...]:
        return tuple(self.card(p) for p in self.parents[node])

    def _build_cpt(self, node: str, raw: Any) -> np.ndarray:
        shape = self.parent_cards(node) + (self.card(node),)
        if isinstance(raw, str):
            if raw != UNIFORM:
                raise DistributionError(f"CPT of '{node}': unknown shorthand {raw!r}")
            return np.full(shape, 1.0 / self.card(node))

        table = np.asarray(raw, dtype=float)
        if table.ndim == 1 and not self.parents[node]:
            table = table[np.newaxis, :]
        rows = int(np.prod(shape[:-1]))
        if table.shape == shape:
            table = table.reshape(rows, shape[-1])
        if table.shape != (rows, shape[-1]):
            raise DistributionError(
                f"CPT of '{node}' must have {rows} row(s) of {shape[-1]} entries "
                f"(parents {self.parents[node]}), got shape {table.shape}"
            )
        if np.any(table < 0):
            raise DistributionError(f"CPT of '{node}' has a negative entry")
        sums = table.sum(axis=1)
        bad = np.flatnonzero(np.abs(sums - 1.0) > PROBABILITY_TOLERANCE)
        if bad.size:
            raise DistributionError(f"CPT row {int(bad[0])} of '{node}' sums to {sums[bad[0]]}, expected 1")
        return table.reshape(shape)

    def index_of(self, node: str, value: Any) -> int:
        for k, v in enumerate(self.supports[node]):
            if _same_value(v, value):
                return k
        raise ConfigurationError(f"value {value!r} is not in the support of '{node}': {list(self.supports[node])}")

    @property
    def configuration_bits(self) -> int:
        """Bits needed to index one joint configuration."""
        return sum(math.ceil(math.log2(self.card(v))) if self.card(v) > 1 else 0 for v in self.nodes)

    def same_structure(self, other: "BayesNet") -> bool:
        return (self.nodes == other.nodes
                and all(len(self.supports[v]) == len(other.supports[v])
                        and all(_same_value(a, b) for a, b in zip(self.supports[v], other.supports[v]))
                        for v in self.nodes)
                and self.parents == other.parents)

    def __repr__(self) -> str:
        return f"BayesNet(id={self.id!r}, nodes={self.nodes}, edges={list(self.graph.edges)})"


@dataclass(frozen=True, eq=False)
class ParameterFamily:
    """One θ of a distributional framework.

    `net` ranges over the parameters φ_1..φ_m; `attribute_nodes` maps each
    attribute to its parameter node and `likelihoods[attribute][k]` is the
    law of one entry of that attribute when its parameter takes its k-th
    support value. Records are i.i.d. and attributes are independent given
    the parameters.
    """

    net: BayesNet
    attribute_nodes: Dict[str, str]
    likelihoods: Dict[str, Tuple[DiscreteDistribution, ...]] = field(default_factory=dict)
    id: str = ""

    def __post_init__(self):
        nodes = list(self.attribute_nodes.values())
        if len(set(nodes)) != len(nodes):
            raise ConfigurationError(f"θ '{self.id}': two attributes share one parameter node")
        missing = sorted(set(self.net.nodes) - set(nodes))
        if missing:
            raise ConfigurationError(f"θ '{self.id}': parameter node(s) {missing} govern no attribute")
        for attribute, laws in self.likelihoods.items():
            node = self.node_for(attribute)
            if len(laws) != self.net.card(node):
                raise DistributionError(
                    f"θ '{self.id}': attribute '{attribute}' needs one likelihood per value of '{node}' "
                    f"({self.net.card(node)}), got {len(laws)}"
                )

    def node_for(self, attribute: str) -> str:
        try:
            return self.attribute_nodes[attribute]
        except KeyError:
            raise ConfigurationError(
                f"Unknown attribute: {attribute}. Available: {list(self.attribute_nodes)}"
            )

    def likelihood(self, attribute: str, index: int) -> DiscreteDistribution:
        if attribute not in self.likelihoods:
            raise ConfigurationError(f"θ '{self.id}' declares no likelihood for attribute '{attribute}'")
        return self.likelihoods[attribute][index]

    def support_of(self, attribute: str) -> Tuple[Any, ...]:
        return self.net.supports[self.node_for(attribute)]


def bernoulli_likelihoods(support: Sequence[float]) -> Tuple[DiscreteDistribution, ...]:
    """Entry law Bernoulli(v) for every parameter value v."""
    laws = []
    for v in support:
        v = float(v)
        if not 0.0 <= v <= 1.0:
            raise DistributionError(f"Bernoulli parameter {v} outside [0, 1]")
        laws.append(DiscreteDistribution.from_atoms([(0.0, 1.0 - v), (1.0, v)]))
    return tuple(laws)


def share_supports(members: Sequence[BayesNet], label: Optional[str] = None) -> None:
    """Raise unless every network has the structure of the first one."""
    first = members[0]
    for other in members[1:]:
        if not first.same_structure(other):
            raise ConfigurationError(
                f"{label or 'network'} members '{first.id}' and '{other.id}' disagree on nodes, supports or edges"
            )
