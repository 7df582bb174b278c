"""Exact marginals of a Bayesian network: full joint table for small networks,
variable elimination otherwise."""

import logging
from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from config.settings import MAX_JOINT_BITS
from core.errors import ConfigurationError
from graphs.bayes_net import BayesNet

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Factor:
    """Nonnegative table with one axis per variable, in `variables` order."""

    variables: Tuple[str, ...]
    table: np.ndarray

    def _aligned(self, variables: Sequence[str]) -> np.ndarray:
        present = [v for v in variables if v in self.variables]
        table = np.transpose(self.table, [self.variables.index(v) for v in present])
        shape = [self.table.shape[self.variables.index(v)] if v in self.variables else 1 for v in variables]
        return table.reshape(shape)

    def __mul__(self, other: "Factor") -> "Factor":
        variables = self.variables + tuple(v for v in other.variables if v not in self.variables)
        return Factor(variables, self._aligned(variables) * other._aligned(variables))

    def sum_out(self, variable: str) -> "Factor":
        axis = self.variables.index(variable)
        rest = self.variables[:axis] + self.variables[axis + 1:]
        return Factor(rest, self.table.sum(axis=axis))

    def ordered(self, variables: Sequence[str]) -> np.ndarray:
        """Table with axes permuted to `variables`, which must equal the factor's scope."""
        if set(variables) != set(self.variables):
            raise ConfigurationError(f"cannot order factor over {self.variables} as {tuple(variables)}")
        return np.transpose(self.table, [self.variables.index(v) for v in variables])


def network_factors(net: BayesNet) -> List[Factor]:
    return [Factor(tuple(net.parents[v]) + (v,), net.cpts[v]) for v in net.nodes]


def joint_table(net: BayesNet) -> np.ndarray:
    """P(all nodes), axes in `net.nodes` order."""
    factors = network_factors(net)
    product = factors[0]
    for f in factors[1:]:
        product = product * f
    return product.ordered(net.nodes)


def eliminate(factors: List[Factor], order: Iterable[str]) -> List[Factor]:
    """Sum out each variable in turn, replacing the factors that mention it by their
    marginalized product."""
    factors = list(factors)
    for var in order:
        relevant = [f for f in factors if var in f.variables]
        if not relevant:
            continue
        product = relevant[0]
        for f in relevant[1:]:
            product = product * f
        factors = [f for f in factors if var not in f.variables]
        factors.append(product.sum_out(var))
    return factors


def _greedy_order(net: BayesNet, factors: List[Factor], hidden: Sequence[str]) -> List[str]:
    """Elimination order that always removes the variable producing the smallest intermediate table."""
    scopes = [frozenset(f.variables) for f in factors]
    remaining = set(hidden)
    order = []

    def merged(var):
        return frozenset().union(*(s for s in scopes if var in s))

    while remaining:
        var = min(sorted(remaining), key=lambda v: int(np.prod([net.card(u) for u in merged(v)])))
        scope = merged(var)
        scopes = [s for s in scopes if var not in s] + [scope - {var}]
        remaining.discard(var)
        order.append(var)
    return order


def marginal(net: BayesNet, keep: Sequence[str]) -> np.ndarray:
    """P(keep), axes in `keep` order."""
    keep = list(keep)
    unknown = [v for v in keep if v not in net.supports]
    if unknown:
        raise ConfigurationError(f"Unknown node(s): {unknown}. Available: {net.nodes}")
    if len(set(keep)) != len(keep):
        raise ConfigurationError(f"repeated node in {keep}")
    hidden = [v for v in net.nodes if v not in keep]

    if net.configuration_bits <= MAX_JOINT_BITS:
        joint = joint_table(net)
        axes = tuple(net.nodes.index(v) for v in hidden)
        reduced = joint.sum(axis=axes) if axes else joint
        kept_order = [v for v in net.nodes if v in keep]
        return np.transpose(reduced, [kept_order.index(v) for v in keep])

    logger.debug("variable elimination on '%s' (%d bits)", net.id, net.configuration_bits)
    factors = network_factors(net)
    factors = eliminate(factors, _greedy_order(net, factors, hidden))
    result = Factor((), np.array(1.0))
    for f in factors:
        result = result * f
    return result.ordered(keep)


def conditional_on(net: BayesNet, given: str, targets: Sequence[str]) -> Tuple[np.ndarray, np.ndarray]:
    """(P(given), P(targets | given)) with the conditional indexed [given value, *target values].

    Rows for given values of zero probability are left at zero.
    """
    pair = marginal(net, [given] + list(targets))
    prior = pair.reshape(pair.shape[0], -1).sum(axis=1)
    cond = np.zeros_like(pair)
    positive = prior > 0
    cond[positive] = pair[positive] / prior[positive].reshape((-1,) + (1,) * len(targets))
    return prior, cond
