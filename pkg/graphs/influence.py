"""Max-influence of one node on a set of nodes, over a finite class of networks.

Zero-probability conventions: values of the protected node with zero marginal
under a θ are skipped for that θ; configurations of probability zero under both
conditionings are skipped; positive over zero is +inf.
"""

import logging
import math
from itertools import product
from typing import Iterable, Optional, Sequence

import numpy as np

from core.errors import ConfigurationError, VacuousSecretError
from graphs.bayes_net import BayesNet, ParameterFamily, share_supports
from graphs.inference import conditional_on

logger = logging.getLogger(__name__)


def _influence(nets: Sequence[BayesNet], i: str, A: Iterable[str]) -> float:
    A = sorted(set(A))
    if not nets:
        raise ConfigurationError("influence needs at least one θ")
    if i not in nets[0].supports:
        raise ConfigurationError(f"Unknown node: {i}. Available: {nets[0].nodes}")
    if i in A:
        raise ConfigurationError(f"influence of '{i}' on a set containing it")
    share_supports(list(nets))
    if not A:
        return 0.0

    worst = 0.0
    informative = False
    for net in nets:
        prior, cond = conditional_on(net, i, A)
        values = np.flatnonzero(prior > 0)
        if values.size:
            informative = True
        rows = cond.reshape(cond.shape[0], -1)
        for a, b in product(values, values):
            if a == b:
                continue
            p, q = rows[a], rows[b]
            if np.any((p > 0) & (q <= 0)):
                logger.debug("θ %s: %s=%s vs %s reaches a configuration impossible under the other",
                             net.id, i, net.supports[i][a], net.supports[i][b])
                return math.inf
            both = (p > 0) & (q > 0)
            if np.any(both):
                worst = max(worst, float(np.max(np.log(p[both] / q[both]))))
    if not informative:
        raise VacuousSecretError(f"every value of '{i}' has zero probability under every θ")
    return worst


def max_influence(family: ParameterFamily, i: str, A: Iterable[str],
                  theta: Optional[Sequence[ParameterFamily]] = None) -> float:
    """e_Θ(φ_A | φ_i): worst log-ratio of P(φ_A | φ_i=a, θ) to P(φ_A | φ_i=b, θ).

    `i` and `A` are parameter nodes of `family`; Θ defaults to the family alone.
    """
    members = list(theta) if theta is not None else [family]
    share_supports([family.net] + [m.net for m in members], "parameter family")
    return _influence([m.net for m in members], i, A)


def variable_max_influence(net: BayesNet, i: str, A: Iterable[str],
                           theta: Optional[Sequence[BayesNet]] = None) -> float:
    """e^v_Θ(Y_A | Y_i) over value-level networks; Θ defaults to `net` alone."""
    nets = list(theta) if theta is not None else [net]
    share_supports([net] + nets)
    return _influence(nets, i, A)
