"""Markov quilts: (Q, N, R) partitions of a network around one protected node."""

import logging
from dataclasses import dataclass
from itertools import combinations
from typing import FrozenSet, List

from core.errors import ConfigurationError
from graphs.bayes_net import BayesNet
from graphs.dseparation import d_connected, d_separated

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MarkovQuilt:
    """Deleting Q leaves the nearby set N (which holds the protected node) and the
    remote set R, with R independent of the protected node given Q."""

    node: str
    Q: FrozenSet[str]
    N: FrozenSet[str]
    R: FrozenSet[str]

    def __post_init__(self):
        if self.Q & self.N or self.Q & self.R or self.N & self.R:
            raise ConfigurationError(f"quilt sets of '{self.node}' overlap")
        if self.node not in self.N:
            raise ConfigurationError(f"protected node '{self.node}' must lie in N")

    def describe(self) -> str:
        def fmt(s):
            return "{" + ", ".join(sorted(s)) + "}"
        return f"Q={fmt(self.Q)}, N={fmt(self.N)}, R={fmt(self.R)}"

    def to_document(self) -> dict:
        return {"node": self.node, "Q": sorted(self.Q), "N": sorted(self.N), "R": sorted(self.R)}


def enumerate_quilts(net: BayesNet, i: str, max_quilt_size: int) -> List[MarkovQuilt]:
    """All quilts of `i` with |Q| <= max_quilt_size and a nonempty remote set.

    N is the d-connected closure of `i` given Q, so R is as large as Q allows.
    Emitted by |Q|, then by the sorted node names of Q.
    """
    if i not in net.supports:
        raise ConfigurationError(f"Unknown node: {i}. Available: {net.nodes}")
    if max_quilt_size < 0:
        raise ConfigurationError(f"max_quilt_size must be nonnegative, got {max_quilt_size}")
    others = sorted(v for v in net.nodes if v != i)
    size = min(max_quilt_size, len(others))
    everything = frozenset(net.nodes)

    quilts = []
    for k in range(size + 1):
        for Q in combinations(others, k):
            Q = frozenset(Q)
            N = frozenset({i}) | d_connected(net.graph, i, Q)
            R = everything - N - Q
            if not R:
                continue
            if not d_separated(net.graph, i, R, Q):
                continue
            quilts.append(MarkovQuilt(i, Q, N, R))
    logger.debug("node %s: %d quilt(s) with |Q| <= %d", i, len(quilts), size)
    return quilts
