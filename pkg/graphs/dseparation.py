"""d-separation queries on a network's DAG."""

import logging
from typing import Iterable, Set

import networkx as nx

from core.errors import ConfigurationError

logger = logging.getLogger(__name__)


def _check_nodes(graph: nx.DiGraph, nodes: Iterable[str]):
    unknown = sorted(str(v) for v in nodes if v not in graph)
    if unknown:
        raise ConfigurationError(f"Unknown node(s): {unknown}. Available: {sorted(graph.nodes)}")


def d_connected(graph: nx.DiGraph, source: str, given: Iterable[str] = ()) -> Set[str]:
    """Nodes outside the observed set joined to `source` by an active trail."""
    given = set(given)
    _check_nodes(graph, [source, *given])
    if source in given:
        raise ConfigurationError(f"node '{source}' must not be in the observed set")
    return {v for v in graph.nodes
            if v != source and v not in given and not nx.is_d_separator(graph, {source}, {v}, given)}


def d_separated(graph: nx.DiGraph, i: str, R: Iterable[str], Q: Iterable[str] = ()) -> bool:
    """True iff every node of R is d-separated from i given Q."""
    R, Q = set(R), set(Q)
    _check_nodes(graph, [i, *R, *Q])
    if i in Q or i in R:
        raise ConfigurationError(f"protected node '{i}' must not be in the separating or remote set")
    if R & Q:
        raise ConfigurationError(f"remote and separating sets overlap: {sorted(R & Q)}")
    if not R:
        return True
    return nx.is_d_separator(graph, {i}, R, Q)
