"""Parse framework documents (JSON or YAML) into a PufferfishFramework."""

import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import yaml

from config.settings import DEFAULT_GRID_STEP
from core.domains import AttributeDomain
from core.errors import AttributePrivacyError, ConfigurationError
from core.framework import (
    DATASET,
    DISCRETE_RECORD,
    GAUSSIAN,
    PARAMETER_NETWORK,
    VALUE_NETWORK,
    DistributionClass,
    PufferfishFramework,
    SecretEvent,
    SecretSpec,
)
from core.query import COLUMN_MEAN, THRESHOLD_COUNT, Predicate, QuerySpec, normalize_operator
from distributions.discrete import DiscreteDistribution
from distributions.gaussian import MultivariateGaussian
from distributions.record_models import AffineMapping, BinaryDependenceModel
from graphs.bayes_net import BayesNet, ParameterFamily, bernoulli_likelihoods

logger = logging.getLogger(__name__)

BERNOULLI = "bernoulli"


def read_document(path) -> dict:
    """Load a JSON or YAML document; the suffix decides the parser."""
    path = Path(path)
    with open(path) as f:
        if path.suffix in (".yaml", ".yml"):
            doc = yaml.safe_load(f)
        else:
            doc = json.load(f)
    if not isinstance(doc, dict):
        raise ConfigurationError(f"{path.name}: top level must be an object")
    return doc


def grid_values(lo: float, hi: float, step: float) -> List[float]:
    """lo, lo + step, ... up to hi; both endpoints are always included."""
    if step <= 0:
        raise ConfigurationError(f"grid step must be positive, got {step}")
    if lo > hi:
        raise ConfigurationError(f"grid range [{lo}, {hi}] is empty")
    count = int(math.floor((hi - lo) / step + 1e-9))
    values = [round(lo + k * step, 10) for k in range(count + 1)]
    if not math.isclose(values[-1], hi, abs_tol=1e-9):
        values.append(float(hi))
    else:
        values[-1] = float(hi)
    return values


def attribute_index(ref: Any, names: Sequence[str]) -> int:
    """Resolve an attribute reference: a name, or a 1-based position."""
    if isinstance(ref, bool):
        raise ConfigurationError(f"invalid attribute reference {ref!r}")
    if isinstance(ref, int):
        if not 1 <= ref <= len(names):
            raise ConfigurationError(f"attribute index {ref} outside 1..{len(names)}")
        return ref - 1
    if ref in names:
        return list(names).index(ref)
    raise ConfigurationError(f"Unknown attribute: {ref}. Available: {list(names)}")


def _number(value: Any, what: str) -> float:
    if value is None:
        return math.nan
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ConfigurationError(f"{what} must be a number, got {value!r}")


def parse_event(doc: dict, position: int) -> SecretEvent:
    event_id = str(doc.get("id", f"e{position + 1}"))
    if "interval" in doc:
        lo, hi = doc["interval"]
        lo = -math.inf if lo is None else _number(lo, "interval bound")
        hi = math.inf if hi is None else _number(hi, "interval bound")
        return SecretEvent(event_id, interval=(lo, hi))
    if "points" in doc:
        points = tuple(p if isinstance(p, str) else _number(p, "event point") for p in doc["points"])
        return SecretEvent(event_id, points=points)
    raise ConfigurationError(f"event '{event_id}' needs 'interval' or 'points'")


def parse_secret(doc: dict, names: Sequence[str]) -> SecretSpec:
    i = attribute_index(doc.get("attribute"), names)
    notion = doc.get("notion", DATASET)
    events = tuple(parse_event(e, k) for k, e in enumerate(doc.get("events", [])))
    return SecretSpec(i, notion, events, function=doc.get("function", COLUMN_MEAN))


def parse_query(doc: dict, names: Sequence[str], domains: Sequence[AttributeDomain]) -> QuerySpec:
    kind = doc.get("kind")
    if kind == THRESHOLD_COUNT:
        predicates = []
        for p in doc.get("predicates", []):
            j = attribute_index(p.get("attribute"), names)
            value = p.get("value")
            if domains[j].is_numeric and not isinstance(value, str):
                value = _number(value, "predicate constant")
            predicates.append(Predicate(j, normalize_operator(str(p.get("op", ""))), value))
        return QuerySpec.threshold_count(predicates)
    return QuerySpec(kind, attribute=attribute_index(doc.get("attribute"), names))


def _support(raw: Any, grid_step: float, node: str) -> Tuple[Any, ...]:
    if isinstance(raw, dict) and "range" in raw:
        lo, hi = raw["range"]
        return tuple(grid_values(float(lo), float(hi), float(raw.get("step", grid_step))))
    if not isinstance(raw, list) or not raw:
        raise ConfigurationError(f"node '{node}' needs a support list or a range")
    return tuple(v if isinstance(v, str) else float(v) for v in raw)


def _network_nodes(doc: dict, grid_step: float):
    """Node supports, edges, derived CPTs and attribute map of a network document."""
    supports: Dict[str, Tuple[Any, ...]] = {}
    derived: Dict[str, np.ndarray] = {}
    attributes: Dict[str, str] = {}
    edges = [tuple(map(str, e)) for e in doc.get("edges", [])]
    for node in doc.get("nodes", []):
        name = str(node["id"])
        attributes[str(node.get("attribute", name))] = name
        if "affine" in node:
            spec = node["affine"]
            parent = str(spec["parent"])
            if parent not in supports:
                raise ConfigurationError(f"affine node '{name}' must follow its parent '{parent}'")
            mapping = AffineMapping(float(spec["alpha"]), float(spec["beta"]))
            mapped = [round(mapping(v), 12) for v in supports[parent]]
            support = tuple(sorted(set(mapped)))
            cpt = np.zeros((len(mapped), len(support)))
            for row, value in enumerate(mapped):
                cpt[row, support.index(value)] = 1.0
            supports[name] = support
            derived[name] = cpt
            if (parent, name) not in edges:
                edges.append((parent, name))
        else:
            supports[name] = _support(node.get("support"), grid_step, name)
    return supports, edges, derived, attributes


def _likelihoods(raw: Dict[str, Any], attributes: Dict[str, str],
                 supports: Dict[str, Tuple[Any, ...]]) -> Dict[str, Tuple[DiscreteDistribution, ...]]:
    laws = {}
    for attribute, spec in (raw or {}).items():
        if attribute not in attributes:
            raise ConfigurationError(f"likelihood for unknown attribute '{attribute}'")
        node = attributes[attribute]
        if spec == BERNOULLI:
            laws[attribute] = bernoulli_likelihoods(supports[node])
        else:
            laws[attribute] = tuple(DiscreteDistribution.from_document(d) for d in spec)
    return laws


def _parameter_network(doc: dict, grid_step: float) -> List[ParameterFamily]:
    supports, edges, derived, attributes = _network_nodes(doc, grid_step)
    shared = doc.get("likelihoods", {})
    members = []
    for k, member in enumerate(doc.get("members", [])):
        cpts = dict(derived)
        cpts.update(member.get("cpts", {}))
        net = BayesNet(list(supports.items()), edges, cpts, id=str(member.get("id", f"theta{k + 1}")))
        raw_laws = dict(shared)
        raw_laws.update(member.get("likelihoods", {}))
        members.append(ParameterFamily(net, dict(attributes), _likelihoods(raw_laws, attributes, supports), id=net.id))
    return members


def _value_network(doc: dict, grid_step: float) -> List[BayesNet]:
    supports, edges, derived, _ = _network_nodes(doc, grid_step)
    members = []
    for k, member in enumerate(doc.get("members", [])):
        cpts = dict(derived)
        cpts.update(member.get("cpts", {}))
        members.append(BayesNet(list(supports.items()), edges, cpts, id=str(member.get("id", f"theta{k + 1}"))))
    return members


def _discrete_records(doc: dict, grid_step: float) -> List[BinaryDependenceModel]:
    members = [BinaryDependenceModel.from_document(m) for m in doc.get("members", [])]
    grid = doc.get("grid")
    if grid:
        q = float(grid.get("q", 0.5))
        for p1 in grid_values(*map(float, grid["p1"]), grid_step):
            for p2 in grid_values(*map(float, grid["p2"]), grid_step):
                members.append(BinaryDependenceModel(p1=p1, p2=p2, q=q, id=f"p1={p1:g},p2={p2:g}"))
    return members


def parse_theta(doc: dict, grid_step: Optional[float] = None) -> DistributionClass:
    variant = doc.get("variant")
    step = float(grid_step if grid_step is not None else doc.get("grid_step", DEFAULT_GRID_STEP))
    builders = {
        GAUSSIAN: lambda: [MultivariateGaussian.from_document(m) for m in doc.get("members", [])],
        DISCRETE_RECORD: lambda: _discrete_records(doc, step),
        PARAMETER_NETWORK: lambda: _parameter_network(doc, step),
        VALUE_NETWORK: lambda: _value_network(doc, step),
    }
    if variant not in builders:
        raise ConfigurationError(f"Unknown distribution class: {variant}. Available: {list(builders)}")
    members = builders[variant]()
    if variant == DISCRETE_RECORD:
        gridded = bool(doc.get("grid"))
    else:
        gridded = any(isinstance(n.get("support"), dict) for n in doc.get("nodes", []))
    logger.debug("Θ %s: %d member(s)", variant, len(members))
    return DistributionClass(variant, tuple(members), grid_step=step if gridded else None)


def parse_framework(doc: dict, grid_step: Optional[float] = None, source: str = "") -> PufferfishFramework:
    """Build and validate a framework from its document."""
    try:
        attributes = [(str(a["name"]), AttributeDomain.from_document(a["domain"])) for a in doc["attributes"]]
        names = tuple(name for name, _ in attributes)
        domains = tuple(domain for _, domain in attributes)
        sensitive = frozenset(attribute_index(ref, names) for ref in doc.get("sensitive", []))
        secrets = tuple(parse_secret(s, names) for s in doc.get("secrets", []))
        theta = parse_theta(doc["theta"], grid_step)
        query = parse_query(doc["query"], names, domains) if doc.get("query") else None
    except AttributePrivacyError:
        raise
    except KeyError as e:
        raise ConfigurationError(f"{source or 'framework document'}: missing field {e}")
    except (TypeError, ValueError) as e:
        raise ConfigurationError(f"{source or 'framework document'}: {e}")

    framework = PufferfishFramework(
        names=names,
        domains=domains,
        sensitive=sensitive,
        secrets=secrets,
        theta=theta,
        query=query,
        framework_id=str(doc.get("framework_id", source)),
        description=str(doc.get("description", "")),
    )
    logger.info("Framework %s: m=%d, C=%s, Θ=%s with %d member(s)", framework.framework_id or "<inline>",
                len(names), sorted(names[i] for i in sensitive), theta.variant, len(theta))
    return framework


def load_framework(path, grid_step: Optional[float] = None) -> PufferfishFramework:
    path = Path(path)
    return parse_framework(read_document(path), grid_step=grid_step, source=path.stem)
