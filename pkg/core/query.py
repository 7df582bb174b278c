"""Query DSL (column mean, column sum, threshold count), exact evaluation and
column-neighbor sensitivity."""

import logging
import operator
from dataclasses import dataclass
from typing import Any, Callable, Dict, FrozenSet, Iterable, Sequence, Tuple

import numpy as np

from core.dataset import Dataset
from core.domains import INTERVAL, AttributeDomain
from core.errors import ConfigurationError, UnboundedSensitivityError

logger = logging.getLogger(__name__)

COLUMN_MEAN = "column_mean"
COLUMN_SUM = "column_sum"
THRESHOLD_COUNT = "threshold_count"
QUERY_KINDS = (COLUMN_MEAN, COLUMN_SUM, THRESHOLD_COUNT)

OPERATORS: Dict[str, Callable[[Any, Any], bool]] = {
    ">": operator.gt,
    ">=": operator.ge,
    "<": operator.lt,
    "<=": operator.le,
    "=": operator.eq,
}
_OP_ALIASES = {"≥": ">=", "≤": "<=", "==": "="}


@dataclass(frozen=True)
class Predicate:
    """One comparison `X_attribute <op> value`; attribute is a 0-based index."""

    attribute: int
    op: str
    value: Any

    def __post_init__(self):
        if self.op not in OPERATORS:
            raise ConfigurationError(f"Unknown comparison operator: {self.op}. Available: {list(OPERATORS)}")

    def holds(self, x: Any) -> bool:
        return bool(OPERATORS[self.op](x, self.value))

    def mask(self, column: np.ndarray) -> np.ndarray:
        return np.asarray(OPERATORS[self.op](column, self.value), dtype=bool)

    def check_domain(self, domain: AttributeDomain, name: str = ""):
        numeric_value = isinstance(self.value, (int, float)) and not isinstance(self.value, bool)
        if domain.is_numeric and not numeric_value:
            raise ConfigurationError(f"predicate on numeric attribute '{name}' compares against {self.value!r}")
        if not domain.is_numeric:
            if numeric_value:
                raise ConfigurationError(f"predicate on labeled attribute '{name}' compares against a number")
            if self.op != "=":
                raise ConfigurationError(f"labeled attribute '{name}' only supports '=' comparisons")

    def satisfiable(self, domain: AttributeDomain) -> bool:
        """Some domain value makes the comparison true."""
        return self._achievable(domain, True)

    def falsifiable(self, domain: AttributeDomain) -> bool:
        """Some domain value makes the comparison false."""
        return self._achievable(domain, False)

    def _achievable(self, domain: AttributeDomain, outcome: bool) -> bool:
        if domain.kind != INTERVAL:
            return any(self.holds(v) == outcome for v in domain.values)
        lo, hi, c = domain.lo, domain.hi, self.value
        if self.op == "=":
            return (lo <= c <= hi) if outcome else True
        # monotone comparisons are decided at the endpoints
        return any(self.holds(v) == outcome for v in (lo, hi))


@dataclass(frozen=True)
class QuerySpec:
    """A query F together with the attribute set A it reads."""

    kind: str
    attribute: int = -1
    predicates: Tuple[Predicate, ...] = ()

    def __post_init__(self):
        if self.kind not in QUERY_KINDS:
            raise ConfigurationError(f"Unknown query kind: {self.kind}. Available: {list(QUERY_KINDS)}")
        if self.kind == THRESHOLD_COUNT:
            if not self.predicates:
                raise ConfigurationError("threshold count needs at least one predicate")
            attrs = [p.attribute for p in self.predicates]
            if len(set(attrs)) != len(attrs):
                raise ConfigurationError("threshold count predicates must reference distinct attributes")
        elif self.attribute < 0:
            raise ConfigurationError(f"{self.kind} needs an attribute index")

    @classmethod
    def column_mean(cls, j: int) -> "QuerySpec":
        return cls(COLUMN_MEAN, attribute=j)

    @classmethod
    def column_sum(cls, j: int) -> "QuerySpec":
        return cls(COLUMN_SUM, attribute=j)

    @classmethod
    def threshold_count(cls, predicates: Iterable[Predicate]) -> "QuerySpec":
        return cls(THRESHOLD_COUNT, predicates=tuple(predicates))

    @property
    def attributes(self) -> FrozenSet[int]:
        if self.kind == THRESHOLD_COUNT:
            return frozenset(p.attribute for p in self.predicates)
        return frozenset({self.attribute})

    @property
    def is_linear(self) -> bool:
        return self.kind in (COLUMN_MEAN, COLUMN_SUM)

    def validate(self, domains: Sequence[AttributeDomain], names: Sequence[str] = ()):
        m = len(domains)
        for j in self.attributes:
            if not 0 <= j < m:
                raise ConfigurationError(f"query references attribute {j + 1}, dataset has {m}")
        for p in self.predicates:
            name = names[p.attribute] if names else str(p.attribute + 1)
            p.check_domain(domains[p.attribute], name)
        if self.is_linear and not domains[self.attribute].is_numeric:
            name = names[self.attribute] if names else str(self.attribute + 1)
            raise ConfigurationError(f"{self.kind} over labeled attribute '{name}'")

    def describe(self, names: Sequence[str]) -> str:
        if self.kind == THRESHOLD_COUNT:
            terms = " and ".join(f"{names[p.attribute]} {p.op} {p.value}" for p in self.predicates)
            return f"count({terms})"
        label = "mean" if self.kind == COLUMN_MEAN else "sum"
        return f"{label}({names[self.attribute]})"

    def to_document(self, names: Sequence[str]) -> dict:
        if self.kind == THRESHOLD_COUNT:
            return {
                "kind": self.kind,
                "predicates": [
                    {"attribute": names[p.attribute], "op": p.op, "value": p.value} for p in self.predicates
                ],
            }
        return {"kind": self.kind, "attribute": names[self.attribute]}


def normalize_operator(op: str) -> str:
    return _OP_ALIASES.get(op, op)


def evaluate_query(F: QuerySpec, X: Dataset) -> float:
    """Exact value of F on X."""
    F.validate(X.domains, X.names)
    if F.kind == COLUMN_MEAN:
        return float(np.mean(X.numeric_column(F.attribute)))
    if F.kind == COLUMN_SUM:
        return float(np.sum(X.numeric_column(F.attribute)))

    mask = np.ones(X.n, dtype=bool)
    for p in F.predicates:
        domain = X.domains[p.attribute]
        column = X.numeric_column(p.attribute) if domain.is_numeric else X.column(p.attribute).to_numpy(dtype=object)
        mask &= p.mask(column)
    return float(np.count_nonzero(mask))


def column_sensitivity(F: QuerySpec, A_prime: Iterable[int],
                       X_shape: Tuple[int, Sequence[AttributeDomain]]) -> float:
    """Largest |F(X) - F(X')| over datasets differing only in the columns A_prime."""
    n, domains = X_shape
    changed = F.attributes & frozenset(A_prime)
    if not changed:
        return 0.0

    if F.is_linear:
        domain = domains[F.attribute]
        if not domain.is_numeric:
            raise UnboundedSensitivityError(
                f"unbounded sensitivity: attribute {F.attribute + 1} has no numeric range"
            )
        width = domain.width
        return float(width) if F.kind == COLUMN_MEAN else float(n * width)

    # A record's indicator can flip iff the conjunction is satisfiable and some
    # changed predicate can also be made false.
    if not all(p.satisfiable(domains[p.attribute]) for p in F.predicates):
        return 0.0
    if not any(p.falsifiable(domains[p.attribute]) for p in F.predicates if p.attribute in changed):
        return 0.0
    return float(n)
