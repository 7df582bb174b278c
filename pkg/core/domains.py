"""Attribute domains: bounded real intervals or finite sets of labeled values."""

import math
from dataclasses import dataclass
from typing import Any, Optional, Tuple

from core.errors import ConfigurationError, DatasetError

INTERVAL = "interval"
FINITE = "finite"


def _as_number(value: Any) -> Optional[float]:
    if isinstance(value, bool):
        return float(value)
    if isinstance(value, (int, float)):
        return float(value)
    try:
        return float(str(value).strip())
    except ValueError:
        return None


@dataclass(frozen=True)
class AttributeDomain:
    """Declared codomain of one attribute column."""

    kind: str
    lo: Optional[float] = None
    hi: Optional[float] = None
    values: Tuple[Any, ...] = ()

    def __post_init__(self):
        if self.kind == INTERVAL:
            if self.lo is None or self.hi is None:
                raise ConfigurationError("interval domain needs both lo and hi")
            if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
                raise ConfigurationError(f"interval domain bounds must be finite, got [{self.lo}, {self.hi}]")
            if not self.lo < self.hi:
                raise ConfigurationError(f"interval domain needs lo < hi, got [{self.lo}, {self.hi}]")
        elif self.kind == FINITE:
            if len(set(self.values)) < 2:
                raise ConfigurationError("finite domain needs at least 2 distinct values")
            if len(set(self.values)) != len(self.values):
                raise ConfigurationError(f"finite domain has duplicate values: {list(self.values)}")
        else:
            raise ConfigurationError(f"Unknown domain kind: {self.kind}")

    @classmethod
    def interval(cls, lo: float, hi: float) -> "AttributeDomain":
        return cls(INTERVAL, lo=float(lo), hi=float(hi))

    @classmethod
    def finite(cls, values) -> "AttributeDomain":
        numeric = [_as_number(v) for v in values]
        if all(v is not None for v in numeric):
            return cls(FINITE, values=tuple(numeric))
        return cls(FINITE, values=tuple(str(v) for v in values))

    @classmethod
    def from_document(cls, doc: dict) -> "AttributeDomain":
        if "interval" in doc:
            lo, hi = doc["interval"]
            return cls.interval(lo, hi)
        if "values" in doc:
            return cls.finite(doc["values"])
        raise ConfigurationError(f"domain must declare 'interval' or 'values', got {sorted(doc)}")

    @property
    def is_numeric(self) -> bool:
        return self.kind == INTERVAL or all(isinstance(v, float) for v in self.values)

    @property
    def bounds(self) -> Tuple[float, float]:
        """Numeric range [lo, hi] of the domain."""
        if self.kind == INTERVAL:
            return self.lo, self.hi
        if not self.is_numeric:
            raise ConfigurationError("labeled finite domain has no numeric range")
        return min(self.values), max(self.values)

    @property
    def width(self) -> float:
        lo, hi = self.bounds
        return hi - lo

    def contains(self, value: Any) -> bool:
        if self.kind == INTERVAL:
            number = _as_number(value)
            return number is not None and self.lo <= number <= self.hi
        if self.is_numeric:
            return _as_number(value) in self.values
        return str(value) in self.values

    def parse(self, raw: Any, attribute: str = "") -> Any:
        """Convert a raw CSV cell to the domain's value type, checking membership."""
        value = _as_number(raw) if self.is_numeric else str(raw).strip()
        if value is None or not self.contains(value):
            raise DatasetError(f"value {raw!r} of attribute '{attribute}' lies outside its domain {self.describe()}")
        return value

    def describe(self) -> str:
        if self.kind == INTERVAL:
            return f"[{self.lo}, {self.hi}]"
        return "{" + ", ".join(str(v) for v in self.values) + "}"

    def to_document(self) -> dict:
        if self.kind == INTERVAL:
            return {"interval": [self.lo, self.hi]}
        return {"values": list(self.values)}
