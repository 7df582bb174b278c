"""Column-oriented dataset model and CSV ingestion."""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Sequence, Tuple

import numpy as np
import pandas as pd

from core.domains import AttributeDomain
from core.errors import DatasetError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Dataset:
    """An n x m table; column i holds attribute i's value for every record.

    The frame is never mutated after construction.
    """

    names: Tuple[str, ...]
    domains: Tuple[AttributeDomain, ...]
    frame: pd.DataFrame

    def __post_init__(self):
        if len(self.names) != len(self.domains):
            raise DatasetError(f"{len(self.names)} attribute names but {len(self.domains)} domains")
        if list(self.frame.columns) != list(self.names):
            raise DatasetError(f"columns {list(self.frame.columns)} do not match attributes {list(self.names)}")
        for name, domain in zip(self.names, self.domains):
            bad = [v for v in self.frame[name] if not domain.contains(v)]
            if bad:
                raise DatasetError(
                    f"attribute '{name}' has {len(bad)} value(s) outside {domain.describe()}, e.g. {bad[0]!r}"
                )

    @classmethod
    def from_columns(cls, columns: Dict[str, Sequence], domains: Dict[str, AttributeDomain]) -> "Dataset":
        lengths = {name: len(col) for name, col in columns.items()}
        if len(set(lengths.values())) > 1:
            raise DatasetError(f"columns have different lengths: {lengths}")
        names = tuple(columns)
        frame = pd.DataFrame({name: list(columns[name]) for name in names})
        return cls(names, tuple(domains[name] for name in names), frame)

    @property
    def n(self) -> int:
        return len(self.frame)

    @property
    def m(self) -> int:
        return len(self.names)

    @property
    def shape(self) -> Tuple[int, Tuple[AttributeDomain, ...]]:
        """(n, domains): everything column sensitivity depends on."""
        return self.n, self.domains

    def index_of(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise DatasetError(f"Unknown attribute: {name}. Available: {list(self.names)}")

    def column(self, index: int) -> pd.Series:
        return self.frame[self.names[index]]

    def numeric_column(self, index: int) -> np.ndarray:
        return self.column(index).to_numpy(dtype=float)

    def entry_names(self) -> List[str]:
        """Names of the individual entries when the table is viewed as one vector.

        A single record exposes its attributes; a single column exposes its records.
        """
        if self.n == 1:
            return list(self.names)
        if self.m == 1:
            return [f"{self.names[0]}[{j}]" for j in range(self.n)]
        raise DatasetError(f"entry view needs n == 1 or m == 1, got an {self.n} x {self.m} table")


def load_dataset(path, attributes: List[Tuple[str, AttributeDomain]]) -> Dataset:
    """Read a CSV whose header matches the declared attribute names."""
    path = Path(path)
    df = pd.read_csv(path, dtype=str, skipinitialspace=True)
    names = [name for name, _ in attributes]
    missing = [n for n in names if n not in df.columns]
    extra = [c for c in df.columns if c not in names]
    if missing or extra:
        raise DatasetError(f"{path.name}: header mismatch, missing {missing}, unexpected {extra}")
    if df.isna().any().any():
        raise DatasetError(f"{path.name}: empty cells are not allowed")

    columns = {}
    for name, domain in attributes:
        columns[name] = [domain.parse(raw, name) for raw in df[name]]
    frame = pd.DataFrame(columns, columns=names)
    logger.info("Loaded dataset %s: n=%d, m=%d", path.name, len(frame), len(names))
    return Dataset(tuple(names), tuple(d for _, d in attributes), frame)
