from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from heavytail.core.errors import EmptySampleError


@dataclass(frozen=True, eq=False)
class EmpiricalSample:
    sorted_values: np.ndarray

    @classmethod
    def from_values(cls, values) -> "EmpiricalSample":
        values = np.sort(np.asarray(values, dtype=float).ravel())
        if values.size == 0:
            raise EmptySampleError("empirical sample needs at least one observation")
        return cls(values)

    @property
    def count(self) -> int:
        return self.sorted_values.size


@dataclass(frozen=True)
class KSResult:
    statistic: float
    critical_value: float
    alpha: float

    @property
    def passes(self) -> bool:
        return bool(self.statistic < self.critical_value)


@dataclass(frozen=True, eq=False)
class HistogramDensity:
    centers: np.ndarray
    density: np.ndarray
    standard_error: np.ndarray
    bin_width: float

    def rows(self) -> List[Tuple[float, float, float]]:
        return list(zip(self.centers.tolist(), self.density.tolist(), self.standard_error.tolist()))
