from dataclasses import dataclass
from enum import Enum
from typing import Sequence, Tuple

import numpy as np

from heavytail.core.errors import ParameterOutOfRangeError

WEIGHT_SUM_TOL = 1e-12


class TransformKind(str, Enum):
    RATIO_PM = "pm"
    ABS_RATIO = "abs"
    STOPPED_BM = "bm"


@dataclass(frozen=True)
class Weights:
    """Convex-combination coefficients: 0 <= w_j <= 1, sum w_j = 1"""
    values: Tuple[float, ...]

    def __post_init__(self):
        values = tuple(float(value) for value in self.values)
        if not values:
            raise ParameterOutOfRangeError("weights must not be empty")
        if any(not 0.0 <= value <= 1.0 for value in values):
            raise ParameterOutOfRangeError(f"weights must lie in [0, 1], got {values}")
        if abs(sum(values) - 1.0) > WEIGHT_SUM_TOL:
            raise ParameterOutOfRangeError(f"weights must sum to 1, got sum {sum(values)!r}")
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return len(self.values)

    @classmethod
    def of(cls, values: Sequence[float]) -> "Weights":
        return values if isinstance(values, cls) else cls(tuple(values))

    @classmethod
    def parse(cls, text: str) -> "Weights":
        try:
            return cls(tuple(float(part) for part in text.split(",")))
        except ValueError as e:
            if isinstance(e, ParameterOutOfRangeError):
                raise
            raise ParameterOutOfRangeError(f"malformed weights {text!r}")

    def as_array(self) -> np.ndarray:
        return np.array(self.values)
