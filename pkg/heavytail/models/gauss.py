from dataclasses import dataclass, field
from typing import Any, Dict

import numpy as np

from heavytail.core.errors import DimensionMismatchError, ParameterOutOfRangeError

SYMMETRY_TOL = 1e-12


@dataclass(frozen=True)
class ThetaCovariance:
    """2x2 covariance whose inverse is [[1, theta], [theta, 1]]"""
    theta: float

    def __post_init__(self):
        if not -1.0 < self.theta < 1.0:
            raise ParameterOutOfRangeError(f"theta must lie in (-1, 1), got {self.theta}")

    @property
    def determinant(self) -> float:
        return 1.0 - self.theta ** 2

    @property
    def inverse(self) -> np.ndarray:
        return np.array([[1.0, self.theta], [self.theta, 1.0]])

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[1.0, -self.theta], [-self.theta, 1.0]]) / self.determinant


@dataclass(frozen=True, eq=False)
class CovarianceMatrix:
    entries: np.ndarray

    def __post_init__(self):
        entries = np.array(self.entries, dtype=float)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1] or entries.shape[0] == 0:
            raise DimensionMismatchError(f"covariance must be a non-empty square matrix, got shape {entries.shape}")

        asymmetry = np.max(np.abs(entries - entries.T))
        if asymmetry > SYMMETRY_TOL * max(1.0, np.max(np.abs(entries))):
            raise ParameterOutOfRangeError(f"covariance is not symmetric (max asymmetry {asymmetry:.3e})")
        entries = 0.5 * (entries + entries.T)

        if np.any(np.diag(entries) <= 0):
            raise ParameterOutOfRangeError("covariance must have positive variances")

        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def from_text(cls, text: str) -> "CovarianceMatrix":
        """Parse whitespace-separated rows, one matrix row per line"""
        rows = [line.split() for line in text.splitlines() if line.strip() and not line.lstrip().startswith("#")]
        try:
            return cls(np.array([[float(value) for value in row] for row in rows]))
        except ValueError as e:
            if isinstance(e, (DimensionMismatchError, ParameterOutOfRangeError)):
                raise
            raise ParameterOutOfRangeError(f"malformed covariance matrix: {e}")


@dataclass(frozen=True, eq=False)
class CholeskyFactor:
    """Lower-triangular L with L @ L.T equal to the source covariance"""
    entries: np.ndarray
    degenerate: bool = False

    def __post_init__(self):
        entries = np.array(self.entries, dtype=float)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise DimensionMismatchError(f"factor must be square, got shape {entries.shape}")
        if np.any(np.triu(entries, k=1) != 0):
            raise ParameterOutOfRangeError("factor must be lower-triangular")
        if not self.degenerate and np.any(np.diag(entries) <= 0):
            raise ParameterOutOfRangeError("factor must have a strictly positive diagonal")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def covariance(self) -> np.ndarray:
        return self.entries @ self.entries.T


@dataclass(eq=False)
class SampleBatch:
    values: np.ndarray
    seed: int
    meta: Dict[str, Any] = field(default_factory=dict)

    def __len__(self) -> int:
        return self.values.shape[0]
