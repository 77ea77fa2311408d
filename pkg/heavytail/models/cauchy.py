from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from heavytail.core.errors import DimensionMismatchError, ParameterOutOfRangeError

UNIT_TOL = 1e-12


@dataclass(frozen=True)
class CauchyScale:
    sigma: float = 1.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ParameterOutOfRangeError(f"Cauchy scale must be positive, got {self.sigma}")


@dataclass(frozen=True, eq=False)
class SpectralMeasure:
    """
    Finite symmetric atomic measure on the unit sphere.

    Row k of `directions` is s_k; `masses[k]` is the total mass of the pair
    {+s_k, -s_k}, so the characteristic exponent is sum_k masses[k] * |<theta, s_k>|.
    """
    directions: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        directions = np.atleast_2d(np.array(self.directions, dtype=float))
        masses = np.atleast_1d(np.array(self.masses, dtype=float))

        if masses.ndim != 1 or directions.shape[0] != masses.shape[0]:
            raise DimensionMismatchError(
                f"{directions.shape[0]} directions but {masses.shape[0]} masses"
            )
        if np.any(masses <= 0):
            raise ParameterOutOfRangeError("spectral masses must be positive")

        norms = np.linalg.norm(directions, axis=1)
        if np.any(np.abs(norms - 1.0) > UNIT_TOL):
            raise ParameterOutOfRangeError("spectral directions must be unit vectors")

        for i in range(len(directions)):
            for j in range(i + 1, len(directions)):
                if min(np.max(np.abs(directions[i] - directions[j])),
                       np.max(np.abs(directions[i] + directions[j]))) <= UNIT_TOL:
                    raise ParameterOutOfRangeError(f"atoms {i} and {j} coincide up to sign")

        directions.setflags(write=False)
        masses.setflags(write=False)
        object.__setattr__(self, "directions", directions)
        object.__setattr__(self, "masses", masses)

    @property
    def dim(self) -> int:
        return self.directions.shape[1]

    @classmethod
    def from_vectors(cls, vectors: Sequence[Sequence[float]], masses: Sequence[float]) -> "SpectralMeasure":
        """Build from arbitrary nonzero vectors, normalizing each onto the sphere"""
        vectors = np.atleast_2d(np.array(vectors, dtype=float))
        return cls(vectors / np.linalg.norm(vectors, axis=1, keepdims=True), masses)

    @classmethod
    def axes(cls, dim: int, mass: float = 1.0) -> "SpectralMeasure":
        """Atoms at the axis points: coordinates are independent Cauchy"""
        return cls(np.eye(dim), np.full(dim, mass))

    @classmethod
    def diagonal(cls, dim: int, mass: Optional[float] = None) -> "SpectralMeasure":
        """Single atom at (1, ..., 1)/sqrt(n): all coordinates equal almost surely"""
        mass = np.sqrt(dim) if mass is None else mass
        return cls(np.full((1, dim), 1.0 / np.sqrt(dim)), [mass])

    def marginal_scales(self) -> np.ndarray:
        return self.masses @ np.abs(self.directions)
