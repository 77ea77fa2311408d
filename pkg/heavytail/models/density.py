from dataclasses import dataclass
from typing import Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from heavytail.core.config import settings
from heavytail.models.transforms import WEIGHT_SUM_TOL, TransformKind


class QuadratureConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    abs_tol: float = Field(default=1e-10, gt=0)
    rel_tol: float = Field(default=1e-8, gt=0)
    max_subdivisions: int = Field(default=2000, ge=1)

    @classmethod
    def from_settings(cls) -> "QuadratureConfig":
        return cls(
            abs_tol=settings.QUAD_ABS_TOL,
            rel_tol=settings.QUAD_REL_TOL,
            max_subdivisions=settings.QUAD_MAX_SUBDIVISIONS,
        )


@dataclass(frozen=True)
class IntegralResult:
    value: float
    error_estimate: float
    subdivisions_used: int

    def __float__(self) -> float:
        return self.value

    def __add__(self, other: "IntegralResult") -> "IntegralResult":
        return IntegralResult(
            self.value + other.value,
            self.error_estimate + other.error_estimate,
            self.subdivisions_used + other.subdivisions_used,
        )

    def scaled(self, factor: float) -> "IntegralResult":
        return IntegralResult(factor * self.value, abs(factor) * self.error_estimate, self.subdivisions_used)


class DensityModel(BaseModel):
    """Which two-coordinate density family to evaluate"""
    model_config = ConfigDict(frozen=True)

    kind: TransformKind
    theta: float
    w: Tuple[float, float]

    @field_validator("kind")
    @classmethod
    def kind_has_density(cls, kind: TransformKind) -> TransformKind:
        if kind == TransformKind.RATIO_PM:
            raise ValueError("the ratio transform is exactly standard Cauchy; it has no quadrature model")
        return kind

    @field_validator("theta")
    @classmethod
    def theta_in_range(cls, theta: float) -> float:
        if not -1.0 < theta < 1.0:
            raise ValueError(f"theta must lie in (-1, 1), got {theta}")
        return theta

    @model_validator(mode="after")
    def weights_are_convex(self) -> "DensityModel":
        if any(not 0.0 <= value <= 1.0 for value in self.w):
            raise ValueError(f"weights must lie in [0, 1], got {self.w}")
        if abs(sum(self.w) - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError(f"weights must sum to 1, got {self.w}")
        return self

    @property
    def w1(self) -> float:
        return self.w[0]

    @property
    def w2(self) -> float:
        return self.w[1]

    def with_theta(self, theta: float) -> "DensityModel":
        return DensityModel(kind=self.kind, theta=theta, w=self.w)


class CauchyVerdict(BaseModel):
    model: DensityModel
    gv0: float
    gv0_minus_inv_pi: float
    tail_value_at_v: Tuple[float, float]
    normalization: float
    normalization_ok: bool
    is_cauchy: bool
    decision_tol: float
