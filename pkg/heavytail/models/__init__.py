from .gauss import ThetaCovariance, CovarianceMatrix, CholeskyFactor, SampleBatch
from .cauchy import CauchyScale, SpectralMeasure
from .transforms import TransformKind, Weights
from .density import QuadratureConfig, IntegralResult, DensityModel, CauchyVerdict
from .stats import EmpiricalSample, KSResult, HistogramDensity
from .manifest import RunManifest

__all__ = [
    "ThetaCovariance", "CovarianceMatrix", "CholeskyFactor", "SampleBatch",
    "CauchyScale", "SpectralMeasure",
    "TransformKind", "Weights",
    "QuadratureConfig", "IntegralResult", "DensityModel", "CauchyVerdict",
    "EmpiricalSample", "KSResult", "HistogramDensity",
    "RunManifest",
]
