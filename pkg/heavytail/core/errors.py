"""
Exception hierarchy shared by every heavytail service.

Each class carries the process exit code the command-line surface uses when
the error escapes a subcommand:
- 1 usage / parameter errors
- 2 numerical failures
- 3 verification failures
"""

from typing import List, Optional

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2
EXIT_VERIFICATION = 3


class HeavyTailError(Exception):
    """Base exception for heavytail errors"""
    exit_code = EXIT_USAGE


class ParameterOutOfRangeError(HeavyTailError, ValueError):
    """A parameter lies outside its admissible domain"""
    exit_code = EXIT_USAGE


class DimensionMismatchError(HeavyTailError, ValueError):
    """Vector and matrix dimensions disagree"""
    exit_code = EXIT_USAGE


class NotPositiveDefiniteError(HeavyTailError):
    """Cholesky factorization met a non-positive pivot"""
    exit_code = EXIT_NUMERICAL


class QuadratureNonconvergenceError(HeavyTailError):
    """Adaptive quadrature exhausted its subdivisions before meeting tolerance"""
    exit_code = EXIT_NUMERICAL

    def __init__(self, message: str, value: float = float("nan"), error_estimate: float = float("nan")):
        super().__init__(message)
        self.value = value
        self.error_estimate = error_estimate


class EmptySampleError(HeavyTailError, ValueError):
    """An empirical computation received no observations"""
    exit_code = EXIT_USAGE


class VerificationFailedError(HeavyTailError):
    """One or more acceptance criteria failed"""
    exit_code = EXIT_VERIFICATION

    def __init__(self, message: str, failures: Optional[List[dict]] = None):
        super().__init__(message)
        self.failures = failures or []


class UsageError(HeavyTailError):
    """Malformed command-line input"""
    exit_code = EXIT_USAGE
