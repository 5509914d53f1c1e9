"""Error taxonomy shared by the library and the CLI.

Exit-code mapping used by the CLI:
  2  configuration errors (bad config file, unknown keys, invalid values)
  3  precondition violations (domain errors, method restrictions)
  4  precision / coverage failures (tolerance unreachable, mass lost)
"""

from __future__ import annotations


class MfuncError(Exception):
    """Base class; carries the CLI exit code and a machine-readable kind."""

    exit_code = 1
    kind = "error"


class ConfigError(MfuncError):
    exit_code = 2
    kind = "config"


class PreconditionError(MfuncError):
    exit_code = 3
    kind = "precondition"


class DomainError(PreconditionError):
    """Input outside the mathematical domain of an operation."""

    kind = "domain"


class MethodError(PreconditionError):
    """Requested method is not applicable to the given inputs."""

    kind = "method"


class RamanujanViolationError(DomainError):
    """An eigenvalue outside [-2, 2] where the unitary bound is required."""

    kind = "ramanujan-violation"


class PoleError(DomainError):
    """Evaluation requested at a pole."""

    kind = "pole"


class PrecisionError(MfuncError):
    exit_code = 4
    kind = "precision"


class CoverageError(MfuncError):
    """Mass falls outside a grid, or decay too weak for the grid to capture."""

    exit_code = 4
    kind = "coverage"


class InversionQualityError(MfuncError):
    """Negative mass produced by inversion exceeds the documented threshold."""

    exit_code = 4
    kind = "inversion-quality"


class DataCoverageError(MfuncError):
    """Tabulated data (eigenvalues) missing for a requested range."""

    exit_code = 4
    kind = "data-coverage"


class RangeError(MfuncError):
    """Requested size exceeds the exact-arithmetic capacity of an algorithm."""

    exit_code = 3
    kind = "range"
