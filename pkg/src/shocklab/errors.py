"""Exception and warning types shared across the package."""


class ShocklabError(Exception):
    """Base class for package-specific failures."""


class ConfigError(ShocklabError):
    """A configuration file or parameter set failed validation."""


class InvalidShockError(ShocklabError):
    """End states violate the compressive 2-shock requirements."""


class NoSolutionError(ShocklabError):
    """A root find has no solution inside its admissible bracket."""


class DegenerateDenominatorError(ShocklabError):
    """A limiting quotient has a vanishing denominator but a
    non-vanishing numerator."""


class NumericalFailureError(ShocklabError):
    """Time integration lost positivity or diverged."""


class DomainTooSmallError(ShocklabError):
    """Shock structure reached the monitored fraction of the truncated
    domain; the far-field boundary data are no longer trustworthy."""


class FitUnavailableError(ShocklabError):
    """A rate fit was requested on data with no usable decaying window."""


class AssumptionViolationError(ShocklabError):
    """Data violate a structural assumption (monotonicity, sign, parity)
    that the surrounding construction depends on."""


class EdgeContaminationWarning(UserWarning):
    """A quantity assumed negligible at a grid edge is not."""


class TruncationWarning(UserWarning):
    """An integration span stopped before reaching its target tolerance."""
