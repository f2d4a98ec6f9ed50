"""Exception types shared across the package."""


class GapSurveyError(Exception):
    """Base class for all package-specific errors."""


class CoercivityError(GapSurveyError):
    """Coefficient is non-positive somewhere it is required to be positive."""


class UnboundedCoefficientError(GapSurveyError):
    """Operation needs finite coefficient bounds but the model has none."""


class BracketError(GapSurveyError):
    """Search interval does not contain the requested eigenvalues."""

    def __init__(self, message, count_lo=None, count_hi=None):
        super().__init__(message)
        self.count_lo = count_lo
        self.count_hi = count_hi


class ConvergenceError(GapSurveyError):
    """Iteration failed to reach its tolerance within the step budget."""


class ClusterError(GapSurveyError):
    """Inverse iteration stagnated, which indicates a tight eigenvalue cluster."""


class SampleFailedError(GapSurveyError):
    """A survey realisation could not be solved under the strict policy."""

    def __init__(self, index, reason):
        super().__init__(f"sample {index} failed: {reason}")
        self.index = index
        self.reason = reason


class InvariantViolation(GapSurveyError):
    """A per-sample spectral bracket check failed; indicates a solver bug."""


class FitError(GapSurveyError):
    """Not enough usable data points for a power-law fit."""


class ConfigError(GapSurveyError):
    """Invalid configuration; ``field`` holds the dotted path of the bad entry."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
