"""Exception hierarchy for the analysis toolkit."""


class SicplError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(SicplError):
    """Input data violates a type invariant."""


class ParseError(SicplError):
    """Malformed input file; message names the offending line."""


class DomainError(SicplError):
    """Argument outside the mathematical domain of an operation."""


class EvaluationError(SicplError):
    """Model returned NaN/inf during fitting."""


class DegenerateFitError(SicplError):
    """Normal matrix is singular; message names the unidentifiable direction."""


class InsufficientBaselineError(SicplError):
    """Too few pre-pulse bins to estimate the background."""


class InsufficientDataError(SicplError):
    """Not enough usable points for the requested analysis."""


class LineNotFoundError(SicplError):
    """No emission line found inside a search window."""


class ModelInconsistencyError(SicplError):
    """Fitted model leaves systematically negative residuals."""


class ConfigurationError(SicplError):
    """Required derived quantity could not be resolved from the parameters."""


class AggregationError(SicplError):
    """Conflicting entries while bundling reports."""


class NoDataError(SicplError):
    """Empty channel or result list."""
