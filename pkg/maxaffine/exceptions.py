"""
Exception hierarchy for the maxaffine package.
Every error raised on purpose by the library derives from MaxAffineError.
"""


class MaxAffineError(Exception):
    """Base class for all library errors"""
    pass


class InvalidInputError(MaxAffineError, ValueError):
    """Input with the wrong shape, non-finite entries or out-of-range values"""
    pass


class GeometryUndefinedError(MaxAffineError):
    """Separation and conditioning are undefined for a single affine piece"""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class DegenerateParametersError(MaxAffineError):
    """Two pieces share the same slope, so the minimum separation is zero"""
    pass


class DegenerateInputError(MaxAffineError):
    """Input parameters that make a scale-invariant quantity undefined"""
    pass


class UnsupportedSizeError(MaxAffineError):
    """Problem too large for an exhaustive routine"""
    pass


class InsufficientSamplesError(MaxAffineError):
    """Monte-Carlo estimate built from too few retained samples"""
    pass


class BudgetExceededError(MaxAffineError):
    """Sample-size search ran past its budget"""
    pass


class ConfigValidationError(MaxAffineError):
    """Custom exception for experiment configuration errors"""
    pass
