"""Exception hierarchy. Every error raised on purpose derives from GammaFactorError."""


class GammaFactorError(Exception):
    pass


class InputError(GammaFactorError, ValueError):
    """Malformed, non-finite or shape-inconsistent input."""


class UnsupportedError(GammaFactorError):
    """The requested route does not apply to these spaces."""


class BudgetError(GammaFactorError):
    """An exhaustive route would exceed its enumeration budget."""


class SearchError(GammaFactorError):
    """A black-box objective returned a non-finite value."""


class CertificateRefused(GammaFactorError):
    """A bound could not be certified (failed precondition or domination check)."""


class InconsistencyError(GammaFactorError):
    """Two certified bounds contradict each other; signals a bug upstream."""
