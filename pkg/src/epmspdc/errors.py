"""Exception types shared across the package."""


class EpmError(Exception):
    """Base class for physics and numerical failures (CLI exit code 1)."""


class WavelengthRangeError(EpmError, ValueError):
    pass


class SingularityError(EpmError, ArithmeticError):
    pass


class InfeasibleError(EpmError):
    """No positive grating period can cancel the material mismatch."""


class BracketError(EpmError):
    """Search interval does not bracket a sign change."""


class DegenerateError(EpmError):
    pass


class ResolutionError(EpmError):
    """Frequency grid too coarse for the narrowest spectral feature."""


class NumericError(EpmError):
    pass


class FitError(EpmError):
    def __init__(self, message, last_params=None, residual=None):
        super().__init__(message)
        self.last_params = last_params
        self.residual = residual


class ConfigError(Exception):
    """Malformed or missing configuration (CLI exit code 2)."""
