"""Exception hierarchy shared across the package.

Exit-code mapping used by the CLI: ConfigError -> 2,
NumericalError -> 3, ContainerError -> 4.
"""


class QlsfiError(Exception):
    """Base class for all package errors."""


class ConfigError(QlsfiError):
    """Invalid configuration or parameters."""


class InvalidParameterError(ConfigError):
    """A scalar parameter violates its precondition."""


class DegenerateSqueezingError(ConfigError):
    """r = 0 requested where a squeezed-vacuum drive is required."""


class NumericalError(QlsfiError):
    """Numerical convergence or stability failure."""


class BandTooSmallError(NumericalError):
    """Fock band cannot hold the state to the requested truncation mass."""

    def __init__(self, message, required_n_max=None):
        super().__init__(message)
        self.required_n_max = required_n_max


class QuadratureInsufficientError(NumericalError):
    """Alpha-plane quadrature failed its resolution-of-identity check."""

    def __init__(self, message, worst_pair=None, worst_error=None):
        super().__init__(message)
        self.worst_pair = worst_pair
        self.worst_error = worst_error


class BandOverflowError(NumericalError):
    """Fock-edge occupation exceeded the configured threshold."""

    def __init__(self, message, suggested_n_max=None):
        super().__init__(message)
        self.suggested_n_max = suggested_n_max


class NumericalBlowupError(NumericalError):
    """NaN or Inf detected during propagation."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class EigenSolverError(NumericalError):
    """Ground-state iteration failed to converge."""


class EnsembleError(NumericalError):
    """One or more ensemble nodes failed."""

    def __init__(self, message, failed_nodes=()):
        super().__init__(message)
        self.failed_nodes = list(failed_nodes)


class CoherentSumIncompleteError(QlsfiError):
    """A coherent (R-representation) sum was requested on a partial run."""


class ContainerError(QlsfiError):
    """Result-container format or IO failure."""


class ComparisonError(QlsfiError):
    """Shape or metadata mismatch between compared containers."""
