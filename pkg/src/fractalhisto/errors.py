"""Exception hierarchy.

Every error carries an ``exit_status`` so the CLI can map failures onto its
stable status contract (1 validation, 2 non-convergence, 3 I/O).
"""


class FractalHistoError(Exception):
    exit_status = 1


class ValidationError(FractalHistoError, ValueError):
    """Invalid input data or configuration."""


class ArityError(ValidationError):
    pass


class AdmissibilityError(ValidationError):
    """Scaling factors violate the contraction bound for the chosen mode."""

    def __init__(self, message, delta_max=None, beta=None, bound=None):
        super().__init__(message)
        self.delta_max = delta_max
        self.beta = beta
        self.bound = bound


class ConfigurationError(ValidationError):
    pass


class DomainError(ValidationError):
    pass


class PoleProximityError(ValidationError):
    """A reciprocal contraction was evaluated within 1e-9 of its pole."""

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class ResourceError(FractalHistoError):
    pass


class NonConvergenceError(FractalHistoError, RuntimeError):
    """Iteration budget exhausted before the tolerance was met.

    ``trace`` holds whatever progress record the failing solver keeps, and
    ``last`` the final iterate.
    """

    exit_status = 2

    def __init__(self, message, trace=None, last=None, residual=None):
        super().__init__(message)
        self.trace = trace
        self.last = last
        self.residual = residual
