"""Exception types shared across the package."""


class ThermromError(Exception):
    """Base class for package-specific failures."""


class ContractError(ThermromError):
    """An argument violates a documented precondition."""


class SolverError(ThermromError):
    """Newton iteration failed; carries the residual-norm history."""

    def __init__(self, message, residual_history=None):
        super().__init__(message)
        self.residual_history = list(residual_history or [])


class UnstableConfigurationError(ThermromError):
    """Tangent stiffness is not positive definite where a stable one is required."""


class AlignmentError(ThermromError):
    """Congruence alignment is ill-posed (near-orthogonal subspaces)."""


class BasisRankError(ThermromError):
    """Stacked basis columns are linearly dependent; lists the offending columns."""

    def __init__(self, message, dependent_columns=None):
        super().__init__(message)
        self.dependent_columns = list(dependent_columns or [])


class IntegrationError(ThermromError):
    """Time integration failed (Newton divergence or detected blow-up)."""

    def __init__(self, message, step=None, time=None, residual_history=None):
        super().__init__(message)
        self.step = step
        self.time = time
        self.residual_history = list(residual_history or [])


class ConfigError(ThermromError):
    """Invalid configuration file or option value."""
