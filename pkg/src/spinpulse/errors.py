"""Exception hierarchy.

Validation problems (bad configs, bad inputs) map to CLI exit code 1,
numerical failures to exit code 2.
"""


class SpinPulseError(Exception):
    """Base class for all package errors."""


class ValidationError(SpinPulseError, ValueError):
    """Input does not satisfy an operation's preconditions."""


class ConfigError(ValidationError):
    """Malformed or inconsistent configuration."""


class DimensionError(ValidationError):
    """Qubit count outside the supported range, or mismatched dimensions."""


class NormalizationError(ValidationError):
    """State vector is not normalized."""


class ContractError(ValidationError):
    """Operator violates a structural contract (e.g. not Hermitian)."""


class NumericalError(SpinPulseError, ArithmeticError):
    """A numerical routine failed or produced out-of-tolerance results."""


class SolverError(NumericalError):
    """Eigensolver did not converge."""


class StepSizeError(NumericalError):
    """Time integrator drifted too far from unit norm; use more steps."""
