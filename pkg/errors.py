"""
Exception hierarchy shared by the library modules and the command runner.
"""

from typing import Optional


class RelmatchError(Exception):
    """Root of every error raised on purpose by this package."""


class ContractError(RelmatchError, ValueError):
    """A precondition of an operation was violated by its caller."""


class DegenerateInputError(ContractError):
    """Input is all zeros where a nonzero matrix is required."""


class BasisError(ContractError):
    """A basis or transform that must be orthogonal is not."""


class DensityError(ContractError):
    """Matrix fails the density invariants (PSD, unit trace)."""


class ConfigError(RelmatchError, ValueError):
    """Bad configuration value, unknown key or unreadable config file."""


class SpecError(ConfigError):
    """Synthetic dataset description that cannot be generated."""


class NumericalError(RelmatchError, ArithmeticError):
    """Numerical failure inside a matrix function or the training loop."""


class ConvergenceError(NumericalError):
    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (off-diagonal residual {residual:.3e})")
        self.residual = residual


class PositiveDefinitenessError(NumericalError):
    def __init__(self, eigenvalue: float, threshold: float):
        super().__init__(
            f"matrix is not positive definite: eigenvalue {eigenvalue:.6e} <= {threshold:.1e}"
        )
        self.eigenvalue = eigenvalue
        self.threshold = threshold


class DomainError(NumericalError):
    """Argument outside the domain of a logarithm."""


class TrainingDivergedError(NumericalError):
    def __init__(self, step: int, detail: Optional[str] = None):
        message = f"training diverged at step {step}"
        if detail:
            message += f": {detail}"
        super().__init__(message)
        self.step = step
