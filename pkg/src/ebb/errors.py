"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""


class DomainError(ValueError):
    """Input outside the mathematical domain of an operation."""


class ResonanceError(RuntimeError):
    """Energy is numerically a Dirichlet eigenvalue of the decoupled sample."""


class NumericalFailure(RuntimeError):
    """A solve or invariant check failed beyond recoverable tolerance."""


class UnitarityError(NumericalFailure):
    """Scattering data violates unitarity beyond rounding; upstream fault."""
