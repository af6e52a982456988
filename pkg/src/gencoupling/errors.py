"""Exception types shared across the package."""


class GenCouplingError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(GenCouplingError, ValueError):
    """An argument lies outside the domain of the operation."""


class EmptySpectrumError(DomainError):
    pass


class DimensionError(DomainError):
    pass


class TransportSizeError(DomainError):
    """Measure exceeds the exact-solver size cap; subsample first."""


class NonInvertibleError(GenCouplingError):
    pass


class RangeConditionError(GenCouplingError):
    """Noise directions do not span the low-mode subspace P_N H."""


class InfeasibleError(GenCouplingError):
    """No admissible certificate exists for the given constants."""


class InconsistentRunError(GenCouplingError):
    pass


class BlowUpError(GenCouplingError):
    """A trajectory left the finite range; carries the time of detection."""

    def __init__(self, time, norm, message=None):
        self.time = float(time)
        self.norm = float(norm)
        super().__init__(message or f"blow-up at t={self.time:.6g} (norm {self.norm:.3g})")


class ConfigError(GenCouplingError):
    """Configuration failed to parse or validate; ``errors`` lists every problem."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))
