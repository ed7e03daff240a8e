"""Exception hierarchy shared by all polystab modules."""


class PolystabError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(PolystabError, ValueError):
    """An input violates a documented invariant."""


class DimensionError(ValidationError):
    """Operand shapes are incompatible."""


class NumericalError(PolystabError, ArithmeticError):
    """A numerical procedure could not produce a trustworthy value."""


class SpectralPointError(NumericalError):
    """``lambda*I - m`` is singular to working precision."""

    def __init__(self, point, message=None):
        self.point = complex(point)
        super().__init__(message or f"spectral point: {self.point} is (numerically) in the spectrum")


class LoopOperatorError(NumericalError):
    """One is in the spectrum of the loop operator, so ``lambda`` may lie in the spectrum."""

    def __init__(self, point, rcond):
        self.point = complex(point)
        self.rcond = float(rcond)
        super().__init__(
            f"one in spectrum of loop operator at lambda={self.point} (rcond={self.rcond:.3e})"
        )


class InsufficientSamplesError(ValidationError):
    """Too few finite samples inside the fitting window."""


class NonConvergentTailError(NumericalError):
    """The truncated line integral never met its tail criterion."""


class QuadratureError(NumericalError):
    """Quadrature refinement did not stabilise."""
