"""Exception hierarchy shared by the library and the CLI.

The CLI maps ``RejectedInput`` to exit code 1 and ``NumericalFailure`` to
exit code 2; everything else propagates.
"""


class QesError(Exception):
    """Base class for all library errors."""


class RejectedInput(QesError, ValueError):
    """Invalid arguments: bad parameters, mode mismatch, malformed files."""


class DomainError(RejectedInput):
    """A point outside a family's natural domain or at a singularity."""


class ExactlySolvableRegime(RejectedInput):
    """q = 0 with j > 0: the recurrence degenerates, use ``families.exact_case``."""


class NumericalFailure(QesError, ArithmeticError):
    """Overflow, non-convergence, or a degenerate numerical configuration."""

    def __init__(self, message, module=None):
        super().__init__(message)
        self.module = module

    def __str__(self):
        msg = super().__str__()
        return f"[{self.module}] {msg}" if self.module else msg


class NotAnEigenvalue(NumericalFailure):
    """The ODE coefficient system has no polynomial solution at this value."""


class DegenerateGrid(NumericalFailure):
    """Too few usable grid points, or a wavefunction that underflows."""
