"""Quasi-exactly solvable spectra for the Eckart, Hultén, Rosen-Morse,
perturbed-Coulomb and quartic oscillator potentials, with numerical
checks of the closed-form formulas."""

__version__ = "0.1.0"

from .errors import (  # noqa: F401
    DegenerateGrid,
    DomainError,
    ExactlySolvableRegime,
    NotAnEigenvalue,
    NumericalFailure,
    QesError,
    RejectedInput,
)
from .params import FamilyParams, make_params  # noqa: F401
