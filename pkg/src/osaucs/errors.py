"""Exception types for the OSA-UCS conversion library.

The hierarchy separates *input* problems (``DegenerateInput``) from
*numerical* problems encountered while solving (``NumericalFailure`` and its
subclasses).  Batch operations never raise per-element errors; they report
failed indices instead.
"""

from __future__ import annotations

__all__ = [
    "DegenerateInput",
    "NumericalFailure",
    "SingularityHit",
    "ConvergenceFailure",
]


class DegenerateInput(ValueError):
    """Input outside the domain of an operation.

    Raised for non-finite components, a non-positive tristimulus sum
    (chromaticity undefined), or values that would zero a denominator in the
    conversion pipeline.
    """


class NumericalFailure(ArithmeticError):
    """A numerical postcondition was violated while solving.

    Signals internal inconsistency (for example a non-positive cubic
    discriminant, which cannot occur for valid constants) rather than a bad
    user input.
    """


class SingularityHit(NumericalFailure):
    """An evaluation landed on the pole of the inverse residual function.

    The residual function of the inverse transform has a pole where the
    tentative tristimulus sum crosses zero; evaluating at (or numerically on
    top of) that point is reported with this error.
    """


class ConvergenceFailure(NumericalFailure):
    """The iterative solver exhausted its budget without converging.

    Carries the diagnostic ``trace`` (an ``InverseTrace`` for the inverse
    transform) describing the state at the point of failure.
    """

    def __init__(self, message: str, trace=None):
        super().__init__(message)
        self.trace = trace
