"""Exception hierarchy.

Validation problems (bad indices, bad sizes, bad parameters) derive from
``ValueError``; numerical breakdowns derive from ``ArithmeticError``. The CLI
maps the first family to exit code 2 and the second to exit code 3.
"""


class DiskIRError(Exception):
    """Base class for all package errors."""


class ValidationError(DiskIRError, ValueError):
    pass


class NumericalError(DiskIRError, ArithmeticError):
    pass


class ZernikeIndexError(ValidationError):
    """(m, l) violates |l| <= m or the parity condition."""


class CardinalityError(ValidationError):
    """A node set has the wrong number of points."""


class ConstructionError(NumericalError):
    """A node construction produced radii outside (0, 1] or out of order."""


class SingularityError(NumericalError):
    """A matrix is singular to working precision."""


class AdmissibilityError(NumericalError):
    """Design or constraint matrix is rank deficient.

    For the design matrix, raise the number of samples or lower the
    regression degree.
    """


class StateError(DiskIRError, RuntimeError):
    """Requested quantity depends on data that has not been computed."""
