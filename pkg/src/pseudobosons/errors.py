"""Exception hierarchy shared by all modules."""


class PbxError(Exception):
    """Base class for every error raised by the package."""


class DimensionError(PbxError, ValueError):
    """Invalid truncation dimension, window, or mismatched operands."""


class ParameterError(PbxError, ValueError):
    """Model parameter outside its admissible range."""


class UnsupportedRegimeError(ParameterError):
    """Parameters are valid reals but the model is not defined for them here."""


class NumericalError(PbxError, ArithmeticError):
    """A numerical procedure failed to deliver a trustworthy result."""


class ExpOverflowError(NumericalError, OverflowError):
    """The squaring phase of the matrix exponential overflowed."""


class NoVacuumError(NumericalError):
    """No normalizable vector is annihilated by the operator at this truncation."""


class IllConditionedError(NumericalError):
    """The intertwiner is numerically singular on the trust window."""


class QuadratureError(NumericalError):
    """Gauss-Hermite quadrature did not converge within the node cap."""


class BiorthogonalityError(NumericalError):
    """Families are not biorthogonal enough to build S-operators from them."""


class BranchWarning(UserWarning):
    """A square-root radicand sits on the principal-branch cut."""
