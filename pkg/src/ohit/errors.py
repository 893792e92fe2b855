"""Exception hierarchy shared by every module in the package."""


class OhitError(Exception):
    """Base class for all errors raised by this package."""


class DataFormatError(OhitError, ValueError):
    """A series file is malformed (ragged rows, non-numeric values, ...)."""


class EmptyInputError(DataFormatError):
    """A series file or matrix holds no samples."""


class DegenerateSplitError(OhitError, ValueError):
    """Binarization left one side of the split empty."""


class InsufficientDataError(OhitError, ValueError):
    """Too few samples for the requested estimate."""


class NumericalDegeneracyError(OhitError, ArithmeticError):
    """A matrix could not be made factorizable."""


class ContractViolation(OhitError, ValueError):
    """Inputs break a documented precondition."""


class DegenerateEvaluationError(OhitError, ValueError):
    """A metric is undefined because a class is missing from the test set."""


class ParameterClampWarning(UserWarning):
    """A parameter was silently clamped into its valid range."""
