"""Typed errors raised across the library.

Two families matter for the CLI exit-code contract: ``DataFormatError``
subclasses signal malformed files (exit code 2), ``NumericalError``
subclasses signal failures of numerical preconditions or guarantees
(exit code 3). Everything else is ordinary ``ValueError`` usage.
"""


class NumericalError(ValueError):
    """A numerical precondition or guarantee does not hold."""


class NonFiniteError(NumericalError):
    """Input contains NaN or infinite entries."""


class NonSymmetricError(NumericalError):
    """A matrix expected to be symmetric is not, beyond tolerance."""


class AllZeroVarianceError(NumericalError):
    """The eigenvalue spectrum sums to zero; there is no variance to capture."""


class NotPositiveSemidefiniteError(NumericalError):
    """A kernel Gram matrix has a significantly negative eigenvalue."""


class DimensionMismatchError(ValueError):
    """Operands have incompatible shapes or lengths."""


class BadSpecError(ValueError):
    """A dataset specification is internally inconsistent."""


class DataFormatError(ValueError):
    """Base class for on-disk format violations."""


class EmptyFileError(DataFormatError):
    """A file or file set holds no usable data."""


class RaggedRowsError(DataFormatError):
    """CSV rows do not all have the same number of cells."""


class NonNumericCellError(DataFormatError):
    """A CSV cell outside the header could not be parsed as a number."""


class MixedDimensionsError(DataFormatError):
    """Images in a sequence do not share one width and height."""


class BadMagicNumberError(DataFormatError):
    """A file does not start with a supported magic number."""


class SchemaVersionMismatchError(DataFormatError):
    """A model file was written with an unknown format version."""


class CorruptFieldError(DataFormatError):
    """A model file field is missing or has the wrong type or shape."""
