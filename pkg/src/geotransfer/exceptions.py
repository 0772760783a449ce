"""Exception hierarchy.

Errors fall into three families that the command line maps to exit codes:
configuration/usage (2), data (3) and numerical (4).
"""


class GeoTransferError(Exception):
    """Base class for every error raised by this package."""


# -- usage / configuration --------------------------------------------------

class ConfigInvalid(GeoTransferError, ValueError):
    pass


class DimensionMismatch(GeoTransferError, ValueError):
    pass


class NotSymmetric(GeoTransferError, ValueError):
    pass


class WeightOutOfRange(GeoTransferError, ValueError):
    pass


class UnsortedLambdas(GeoTransferError, ValueError):
    pass


class NonpositiveLambda(GeoTransferError, ValueError):
    pass


class EmptySources(GeoTransferError, ValueError):
    pass


class InvalidRho(GeoTransferError, ValueError):
    pass


class InsufficientData(GeoTransferError, ValueError):
    pass


# -- data ---------------------------------------------------------------------

class DataError(GeoTransferError):
    pass


class SchemaMismatch(DataError, ValueError):
    def __init__(self, column, message=None):
        self.column = column
        super().__init__(message or f"feature column mismatch: {column!r}")


class NonNumericValue(DataError, ValueError):
    def __init__(self, row, column, value=None):
        self.row = row
        self.column = column
        self.value = value
        super().__init__(f"non-numeric value {value!r} at row {row}, column {column!r}")

    @property
    def location(self):
        return self.row, self.column


# -- numerical ----------------------------------------------------------------

class NumericalError(GeoTransferError, ArithmeticError):
    pass


class NotPositiveDefinite(NumericalError):
    pass


class SingularDesign(NumericalError):
    def __init__(self, message="Gram matrix is not positive-definite", fold=None):
        self.fold = fold
        if fold is not None:
            message = f"{message} (training fold {fold})"
        super().__init__(message)


class NonConvergence(NumericalError):
    def __init__(self, message, kkt_residual=None):
        self.kkt_residual = kkt_residual
        super().__init__(message)


class DegenerateFit(NumericalError):
    pass
