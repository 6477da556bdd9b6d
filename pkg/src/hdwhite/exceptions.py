"""Exception types raised by hdwhite."""


class HDWhiteError(Exception):
    """Base class for all package errors."""


class InvalidDimensionError(HDWhiteError, ValueError):
    pass


class NotPSDError(HDWhiteError, ValueError):
    pass


class ConfigError(HDWhiteError, ValueError):
    """Invalid test or experiment configuration (odd order, bad alpha, ...)."""


class InsufficientSampleError(HDWhiteError, ValueError):
    """The sample is too short for the requested lag cap and order (T < aq + a)."""


class DegenerateVarianceError(HDWhiteError, ArithmeticError):
    """The variance estimate is not strictly positive."""


class OracleTooLargeError(HDWhiteError, ValueError):
    """Brute-force enumeration was asked to visit too many tuples."""


class NonStationaryError(HDWhiteError, ValueError):
    pass


class ZeroVarianceSeriesError(HDWhiteError, ValueError):
    def __init__(self, index: int):
        self.index = index
        super().__init__(f"series {index} has zero sample variance")


class SeriesFileError(HDWhiteError, ValueError):
    """Malformed series CSV. ``row`` and ``column`` are 1-based file positions."""

    def __init__(self, message: str, row: int | None = None, column: int | None = None):
        self.row = row
        self.column = column
        loc = []
        if row is not None:
            loc.append(f"row {row}")
        if column is not None:
            loc.append(f"column {column}")
        if loc:
            message = f"{message} ({', '.join(loc)})"
        super().__init__(message)
