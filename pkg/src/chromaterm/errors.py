"""Exception types shared across the package."""


class ChromatermError(Exception):
    """Base class for all chromaterm errors."""


class DataError(ChromatermError, ValueError):
    """Malformed input data: bad files, bad layouts, inconsistent term sets."""


class NumericsError(ChromatermError, RuntimeError):
    """A numerical routine produced an unusable result (non-finite values)."""
