"""Exception hierarchy shared across the package."""


class HbtSimError(Exception):
    """Base class for all package-specific errors."""


class InvalidParameterError(HbtSimError, ValueError):
    """A model parameter violates its documented range."""


class CapacityError(HbtSimError, ValueError):
    """Requested stream length exceeds the configured maximum."""


class DegenerateDenominatorError(HbtSimError, ZeroDivisionError):
    """The closed-form expectation has a zero denominator."""


class WindowTooLargeError(HbtSimError, ValueError):
    """The correlation window does not fit inside the stream."""


class EmptySidebandError(HbtSimError, ValueError):
    """All sideband coincidence counts are zero; the estimator is undefined."""
