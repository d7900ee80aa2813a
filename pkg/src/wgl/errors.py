"""Exception and warning types shared across the package."""


class WglError(Exception):
    """Base class for all package errors."""


class DimensionError(WglError, ValueError):
    pass


class NyquistViolation(WglError, ValueError):
    pass


class ShapeMismatch(WglError, ValueError):
    pass


class ZeroData(WglError, ValueError):
    pass


class GridTooCoarse(WglError, ValueError):
    pass


class InsufficientRange(WglError, ValueError):
    pass


class InsufficientSweep(WglError, ValueError):
    pass


class DegenerateDesign(WglError, ValueError):
    pass


class ParameterOutOfRange(WglError, ValueError):
    pass


class RegimeError(WglError, ValueError):
    pass


class DomainError(WglError, ValueError):
    pass


class BlowupGuard(WglError, RuntimeError):
    pass


class SchemaError(WglError, ValueError):
    pass


class WrapAroundWarning(UserWarning):
    """Mass close to the edge of a periodized Euclidean box."""


class LocalizationWarning(UserWarning):
    """Field is not spectrally localized where a norm assumes it is."""


class BudgetExceeded(UserWarning):
    """An optimizer stopped on its iteration or probe budget."""
