"""Exception hierarchy.

Every error raised on purpose by the library derives from :class:`DressageError`,
so callers (the CLI in particular) can catch one class.
"""


class DressageError(Exception):
    pass


class DimensionError(DressageError, ValueError):
    pass


class CapacityError(DressageError, ValueError):
    pass


class DirectionError(DressageError, IndexError):
    pass


class SiteError(DressageError, IndexError):
    pass


class LatticeMismatchError(DressageError, ValueError):
    pass


class NonNeutralSourceError(DressageError, ValueError):
    pass


class CouplingMismatchError(DressageError, ValueError):
    pass


class EmptyPathError(DressageError, ValueError):
    pass


class ConstraintViolationError(DressageError, ValueError):
    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual


class NormalizationError(DressageError, ValueError):
    def __init__(self, message, deviation):
        super().__init__(message)
        self.deviation = deviation


class DivergenceMismatchError(DressageError, ValueError):
    pass


class SiteCollisionError(DressageError, ValueError):
    pass


class ArityError(DressageError, ValueError):
    pass


class BinError(DressageError, ValueError):
    pass


class ConfigError(DressageError, ValueError):
    pass


class FieldFormatError(DressageError, ValueError):
    pass
