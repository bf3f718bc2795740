"""Exception hierarchy shared by every dzlab module."""


class DZLabError(Exception):
    """Base class for all dzlab errors."""


class FieldError(DZLabError, ValueError):
    pass


class NotSquarefree(FieldError):
    pass


class DisallowedValue(FieldError):
    pass


class NotMonic(FieldError):
    pass


class Reducible(FieldError):
    pass


class Undecided(FieldError):
    """Irreducibility could neither be proved nor refuted cheaply."""


class CapabilityError(DZLabError):
    """The field presentation cannot answer the question asked of it."""


class IndexDivisor(CapabilityError):
    def __init__(self, p: int):
        super().__init__(
            f"p={p} divides the index [O_K : Z[theta]]; splitting at {p} cannot be "
            "read off the defining polynomial (exclude it explicitly or use another field)"
        )
        self.p = p


class Overflow(DZLabError, ArithmeticError):
    pass


class OutOfRange(DZLabError, ValueError):
    pass


class DomainError(DZLabError, ValueError):
    pass


class PoleAt1(DomainError):
    pass


class PoleProximity(DomainError):
    pass


class DivisionNearZero(DZLabError, ArithmeticError):
    pass


class TableTooSmall(DZLabError, ValueError):
    def __init__(self, required: int, available: int):
        super().__init__(f"table bound X={available} too small; need X >= {required}")
        self.required = required
        self.available = available


class InsufficientData(DZLabError, ValueError):
    pass


class TailTooLarge(DZLabError, ValueError):
    pass


class ConfigError(DZLabError, ValueError):
    pass


class CacheError(DZLabError):
    pass


class CacheVersionError(CacheError):
    pass
