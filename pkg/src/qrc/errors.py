"""Exception and warning types shared across the package."""


class QRCError(Exception):
    pass


class ValidationError(QRCError, ValueError):
    """An input violates a documented precondition."""


class NumericalError(QRCError, ArithmeticError):
    """Integration or inference failed numerically."""


class IntegrationError(NumericalError):
    pass


class TruncationError(NumericalError):
    pass


class QRCWarning(UserWarning):
    pass


class TruncationWarning(QRCWarning):
    """Population of the highest retained Fock level exceeds the guard."""


class TraceDriftWarning(QRCWarning):
    pass


class DivergenceWarning(QRCWarning):
    """A free-running forecast left the admissible output range."""
