"""Exception types raised across the package."""

from __future__ import annotations


class NilconeError(Exception):
    """Base class for every error raised by nilcone."""


class NonPrime(NilconeError, ValueError):
    pass


class SizeLimitExceeded(NilconeError, ValueError):
    pass


class DivisionByZero(NilconeError, ZeroDivisionError):
    pass


class FieldMismatch(NilconeError, TypeError):
    pass


class NotASubspace(NilconeError, ValueError):
    pass


class OddDimension(NilconeError, ValueError):
    pass


class WrongKind(NilconeError, ValueError):
    pass


class NotSGood(NilconeError, ValueError):
    pass


class NotCompatible(NilconeError, ValueError):
    pass


class NotNilpotent(NilconeError, ValueError):
    pass


class NotAlternating(NilconeError, ValueError):
    pass


class ZeroSpace(NilconeError, ValueError):
    pass


class ExtensionCapExceeded(NilconeError, RuntimeError):
    pass


class ConstructionInapplicable(NilconeError, ValueError):
    """None of the constructive witness recipes applies to the input."""


class PreconditionError(NilconeError, ValueError):
    pass


class BudgetExceeded(NilconeError, RuntimeError):
    pass


class NonIntegralRatio(NilconeError, ArithmeticError):
    pass


class InsufficientPoints(NilconeError, ValueError):
    pass
