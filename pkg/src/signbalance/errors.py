from __future__ import annotations


class SignBalanceError(Exception):
    """Base class for every error raised by signbalance."""


class NotPrimeError(SignBalanceError, ValueError):
    pass


class ReducibleModulusError(SignBalanceError, ValueError):
    pass


class SpecMismatchError(SignBalanceError, ValueError):
    pass


class FieldDivisionError(SignBalanceError, ZeroDivisionError):
    pass


class OutOfRangeError(SignBalanceError, ValueError):
    pass


class ShapeMismatchError(SignBalanceError, ValueError):
    pass


class SingularMatrixError(SignBalanceError, ArithmeticError):
    pass


class WrongFieldError(SignBalanceError, ValueError):
    pass


class NotSymplecticError(SignBalanceError, ValueError):
    pass


class SymmetryViolationError(SignBalanceError, RuntimeError):
    pass


class ClosureMismatchError(SignBalanceError, RuntimeError):
    pass


class NotRootUniformError(SignBalanceError, ValueError):
    pass


class NotCanonicalError(SignBalanceError, ValueError):
    pass


class NegativeExponentError(SignBalanceError, RuntimeError):
    pass


class NotSupportedError(SignBalanceError, ValueError):
    pass


class InvalidPermutationError(SignBalanceError, ValueError):
    pass


class CacheFormatError(SignBalanceError, ValueError):
    pass


class VerificationMismatchError(SignBalanceError, RuntimeError):
    """Two computation paths disagreed on a value that must be exact."""
