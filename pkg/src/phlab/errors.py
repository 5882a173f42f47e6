"""Exception types and the divergence marker shared across modules."""

from __future__ import annotations


class DivergentIntegral(ArithmeticError):
    """A Gaussian integral has no decay along the real line."""


class ZeroScale(ValueError):
    """Argument scaling by zero was requested."""


class DivergentSpectralTail(ArithmeticError):
    """Partial sums of a spectral expansion grow instead of settling."""


class NumericalInconsistency(ArithmeticError):
    """A quantity that must be real and nonnegative came out otherwise."""


class WrongFamily(ValueError):
    """Time evolution was requested for a state outside the phi family."""


class InvalidParameter(ValueError):
    """Model parameters outside their admissible range."""


class _Divergent:
    """Singleton marking a quantity whose defining integral diverges."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "DIVERGENT"

    def __str__(self):
        return "divergent"

    def __bool__(self):
        return False

    def __reduce__(self):
        return (_Divergent, ())


DIVERGENT = _Divergent()

DIVERGENCE_ERRORS = (DivergentIntegral, DivergentSpectralTail)


def is_divergent(value) -> bool:
    return value is DIVERGENT
