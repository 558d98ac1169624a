"""Exception types raised by the numerical routines."""


class LocalRHError(Exception):
    """Base class for all errors raised by this package."""


class PoleError(LocalRHError, ZeroDivisionError):
    """Argument sits on (or numerically at) a pole."""


class DomainError(LocalRHError, ValueError):
    """Argument outside the region where a representation converges."""


class ConvergenceError(LocalRHError, RuntimeError):
    """An adaptive procedure ran out of budget before reaching its tolerance."""


class ResolutionError(LocalRHError, ValueError):
    """Grid too coarse: more than one sign change inside one cell."""


class ContourError(LocalRHError, RuntimeError):
    """Contour passes too close to a zero or pole to track the argument."""


class ZeroInputError(LocalRHError, ValueError):
    """Valuation of zero requested."""


class SizeError(LocalRHError, MemoryError):
    """Coset table would exceed the configured size bound."""


class RootMismatchError(LocalRHError, ArithmeticError):
    """Two independent root finders disagree."""
