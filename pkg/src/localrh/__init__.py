"""Numerical laboratory for the local Riemann hypothesis at the real and p-adic places."""

__version__ = "0.1.0"

from .errors import (ContourError, ConvergenceError, DomainError, LocalRHError,
                     PoleError, ResolutionError, RootMismatchError, SizeError, ZeroInputError)

__all__ = ["ContourError", "ConvergenceError", "DomainError", "LocalRHError", "PoleError",
           "ResolutionError", "RootMismatchError", "SizeError", "ZeroInputError", "__version__"]
