"""Exception types shared across the package."""

from __future__ import annotations


class HermiteWaveletError(Exception):
    """Base class for package errors."""


class DomainError(HermiteWaveletError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class AdmissibilityError(DomainError):
    """Hurst vector violates ``h_l in (1/2, 1)`` and ``sum(h) > d - 1/2``."""


class ResolutionError(HermiteWaveletError, ValueError):
    """Table grid cannot resolve the frequency support (Nyquist violation)."""


class BudgetError(HermiteWaveletError, RuntimeError):
    """A truncation or index-count budget was exceeded."""


class SizeError(BudgetError):
    """Enumeration route requested for a dimension above its cap."""


class QuadratureError(BudgetError):
    """Quadrature did not reach the requested accuracy."""


class InsufficientLevelsError(DomainError):
    """A regression was requested on too few levels or points."""
