"""Exception types shared across the package.

The CLI maps these onto exit codes: invalid input -> 2, accuracy -> 3,
degenerate algebra -> 4.
"""

from __future__ import annotations


class GBesselError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class InvalidInputError(GBesselError, ValueError):
    exit_code = 2


class UnsupportedOrderError(InvalidInputError):
    """Requested moment order has no closed form here."""


class DomainError(InvalidInputError):
    """Arguments lie outside the region where a formula is valid."""


class AccuracyError(GBesselError, ArithmeticError):
    """Iterative refinement failed to converge.

    ``iterates`` holds the last two values produced before giving up.
    """

    exit_code = 3

    def __init__(self, message, iterates=()):
        super().__init__(message)
        self.iterates = tuple(iterates)


class DegenerateSystemError(GBesselError, ArithmeticError):
    """An elimination step produced an identically zero resultant."""

    exit_code = 4


class DecayRegimeError(GBesselError):
    """No stationary points: the integral is in its decaying regime."""

    exit_code = 3


class NearCriticalError(GBesselError):
    """A stationary point has (nearly) vanishing second derivative."""

    exit_code = 3
