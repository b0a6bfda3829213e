"""Exception types shared across the package."""

from __future__ import annotations


class InputError(ValueError):
    """Malformed or shape-inconsistent input (CLI exit code 2)."""


class PreconditionError(InputError):
    """Input is well-formed but violates an operation's precondition."""


class UnsupportedShapeError(InputError):
    """A horn index outside the family an operation is defined for."""


class CheckFailed(Exception):
    """A mathematical check came out false where a value was required (exit 1)."""


class NoFillerError(CheckFailed):
    """The horn filling system is inconsistent."""


class ConstructionError(CheckFailed):
    """A recursive construction hit a step whose hypothesis does not hold."""
