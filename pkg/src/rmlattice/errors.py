"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: bad input files give 1, violated
hypotheses give 2, and internal invariant breaches give 3.
"""

from __future__ import annotations


class LatticeModelError(Exception):
    """Base class for all errors raised by this package."""


class PreconditionError(LatticeModelError):
    """A documented hypothesis of an operation does not hold for the input."""


class InvariantBreach(LatticeModelError):
    """An internal identity that should hold for every valid input failed.

    This signals a bug or a corrupted instance, never a user mistake, so
    callers must abort rather than continue.
    """


class DescentError(LatticeModelError):
    """A polarization does not descend or divide along the requested isogeny."""
