"""Shared exception types.

Numerical failures raise subclasses of NumericalError so that the
command line layer can map any of them to exit status 1 together with
the originating module's diagnostic message.
"""


class NumericalError(Exception):
    """Base class for numerical failures that should abort a run."""


class LengthCollisionError(NumericalError):
    """Bond lengths could not be made pairwise distinct."""


class PoleMergeError(NumericalError):
    """Two tangent poles from different bonds are numerically inseparable."""


class BracketError(NumericalError):
    """A root bracket lost its sign change (pole grid corruption)."""


class NonFiniteIntegrandError(NumericalError):
    """An integrand evaluated to a non-finite value at a quadrature node."""


class NonMonotoneCDFError(NumericalError):
    """A callable passed as a CDF failed the monotonicity probe."""


class GuardViolationError(NumericalError):
    """Too many inputs fell inside a pole guard band."""
