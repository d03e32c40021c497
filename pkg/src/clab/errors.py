"""Exception hierarchy.

Negative mathematical results (not a coboundary, not of type k, ...) are
raised as exceptions carrying a witness, so callers that only want a yes/no
answer can use the ``is_*`` helpers in :mod:`clab.cocycle` instead.
"""


class ClabError(Exception):
    """Base class for every error raised by the package."""


class InvalidInput(ClabError, ValueError):
    """Malformed group, system, table or parameter."""


class DimensionMismatch(InvalidInput):
    pass


class SizeGuardError(ClabError):
    """An enumeration would exceed the configured cap."""


class PreconditionError(ClabError, ValueError):
    pass


class InternalConsistencyError(ClabError, AssertionError):
    """Two independent routes to the same quantity disagreed."""


class ConsistencyError(ClabError):
    """A cocycle table violates an order or commutation relation."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness or {}


class NegativeResult(ClabError):
    """Base for 'no solution exists' outcomes; ``witness`` explains why."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness or {}


class NotCoboundary(NegativeResult):
    pass


class NotQuasiCoboundary(NegativeResult):
    pass


class NotTypeK(NegativeResult):
    pass


class NotCL(NegativeResult):
    pass


class NotCLSystem(NegativeResult):
    pass


class NotTransitive(NegativeResult):
    pass


class CertificateError(ClabError):
    pass


class StructuralError(ClabError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness or {}


class NoGap(ClabError):
    """The averaged operator has no isolated top eigenvalue."""


class InvalidAction(InvalidInput):
    pass
