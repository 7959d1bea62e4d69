"""Exception taxonomy shared by all modules.

Errors split into three families: input problems (user-fixable), precision
problems (caller should escalate or give up), and honest capability limits
(the requested computation falls outside the supported curve classes).
"""


class CurvePeriodsError(Exception):
    """Base class for all package errors."""


# ---------------------------------------------------------------------------
# input problems


class InputError(CurvePeriodsError):
    """Malformed or inconsistent user input."""


class InconsistentInput(InputError):
    pass


class BoundaryMeetsPoles(InputError):
    """A chain endpoint coincides with a residual pole; D and E must be disjoint."""


class DegenerateConfiguration(InputError):
    """Planar site configuration degenerate after snapping; retried internally."""


class UnresolvedEndpoint(InputError):
    """A chain endpoint could not be resolved to a representable place."""


# ---------------------------------------------------------------------------
# precision problems


class PrecisionExhausted(CurvePeriodsError):
    """Certification failed at the maximum working precision."""


class NonSimpleRoot(PrecisionExhausted):
    """Newton contraction failed; root may be multiple or ball too coarse."""


class SingularAtPrecision(PrecisionExhausted):
    """Matrix invertibility could not be certified at the precision cap."""


class PoleOnPath(CurvePeriodsError):
    """A pole enclosure intersects an integration path."""


# ---------------------------------------------------------------------------
# capability limits


class UnsupportedClass(CurvePeriodsError):
    """Operation not implemented for this curve class tag; degrades, never lies."""


class ReducibleMinpoly(InputError):
    """An input minimal polynomial is not irreducible over Q."""


class DivisionByZero(CurvePeriodsError):
    pass


class ExpansionOrderExceeded(CurvePeriodsError):
    """Local series expansion hit its internal order bound; caller escalates."""


class MonodromyUncertified(PrecisionExhausted):
    """Sheet tracking failed at maximum precision."""


class FactorizationTooLarge(CurvePeriodsError):
    """Integer factorization exceeded the configured budget."""
