"""Exception hierarchy for the geonresp package."""


class GeonRespError(Exception):
    """Base class for all package errors."""


class DomainError(GeonRespError, ValueError):
    """Argument outside the physical domain (e.g. r <= horizon)."""


class ConvergenceError(GeonRespError):
    """A series or iteration failed to reach the requested tolerance."""


class PrecisionError(GeonRespError):
    """An asymptotic expansion cannot reach the requested tolerance here."""


class IntegrationError(GeonRespError):
    """ODE integration failed (step underflow or non-finite state)."""


class UnitarityError(GeonRespError):
    """Scattering coefficients violate flux conservation beyond tolerance."""


class TableError(GeonRespError):
    """Mode-table build, lookup, or persistence failure."""


class TableRangeError(TableError):
    """Requested (l, omega) outside the cached grid; no extrapolation."""


class QuadratureError(GeonRespError):
    """Quadrature failed to meet its tolerance or oscillation budget."""


class PVWindowError(QuadratureError):
    """Principal-value singularity too close to an integration endpoint."""
