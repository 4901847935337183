"""
Exception hierarchy shared by the numerical services.
"""


class DiracFrontError(Exception):
    """Base class for all lab errors."""


class ConfigurationError(DiracFrontError):
    """Invalid grid, representation or wrap-around horizon."""


class ArgumentError(DiracFrontError, ValueError):
    """An operation received arguments outside its domain."""


class UndefinedStateError(DiracFrontError):
    """The field has zero norm, so relative masses are undefined."""


class ResolutionError(DiracFrontError):
    """A feature is too small for the lattice to resolve."""


class PreconditionError(DiracFrontError):
    """A construction was requested outside the case it implements."""


class EmptyCutError(DiracFrontError):
    """A slab cut removed the whole field."""


class InsufficientSamplesError(DiracFrontError):
    """Too few trace samples for a tent fit."""


class ApexNotBracketedError(DiracFrontError):
    """The fitted apex sits at the edge of the sampled window."""

    def __init__(self, t_e: float, t_min: float, t_max: float):
        self.t_e = t_e
        self.t_min = t_min
        self.t_max = t_max
        super().__init__(
            f"Tent apex t_e={t_e:.6g} is not bracketed by the window "
            f"[{t_min:.6g}, {t_max:.6g}]; widen the time sampling"
        )


class PoorFitError(DiracFrontError):
    """A tent fit left a residual above the accepted level."""

    def __init__(self, residual: float, limit: float):
        self.residual = residual
        self.limit = limit
        super().__init__(f"Tent fit residual {residual:.6g} exceeds {limit:.6g}; the trace is not a tent")
