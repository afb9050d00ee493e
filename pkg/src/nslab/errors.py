"""Exception types shared across the package."""


class NslabError(Exception):
    """Base class for package errors."""


class ConfigurationError(NslabError):
    """Invalid grid/solver/experiment configuration (CLI exit code 2)."""


class InvalidFieldError(NslabError):
    """Field data contains NaN/Inf or has an inconsistent shape."""


class RegionError(NslabError):
    """Norm region extends outside the computational slab."""


class ResolutionError(NslabError):
    """Operator parameters unresolvable on the given grid (e.g. kernel width)."""


class PreconditionError(NslabError):
    """Operator input violates a documented precondition."""


class DegenerateInputError(NslabError):
    """Quantity undefined for this input (zero denominator, empty region)."""
