"""Exception hierarchy. Everything raised on bad mathematical input derives
from :class:`SphdynError`, which the CLI turns into exit code 1."""


class SphdynError(Exception):
    """Base class for domain errors."""

    code = "error"


class DegenerateMapError(SphdynError):
    code = "degenerate map"


class DegreeCapError(SphdynError):
    code = "degree cap exceeded"


class CompositionError(SphdynError):
    code = "composition ill-conditioned"


class RootFindingError(SphdynError):
    code = "root solver failure"

    def __init__(self, message, worst_residual=float("nan")):
        super().__init__(message)
        self.worst_residual = worst_residual


class NonFiniteError(SphdynError):
    code = "non-finite value"


class SamplingError(SphdynError):
    code = "sampling failure"


class OrbitTracingError(SphdynError):
    code = "orbit tracing inconsistent"
