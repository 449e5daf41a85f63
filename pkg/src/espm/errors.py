"""Exception types shared across the package."""


class EspmError(Exception):
    """Base class for all package errors."""


class ConfigError(EspmError):
    """A config or OCP file is missing, unreadable or structurally invalid."""


class ParameterError(ConfigError):
    """A parameter violates a physical invariant; names the offending field."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class DatasetError(EspmError):
    """An experimental dataset file is missing or malformed."""


class SimulationError(EspmError):
    """A simulation step failed; carries time and capacity context."""

    def __init__(self, message, t=None, capacity_ah=None):
        self.t = t
        self.capacity_ah = capacity_ah
        if t is not None:
            message = f"{message} (t={t:.6g} s, capacity={capacity_ah:.6g} Ah)"
        super().__init__(message)


class SaturationError(SimulationError):
    """A particle surface concentration left (0, c_s_max)."""


class PorosityError(SimulationError):
    """A porosity update left the open interval (0, 1)."""


class OptimizationError(EspmError):
    """The swarm search failed to produce any feasible evaluation."""
