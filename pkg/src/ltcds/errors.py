"""Exception types shared across the package."""


class ParameterError(ValueError):
    """A caller-supplied parameter is out of its valid range."""


class SimulationError(RuntimeError):
    """A simulation could not run to completion (disconnected graph, round cap hit)."""
