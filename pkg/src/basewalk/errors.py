"""Exception hierarchy shared by every basewalk module."""


class BasewalkError(Exception):
    """Base class for all library errors."""


class InvalidInputError(BasewalkError, ValueError):
    """Malformed input: bad element index, wrong shape, bad parameter."""


class InfeasibleError(BasewalkError):
    """No feasible solution exists (e.g. the alive set does not span)."""


class InvalidSolutionError(BasewalkError, ValueError):
    """A solution violates the base/spanning structure it claims."""


class ResourceLimitError(BasewalkError):
    """An enumeration or brute-force search exceeded its configured cap."""


class ProtocolError(BasewalkError):
    """An online callback broke the interaction protocol."""


class ConfigError(BasewalkError, ValueError):
    """Experiment configuration is invalid."""


class InvariantViolation(BasewalkError, AssertionError):
    """An internal invariant failed; indicates a bug, never bad input."""
