"""Exception types shared across the toolkit."""


class IbmagError(Exception):
    """Base class for all toolkit errors."""


class DomainError(IbmagError):
    """Evaluation requested outside a curve's or operation's valid domain."""


class FitError(IbmagError):
    """Curve fitting failed to converge or produced invalid parameters."""


class ShapeError(IbmagError):
    """Curve shape violates a construction requirement (convex decreasing)."""


class CatalogError(IbmagError):
    """No feasible design exists for the given spring catalog."""


class ConfigError(IbmagError):
    """Simulation configuration is internally inconsistent."""


class ModeError(IbmagError):
    """Requested evaluation mode is missing a required parameter."""


class EmptyProfile(IbmagError):
    """Operation requires a non-empty profile."""
