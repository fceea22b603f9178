"""Typed errors raised by the verification lab."""


class AvglabError(Exception):
    """Base class for all library errors."""


class DegenerateConfig(AvglabError):
    """Point configuration makes the requested ratio undefined (zero denominator)."""


class ZeroModulus(AvglabError):
    """A point sits at the origin where the separation radius blows up."""


class RootFindingFailure(AvglabError):
    """Companion-matrix roots did not meet the residual tolerance."""


class IterationLimit(AvglabError):
    """An iterative rebuild exceeded its iteration budget."""


class TargetUnreachable(AvglabError):
    """Index elimination never reached the requested count; carries the trajectory."""

    def __init__(self, message: str, trajectory: list | None = None):
        super().__init__(message)
        self.trajectory = trajectory or []


class MembershipViolation(AvglabError):
    """A point failed the region membership required by a precondition."""


class HypothesisViolated(AvglabError):
    """A sampled pointwise lower bound fell below its declared level."""


class BadExponents(AvglabError):
    """An exponent tuple fails the structural constraints."""


class EmptySet(AvglabError):
    """An operation requires a set of positive volume."""


class PlacementFailure(AvglabError):
    """Bump placement could not certify pairwise disjointness."""


class ZeroFunction(AvglabError):
    """Normalization of the zero function requested."""


class ConfigError(AvglabError):
    """Experiment configuration failed validation."""
