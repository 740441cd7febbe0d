"""Exception types shared across the package."""


class WebsterPartError(Exception):
    """Base class for all package-specific errors."""


class RadicandOverflow(WebsterPartError):
    """An arithmetic result would need more than two distinct radicands."""


class InternalPrecisionExceeded(WebsterPartError):
    """Interval refinement hit the hard 4096-bit cap.

    Unreachable for well-formed inputs: every strict comparison the library
    performs is between provably distinct exact values, so refinement always
    terminates long before the cap.  Raising instead of looping documents the
    safety boundary.
    """


class QuadExprParseError(WebsterPartError, ValueError):
    """A quadratic-expression literal failed to parse."""

    def __init__(self, reason: str, offset: int):
        super().__init__(f"{reason} (at offset {offset})")
        self.reason = reason
        self.offset = offset


class DegenerateComparison(WebsterPartError):
    """Two exact values compared equal where strict inequality is guaranteed.

    The partition logic only compares quantities that are provably unequal
    (e.g. fractional states against irrational thresholds), so equality here
    signals an arithmetic bug, not a tie to break.
    """


class InvalidDensity(WebsterPartError, ValueError):
    """A density is outside (0, 1) or is rational."""


class InvalidTriple(WebsterPartError, ValueError):
    """A density triple violates one of the admissibility clauses."""


class NotAMember(WebsterPartError, ValueError):
    """A sequence operation was applied to a non-member index."""


class InternalInvariantViolation(WebsterPartError):
    """A case analysis that must be exhaustive failed to fire exactly once."""


class HypothesisViolated(WebsterPartError, ValueError):
    """Preconditions of an optimality-witness search do not hold."""


class ConfigInvalid(WebsterPartError, ValueError):
    """A special-pair configuration violates its defining constraints."""


class InfeasibleDemands(WebsterPartError, ValueError):
    """No role assignment of the demands admits a valid density triple."""


class IndependenceUnverifiable(WebsterPartError, ValueError):
    """1, alpha, beta are not linearly independent over the rationals."""
