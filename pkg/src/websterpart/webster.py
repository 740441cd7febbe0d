r"""Single-sequence Webster and Beatty operations.

The Webster sequence of density alpha is ``a(n) = ceil((n - 1/2) / alpha)``:
the n-th element sits at the ideal position n/alpha rounded after a half-step
shift.  Facts used throughout (all classical):

* membership: ``m`` is an element iff ``{m*alpha + 1/2} < alpha``;
* counting:   ``#{elements <= m} = floor(m*alpha + 1/2)``;
* gaps: consecutive elements differ by ``k = floor(1/alpha)`` or ``k + 1``,
  with the branch decided by where ``{m*alpha + 1/2}`` falls relative to
  ``{1/alpha} * alpha = 1 - k*alpha``;
* for irrational alpha, W_alpha and W_(1-alpha) partition the naturals.

All decisions run on exact quadratic expressions; nothing here rounds.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import _sweep
from .errors import DegenerateComparison, InvalidDensity, NotAMember
from .qfield import HALF, QuadExpr, ceil_div, floor_div, parse_quadexpr


@dataclass(frozen=True)
class Density:
    """An irrational density in (0, 1), the parameter of one sequence."""

    value: QuadExpr

    def __post_init__(self):
        v = self.value
        if not isinstance(v, QuadExpr):
            raise InvalidDensity(f"density must be a QuadExpr, got {type(v).__name__}")
        if not v.terms:
            raise InvalidDensity(f"density {v} is rational; an irrational value is required")
        if v.sign() <= 0:
            raise InvalidDensity(f"density {v} is not positive")
        if (QuadExpr(1) - v).sign() <= 0:
            raise InvalidDensity(f"density {v} is not below 1")

    @classmethod
    def parse(cls, text: str) -> "Density":
        return cls(parse_quadexpr(text))

    def complement(self) -> "Density":
        return Density(QuadExpr(1) - self.value)

    def __float__(self) -> float:
        return float(self.value)

    def __str__(self) -> str:
        return str(self.value)


@dataclass(frozen=True)
class DeviationStat:
    """Exact supremum of |count(n) - n*alpha| over a scanned range."""

    sup_abs: QuadExpr
    at_n: int

    def decimal(self, digits: int = 30) -> str:
        return self.sup_abs.decimal(digits)


def _require_index(n: int, minimum: int = 1):
    if not isinstance(n, int) or n < minimum:
        raise ValueError(f"index must be an integer >= {minimum}, got {n!r}")


def webster_term(alpha: Density, n: int) -> int:
    """The n-th element ``ceil((n - 1/2) / alpha)``, computed exactly."""
    _require_index(n)
    return ceil_div(Fraction(2 * n - 1, 2), alpha.value)


def webster_count(alpha: Density, m: int) -> int:
    """Number of elements <= m, i.e. ``floor(m*alpha + 1/2)``."""
    _require_index(m, minimum=0)
    if m == 0:
        return 0
    return (alpha.value * m + HALF).floor()


def frac_shift(alpha: Density, m: int) -> QuadExpr:
    """The fractional state ``{m*alpha + 1/2}`` driving membership decisions."""
    _require_index(m)
    return (alpha.value * m + HALF).frac()


def is_member(alpha: Density, m: int) -> bool:
    """Membership criterion: ``{m*alpha + 1/2} < alpha``."""
    s = (frac_shift(alpha, m) - alpha.value).sign()
    if s == 0:
        raise DegenerateComparison(f"membership tie at m={m}; density cannot be irrational")
    return s < 0


def gap_next(alpha: Density, m: int) -> int:
    """Successor of the member m; the gap is ``floor(1/alpha)`` or one more."""
    if not is_member(alpha, m):
        raise NotAMember(f"{m} is not an element of the sequence with density {alpha.value}")
    k = floor_div(1, alpha.value)
    # {1/alpha} * alpha rewritten divisionlessly as 1 - k*alpha
    threshold = QuadExpr(1) - alpha.value * k
    u = frac_shift(alpha, m)
    s = (u - threshold).sign()
    if s == 0:
        raise DegenerateComparison(f"gap-criterion tie at m={m}")
    return m + k if s > 0 else m + k + 1


def beatty_term(alpha: Density, theta: QuadExpr, n: int) -> int:
    """Non-homogeneous Beatty element ``floor((n + theta) / alpha)``.

    With ``theta = alpha - 1/2`` this coincides with :func:`webster_term`.
    """
    _require_index(n)
    if not isinstance(theta, QuadExpr):
        theta = QuadExpr(theta)
    return floor_div(QuadExpr(n) + theta, alpha.value)


def deviation_sup(alpha: Density, N: int) -> DeviationStat:
    """Exact sup of |count(n) - n*alpha| for n <= N.

    The deviation at n equals ``1/2 - {n*alpha + 1/2}``, so the supremum is
    read off the exact extremes of the fractional state.  It is provably
    below 1/2 and approaches it from below as N grows.
    """
    _require_index(N)
    min_u, min_at, max_u, max_at = _sweep.deviation_scan(alpha.value, N)
    low_dev = HALF - min_u
    high_dev = max_u - HALF
    s = (low_dev - high_dev).sign()
    if s > 0 or (s == 0 and min_at <= max_at):
        return DeviationStat(low_dev, min_at)
    return DeviationStat(high_dev, max_at)


def deviation_within_half(alpha: Density, N: int) -> int | None:
    """First n <= N where |count(n) - n*alpha| >= 1/2, or None (expected)."""
    _require_index(N)
    return _sweep.deviation_in_bound_scan(alpha.value, N)


def two_part_partition_check(alpha: Density, N: int) -> bool:
    """Whether W_alpha and W_(1-alpha) tile 1..N exactly.

    Memberships of the two sequences are evaluated from independently
    advanced exact states, so the check does not assume the complement
    identity it is verifying.
    """
    _require_index(N)
    return _sweep.two_part_scan(alpha.value, N) is None
