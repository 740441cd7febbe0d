r"""Fair production schedules from rational demands via near-by irrational densities.

Given demands (d1, d2, d3) over a horizon N = d1 + d2 + d3, the rational
rates d_i/N are nudged by tiny radical perturbations into an admissible
irrational triple, the constant-time assignment then labels every slot, and
the resulting schedule inherits the partition's fairness: each running count
stays within 1 + 1/(2N) of its ideal n*d_i/N, and the totals at the horizon
equal the demands exactly.

The perturbation budget is 1/(4*N^2) per coordinate, small enough that the
quota property of the perturbed densities degrades by under 1/(2N) against
the rational targets: |count - n*d_i/N| <= |count - n*delta_i| + n*|delta_i -
d_i/N| < 1 + N * 1/(2N^2).  The beta-coordinate perturbation is kept below
half the alpha-coordinate's so the sign of gamma's net perturbation is
controlled when breaking ties between equal demands.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations

from . import _sweep
from .errors import InfeasibleDemands, InternalInvariantViolation, InvalidDensity, InvalidTriple
from .partition import DensityTriple
from .qfield import QuadExpr

_PRODUCT_LABELS = ("A", "B", "C")

_SIGN_ORDER = ((-1, 1), (1, -1), (-1, -1), (1, 1))


@dataclass(frozen=True)
class DemandSpec:
    """Positive unit-time demands for three products."""

    d1: int
    d2: int
    d3: int

    def __post_init__(self):
        for d in (self.d1, self.d2, self.d3):
            if not isinstance(d, int) or d < 1:
                raise InfeasibleDemands(f"demands must be positive integers, got {self!r}")

    @property
    def demands(self) -> tuple[int, int, int]:
        return (self.d1, self.d2, self.d3)

    @property
    def horizon(self) -> int:
        return self.d1 + self.d2 + self.d3


@dataclass(frozen=True)
class Schedule:
    """A complete slot assignment with its fairness certificate."""

    demands: tuple[int, int, int]
    slots: tuple[str, ...]
    totals: tuple[int, int, int]
    fairness: Fraction
    triple: DensityTriple
    role_to_product: tuple[int, int, int]


def _perturbations(N: int) -> tuple[Fraction, Fraction]:
    # smallest M1 with sqrt(2)/M1 < 1/(4N^2), then M2 with sqrt(3)/M2 below
    # half of the first perturbation
    m1 = math.isqrt(32 * N**4) + 1
    m2 = math.isqrt(6 * m1 * m1) + 1
    return Fraction(1, m1), Fraction(1, m2)


def _plan(spec: DemandSpec) -> tuple[DensityTriple, tuple[int, int, int]]:
    """Choose a role permutation and perturbation signs; first valid wins."""
    N = spec.horizon
    demands = spec.demands
    e1, e2 = _perturbations(N)
    for perm in permutations((0, 1, 2)):
        t_alpha = Fraction(demands[perm[0]], N)
        t_beta = Fraction(demands[perm[1]], N)
        for s1, s2 in _SIGN_ORDER:
            alpha = QuadExpr(t_alpha) + QuadExpr.sqrt(2, s1 * e1)
            beta = QuadExpr(t_beta) + QuadExpr.sqrt(3, s2 * e2)
            try:
                return DensityTriple.from_alpha_beta(alpha, beta), perm
            except (InvalidDensity, InvalidTriple):
                continue
    raise InfeasibleDemands(
        f"no role assignment of {demands} admits an admissible triple"
    )


def irrationalize(spec: DemandSpec) -> DensityTriple:
    """An admissible irrational triple within 1/(2N^2) of the demand rates."""
    return _plan(spec)[0]


def build_schedule(spec: DemandSpec) -> Schedule:
    """Assign every slot of the horizon and certify fairness exactly."""
    triple, perm = _plan(spec)
    N = spec.horizon
    demands = spec.demands
    labels = _sweep.labels_upto(triple.context(), N)
    # role r (0=alpha,1=beta,2=gamma) produces product perm[r]
    slots = []
    counts = [0, 0, 0]
    fairness = Fraction(0)
    targets = [Fraction(d, N) for d in demands]
    for n in range(1, N + 1):
        product = perm[labels[n] - 1]
        counts[product] += 1
        slots.append(_PRODUCT_LABELS[product])
        for i in range(3):
            dev = abs(Fraction(counts[i]) - targets[i] * n)
            if dev > fairness:
                fairness = dev
    totals = tuple(counts)
    if totals != demands:
        raise InternalInvariantViolation(
            f"schedule totals {totals} differ from demands {demands}"
        )
    if fairness > 1 + Fraction(1, 2 * N):
        raise InternalInvariantViolation(
            f"fairness bound violated: {fairness} > 1 + 1/(2N)"
        )
    return Schedule(
        demands=demands,
        slots=tuple(slots),
        totals=totals,
        fairness=fairness,
        triple=triple,
        role_to_product=perm,
    )
