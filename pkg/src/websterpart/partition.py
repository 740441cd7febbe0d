r"""Three-part partition of the naturals with one exact and two almost-Webster sequences.

Given irrational densities alpha + beta + gamma = 1 with beta < 1/2 and
alpha < gamma, two equivalent constant-time constructions produce a partition
into sequences of those densities:

* the term-side construction emits the n-th element of each sequence: the
  alpha sequence is the exact Webster sequence, the beta sequence perturbs
  b(n) by at most 1 according to the fractional state at m = b(n), and the
  gamma sequence is the complement;
* the assignment-side construction labels each integer n as A, B, or C from
  the pair (u_n, v_n) = ({n*alpha + 1/2}, {n*beta + 1/2}) alone.

Everything is decided by exact comparisons.  Strict inequalities cannot tie
for valid triples (a tie would force a density to be rational), so an
equality observed at runtime raises :class:`DegenerateComparison` rather
than being tie-broken: it can only mean an arithmetic bug.

Per-index costs are O(1): term formulas are bracketed exact ceilings, and the
complement's n-th element is found by testing the three candidates around the
ideal gamma term and confirming rank through the counting identities.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Literal

from . import _sweep
from .errors import (
    DegenerateComparison,
    InternalInvariantViolation,
    InvalidTriple,
)
from .qfield import HALF, QuadExpr
from .webster import Density, webster_count, webster_term

Label = Literal["A", "B", "C"]

_LABELS = {1: "A", 2: "B", 3: "C"}


@dataclass(frozen=True)
class DensityTriple:
    """Validated densities (alpha, beta, gamma) admitting the partition."""

    alpha: Density
    beta: Density
    gamma: Density

    def __post_init__(self):
        a = self.alpha.value
        b = self.beta.value
        g = self.gamma.value
        if not (a + b + g - 1).is_zero():
            raise InvalidTriple("alpha + beta + gamma = 1 fails (exact identity required)")
        if (b - HALF).sign() >= 0:
            raise InvalidTriple("beta < 1/2 fails")
        if (g - a).sign() <= 0:
            raise InvalidTriple("alpha < gamma fails")
        for name, ok in self.derived_checks().items():
            if not ok:
                raise InternalInvariantViolation(f"derived inequality '{name}' fails")

    @classmethod
    def from_alpha_beta(cls, alpha: QuadExpr | Density, beta: QuadExpr | Density) -> "DensityTriple":
        """Build the triple with gamma derived as 1 - alpha - beta."""
        a = alpha if isinstance(alpha, Density) else Density(alpha)
        b = beta if isinstance(beta, Density) else Density(beta)
        g = Density(QuadExpr(1) - a.value - b.value)
        return cls(a, b, g)

    def derived_checks(self) -> dict[str, bool]:
        """Inequalities implied by the defining clauses, kept on record."""
        a = self.alpha.value
        b = self.beta.value
        g = self.gamma.value
        return {
            "alpha < 1/2": (a - HALF).sign() < 0,
            "gamma > 1/4": (g - Fraction(1, 4)).sign() > 0,
            "alpha + beta/2 < 1/2": (a + b / 2 - HALF).sign() < 0,
            "gamma + beta/2 > 1/2": (g + b / 2 - HALF).sign() > 0,
        }

    def context(self) -> _sweep.TripleContext:
        return _sweep.context_for(self.alpha.value, self.beta.value)

    def __str__(self) -> str:
        return f"alpha={self.alpha}, beta={self.beta}, gamma={self.gamma}"


@dataclass(frozen=True)
class FractionalState:
    """Exact fractional states (u, v, w) = ({n*alpha+1/2}, {n*beta+1/2}, {n*gamma+1/2})."""

    n: int
    u: QuadExpr
    v: QuadExpr
    w: QuadExpr


@dataclass(frozen=True)
class Assignment:
    """The label of one integer together with the rule that fired."""

    n: int
    label: Label
    rule: str


@dataclass(frozen=True)
class ErrorRecord:
    """Counting errors at index n and term perturbations at rank n."""

    n: int
    e_beta: int
    e_gamma: int
    b_perturb: int
    c_perturb: int


def _require_index(n: int, minimum: int = 1):
    if not isinstance(n, int) or n < minimum:
        raise ValueError(f"index must be an integer >= {minimum}, got {n!r}")


def _strict_lt(x: QuadExpr, y: QuadExpr, what: str) -> bool:
    s = (x - y).sign()
    if s == 0:
        raise DegenerateComparison(f"exact tie in '{what}'")
    return s < 0


def frac_state(t: DensityTriple, n: int) -> FractionalState:
    _require_index(n)
    u = (t.alpha.value * n + HALF).frac()
    v = (t.beta.value * n + HALF).frac()
    w = (t.gamma.value * n + HALF).frac()
    return FractionalState(n, u, v, w)


def assign(t: DensityTriple, n: int) -> Assignment:
    """Label n by the assignment-side rules on (u_n, v_n)."""
    st = frac_state(t, n)
    a = t.alpha.value
    b = t.beta.value
    u, v = st.u, st.v
    if _strict_lt(u, a, "u vs alpha"):
        return Assignment(n, "A", "A-rule")
    if _strict_lt(v, b, "v vs beta"):
        return Assignment(n, "B", "B-rule-I")
    if not _strict_lt(u, QuadExpr(1) - a, "u vs 1-alpha") and not _strict_lt(
        v, QuadExpr(1) - b / 2, "v vs 1-beta/2"
    ):
        return Assignment(n, "B", "B-rule-II")
    if _strict_lt(u, a * 2, "u vs 2*alpha") and _strict_lt(
        v, b * Fraction(3, 2), "v vs 3*beta/2"
    ):
        return Assignment(n, "B", "B-rule-III")
    return Assignment(n, "C", "C-default")


def a_tilde(t: DensityTriple, n: int) -> int:
    """n-th element of the alpha sequence; identical to the exact Webster term."""
    return webster_term(t.alpha, n)


def b_tilde(t: DensityTriple, n: int) -> int:
    """n-th element of the beta sequence: b(n) perturbed by at most 1.

    With m = b(n): unperturbed when ``u_m > alpha``; otherwise m collides with
    the alpha sequence and moves to m - 1 or m + 1 according to ``v_m``
    against beta/2.
    """
    _require_index(n)
    m = webster_term(t.beta, n)
    st = frac_state(t, m)
    a = t.alpha.value
    b = t.beta.value
    u_above = not _strict_lt(st.u, a, "u vs alpha")
    v_below_beta = _strict_lt(st.v, b, "v vs beta")
    if u_above and v_below_beta:
        return m
    if not u_above and v_below_beta:
        if _strict_lt(st.v, b / 2, "v vs beta/2"):
            return m + 1
        return m - 1
    raise InternalInvariantViolation(
        f"term m={m} of rank {n} fails v < beta; membership is violated"
    )


def _in_gamma_tilde(t: DensityTriple, m: int) -> bool:
    """Membership of m in the complement sequence, from (u_m, v_m) alone."""
    st = frac_state(t, m)
    a = t.alpha.value
    b = t.beta.value
    u, v = st.u, st.v
    if _strict_lt(u, a, "u vs alpha") or _strict_lt(v, b, "v vs beta"):
        return False
    cond_hi = _strict_lt(u, QuadExpr(1) - a, "u vs 1-alpha") or _strict_lt(
        v, QuadExpr(1) - b / 2, "v vs 1-beta/2"
    )
    cond_lo = not _strict_lt(u, a * 2, "u vs 2*alpha") or not _strict_lt(
        v, b * Fraction(3, 2), "v vs 3*beta/2"
    )
    return cond_hi and cond_lo


def c_tilde(t: DensityTriple, n: int) -> int:
    """n-th element of the gamma (complement) sequence in O(1).

    The element differs from the ideal gamma term c(n) by at most 1, so the
    three candidates around c(n) are tested for complement membership and the
    rank is confirmed through the counting identities; exactly one survives.
    """
    _require_index(n)
    c = webster_term(t.gamma, n)
    counts: dict[int, int] = {}

    def count(m: int) -> int:
        if m not in counts:
            counts[m] = wgamma_tilde_count(t, m)
        return counts[m]

    hits = []
    for m in (c - 1, c, c + 1):
        if m < 1:
            continue
        if _in_gamma_tilde(t, m) and count(m) == n and count(m - 1) == n - 1:
            hits.append(m)
    if len(hits) != 1:
        raise InternalInvariantViolation(
            f"rank {n}: candidates around c(n)={c} yield {hits}; exactly one expected"
        )
    return hits[0]


def delta_indicator(s: QuadExpr, tq: QuadExpr) -> int:
    """The carry indicator: 1 iff s + t >= 1, for s, t in [0, 1)."""
    for name, x in (("s", s), ("t", tq)):
        if x.sign() < 0 or (x - 1).sign() >= 0:
            raise ValueError(f"argument {name} must lie in [0, 1)")
    return 1 if (s + tq - 1).sign() >= 0 else 0


def e_beta(t: DensityTriple, m: int) -> int:
    """Counting error of the beta sequence at m, in {-1, 0, 1}."""
    st = frac_state(t, m)
    a = t.alpha.value
    b = t.beta.value
    if not _strict_lt(st.u, QuadExpr(1) - a, "u vs 1-alpha") and not _strict_lt(
        st.v, QuadExpr(1) - b / 2, "v vs 1-beta/2"
    ):
        return 1
    if _strict_lt(st.u, a, "u vs alpha") and _strict_lt(st.v, b / 2, "v vs beta/2"):
        return -1
    return 0


def e_gamma(t: DensityTriple, m: int) -> int:
    """Counting error of the gamma sequence at m, in {-1, 0, 1}."""
    st = frac_state(t, m)
    a = t.alpha.value
    b = t.beta.value
    s = st.u + st.v
    if not _strict_lt(s, QuadExpr(Fraction(3, 2)), "u+v vs 3/2"):
        if _strict_lt(st.u, QuadExpr(1) - a, "u vs 1-alpha") or _strict_lt(
            st.v, QuadExpr(1) - b / 2, "v vs 1-beta/2"
        ):
            return 1
        return 0
    if _strict_lt(s, HALF, "u+v vs 1/2"):
        if not _strict_lt(st.u, a, "u vs alpha") or not _strict_lt(
            st.v, b / 2, "v vs beta/2"
        ):
            return -1
    return 0


def wbeta_tilde_count(t: DensityTriple, m: int) -> int:
    """Number of B-labeled integers <= m: the ideal count corrected by e_beta."""
    _require_index(m, minimum=0)
    if m == 0:
        return 0
    return webster_count(t.beta, m) + e_beta(t, m)


def wgamma_tilde_count(t: DensityTriple, m: int) -> int:
    """Number of C-labeled integers <= m, by complement counting."""
    _require_index(m, minimum=0)
    if m == 0:
        return 0
    return m - webster_count(t.alpha, m) - wbeta_tilde_count(t, m)


def b_perturbation(t: DensityTriple, n: int) -> int:
    """b(n) - b_tilde(n) classified from the state at m = b(n)."""
    _require_index(n)
    m = webster_term(t.beta, n)
    st = frac_state(t, m)
    a = t.alpha.value
    b = t.beta.value
    u_below = _strict_lt(st.u, a, "u vs alpha")
    if not u_below and _strict_lt(st.v, b, "v vs beta"):
        return 0
    if u_below and _strict_lt(st.v, b / 2, "v vs beta/2"):
        return -1
    if u_below and _strict_lt(st.v, b, "v vs beta"):
        return 1
    raise InternalInvariantViolation(
        f"rank {n}: state at m={m} fits no perturbation case"
    )


def c_perturbation(t: DensityTriple, n: int) -> int:
    """c(n) - c_tilde(n) classified from the state at m = c_tilde(n)."""
    _require_index(n)
    m = c_tilde(t, n)
    st = frac_state(t, m)
    a = t.alpha.value
    b = t.beta.value
    g = t.gamma.value
    s = st.u + st.v
    if not _strict_lt(s, QuadExpr(Fraction(3, 2)), "u+v vs 3/2"):
        if _strict_lt(st.u, QuadExpr(1) - a, "u vs 1-alpha") or _strict_lt(
            st.v, QuadExpr(1) - b / 2, "v vs 1-beta/2"
        ):
            return 1
        raise InternalInvariantViolation(
            f"rank {n}: member m={m} has u+v > 3/2 but fits no case"
        )
    above_alpha = not _strict_lt(st.u, a, "u vs alpha")
    above_beta = not _strict_lt(st.v, b, "v vs beta")
    if not (above_alpha and above_beta):
        raise InternalInvariantViolation(
            f"rank {n}: m={m} is not a complement member"
        )
    if _strict_lt(s, QuadExpr(Fraction(3, 2)) - g, "u+v vs 3/2-gamma"):
        return -1
    return 0


def error_record(t: DensityTriple, n: int) -> ErrorRecord:
    """Counting errors at index n and perturbations at rank n, in one record."""
    return ErrorRecord(
        n=n,
        e_beta=e_beta(t, n),
        e_gamma=e_gamma(t, n),
        b_perturb=b_perturbation(t, n),
        c_perturb=c_perturbation(t, n),
    )


def label_of(t: DensityTriple, n: int) -> Label:
    return assign(t, n).label


def canonical_triple() -> DensityTriple:
    """The triple used throughout the test fixtures: (sqrt(2)/4, sqrt(3)/8, rest)."""
    return DensityTriple.from_alpha_beta(
        QuadExpr.sqrt(2, Fraction(1, 4)), QuadExpr.sqrt(3, Fraction(1, 8))
    )
