r"""Verification and statistics layer for the three-part partition.

Groups of functionality:

* quota auditing: every counting function of the partition stays within one
  of its fair share floor(n*d) / ceil(n*d) at every n;
* empirical error statistics: frequencies of the counting errors and term
  perturbations against their closed-form densities (the +/-1 counting
  errors on the beta sequence each occur with density alpha*beta/2, on the
  gamma sequence with density 1/8 - alpha*beta/2; term perturbations with
  density alpha/2 resp. (1/8 - alpha*beta/2)/gamma), and the mean-square
  aggregates, both of which equal 1/4 independently of the densities;
* two-dimensional equidistribution diagnostics for the state pairs (u_n, v_n);
* optimality witnesses: explicit local patterns showing the one-sided
  perturbation bounds cannot be improved;
* the special two-exact-sequence construction available when r*alpha +
  s*beta = 1 with r = s (mod 2), and a probe for the breakdown of the
  perturbation bound when the admissibility conditions are violated.

Verification sweeps always run fully exact.  Statistics sweeps default to
the guard-banded float fast path, whose counters are provably equal to the
exact path's; ``mode="exact"`` forces exactness end to end.  Statistics
sweeps may be chunked across worker processes (``workers`` argument or the
``WEBSTERPART_WORKERS`` environment variable); chunk boundaries are fixed,
so results are bit-identical for any worker count.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from decimal import Context, Decimal, ROUND_HALF_EVEN
from fractions import Fraction
from random import Random

from . import _sweep
from .errors import (
    ConfigInvalid,
    HypothesisViolated,
    IndependenceUnverifiable,
    InternalPrecisionExceeded,
)
from .partition import DensityTriple
from .qfield import QuadExpr
from .webster import Density

_CHUNK = 1 << 18
_SWEEP_MODES = ("fast", "exact")


# ----------------------------------------------------------------------
# rational-independence certificate
# ----------------------------------------------------------------------


def independence_certified(alpha: QuadExpr, beta: QuadExpr) -> bool:
    """Decide whether 1, alpha, beta are linearly independent over the rationals.

    For quadratic expressions this is symbolic: a rational relation
    r + s*alpha + t*beta = 0 with (s, t) != (0, 0) exists iff the radical
    coefficient vectors of alpha and beta are parallel.
    """
    rads = sorted(
        {d for _, d in alpha.terms} | {d for _, d in beta.terms}
    )
    va = dict((d, q) for q, d in alpha.terms)
    vb = dict((d, q) for q, d in beta.terms)
    if not alpha.terms or not beta.terms:
        return False  # a rational value is never independent from 1
    if len(rads) == 1:
        return False
    d1, d2 = rads
    det = va.get(d1, Fraction(0)) * vb.get(d2, Fraction(0)) - va.get(
        d2, Fraction(0)
    ) * vb.get(d1, Fraction(0))
    return det != 0


def _require_independence(t: DensityTriple):
    if not independence_certified(t.alpha.value, t.beta.value):
        raise IndependenceUnverifiable(
            "1, alpha, beta satisfy a rational relation; the equidistribution-based "
            "statistics do not apply"
        )


# ----------------------------------------------------------------------
# quota
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class QuotaReport:
    N: int
    violations: tuple[tuple[str, int, int, int, int], ...]

    @property
    def passed(self) -> bool:
        return not self.violations


def verify_quota(t: DensityTriple, N: int, max_violations: int = 16) -> QuotaReport:
    """Exact quota audit of all three counting functions up to N."""
    if N < 1:
        raise ValueError("N must be >= 1")
    out = _sweep.quota_scan(t.context(), N, limit=max_violations)
    return QuotaReport(N, tuple(out))


# ----------------------------------------------------------------------
# error densities and mean squares
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class TheoryTargets:
    """Closed-form density targets for the error statistics."""

    e_beta_pm: QuadExpr            # alpha*beta/2
    e_gamma_pm: QuadExpr           # 1/8 - alpha*beta/2
    b_perturb_pm: QuadExpr         # alpha/2
    c_perturb_pm: str              # (1/8 - alpha*beta/2)/gamma, 30-digit decimal
    d_beta: QuadExpr               # alpha*beta
    d_gamma: QuadExpr              # 1/4 - alpha*beta
    omega: Fraction = Fraction(1, 4)
    omega_small: Fraction = Fraction(1, 4)


@dataclass(frozen=True)
class DensityReport:
    """Empirical error frequencies and mean-square aggregates at horizon N."""

    N: int
    freq_e_beta: dict[int, Fraction]
    freq_e_gamma: dict[int, Fraction]
    freq_b_perturb: dict[int, Fraction]
    freq_c_perturb: dict[int, Fraction]
    d_beta_hat: Fraction
    d_gamma_hat: Fraction
    omega_hat: Fraction
    omega_small_hat: Fraction
    counts: dict[str, int]
    theory: TheoryTargets


def _ratio_decimal(num: QuadExpr, den: QuadExpr, digits: int = 30) -> str:
    """Correctly rounded decimal of num/den (the quotient itself may leave the ring)."""
    ctx = Context(prec=digits, rounding=ROUND_HALF_EVEN)
    bits = 128
    while bits <= 4096:
        nlo, nhi = num.interval(bits)
        dlo, dhi = den.interval(bits)
        if dlo > 0:
            qlo, qhi = nlo / dhi, nhi / dlo
            slo = str(ctx.divide(Decimal(qlo.numerator), Decimal(qlo.denominator)))
            shi = str(ctx.divide(Decimal(qhi.numerator), Decimal(qhi.denominator)))
            if slo == shi:
                return slo
        bits *= 2
    raise InternalPrecisionExceeded("quotient rendering did not converge")


def theory_targets(t: DensityTriple) -> TheoryTargets:
    a = t.alpha.value
    b = t.beta.value
    g = t.gamma.value
    ab = a * b
    e_gamma_pm = QuadExpr(Fraction(1, 8)) - ab / 2
    return TheoryTargets(
        e_beta_pm=ab / 2,
        e_gamma_pm=e_gamma_pm,
        b_perturb_pm=a / 2,
        c_perturb_pm=_ratio_decimal(e_gamma_pm, g),
        d_beta=ab,
        d_gamma=QuadExpr(Fraction(1, 4)) - ab,
    )


def _worker_count(workers: int | None) -> int:
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get("WEBSTERPART_WORKERS", "")
    if env.strip():
        return max(1, int(env))
    return 1


def _chunk_counters(args):
    alpha, beta, lo, hi, mode = args
    ctx = _sweep.context_for(alpha, beta)
    scan = _sweep.density_scan_exact if mode == "exact" else _sweep.density_scan_fast
    return scan(ctx, lo, hi)


_counter_memo: dict[tuple, dict[str, int]] = {}


def _counters(t: DensityTriple, N: int, mode: str, workers: int | None) -> dict[str, int]:
    if mode not in _SWEEP_MODES:
        raise ValueError(f"mode must be one of {_SWEEP_MODES}")
    key = (t.alpha.value, t.beta.value, N, mode)
    hit = _counter_memo.get(key)
    if hit is not None:
        return hit
    nworkers = _worker_count(workers)
    chunks = [
        (t.alpha.value, t.beta.value, lo, min(lo + _CHUNK - 1, N), mode)
        for lo in range(1, N + 1, _CHUNK)
    ]
    if nworkers == 1 or len(chunks) == 1:
        parts = [_chunk_counters(c) for c in chunks]
    else:
        import multiprocessing

        with multiprocessing.get_context("fork").Pool(nworkers) as pool:
            parts = pool.map(_chunk_counters, chunks)
    result = _sweep.merge_counters(parts)
    if len(_counter_memo) > 8:
        _counter_memo.clear()
    _counter_memo[key] = result
    return result


def _freq3(minus: int, zero: int, plus: int) -> dict[int, Fraction]:
    total = minus + zero + plus
    if total == 0:
        return {-1: Fraction(0), 0: Fraction(0), 1: Fraction(0)}
    return {
        -1: Fraction(minus, total),
        0: Fraction(zero, total),
        1: Fraction(plus, total),
    }


def empirical_error_densities(
    t: DensityTriple,
    N: int,
    mode: str = "fast",
    workers: int | None = None,
) -> DensityReport:
    """Exact counts of every error value over the first N indices.

    Counting errors are tallied over indices n <= N; term perturbations over
    the sequence members <= N (equivalently, over the ranks whose term lies
    in range).  Frequencies are exact rationals count/total.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    _require_independence(t)
    c = _counters(t, N, mode, workers)
    d_beta_hat = Fraction(c["eb_m"] + c["eb_p"], N)
    d_gamma_hat = Fraction(c["eg_m"] + c["eg_p"], N)
    return DensityReport(
        N=N,
        freq_e_beta=_freq3(c["eb_m"], c["eb_z"], c["eb_p"]),
        freq_e_gamma=_freq3(c["eg_m"], c["eg_z"], c["eg_p"]),
        freq_b_perturb=_freq3(c["bp_m"], c["bp_z"], c["bp_p"]),
        freq_c_perturb=_freq3(c["cp_m"], c["cp_z"], c["cp_p"]),
        d_beta_hat=d_beta_hat,
        d_gamma_hat=d_gamma_hat,
        omega_hat=d_beta_hat + d_gamma_hat,
        omega_small_hat=Fraction(c["misplaced"], N),
        counts=dict(c),
        theory=theory_targets(t),
    )


def mean_square_errors(
    t: DensityTriple,
    N: int,
    mode: str = "fast",
    workers: int | None = None,
) -> tuple[Fraction, Fraction]:
    """The mean-square aggregates (counting-error based, misplacement based).

    Both converge to 1/4 regardless of the densities: the first averages the
    squared counting errors of the three sequences, the second is the density
    of integers not sitting at their ideal sequence position.
    """
    report = empirical_error_densities(t, N, mode=mode, workers=workers)
    return report.omega_hat, report.omega_small_hat


# ----------------------------------------------------------------------
# equidistribution diagnostics
# ----------------------------------------------------------------------


def discrepancy(t: DensityTriple, N: int, grid: int = 100) -> float:
    """Axis-aligned box discrepancy of the pairs (u_n, v_n), n <= N.

    Estimated over the fixed lattice of rational boxes [0, i/grid) x
    [0, j/grid); this lower-bounds the true star discrepancy and decreases
    with N for independent densities.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    _require_independence(t)
    counts = _sweep.uv_grid_counts(t.context(), N, grid)
    # prefix sums: cum[i][j] = #{n : u_n < i/grid, v_n < j/grid}
    worst = 0.0
    cum_prev = [0] * (grid + 1)
    for i in range(1, grid + 1):
        row = counts[i - 1]
        cum_row = [0] * (grid + 1)
        running = 0
        for j in range(1, grid + 1):
            running += row[j - 1]
            cum_row[j] = cum_prev[j] + running
            dev = abs(cum_row[j] / N - (i / grid) * (j / grid))
            if dev > worst:
                worst = dev
        cum_prev = cum_row
    return worst


# ----------------------------------------------------------------------
# optimality witnesses
# ----------------------------------------------------------------------


def find_optimality_witness(t: DensityTriple, kind: str, M: int) -> int | None:
    """Smallest m <= M exhibiting the local pattern behind the optimality bound.

    kind="case-II" (requires alpha > 1/3 and gamma < 1/2): m in both the
    alpha and beta Webster sequences, m+1 in the gamma sequence, m+2 in the
    alpha sequence.  Such an m forces any partition respecting the gamma
    bound to use both signs of the beta perturbation.

    kind="case-I" applies only when alpha > 1/2, which contradicts the
    admissibility of any validated triple, so it always raises
    :class:`HypothesisViolated` here.
    """
    if M < 1:
        raise ValueError("M must be >= 1")
    if kind not in ("case-I", "case-II"):
        raise ValueError(f"unknown witness kind {kind!r}")
    _require_independence(t)
    a = t.alpha.value
    g = t.gamma.value
    if kind == "case-I":
        raise HypothesisViolated(
            "case-I requires alpha > 1/2, impossible for an admissible triple"
        )
    if not ((a - Fraction(1, 3)).sign() > 0 and (g - Fraction(1, 2)).sign() < 0):
        raise HypothesisViolated(
            "case-II requires alpha > 1/3 and gamma < 1/2"
        )
    return _sweep.witness_case2_scan(t.context(), M)


# ----------------------------------------------------------------------
# special two-exact-sequence construction
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class SpecialPairConfig:
    """Densities admitting two exact Webster sequences: r*alpha + s*beta = 1, r = s mod 2."""

    r: int
    s: int
    alpha: Density
    beta: Density

    def __post_init__(self):
        if not (isinstance(self.r, int) and isinstance(self.s, int)):
            raise ConfigInvalid("r and s must be integers")
        if self.r < 2 or self.s < 2:
            raise ConfigInvalid("r >= 2 and s >= 2 are required")
        if (self.r - self.s) % 2 != 0:
            raise ConfigInvalid(f"parity fails: r={self.r} and s={self.s} differ mod 2")
        combo = self.alpha.value * self.r + self.beta.value * self.s
        if not (combo - 1).is_zero():
            raise ConfigInvalid(
                f"r*alpha + s*beta = 1 fails exactly (got {combo})"
            )


@dataclass(frozen=True)
class SpecialPartitionReport:
    N: int
    ranks_checked: int
    disjoint: bool
    first_overlap: int | None
    max_abs_term_dev: int
    first_large_dev_rank: int | None

    @property
    def passed(self) -> bool:
        return self.disjoint and self.max_abs_term_dev <= 1


def special_two_exact_partition(cfg: SpecialPairConfig, N: int) -> SpecialPartitionReport:
    """Check the partition with two exact Webster sequences up to N.

    Builds the complement of W_alpha and W_beta, asserts the two sequences
    never collide, and compares the complement's terms against the ideal
    gamma terms (they may differ by at most 1).
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    triple = DensityTriple.from_alpha_beta(cfg.alpha, cfg.beta)
    ctx = triple.context()
    in_a = _sweep.membership_flags(ctx, "alpha", N)
    in_b = _sweep.membership_flags(ctx, "beta", N)
    first_overlap = None
    complement = []
    for m in range(1, N + 1):
        if in_a[m] and in_b[m]:
            if first_overlap is None:
                first_overlap = m
        elif not in_a[m] and not in_b[m]:
            complement.append(m)
    max_dev = 0
    first_large = None
    basis = ctx.basis
    for idx, elem in enumerate(complement, start=1):
        ideal = _sweep.term_vec(basis, ctx.gamma_v, ctx.gamma_f, ctx.gamma, idx)
        dev = abs(elem - ideal)
        if dev > max_dev:
            max_dev = dev
        if dev >= 2 and first_large is None:
            first_large = idx
    return SpecialPartitionReport(
        N=N,
        ranks_checked=len(complement),
        disjoint=first_overlap is None,
        first_overlap=first_overlap,
        max_abs_term_dev=max_dev,
        first_large_dev_rank=first_large,
    )


# ----------------------------------------------------------------------
# probe for violated admissibility conditions
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class ProbeWitness:
    rank: int
    element: int
    ideal_term: int

    @property
    def deviation(self) -> int:
        return abs(self.element - self.ideal_term)


def probe_violated_hypotheses(
    alpha: QuadExpr, beta: QuadExpr, gamma: QuadExpr, M: int
) -> ProbeWitness | None:
    """Search for a complement term deviating by >= 2 from its ideal position.

    The term-side construction remains well defined when beta >= 1/2 or
    alpha >= gamma, but its perturbation guarantee breaks down; this probe
    scans for the first complement rank deviating by at least 2.  For
    admissible triples the bound holds and the probe always reports absence.
    Absence is never an error: the breakdown is expected but not guaranteed
    at any finite bound.
    """
    if M < 1:
        raise ValueError("M must be >= 1")
    for name, x in (("alpha", alpha), ("beta", beta), ("gamma", gamma)):
        if not isinstance(x, QuadExpr) or not x.terms:
            raise ValueError(f"{name} must be an irrational quadratic expression")
        if x.sign() <= 0 or (QuadExpr(1) - x).sign() <= 0:
            raise ValueError(f"{name} must lie in (0, 1)")
    if not (alpha + beta + gamma - 1).is_zero():
        raise ValueError("alpha + beta + gamma = 1 fails")
    ctx = _sweep.context_for(alpha, beta)
    covered = bytearray(M + 2)
    for term in _sweep.terms_upto(ctx, "alpha", M):
        covered[term] = 1
    for _, bt in _sweep.btilde_stream(ctx, M):
        if 1 <= bt <= M:
            covered[bt] = 1
    basis = ctx.basis
    rank = 0
    for m in range(1, M + 1):
        if covered[m]:
            continue
        rank += 1
        ideal = _sweep.term_vec(basis, ctx.gamma_v, ctx.gamma_f, ctx.gamma, rank)
        if abs(m - ideal) >= 2:
            return ProbeWitness(rank=rank, element=m, ideal_term=ideal)
    return None


# ----------------------------------------------------------------------
# verification bundles (used by the CLI and the acceptance suite)
# ----------------------------------------------------------------------

CHECK_NAMES = ("partition", "equivalence", "quota", "perturbation", "sandwich")


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    witness: str | None = None


@dataclass(frozen=True)
class VerificationReport:
    N: int
    results: tuple[CheckResult, ...]

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.results)

    def failures(self) -> list[CheckResult]:
        return [r for r in self.results if not r.passed]


def run_checks(
    t: DensityTriple,
    N: int,
    checks: tuple[str, ...] = CHECK_NAMES,
    fault_btilde: int | None = None,
) -> VerificationReport:
    """Run the selected exact verification sweeps up to N.

    ``fault_btilde`` is a test hook that corrupts the term-side beta stream
    at one rank; a sound verifier must then fail with a witness.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    for c in checks:
        if c not in CHECK_NAMES:
            raise ValueError(f"unknown check {c!r}; valid: {CHECK_NAMES}")
    ctx = t.context()
    results: list[CheckResult] = []

    need_streams = any(c in checks for c in ("equivalence", "perturbation", "sandwich"))
    marks = None
    if need_streams:
        marks, collision = _sweep.alg1_marks(ctx, N, fault_btilde=fault_btilde)

    if "partition" in checks:
        hit = _sweep.exclusivity_scan(ctx, N)
        results.append(
            CheckResult("partition", hit is None,
                        None if hit is None else f"n={hit[0]}: {hit[1]}")
        )

    if "equivalence" in checks:
        labels = _sweep.labels_upto(ctx, N)
        witness = None
        if collision is not None:
            witness = f"n={collision}: term streams collide"
        else:
            for n in range(1, N + 1):
                if marks[n] != labels[n]:
                    names = {1: "A", 2: "B", 3: "C"}
                    witness = (
                        f"n={n}: term side says {names[marks[n]]}, "
                        f"assignment side says {names[labels[n]]}"
                    )
                    break
        results.append(CheckResult("equivalence", witness is None, witness))

    if "quota" in checks:
        report = verify_quota(t, N)
        witness = None
        if report.violations:
            seq, n, count, lo, hi = report.violations[0]
            witness = f"{seq} count at n={n} is {count}, outside {{{lo}, {hi}}}"
        results.append(CheckResult("quota", witness is None, witness))

    need_c = any(c in checks for c in ("perturbation", "sandwich"))
    if need_c:
        complement = [m for m in range(1, N + 1) if marks[m] == 3]
        basis = ctx.basis
        ideal_c = [
            _sweep.term_vec(basis, ctx.gamma_v, ctx.gamma_f, ctx.gamma, n)
            for n in range(1, len(complement) + 2)
        ]

    if "perturbation" in checks:
        witness = None
        if collision is not None:
            witness = f"n={collision}: alpha and beta term streams collide"
        if witness is None:
            pairs = _sweep.btilde_stream(ctx, N, fault_btilde=fault_btilde)
            prev = 0
            for rank, (b, bt) in enumerate(pairs, start=1):
                if abs(bt - b) > 1:
                    witness = f"beta rank {rank}: |{bt} - {b}| > 1"
                    break
                if bt <= prev:
                    witness = f"beta rank {rank}: stream not increasing"
                    break
                prev = bt
        if witness is None:
            for rank, elem in enumerate(complement, start=1):
                if abs(elem - ideal_c[rank - 1]) > 1:
                    witness = f"gamma rank {rank}: |{elem} - {ideal_c[rank - 1]}| > 1"
                    break
        results.append(CheckResult("perturbation", witness is None, witness))

    if "sandwich" in checks:
        witness = None
        for rank, elem in enumerate(complement, start=1):
            if rank >= 2 and not (ideal_c[rank - 2] <= elem):
                witness = f"gamma rank {rank}: c(n-1) <= element fails"
                break
            if not (elem <= ideal_c[rank]):
                witness = f"gamma rank {rank}: element <= c(n+1) fails"
                break
        results.append(CheckResult("sandwich", witness is None, witness))

    return VerificationReport(N, tuple(results))


# ----------------------------------------------------------------------
# randomized admissible triples (for tests and audits)
# ----------------------------------------------------------------------


def random_quadratic_triples(count: int, seed: int) -> list[DensityTriple]:
    """Deterministic sample of admissible triples with alpha ~ sqrt(2), beta ~ sqrt(3).

    Rejection-samples small rational multiples until the admissibility
    clauses hold; 1, alpha, beta are automatically independent because the
    radicands differ.
    """
    rng = Random(seed)
    out: list[DensityTriple] = []
    while len(out) < count:
        q1 = rng.randint(4, 40)
        p1 = rng.randint(1, q1 - 1)
        q2 = rng.randint(5, 40)
        p2 = rng.randint(1, q2 - 1)
        alpha = QuadExpr.sqrt(2, Fraction(p1, q1))
        beta = QuadExpr.sqrt(3, Fraction(p2, q2))
        try:
            out.append(DensityTriple.from_alpha_beta(alpha, beta))
        except Exception:
            continue
    return out
