"""Exact three-part Webster-sequence partitions of the natural numbers.

The package partitions the naturals into one exact Webster sequence and two
almost-Webster sequences of prescribed irrational densities, entirely in
exact arithmetic, and ships the verification, statistics, and scheduling
layers built on top of the construction.
"""

__version__ = "0.1.0"

from .errors import (
    ConfigInvalid,
    DegenerateComparison,
    HypothesisViolated,
    IndependenceUnverifiable,
    InfeasibleDemands,
    InternalInvariantViolation,
    InternalPrecisionExceeded,
    InvalidDensity,
    InvalidTriple,
    NotAMember,
    QuadExprParseError,
    RadicandOverflow,
    WebsterPartError,
)
from .qfield import QuadExpr, Rational, ceil_div, floor_div, format_quadexpr, parse_quadexpr
from .webster import (
    Density,
    DeviationStat,
    beatty_term,
    deviation_sup,
    gap_next,
    is_member,
    two_part_partition_check,
    webster_count,
    webster_term,
)
from .partition import (
    Assignment,
    DensityTriple,
    ErrorRecord,
    FractionalState,
    a_tilde,
    assign,
    b_perturbation,
    b_tilde,
    c_perturbation,
    c_tilde,
    canonical_triple,
    delta_indicator,
    e_beta,
    e_gamma,
    error_record,
    frac_state,
    wbeta_tilde_count,
    wgamma_tilde_count,
)
from .analysis import (
    DensityReport,
    ProbeWitness,
    QuotaReport,
    SpecialPairConfig,
    SpecialPartitionReport,
    TheoryTargets,
    VerificationReport,
    discrepancy,
    empirical_error_densities,
    find_optimality_witness,
    independence_certified,
    mean_square_errors,
    probe_violated_hypotheses,
    random_quadratic_triples,
    run_checks,
    special_two_exact_partition,
    theory_targets,
    verify_quota,
)
from .scheduler import DemandSpec, Schedule, build_schedule, irrationalize
