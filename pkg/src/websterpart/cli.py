"""Command-line front end: generation, assignment, verification, statistics, scheduling.

Output is deterministic and machine-readable: identical invocations produce
byte-identical output.  Exit codes: 0 ok, 1 verification failure, 2 invalid
triple or configuration, 3 range error, 4 infeasible demands.

The triple is given inline (``--alpha "1/4*sqrt(2)" --beta "1/8*sqrt(3)"``)
or through ``--config FILE`` holding ``key=value`` lines; gamma is always
derived as 1 - alpha - beta so the sum identity cannot drift.

``WEBSTERPART_WORKERS`` sets the worker count for the statistics sweeps.
``WEBSTERPART_FAULT_BTILDE`` is a verification-testing hook: it corrupts the
term-side beta stream at the given rank inside ``verify``, which a sound
verifier must report as a failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from decimal import Context, Decimal, ROUND_HALF_EVEN
from fractions import Fraction

from . import __version__, analysis, scheduler
from .errors import (
    ConfigInvalid,
    IndependenceUnverifiable,
    InfeasibleDemands,
    InvalidDensity,
    InvalidTriple,
    QuadExprParseError,
)
from .partition import DensityTriple, a_tilde, assign, b_tilde, c_tilde
from .qfield import parse_quadexpr

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_BAD_TRIPLE = 2
EXIT_RANGE = 3
EXIT_INFEASIBLE = 4

_DECIMAL30 = Context(prec=30, rounding=ROUND_HALF_EVEN)


class _RangeError(ValueError):
    pass


def _fraction_decimal(x: Fraction) -> str:
    return str(_DECIMAL30.divide(Decimal(x.numerator), Decimal(x.denominator)))


def _read_config(path: str) -> dict[str, str]:
    out: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for idx, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigInvalid(f"{path}:{idx}: expected key=value")
            key, _, value = line.partition("=")
            out[key.strip()] = value.strip()
    return out


def _triple_from_args(args) -> DensityTriple:
    alpha_text = args.alpha
    beta_text = args.beta
    if args.config:
        cfg = _read_config(args.config)
        alpha_text = alpha_text or cfg.get("alpha")
        beta_text = beta_text or cfg.get("beta")
    if not alpha_text or not beta_text:
        raise InvalidTriple("both alpha and beta are required (inline or via --config)")
    return DensityTriple.from_alpha_beta(
        parse_quadexpr(alpha_text), parse_quadexpr(beta_text)
    )


def _add_triple_options(p: argparse.ArgumentParser):
    p.add_argument("--alpha", help="alpha literal, e.g. '1/4*sqrt(2)'")
    p.add_argument("--beta", help="beta literal, e.g. '1/8*sqrt(3)'")
    p.add_argument("--config", help="key=value file providing alpha/beta")


def _cmd_terms(args, out) -> int:
    t = _triple_from_args(args)
    if args.start < 1 or args.stop < args.start:
        raise _RangeError(f"need 1 <= from <= to, got {args.start}..{args.stop}")
    fn = {"a": a_tilde, "b": b_tilde, "c": c_tilde}[args.seq]
    for n in range(args.start, args.stop + 1):
        out.write(f"{n},{fn(t, n)}\n")
    return EXIT_OK


def _cmd_assign(args, out) -> int:
    t = _triple_from_args(args)
    if args.start < 1:
        raise _RangeError(f"need from >= 1, got {args.start}")
    for n in range(args.start, args.stop + 1):
        a = assign(t, n)
        out.write(f"{n},{a.label},{a.rule}\n")
    return EXIT_OK


def _cmd_verify(args, out) -> int:
    t = _triple_from_args(args)
    if args.n < 1:
        raise _RangeError(f"need N >= 1, got {args.n}")
    checks = tuple(args.checks.split(",")) if args.checks else analysis.CHECK_NAMES
    fault = os.environ.get("WEBSTERPART_FAULT_BTILDE")
    fault_rank = int(fault) if fault else None
    report = analysis.run_checks(t, args.n, checks=checks, fault_btilde=fault_rank)
    for r in report.results:
        if r.passed:
            out.write(f"{r.name},pass\n")
        else:
            out.write(f"{r.name},fail,{r.witness}\n")
    return EXIT_OK if report.all_passed else EXIT_CHECK_FAILED


def _cmd_stats(args, out) -> int:
    t = _triple_from_args(args)
    if args.n < 1:
        raise _RangeError(f"need N >= 1, got {args.n}")
    mode = "exact" if args.exact else "fast"
    rep = analysis.empirical_error_densities(t, args.n, mode=mode)
    disc = analysis.discrepancy(t, args.n)
    th = rep.theory
    out.write(f"N,{rep.N}\n")
    out.write(f"mode,{mode}\n")
    rows = [
        ("freq_e_beta_minus", rep.freq_e_beta[-1], th.e_beta_pm.decimal()),
        ("freq_e_beta_plus", rep.freq_e_beta[1], th.e_beta_pm.decimal()),
        ("freq_e_gamma_minus", rep.freq_e_gamma[-1], th.e_gamma_pm.decimal()),
        ("freq_e_gamma_plus", rep.freq_e_gamma[1], th.e_gamma_pm.decimal()),
        ("freq_b_perturb_minus", rep.freq_b_perturb[-1], th.b_perturb_pm.decimal()),
        ("freq_b_perturb_plus", rep.freq_b_perturb[1], th.b_perturb_pm.decimal()),
        ("freq_c_perturb_minus", rep.freq_c_perturb[-1], th.c_perturb_pm),
        ("freq_c_perturb_plus", rep.freq_c_perturb[1], th.c_perturb_pm),
        ("d_beta_hat", rep.d_beta_hat, th.d_beta.decimal()),
        ("d_gamma_hat", rep.d_gamma_hat, th.d_gamma.decimal()),
        ("omega_hat", rep.omega_hat, _fraction_decimal(th.omega)),
        ("omega_small_hat", rep.omega_small_hat, _fraction_decimal(th.omega_small)),
    ]
    out.write("quantity,empirical,theory\n")
    for name, value, theory in rows:
        out.write(f"{name},{_fraction_decimal(value)},{theory}\n")
    out.write(f"discrepancy,{disc!r}\n")
    return EXIT_OK


def _cmd_schedule(args, out) -> int:
    spec = scheduler.DemandSpec(args.d1, args.d2, args.d3)
    sched = scheduler.build_schedule(spec)
    rows = []
    counts = {"A": 0, "B": 0, "C": 0}
    for n, label in enumerate(sched.slots, start=1):
        counts[label] += 1
        rows.append((n, label, counts["A"], counts["B"], counts["C"]))
    if args.format == "csv":
        out.write("n,label,count_a,count_b,count_c\n")
        for row in rows:
            out.write(",".join(str(x) for x in row) + "\n")
    else:
        doc = {
            "header": {
                "version": __version__,
                "alpha": str(sched.triple.alpha.value),
                "beta": str(sched.triple.beta.value),
                "gamma": str(sched.triple.gamma.value),
                "demands": list(sched.demands),
                "totals": list(sched.totals),
                "fairness": str(sched.fairness),
                "fairness_decimal": _fraction_decimal(sched.fairness),
            },
            "slots": [
                {
                    "n": n,
                    "label": label,
                    "count_a": ca,
                    "count_b": cb,
                    "count_c": cc,
                }
                for (n, label, ca, cb, cc) in rows
            ],
        }
        out.write(json.dumps(doc, indent=2, sort_keys=True))
        out.write("\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="websterpart",
        description="Three-part Webster-sequence partitions: terms, labels, verification, statistics, schedules.",
    )
    p.add_argument("--version", action="version", version=f"websterpart {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    pt = sub.add_parser("terms", help="emit sequence elements by rank")
    _add_triple_options(pt)
    pt.add_argument("--seq", choices=("a", "b", "c"), required=True)
    pt.add_argument("start", type=int, metavar="FROM")
    pt.add_argument("stop", type=int, metavar="TO")
    pt.set_defaults(fn=_cmd_terms)

    pa = sub.add_parser("assign", help="emit labels for an index range")
    _add_triple_options(pa)
    pa.add_argument("start", type=int, metavar="FROM")
    pa.add_argument("stop", type=int, metavar="TO")
    pa.set_defaults(fn=_cmd_assign)

    pv = sub.add_parser("verify", help="run exact verification sweeps")
    _add_triple_options(pv)
    pv.add_argument("--n", type=int, required=True, metavar="N")
    pv.add_argument(
        "--checks",
        help=f"comma list from {','.join(analysis.CHECK_NAMES)} (default: all)",
    )
    pv.set_defaults(fn=_cmd_verify)

    ps = sub.add_parser("stats", help="empirical error statistics vs theory")
    _add_triple_options(ps)
    ps.add_argument("--n", type=int, required=True, metavar="N")
    mode = ps.add_mutually_exclusive_group()
    mode.add_argument("--fast", action="store_true", help="guard-banded float sweep (default)")
    mode.add_argument("--exact", action="store_true", help="fully exact sweep")
    ps.set_defaults(fn=_cmd_stats)

    pc = sub.add_parser("schedule", help="fair production schedule for three demands")
    pc.add_argument("d1", type=int)
    pc.add_argument("d2", type=int)
    pc.add_argument("d3", type=int)
    pc.add_argument("--format", choices=("csv", "json"), default="csv")
    pc.add_argument("--output", help="write to a file instead of stdout")
    pc.set_defaults(fn=_cmd_schedule)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out = sys.stdout
    close_out = False
    if getattr(args, "output", None):
        out = open(args.output, "w", encoding="utf-8")
        close_out = True
    try:
        return args.fn(args, out)
    except (QuadExprParseError, InvalidDensity, InvalidTriple, ConfigInvalid,
            IndependenceUnverifiable, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_TRIPLE
    except _RangeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RANGE
    except InfeasibleDemands as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    finally:
        if close_out:
            out.close()


if __name__ == "__main__":
    sys.exit(main())
