"""Internal exact sweep engine for million-scale index scans.

Every quantity the partition logic compares lives in the rational span of
(1, sqrt(d1), sqrt(d2)) for the radicands of the configured densities.  After
scaling by a common denominator, all states and thresholds become integer
vectors, increments are integer adds, and each strict comparison is the sign
of an integer vector, decided against precomputed integer enclosures of the
square roots.  This keeps full exactness (the sign semantics is identical to
QuadExpr.sign: symbolic zero first, then interval refinement) at a per-index
cost small enough for 10^6-length sweeps.

A float twin of the stepper exists for statistics sweeps: comparisons run in
hardware floats with a guard band of 1e-9, and any comparison landing inside
the band is recomputed exactly from scratch at that index.  Float states are
re-anchored to exact values every 2^16 steps so accumulated error stays
orders of magnitude below the band.

Everything here is package-internal; the public modules expose the results.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from .errors import (
    DegenerateComparison,
    InternalInvariantViolation,
    InternalPrecisionExceeded,
    RadicandOverflow,
)
from .qfield import QuadExpr, _sqrt_enclosure, ceil_div

_BITS = 96
_CAP = 4096
BAND = 1e-9
_ANCHOR = 1 << 16


def _deep_sign(rads: tuple[int, ...], a0: int, a1: int, a2: int) -> int:
    # Zero is symbolic: with distinct square-free radicands the value vanishes
    # only when every coordinate does (checked by the caller).
    bits = _BITS * 2
    coords = (a1, a2)
    while bits <= _CAP:
        scale = 1 << bits
        lo = a0 * scale
        hi = a0 * scale
        for c, d in zip(coords, rads):
            if c == 0:
                continue
            s = _sqrt_enclosure(d, bits)
            if c > 0:
                lo += c * s
                hi += c * (s + 1)
            else:
                lo += c * (s + 1)
                hi += c * s
        if lo > 0:
            return 1
        if hi < 0:
            return -1
        bits *= 2
    raise InternalPrecisionExceeded(
        f"sign of integer vector ({a0}, {a1}, {a2}) over radicands {rads} undecided"
    )


class RadicalBasis:
    """Fixed-denominator integer-vector arithmetic over (1, sqrt(d1), sqrt(d2))."""

    __slots__ = ("radicands", "den", "sqrt_floats", "sign")

    def __init__(self, radicands: tuple[int, ...], den: int):
        self.radicands = tuple(radicands)
        self.den = den
        self.sqrt_floats = tuple(math.sqrt(d) for d in self.radicands)
        self.sign = self._make_sign()

    def _make_sign(self):
        rads = self.radicands
        if not rads:
            def sign0(a0: int, a1: int, a2: int) -> int:
                return (a0 > 0) - (a0 < 0)
            return sign0
        scale = 1 << _BITS
        if len(rads) == 1:
            d1 = rads[0]
            r1lo = _sqrt_enclosure(d1, _BITS)
            r1hi = r1lo + 1

            def sign1(a0: int, a1: int, a2: int) -> int:
                if a1 == 0:
                    return (a0 > 0) - (a0 < 0)
                base = a0 * scale
                lo = base + (a1 * r1lo if a1 > 0 else a1 * r1hi)
                if lo > 0:
                    return 1
                hi = base + (a1 * r1hi if a1 > 0 else a1 * r1lo)
                if hi < 0:
                    return -1
                return _deep_sign(rads, a0, a1, 0)

            return sign1
        d1, d2 = rads
        r1lo = _sqrt_enclosure(d1, _BITS)
        r1hi = r1lo + 1
        r2lo = _sqrt_enclosure(d2, _BITS)
        r2hi = r2lo + 1

        def sign2(a0: int, a1: int, a2: int) -> int:
            if a1 == 0 and a2 == 0:
                return (a0 > 0) - (a0 < 0)
            base = a0 * scale
            lo = (
                base
                + (a1 * r1lo if a1 > 0 else a1 * r1hi)
                + (a2 * r2lo if a2 > 0 else a2 * r2hi)
            )
            if lo > 0:
                return 1
            hi = (
                base
                + (a1 * r1hi if a1 > 0 else a1 * r1lo)
                + (a2 * r2hi if a2 > 0 else a2 * r2lo)
            )
            if hi < 0:
                return -1
            return _deep_sign(rads, a0, a1, a2)

        return sign2

    def vec_of(self, x: QuadExpr) -> tuple[int, int, int]:
        """Exact integer coordinates of ``x * den``; x must live in this basis."""
        coeffs = {d: q for q, d in x.terms}
        for d in coeffs:
            if d not in self.radicands:
                raise RadicandOverflow(
                    f"radicand {d} outside basis {self.radicands}"
                )
        out = [0, 0, 0]
        p = x.p * self.den
        if p.denominator != 1:
            raise ValueError(f"{x!r} is not integral at denominator {self.den}")
        out[0] = p.numerator
        for i, d in enumerate(self.radicands):
            q = coeffs.get(d, Fraction(0)) * self.den
            if q.denominator != 1:
                raise ValueError(f"{x!r} is not integral at denominator {self.den}")
            out[i + 1] = q.numerator
        return tuple(out)

    def to_qe(self, vec: tuple[int, int, int]) -> QuadExpr:
        a0, a1, a2 = vec
        terms = []
        if len(self.radicands) > 0 and a1:
            terms.append((Fraction(a1, self.den), self.radicands[0]))
        if len(self.radicands) > 1 and a2:
            terms.append((Fraction(a2, self.den), self.radicands[1]))
        return QuadExpr(Fraction(a0, self.den), terms)

    def float_of(self, vec: tuple[int, int, int]) -> float:
        a0, a1, a2 = vec
        acc = float(a0)
        if a1:
            acc += a1 * self.sqrt_floats[0]
        if a2:
            acc += a2 * self.sqrt_floats[1]
        return acc / self.den

    def accurate_float(self, vec: tuple[int, int, int]) -> float:
        """Float of the exact value, accurate to ~1 ulp even for huge coords."""
        lo, hi = self.to_qe(vec).interval(_BITS)
        return float((lo + hi) / 2)


def basis_for(values: list[QuadExpr], extra_denominator: int = 2) -> RadicalBasis:
    rads: set[int] = set()
    den = extra_denominator
    for x in values:
        den = math.lcm(den, x.p.denominator)
        for q, d in x.terms:
            rads.add(d)
            den = math.lcm(den, q.denominator)
    if len(rads) > 2:
        raise RadicandOverflow(f"density basis needs radicands {sorted(rads)}")
    return RadicalBasis(tuple(sorted(rads)), den)


def _floor_of_vec(basis: RadicalBasis, vec: tuple[int, int, int]) -> int:
    a0, a1, a2 = vec
    if a1 == 0 and a2 == 0:
        return a0 // basis.den
    den = basis.den
    sign = basis.sign
    est = math.floor(basis.float_of(vec))
    for k in range(est - 2, est + 3):
        if sign(a0 - k * den, a1, a2) >= 0 and sign(a0 - (k + 1) * den, a1, a2) < 0:
            return k
    return basis.to_qe(vec).floor()


def frac_state_vec(
    basis: RadicalBasis,
    dvec: tuple[int, int, int],
    n: int,
    plus_half: bool = True,
) -> tuple[int, int, int]:
    """Integer vector of ``{n*d + 1/2}`` (or ``{n*d}``) for the density vector."""
    a0 = n * dvec[0] + (basis.den // 2 if plus_half else 0)
    a1 = n * dvec[1]
    a2 = n * dvec[2]
    k = _floor_of_vec(basis, (a0, a1, a2))
    return (a0 - k * basis.den, a1, a2)


def term_vec(
    basis: RadicalBasis,
    dvec: tuple[int, int, int],
    dfloat: float,
    dqe: QuadExpr,
    n: int,
) -> int:
    """Exact ``ceil((n - 1/2) / d)``: bracketed search verified by sign tests."""
    den = basis.den
    sign = basis.sign
    x0 = n * den - den // 2  # (n - 1/2) * den, exact since den is even
    est = math.ceil((n - 0.5) / dfloat)
    d0, d1, d2 = dvec
    for t in range(est - 2, est + 3):
        if t < 1:
            continue
        # (t-1)*d < n-1/2 < t*d, both strict since the quotient is irrational
        lo = sign(x0 - (t - 1) * d0, -(t - 1) * d1, -(t - 1) * d2)
        hi = sign(t * d0 - x0, t * d1, t * d2)
        if lo == 0 or hi == 0:
            raise DegenerateComparison(f"term bracket tie at n={n}, t={t}")
        if lo > 0 and hi > 0:
            return t
    return ceil_div(Fraction(2 * n - 1, 2), dqe)


class TripleContext:
    """Precomputed vectors, thresholds, and floats for one density triple."""

    __slots__ = (
        "basis", "sign", "den",
        "alpha", "beta", "gamma",
        "alpha_v", "beta_v", "gamma_v",
        "one_v", "half_v", "three_half_v",
        "two_alpha_v", "one_m_alpha_v",
        "half_beta_v", "three_half_beta_v", "one_m_half_beta_v",
        "three_half_m_gamma_v",
        "alpha_f", "beta_f", "gamma_f",
        "two_alpha_f", "one_m_alpha_f",
        "half_beta_f", "three_half_beta_f", "one_m_half_beta_f",
        "three_half_m_gamma_f",
    )

    def __init__(self, alpha: QuadExpr, beta: QuadExpr):
        gamma = QuadExpr(1) - alpha - beta
        # doubled so that the half-scaled thresholds (beta/2 etc.) stay integral
        base = basis_for([alpha, beta], extra_denominator=2)
        basis = RadicalBasis(base.radicands, base.den * 2)
        self.basis = basis
        self.sign = basis.sign
        self.den = basis.den
        self.alpha = alpha
        self.beta = beta
        self.gamma = gamma
        v = basis.vec_of
        self.alpha_v = v(alpha)
        self.beta_v = v(beta)
        self.gamma_v = v(gamma)
        self.one_v = (basis.den, 0, 0)
        self.half_v = (basis.den // 2, 0, 0)
        self.three_half_v = (3 * basis.den // 2, 0, 0)
        self.two_alpha_v = v(alpha * 2)
        self.one_m_alpha_v = v(QuadExpr(1) - alpha)
        self.half_beta_v = v(beta / 2)
        self.three_half_beta_v = v(beta * Fraction(3, 2))
        self.one_m_half_beta_v = v(QuadExpr(1) - beta / 2)
        self.three_half_m_gamma_v = v(QuadExpr(Fraction(3, 2)) - gamma)
        af = basis.accurate_float
        self.alpha_f = af(self.alpha_v)
        self.beta_f = af(self.beta_v)
        self.gamma_f = af(self.gamma_v)
        self.two_alpha_f = af(self.two_alpha_v)
        self.one_m_alpha_f = af(self.one_m_alpha_v)
        self.half_beta_f = af(self.half_beta_v)
        self.three_half_beta_f = af(self.three_half_beta_v)
        self.one_m_half_beta_f = af(self.one_m_half_beta_v)
        self.three_half_m_gamma_f = af(self.three_half_m_gamma_v)


@lru_cache(maxsize=128)
def context_for(alpha: QuadExpr, beta: QuadExpr) -> TripleContext:
    return TripleContext(alpha, beta)


def _deg(n: int, what: str):
    raise DegenerateComparison(f"exact tie in '{what}' at index {n}")


# ----------------------------------------------------------------------
# single-point exact classification (shared by fast-path fallback and tests)
# ----------------------------------------------------------------------


def classify_point(ctx: TripleContext, n: int) -> dict:
    """All per-index facts at one n, computed exactly from scratch."""
    basis = ctx.basis
    sgn = ctx.sign
    u = frac_state_vec(basis, ctx.alpha_v, n)
    v = frac_state_vec(basis, ctx.beta_v, n)
    w = frac_state_vec(basis, ctx.gamma_v, n)
    u0, u1, u2 = u
    v0, v1, v2 = v

    def lt(sv, tv, what):
        s = sgn(sv[0] - tv[0], sv[1] - tv[1], sv[2] - tv[2])
        if s == 0:
            _deg(n, what)
        return s < 0

    in_wa = lt(u, ctx.alpha_v, "u vs alpha")
    in_wb = lt(v, ctx.beta_v, "v vs beta")
    in_wc = lt(w, ctx.gamma_v, "w vs gamma")
    u_hi = not lt(u, ctx.one_m_alpha_v, "u vs 1-alpha")
    v_hi = not lt(v, ctx.one_m_half_beta_v, "v vs 1-beta/2")
    v_low = lt(v, ctx.half_beta_v, "v vs beta/2")

    if in_wa:
        label = 1
        rule = "A-rule"
    elif in_wb:
        label = 2
        rule = "B-rule-I"
    elif u_hi and v_hi:
        label = 2
        rule = "B-rule-II"
    elif lt(u, ctx.two_alpha_v, "u vs 2*alpha") and lt(
        v, ctx.three_half_beta_v, "v vs 3*beta/2"
    ):
        label = 2
        rule = "B-rule-III"
    else:
        label = 3
        rule = "C-default"

    e_beta = 1 if (u_hi and v_hi) else (-1 if (in_wa and v_low) else 0)
    s_vec = (u0 + v0, u1 + v1, u2 + v2)
    s_hi = not lt(s_vec, ctx.three_half_v, "u+v vs 3/2")
    if s_hi:
        e_gamma = 1 if e_beta != 1 else 0
    elif lt(s_vec, ctx.half_v, "u+v vs 1/2"):
        e_gamma = -1 if e_beta != -1 else 0
    else:
        e_gamma = 0

    b_perturb = None
    if in_wb:
        b_perturb = 0 if not in_wa else (-1 if v_low else 1)
    c_perturb = None
    if label == 3:
        if s_hi:
            c_perturb = 1
        elif lt(s_vec, ctx.three_half_m_gamma_v, "u+v vs 3/2-gamma"):
            c_perturb = -1
        else:
            c_perturb = 0
    return {
        "label": label,
        "rule": rule,
        "e_beta": e_beta,
        "e_gamma": e_gamma,
        "in_wa": in_wa,
        "in_wb": in_wb,
        "in_wc": in_wc,
        "b_perturb": b_perturb,
        "c_perturb": c_perturb,
        "u": u,
        "v": v,
        "w": w,
    }


# ----------------------------------------------------------------------
# exact steppers
# ----------------------------------------------------------------------


class _States:
    """Incremental exact fractional states u, v, w over a sweep."""

    __slots__ = ("ctx", "n", "u", "v", "w")

    def __init__(self, ctx: TripleContext, start: int = 1):
        self.ctx = ctx
        self.n = start
        b = ctx.basis
        self.u = frac_state_vec(b, ctx.alpha_v, start)
        self.v = frac_state_vec(b, ctx.beta_v, start)
        self.w = frac_state_vec(b, ctx.gamma_v, start)

    def advance(self):
        ctx = self.ctx
        self.n += 1
        self.u = _step(ctx, self.u, ctx.alpha_v, self.n, "u wrap")
        self.v = _step(ctx, self.v, ctx.beta_v, self.n, "v wrap")
        self.w = _step(ctx, self.w, ctx.gamma_v, self.n, "w wrap")


def _step(ctx, state, dvec, n, what):
    a0 = state[0] + dvec[0]
    a1 = state[1] + dvec[1]
    a2 = state[2] + dvec[2]
    s = ctx.sign(a0 - ctx.den, a1, a2)
    if s == 0:
        _deg(n, what)
    if s > 0:
        return (a0 - ctx.den, a1, a2)
    return (a0, a1, a2)


def labels_upto(ctx: TripleContext, N: int) -> bytearray:
    """Assignment labels for n = 1..N (1=A, 2=B, 3=C), index 0 unused."""
    out = bytearray(N + 1)
    sgn = ctx.sign
    den = ctx.den
    av0, av1, av2 = ctx.alpha_v
    bv0, bv1, bv2 = ctx.beta_v
    ta0, ta1, ta2 = ctx.alpha_v
    tb0, tb1, tb2 = ctx.beta_v
    t2a0, t2a1, t2a2 = ctx.two_alpha_v
    t1a0, t1a1, t1a2 = ctx.one_m_alpha_v
    t1hb0, t1hb1, t1hb2 = ctx.one_m_half_beta_v
    t3hb0, t3hb1, t3hb2 = ctx.three_half_beta_v
    u0, u1, u2 = frac_state_vec(ctx.basis, ctx.alpha_v, 1)
    v0, v1, v2 = frac_state_vec(ctx.basis, ctx.beta_v, 1)
    for n in range(1, N + 1):
        s = sgn(u0 - ta0, u1 - ta1, u2 - ta2)
        if s == 0:
            _deg(n, "u vs alpha")
        if s < 0:
            out[n] = 1
        else:
            s = sgn(v0 - tb0, v1 - tb1, v2 - tb2)
            if s == 0:
                _deg(n, "v vs beta")
            if s < 0:
                out[n] = 2
            else:
                label = 3
                s = sgn(u0 - t1a0, u1 - t1a1, u2 - t1a2)
                if s == 0:
                    _deg(n, "u vs 1-alpha")
                if s > 0:
                    s = sgn(v0 - t1hb0, v1 - t1hb1, v2 - t1hb2)
                    if s == 0:
                        _deg(n, "v vs 1-beta/2")
                    if s > 0:
                        label = 2
                if label == 3:
                    s = sgn(u0 - t2a0, u1 - t2a1, u2 - t2a2)
                    if s == 0:
                        _deg(n, "u vs 2*alpha")
                    if s < 0:
                        s = sgn(v0 - t3hb0, v1 - t3hb1, v2 - t3hb2)
                        if s == 0:
                            _deg(n, "v vs 3*beta/2")
                        if s < 0:
                            label = 2
                out[n] = label
        # advance
        u0 += av0
        u1 += av1
        u2 += av2
        s = sgn(u0 - den, u1, u2)
        if s == 0:
            _deg(n + 1, "u wrap")
        if s > 0:
            u0 -= den
        v0 += bv0
        v1 += bv1
        v2 += bv2
        s = sgn(v0 - den, v1, v2)
        if s == 0:
            _deg(n + 1, "v wrap")
        if s > 0:
            v0 -= den
    return out


def terms_upto(ctx: TripleContext, which: str, N: int) -> list[int]:
    """All terms <= N of the Webster sequence of the chosen density."""
    dvec = getattr(ctx, which + "_v")
    dfloat = getattr(ctx, which + "_f")
    dqe = getattr(ctx, which)
    out = []
    n = 1
    while True:
        t = term_vec(ctx.basis, dvec, dfloat, dqe, n)
        if t > N:
            return out
        out.append(t)
        n += 1


def btilde_stream(
    ctx: TripleContext, N: int, fault_btilde: int | None = None
) -> list[tuple[int, int]]:
    """Pairs ``(b(n), btilde(n))`` for every rank with ``b(n) <= N + 1``.

    ``fault_btilde`` is a test hook: the stream value at that rank is shifted
    by +1, simulating a corrupted implementation.
    """
    basis = ctx.basis
    sgn = ctx.sign
    out = []
    n = 1
    while True:
        m = term_vec(basis, ctx.beta_v, ctx.beta_f, ctx.beta, n)
        if m > N + 1:
            return out
        u0, u1, u2 = frac_state_vec(basis, ctx.alpha_v, m)
        v0, v1, v2 = frac_state_vec(basis, ctx.beta_v, m)
        ta0, ta1, ta2 = ctx.alpha_v
        su = sgn(u0 - ta0, u1 - ta1, u2 - ta2)
        if su == 0:
            _deg(m, "u vs alpha")
        tb0, tb1, tb2 = ctx.beta_v
        sv = sgn(v0 - tb0, v1 - tb1, v2 - tb2)
        if sv == 0:
            _deg(m, "v vs beta")
        if sv > 0:
            raise InternalInvariantViolation(
                f"term {m} of the beta sequence fails its own membership test"
            )
        if su > 0:
            bt = m
        else:
            th0, th1, th2 = ctx.half_beta_v
            sh = sgn(v0 - th0, v1 - th1, v2 - th2)
            if sh == 0:
                _deg(m, "v vs beta/2")
            bt = m + 1 if sh < 0 else m - 1
        if fault_btilde is not None and n == fault_btilde:
            bt += 1
        out.append((m, bt))
        n += 1


def alg1_marks(
    ctx: TripleContext, N: int, fault_btilde: int | None = None
) -> tuple[bytearray, int | None]:
    """Labels 1..N generated by the term-side algorithm (1=A, 2=B, 3=C).

    The A and B streams are produced rank-by-rank from the term formulas and
    the perturbation cases; everything unmarked is the complement sequence.
    Returns the label array and the first index where the A and B streams
    collide (None when they are disjoint, as they provably are for valid
    triples without fault injection).
    """
    marks = bytearray(N + 1)
    collision = None
    for t in terms_upto(ctx, "alpha", N):
        marks[t] = 1
    for _, bt in btilde_stream(ctx, N, fault_btilde):
        if 1 <= bt <= N:
            if marks[bt] and collision is None:
                collision = bt
            marks[bt] = 2
    for n in range(1, N + 1):
        if marks[n] == 0:
            marks[n] = 3
    return marks, collision


def quota_scan(ctx: TripleContext, N: int, limit: int = 16) -> list[tuple]:
    """Quota violations ``(sequence, n, count, floor_nd, ceil_nd)`` up to N."""
    sgn = ctx.sign
    den = ctx.den
    av = ctx.alpha_v
    bv = ctx.beta_v
    gv = ctx.gamma_v
    basis = ctx.basis
    # plain fractional parts {n d} driving floor(n d)
    fa = frac_state_vec(basis, av, 1, plus_half=False)
    fb = frac_state_vec(basis, bv, 1, plus_half=False)
    fc = frac_state_vec(basis, gv, 1, plus_half=False)
    qa = qb = qc = 0
    ca = cb = cc = 0
    out = []
    lab = labels_upto(ctx, N)
    for n in range(1, N + 1):
        label = lab[n]
        if label == 1:
            ca += 1
        elif label == 2:
            cb += 1
        else:
            cc += 1
        if ca != qa and ca != qa + 1:
            out.append(("alpha", n, ca, qa, qa + 1))
        if cb != qb and cb != qb + 1:
            out.append(("beta", n, cb, qb, qb + 1))
        if cc != qc and cc != qc + 1:
            out.append(("gamma", n, cc, qc, qc + 1))
        if len(out) >= limit:
            return out
        a0 = fa[0] + av[0]
        a1 = fa[1] + av[1]
        a2 = fa[2] + av[2]
        if sgn(a0 - den, a1, a2) > 0:
            fa = (a0 - den, a1, a2)
            qa += 1
        else:
            fa = (a0, a1, a2)
        a0 = fb[0] + bv[0]
        a1 = fb[1] + bv[1]
        a2 = fb[2] + bv[2]
        if sgn(a0 - den, a1, a2) > 0:
            fb = (a0 - den, a1, a2)
            qb += 1
        else:
            fb = (a0, a1, a2)
        a0 = fc[0] + gv[0]
        a1 = fc[1] + gv[1]
        a2 = fc[2] + gv[2]
        if sgn(a0 - den, a1, a2) > 0:
            fc = (a0 - den, a1, a2)
            qc += 1
        else:
            fc = (a0, a1, a2)
    return out


_COUNTER_KEYS = (
    "eb_m", "eb_z", "eb_p",
    "eg_m", "eg_z", "eg_p",
    "bp_m", "bp_z", "bp_p",
    "cp_m", "cp_z", "cp_p",
    "misplaced",
)


def density_scan_exact(ctx: TripleContext, lo: int, hi: int) -> dict[str, int]:
    """Exact error/perturbation counters over indices n in [lo, hi]."""
    c = dict.fromkeys(_COUNTER_KEYS, 0)
    sgn = ctx.sign
    den = ctx.den
    av = ctx.alpha_v
    bv = ctx.beta_v
    gv = ctx.gamma_v
    ta = ctx.alpha_v
    tb = ctx.beta_v
    tg = ctx.gamma_v
    t2a = ctx.two_alpha_v
    t1a = ctx.one_m_alpha_v
    thb = ctx.half_beta_v
    t3hb = ctx.three_half_beta_v
    t1hb = ctx.one_m_half_beta_v
    th = ctx.half_v
    t32 = ctx.three_half_v
    t32g = ctx.three_half_m_gamma_v
    basis = ctx.basis
    u = frac_state_vec(basis, av, lo)
    v = frac_state_vec(basis, bv, lo)
    w = frac_state_vec(basis, gv, lo)
    for n in range(lo, hi + 1):
        u0, u1, u2 = u
        v0, v1, v2 = v
        s = sgn(u0 - ta[0], u1 - ta[1], u2 - ta[2])
        if s == 0:
            _deg(n, "u vs alpha")
        in_wa = s < 0
        s = sgn(v0 - tb[0], v1 - tb[1], v2 - tb[2])
        if s == 0:
            _deg(n, "v vs beta")
        in_wb = s < 0
        s = sgn(w[0] - tg[0], w[1] - tg[1], w[2] - tg[2])
        if s == 0:
            _deg(n, "w vs gamma")
        in_wc = s < 0

        # label
        if in_wa:
            label = 1
        elif in_wb:
            label = 2
        else:
            label = 3
            s = sgn(u0 - t1a[0], u1 - t1a[1], u2 - t1a[2])
            if s == 0:
                _deg(n, "u vs 1-alpha")
            if s > 0:
                s = sgn(v0 - t1hb[0], v1 - t1hb[1], v2 - t1hb[2])
                if s == 0:
                    _deg(n, "v vs 1-beta/2")
                if s > 0:
                    label = 2
            if label == 3:
                s = sgn(u0 - t2a[0], u1 - t2a[1], u2 - t2a[2])
                if s == 0:
                    _deg(n, "u vs 2*alpha")
                if s < 0:
                    s = sgn(v0 - t3hb[0], v1 - t3hb[1], v2 - t3hb[2])
                    if s == 0:
                        _deg(n, "v vs 3*beta/2")
                    if s < 0:
                        label = 2

        # counting errors
        e_beta = 0
        if in_wa:
            s = sgn(v0 - thb[0], v1 - thb[1], v2 - thb[2])
            if s == 0:
                _deg(n, "v vs beta/2")
            if s < 0:
                e_beta = -1
        elif not in_wb:
            s = sgn(u0 - t1a[0], u1 - t1a[1], u2 - t1a[2])
            if s == 0:
                _deg(n, "u vs 1-alpha")
            if s > 0:
                s = sgn(v0 - t1hb[0], v1 - t1hb[1], v2 - t1hb[2])
                if s == 0:
                    _deg(n, "v vs 1-beta/2")
                if s > 0:
                    e_beta = 1
        s0 = u0 + v0
        s1 = u1 + v1
        s2 = u2 + v2
        s = sgn(s0 - t32[0], s1 - t32[1], s2 - t32[2])
        if s == 0:
            _deg(n, "u+v vs 3/2")
        s_hi = s > 0
        if s_hi:
            e_gamma = 1 if e_beta != 1 else 0
        else:
            s = sgn(s0 - th[0], s1 - th[1], s2 - th[2])
            if s == 0:
                _deg(n, "u+v vs 1/2")
            e_gamma = (-1 if e_beta != -1 else 0) if s < 0 else 0

        if e_beta < 0:
            c["eb_m"] += 1
        elif e_beta > 0:
            c["eb_p"] += 1
        else:
            c["eb_z"] += 1
        if e_gamma < 0:
            c["eg_m"] += 1
        elif e_gamma > 0:
            c["eg_p"] += 1
        else:
            c["eg_z"] += 1

        # term perturbations, classified at members
        if in_wb:
            if not in_wa:
                c["bp_z"] += 1
            else:
                s = sgn(v0 - thb[0], v1 - thb[1], v2 - thb[2])
                if s == 0:
                    _deg(n, "v vs beta/2")
                if s < 0:
                    c["bp_m"] += 1
                else:
                    c["bp_p"] += 1
        if label == 3:
            if s_hi:
                c["cp_p"] += 1
            else:
                s = sgn(s0 - t32g[0], s1 - t32g[1], s2 - t32g[2])
                if s == 0:
                    _deg(n, "u+v vs 3/2-gamma")
                if s < 0:
                    c["cp_m"] += 1
                else:
                    c["cp_z"] += 1

        # misplaced integers: members of an ideal sequence not carrying its
        # label; an integer misplaced from both sequences contributes twice,
        # matching the sum-of-densities definition of the aggregate.
        if in_wb and label != 2:
            c["misplaced"] += 1
        if in_wc and label != 3:
            c["misplaced"] += 1

        u = _step(ctx, u, av, n + 1, "u wrap")
        v = _step(ctx, v, bv, n + 1, "v wrap")
        w = _step(ctx, w, gv, n + 1, "w wrap")
    return c


def density_scan_fast(ctx: TripleContext, lo: int, hi: int) -> dict[str, int]:
    """Float-path twin of :func:`density_scan_exact` with exact fallback.

    Comparison margins inside the guard band, and states landing within the
    band of a wrap boundary, escalate that single index to the exact
    classifier, so the resulting counters equal the exact scan's.
    """
    c = dict.fromkeys(_COUNTER_KEYS, 0)
    band = BAND
    alpha_f = ctx.alpha_f
    beta_f = ctx.beta_f
    gamma_f = ctx.gamma_f
    t2a = ctx.two_alpha_f
    t1a = ctx.one_m_alpha_f
    thb = ctx.half_beta_f
    t3hb = ctx.three_half_beta_f
    t1hb = ctx.one_m_half_beta_f
    t32g = ctx.three_half_m_gamma_f
    basis = ctx.basis
    af = basis.accurate_float
    u = v = w = 0.0
    next_anchor = lo

    for n in range(lo, hi + 1):
        if n == next_anchor:
            u = af(frac_state_vec(basis, ctx.alpha_v, n))
            v = af(frac_state_vec(basis, ctx.beta_v, n))
            w = af(frac_state_vec(basis, ctx.gamma_v, n))
            next_anchor = n + _ANCHOR

        exactify = (
            u < band or u > 1.0 - band
            or v < band or v > 1.0 - band
            or w < band or w > 1.0 - band
        )
        label = e_beta = e_gamma = 0
        in_wa = in_wb = in_wc = False
        if not exactify:
            m = u - alpha_f
            if -band < m < band:
                exactify = True
            else:
                in_wa = m < 0
        if not exactify:
            m = v - beta_f
            if -band < m < band:
                exactify = True
            else:
                in_wb = m < 0
        if not exactify:
            m = w - gamma_f
            if -band < m < band:
                exactify = True
            else:
                in_wc = m < 0
        if not exactify:
            lab_done = False
            if in_wa:
                label = 1
                lab_done = True
            elif in_wb:
                label = 2
                lab_done = True
            if not lab_done:
                label = 3
                m = u - t1a
                if -band < m < band:
                    exactify = True
                elif m > 0:
                    m2 = v - t1hb
                    if -band < m2 < band:
                        exactify = True
                    elif m2 > 0:
                        label = 2
                if not exactify and label == 3:
                    m = u - t2a
                    if -band < m < band:
                        exactify = True
                    elif m < 0:
                        m2 = v - t3hb
                        if -band < m2 < band:
                            exactify = True
                        elif m2 < 0:
                            label = 2
        if not exactify:
            # counting errors
            if in_wa:
                m = v - thb
                if -band < m < band:
                    exactify = True
                elif m < 0:
                    e_beta = -1
            elif not in_wb:
                m = u - t1a
                if m > band:
                    m2 = v - t1hb
                    if -band < m2 < band:
                        exactify = True
                    elif m2 > 0:
                        e_beta = 1
                elif -band < m < band:
                    exactify = True
        s_hi = False
        if not exactify:
            s = u + v
            m = s - 1.5
            if -band < m < band:
                exactify = True
            elif m > 0:
                s_hi = True
                e_gamma = 1 if e_beta != 1 else 0
            else:
                m = s - 0.5
                if -band < m < band:
                    exactify = True
                elif m < 0:
                    e_gamma = -1 if e_beta != -1 else 0

        b_perturb = None
        c_perturb = None
        if not exactify:
            if in_wb:
                if not in_wa:
                    b_perturb = 0
                else:
                    m = v - thb
                    if -band < m < band:
                        exactify = True
                    else:
                        b_perturb = -1 if m < 0 else 1
        if not exactify and label == 3:
            if s_hi:
                c_perturb = 1
            else:
                m = (u + v) - t32g
                if -band < m < band:
                    exactify = True
                else:
                    c_perturb = -1 if m < 0 else 0

        if exactify:
            facts = classify_point(ctx, n)
            label = facts["label"]
            e_beta = facts["e_beta"]
            e_gamma = facts["e_gamma"]
            in_wb = facts["in_wb"]
            in_wc = facts["in_wc"]
            b_perturb = facts["b_perturb"]
            c_perturb = facts["c_perturb"]
            u = af(facts["u"])
            v = af(facts["v"])
            w = af(facts["w"])

        if e_beta < 0:
            c["eb_m"] += 1
        elif e_beta > 0:
            c["eb_p"] += 1
        else:
            c["eb_z"] += 1
        if e_gamma < 0:
            c["eg_m"] += 1
        elif e_gamma > 0:
            c["eg_p"] += 1
        else:
            c["eg_z"] += 1
        if b_perturb is not None:
            if b_perturb < 0:
                c["bp_m"] += 1
            elif b_perturb > 0:
                c["bp_p"] += 1
            else:
                c["bp_z"] += 1
        if c_perturb is not None:
            if c_perturb < 0:
                c["cp_m"] += 1
            elif c_perturb > 0:
                c["cp_p"] += 1
            else:
                c["cp_z"] += 1
        if in_wb and label != 2:
            c["misplaced"] += 1
        if in_wc and label != 3:
            c["misplaced"] += 1

        u += alpha_f
        if u >= 1.0:
            u -= 1.0
        v += beta_f
        if v >= 1.0:
            v -= 1.0
        w += gamma_f
        if w >= 1.0:
            w -= 1.0
    return c


def merge_counters(parts: list[dict[str, int]]) -> dict[str, int]:
    total = dict.fromkeys(_COUNTER_KEYS, 0)
    for p in parts:
        for k in _COUNTER_KEYS:
            total[k] += p[k]
    return total


def dual_path_scan(ctx: TripleContext, N: int) -> tuple[str, int] | None:
    """First disagreement between case tables and counting-difference paths.

    Checks, for every n <= N: the counting-error tables against the literal
    differences of running counts, and the value sets {-1, 0, 1}.
    """
    lab = labels_upto(ctx, N)
    st = _States(ctx, 1)
    sgn = ctx.sign
    cnt_b_label = 0
    cnt_c_label = 0
    cnt_wb = 0
    cnt_wc = 0
    for n in range(1, N + 1):
        # independent membership counts from the incremental states
        v = st.v
        w = st.w
        s = sgn(v[0] - ctx.beta_v[0], v[1] - ctx.beta_v[1], v[2] - ctx.beta_v[2])
        if s == 0:
            _deg(n, "v vs beta")
        if s < 0:
            cnt_wb += 1
        s = sgn(w[0] - ctx.gamma_v[0], w[1] - ctx.gamma_v[1], w[2] - ctx.gamma_v[2])
        if s == 0:
            _deg(n, "w vs gamma")
        in_wc = s < 0
        if in_wc:
            cnt_wc += 1
        if lab[n] == 2:
            cnt_b_label += 1
        elif lab[n] == 3:
            cnt_c_label += 1
        pf = classify_point(ctx, n)
        if pf["e_beta"] != cnt_b_label - cnt_wb:
            return ("e_beta", n)
        if pf["e_gamma"] != cnt_c_label - cnt_wc:
            return ("e_gamma", n)
        if pf["e_gamma"] == -1 and not in_wc:
            return ("e_gamma_membership", n)
        if pf["e_gamma"] == 1 and lab[n] != 3:
            return ("e_gamma_label", n)
        st.advance()
    return None


def counting_sum_scan(ctx: TripleContext, N: int) -> int | None:
    """First n where the three-way counting-sum identity fails, else None."""
    sgn = ctx.sign
    basis = ctx.basis
    st = _States(ctx, 1)
    cnt_a = cnt_b = cnt_c = 0
    for n in range(1, N + 1):
        u, v, w = st.u, st.v, st.w
        s = sgn(u[0] - ctx.alpha_v[0], u[1] - ctx.alpha_v[1], u[2] - ctx.alpha_v[2])
        if s == 0:
            _deg(n, "u vs alpha")
        if s < 0:
            cnt_a += 1
        s = sgn(v[0] - ctx.beta_v[0], v[1] - ctx.beta_v[1], v[2] - ctx.beta_v[2])
        if s == 0:
            _deg(n, "v vs beta")
        if s < 0:
            cnt_b += 1
        s = sgn(w[0] - ctx.gamma_v[0], w[1] - ctx.gamma_v[1], w[2] - ctx.gamma_v[2])
        if s == 0:
            _deg(n, "w vs gamma")
        if s < 0:
            cnt_c += 1
        s0 = u[0] + v[0]
        s1 = u[1] + v[1]
        s2 = u[2] + v[2]
        s = sgn(s0 - ctx.one_v[0], s1, s2)
        if s == 0:
            _deg(n, "u+v vs 1")
        delta1 = 1 if s > 0 else 0
        s = sgn(s0 - ctx.half_v[0], s1, s2)
        if s == 0:
            _deg(n, "u+v vs 1/2")
        if s < 0:
            delta2 = 1
        else:
            s = sgn(s0 - ctx.one_v[0], s1, s2)
            if s < 0:
                delta2 = 0
            else:
                s = sgn(s0 - ctx.three_half_v[0], s1, s2)
                if s == 0:
                    _deg(n, "u+v vs 3/2")
                delta2 = 1 if s < 0 else 0
        if cnt_a + cnt_b + cnt_c != n - delta1 + delta2:
            return n
        st.advance()
    return None


def deviation_scan(alpha: QuadExpr, N: int):
    """Exact extremes of u_n = {n*alpha + 1/2} over n <= N.

    Returns ``(min_u, argmin, max_u, argmax)`` as QuadExprs and indices; the
    deviation |count(n) - n*alpha| equals |1/2 - u_n|, so these extremes carry
    the exact supremum.
    """
    basis = basis_for([alpha])
    av = basis.vec_of(alpha)
    den = basis.den
    sgn = basis.sign
    u = frac_state_vec(basis, av, 1)
    min_u, min_at = u, 1
    max_u, max_at = u, 1
    for n in range(2, N + 1):
        a0 = u[0] + av[0]
        a1 = u[1] + av[1]
        a2 = u[2] + av[2]
        s = sgn(a0 - den, a1, a2)
        if s == 0:
            _deg(n, "u wrap")
        if s > 0:
            a0 -= den
        u = (a0, a1, a2)
        if sgn(a0 - min_u[0], a1 - min_u[1], a2 - min_u[2]) < 0:
            min_u, min_at = u, n
        elif sgn(a0 - max_u[0], a1 - max_u[1], a2 - max_u[2]) > 0:
            max_u, max_at = u, n
    return basis.to_qe(min_u), min_at, basis.to_qe(max_u), max_at


def deviation_in_bound_scan(alpha: QuadExpr, N: int) -> int | None:
    """First n <= N where |floor(n*alpha+1/2) - n*alpha| >= 1/2, else None.

    Equivalent to u_n leaving the open interval (0, 1); each endpoint is an
    exact sign test.
    """
    basis = basis_for([alpha])
    av = basis.vec_of(alpha)
    den = basis.den
    sgn = basis.sign
    u = frac_state_vec(basis, av, 1)
    for n in range(1, N + 1):
        if sgn(*u) <= 0:
            return n
        if sgn(u[0] - den, u[1], u[2]) >= 0:
            return n
        a0 = u[0] + av[0]
        a1 = u[1] + av[1]
        a2 = u[2] + av[2]
        s = sgn(a0 - den, a1, a2)
        if s == 0:
            _deg(n + 1, "u wrap")
        if s > 0:
            a0 -= den
        u = (a0, a1, a2)
    return None


def two_part_scan(alpha: QuadExpr, N: int) -> int | None:
    """First n <= N not covered exactly once by W_alpha and W_(1-alpha)."""
    comp = QuadExpr(1) - alpha
    basis = basis_for([alpha])
    av = basis.vec_of(alpha)
    cv = basis.vec_of(comp)
    den = basis.den
    sgn = basis.sign
    u = frac_state_vec(basis, av, 1)
    u2 = frac_state_vec(basis, cv, 1)
    for n in range(1, N + 1):
        s = sgn(u[0] - av[0], u[1] - av[1], u[2] - av[2])
        if s == 0:
            _deg(n, "u vs alpha")
        in_a = s < 0
        s = sgn(u2[0] - cv[0], u2[1] - cv[1], u2[2] - cv[2])
        if s == 0:
            _deg(n, "u' vs 1-alpha")
        in_b = s < 0
        if in_a == in_b:
            return n
        a0 = u[0] + av[0]
        a1 = u[1] + av[1]
        a2 = u[2] + av[2]
        s = sgn(a0 - den, a1, a2)
        if s == 0:
            _deg(n + 1, "u wrap")
        if s > 0:
            a0 -= den
        u = (a0, a1, a2)
        a0 = u2[0] + cv[0]
        a1 = u2[1] + cv[1]
        a2 = u2[2] + cv[2]
        s = sgn(a0 - den, a1, a2)
        if s == 0:
            _deg(n + 1, "u' wrap")
        if s > 0:
            a0 -= den
        u2 = (a0, a1, a2)
    return None


def witness_case2_scan(ctx: TripleContext, M: int) -> int | None:
    """Smallest m <= M with m in W_alpha and W_beta, m+1 in W_gamma, m+2 in W_alpha."""
    basis = ctx.basis
    sgn = ctx.sign
    den = ctx.den
    av = ctx.alpha_v
    bv = ctx.beta_v
    gv = ctx.gamma_v
    u = frac_state_vec(basis, av, 1)
    v = frac_state_vec(basis, bv, 1)
    w1 = frac_state_vec(basis, gv, 2)   # w at m+1
    ua2 = frac_state_vec(basis, av, 3)  # u at m+2
    for m in range(1, M + 1):
        s = sgn(u[0] - av[0], u[1] - av[1], u[2] - av[2])
        if s == 0:
            _deg(m, "u vs alpha")
        if s < 0:
            s = sgn(v[0] - bv[0], v[1] - bv[1], v[2] - bv[2])
            if s == 0:
                _deg(m, "v vs beta")
            if s < 0:
                s = sgn(w1[0] - gv[0], w1[1] - gv[1], w1[2] - gv[2])
                if s == 0:
                    _deg(m + 1, "w vs gamma")
                if s < 0:
                    s = sgn(ua2[0] - av[0], ua2[1] - av[1], ua2[2] - av[2])
                    if s == 0:
                        _deg(m + 2, "u vs alpha")
                    if s < 0:
                        return m
        u = _step(ctx, u, av, m + 1, "u wrap")
        v = _step(ctx, v, bv, m + 1, "v wrap")
        w1 = _step(ctx, w1, gv, m + 2, "w wrap")
        ua2 = _step(ctx, ua2, av, m + 3, "u+2 wrap")
    return None


def exclusivity_scan(ctx: TripleContext, N: int) -> tuple[int, str] | None:
    """First n <= N where the assignment rules fail to be mutually exclusive.

    Evaluates the A condition and all three B disjuncts independently (no
    short-circuiting) and reports any overlap; None when the rules partition
    cleanly, as they provably do when alpha < 1/2 and beta < 1/2.
    """
    sgn = ctx.sign
    basis = ctx.basis
    st = _States(ctx, 1)
    for n in range(1, N + 1):
        u = st.u
        v = st.v

        def lt(sv, tv, what):
            s = sgn(sv[0] - tv[0], sv[1] - tv[1], sv[2] - tv[2])
            if s == 0:
                _deg(n, what)
            return s < 0

        cond_a = lt(u, ctx.alpha_v, "u vs alpha")
        b1 = (not cond_a) and lt(v, ctx.beta_v, "v vs beta")
        b2 = (not lt(u, ctx.one_m_alpha_v, "u vs 1-alpha")) and (
            not lt(v, ctx.one_m_half_beta_v, "v vs 1-beta/2")
        )
        b3 = (
            (not cond_a)
            and lt(u, ctx.two_alpha_v, "u vs 2*alpha")
            and (not lt(v, ctx.beta_v, "v vs beta"))
            and lt(v, ctx.three_half_beta_v, "v vs 3*beta/2")
        )
        if cond_a and (b1 or b2 or b3):
            return (n, "A overlaps a B rule")
        if int(b1) + int(b2) + int(b3) > 1:
            return (n, "two B rules overlap")
        st.advance()
    return None


def uv_grid_counts(ctx: TripleContext, N: int, grid: int) -> list[list[int]]:
    """Cell counts of the pairs (u_n, v_n) on a grid x grid lattice, n <= N.

    Bucketing runs in floats; any coordinate within the guard band of a grid
    line is resolved by an exact floor, so cell membership against the exact
    rational box boundaries is never wrong.
    """
    counts = [[0] * grid for _ in range(grid)]
    basis = ctx.basis
    af = basis.accurate_float
    band = BAND * grid
    u = v = 0.0
    next_anchor = 1
    for n in range(1, N + 1):
        if n == next_anchor:
            u = af(frac_state_vec(basis, ctx.alpha_v, n))
            v = af(frac_state_vec(basis, ctx.beta_v, n))
            next_anchor = n + _ANCHOR
        gu = u * grid
        i = int(gu)
        if abs(gu - round(gu)) < band:
            i = (basis.to_qe(frac_state_vec(basis, ctx.alpha_v, n)) * grid).floor()
        gv = v * grid
        j = int(gv)
        if abs(gv - round(gv)) < band:
            j = (basis.to_qe(frac_state_vec(basis, ctx.beta_v, n)) * grid).floor()
        counts[min(i, grid - 1)][min(j, grid - 1)] += 1
        u += ctx.alpha_f
        if u >= 1.0:
            u -= 1.0
        v += ctx.beta_f
        if v >= 1.0:
            v -= 1.0
    return counts


def membership_flags(ctx: TripleContext, which: str, N: int) -> bytearray:
    """Webster-sequence membership flags for m = 1..N of the chosen density."""
    dvec = getattr(ctx, which + "_v")
    basis = ctx.basis
    sgn = ctx.sign
    den = ctx.den
    st = frac_state_vec(basis, dvec, 1)
    out = bytearray(N + 1)
    for m in range(1, N + 1):
        s = sgn(st[0] - dvec[0], st[1] - dvec[1], st[2] - dvec[2])
        if s == 0:
            _deg(m, f"state vs {which}")
        if s < 0:
            out[m] = 1
        a0 = st[0] + dvec[0]
        a1 = st[1] + dvec[1]
        a2 = st[2] + dvec[2]
        s = sgn(a0 - den, a1, a2)
        if s == 0:
            _deg(m + 1, "state wrap")
        if s > 0:
            a0 -= den
        st = (a0, a1, a2)
    return out
