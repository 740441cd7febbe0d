"""Exact quadratic-expression arithmetic against independent oracles.

The independent oracle throughout is mpmath at 50-200 decimal digits, which
shares no code with the interval machinery under test.
"""

import random
from fractions import Fraction

import mpmath as mp
import pytest

from websterpart.errors import QuadExprParseError, RadicandOverflow
from websterpart.qfield import (
    QuadExpr,
    ceil_div,
    floor_div,
    format_quadexpr,
    parse_quadexpr,
)

RADICANDS = (2, 3, 5, 6, 7)


def mp_value(x: QuadExpr, dps: int = 50):
    with mp.workdps(dps):
        acc = mp.mpf(x.p.numerator) / x.p.denominator
        for q, d in x.terms:
            acc += mp.mpf(q.numerator) / q.denominator * mp.sqrt(d)
        return acc


def random_expr(rng: random.Random, rads=RADICANDS, max_den=60) -> QuadExpr:
    p = Fraction(rng.randint(-200, 200), rng.randint(1, max_den))
    terms = []
    for d in rng.sample(rads, rng.randint(0, 2)):
        terms.append((Fraction(rng.randint(-200, 200), rng.randint(1, max_den)), d))
    return QuadExpr(p, terms)


# ---------------------------------------------------------------------------
# addition / canonical form
# ---------------------------------------------------------------------------

def test_add_cancellation():
    x = QuadExpr(Fraction(1, 2), ((Fraction(1), 2),))
    y = QuadExpr(Fraction(1, 2), ((Fraction(-1), 2),))
    assert x + y == QuadExpr(1)


def test_add_disjoint_radicands():
    x = QuadExpr(0, ((Fraction(1, 4), 2),))
    y = QuadExpr(0, ((Fraction(1, 8), 3),))
    z = x + y
    assert z.p == 0
    assert z.terms == ((Fraction(1, 4), 2), (Fraction(1, 8), 3))


def test_add_like_radicand_merge():
    x = QuadExpr(1, ((Fraction(2), 2),))
    y = QuadExpr(0, ((Fraction(3), 2),))
    assert x + y == QuadExpr(1, ((Fraction(5), 2),))


def test_add_radicand_overflow():
    x = QuadExpr(0, ((1, 2), (1, 3)))
    with pytest.raises(RadicandOverflow):
        x + QuadExpr.sqrt(5)


def test_canonicalization_idempotent():
    rng = random.Random(101)
    for _ in range(300):
        x = random_expr(rng)
        again = QuadExpr(x.p, x.terms)
        assert again == x
        assert again.terms == x.terms


def test_square_part_extraction():
    assert QuadExpr.sqrt(8) == QuadExpr(0, ((Fraction(2), 2),))
    assert QuadExpr.sqrt(4) == QuadExpr(2)
    assert QuadExpr.sqrt(12, Fraction(1, 2)) == QuadExpr.sqrt(3)
    assert QuadExpr.sqrt(1) == QuadExpr(1)
    assert QuadExpr.sqrt(0) == QuadExpr(0)


def test_multiplication_cases():
    a = QuadExpr.sqrt(2, Fraction(1, 4))
    b = QuadExpr.sqrt(3, Fraction(1, 8))
    assert a * b == QuadExpr.sqrt(6, Fraction(1, 32))
    assert a * a == QuadExpr(Fraction(1, 8))
    assert (a + 1) * (a - 1) == QuadExpr(Fraction(1, 8) - 1)
    # sqrt(2)*sqrt(6) = 2*sqrt(3): stays within two radicands
    assert QuadExpr.sqrt(2) * (QuadExpr.sqrt(6) + 1) == QuadExpr.sqrt(3, 2) + QuadExpr.sqrt(2)
    with pytest.raises(RadicandOverflow):
        (QuadExpr.sqrt(2) + QuadExpr.sqrt(3)) * (QuadExpr.sqrt(5) + 1)


def test_mul_matches_oracle():
    rng = random.Random(7)
    with mp.workdps(60):
        for _ in range(200):
            x = random_expr(rng, rads=(2, 3))
            y = random_expr(rng, rads=(2, 3))
            z = x * y
            assert abs(mp_value(z, 60) - mp_value(x, 60) * mp_value(y, 60)) < mp.mpf(10) ** -40


# ---------------------------------------------------------------------------
# sign
# ---------------------------------------------------------------------------

def test_sign_examples():
    assert QuadExpr(0, ((Fraction(0), 2),)).sign() == 0
    assert (QuadExpr(-1) + QuadExpr.sqrt(2)).sign() == 1
    # squaring check: (7/10)^2 = 49/100 < 50/100 = (sqrt(2)/2)^2
    assert (QuadExpr(Fraction(7, 10)) - QuadExpr.sqrt(2, Fraction(1, 2))).sign() == -1


def test_sign_against_200_digit_interval():
    """Spec-scale randomized audit: 1e5 expressions, radicands from {2,3,5,6,7}."""
    rng = random.Random(20240811)
    with mp.workdps(200):
        sqrts = {d: mp.sqrt(d) for d in RADICANDS}
        for _ in range(100_000):
            x = random_expr(rng)
            acc = mp.mpf(x.p.numerator) / x.p.denominator
            for q, d in x.terms:
                acc += mp.mpf(q.numerator) / q.denominator * sqrts[d]
            expected = 1 if acc > 0 else (-1 if acc < 0 else 0)
            assert x.sign() == expected


def test_tiny_sign_resolved():
    # 1393/985 is a continued-fraction convergent of sqrt(2): difference ~5e-7
    x = QuadExpr(Fraction(1393, 985)) - QuadExpr.sqrt(2)
    assert x.sign() == (1 if 1393 * 1393 > 2 * 985 * 985 else -1)
    big = QuadExpr(Fraction(10**40 + 1, 10**40)) - QuadExpr(1)
    assert big.sign() == 1


# ---------------------------------------------------------------------------
# floor / frac
# ---------------------------------------------------------------------------

def test_floor_examples():
    assert QuadExpr.sqrt(2).floor() == 1
    assert (-QuadExpr.sqrt(2)).floor() == -2
    assert (QuadExpr.sqrt(2, Fraction(10, 4)) + Fraction(1, 2)).floor() == 4


def test_floor_rational_and_huge():
    assert QuadExpr(Fraction(7, 2)).floor() == 3
    assert QuadExpr(Fraction(-7, 2)).floor() == -4
    huge = QuadExpr(Fraction(10**30)) + QuadExpr.sqrt(2)
    assert huge.floor() == 10**30 + 1


def test_floor_round_trip_interval():
    rng = random.Random(55)
    for _ in range(500):
        x = random_expr(rng)
        f = x.floor()
        lo, hi = x.interval(128)
        assert Fraction(f) <= lo or f <= lo  # floor at or below the enclosure
        assert lo >= f
        assert hi < f + 1


def test_frac_invariants():
    rng = random.Random(77)
    for _ in range(300):
        x = random_expr(rng)
        fr = x.frac()
        assert fr.sign() >= 0
        assert (fr - 1).sign() < 0
        n = rng.randint(-50, 50)
        assert (x + n).frac() == fr
        if not x.is_integer():
            assert (-x).frac() == QuadExpr(1) - fr


def test_floor_addition_identity():
    # floor(x+y) = floor(x) + floor(y) + [frac(x)+frac(y) >= 1]
    rng = random.Random(99)
    for _ in range(300):
        x = random_expr(rng, rads=(2, 3))
        y = random_expr(rng, rads=(2, 3))
        carry = 1 if (x.frac() + y.frac() - 1).sign() >= 0 else 0
        assert (x + y).floor() == x.floor() + y.floor() + carry


# ---------------------------------------------------------------------------
# quotient floors
# ---------------------------------------------------------------------------

def test_floor_div_against_oracle():
    rng = random.Random(31)
    with mp.workdps(60):
        for _ in range(300):
            den = random_expr(rng, rads=(2, 3))
            if den.sign() <= 0:
                den = -den
            if den.is_zero() or den.sign() == 0:
                continue
            num = random_expr(rng, rads=(2, 3))
            got = floor_div(num, den)
            ratio = mp_value(num, 60) / mp_value(den, 60)
            assert got == int(mp.floor(ratio))
            assert ceil_div(num, den) == int(mp.ceil(ratio))


def test_floor_div_zero_numerator():
    assert floor_div(0, QuadExpr.sqrt(2)) == 0
    assert floor_div(Fraction(0), QuadExpr.sqrt(3, Fraction(1, 7))) == 0


# ---------------------------------------------------------------------------
# literals
# ---------------------------------------------------------------------------

def test_parse_examples():
    assert parse_quadexpr("3/4") == QuadExpr(Fraction(3, 4))
    assert parse_quadexpr("1/4*sqrt(2)") == QuadExpr.sqrt(2, Fraction(1, 4))
    assert parse_quadexpr(" 1/2+1/4 * sqrt( 2 ) - 1/8*sqrt(3)") == QuadExpr(
        Fraction(1, 2), ((Fraction(1, 4), 2), (Fraction(-1, 8), 3))
    )
    assert parse_quadexpr("-sqrt(2) + 1") == QuadExpr(1, ((Fraction(-1), 2),))


def test_parse_errors_carry_offset():
    with pytest.raises(QuadExprParseError) as err:
        parse_quadexpr("")
    assert err.value.offset == 0
    with pytest.raises(QuadExprParseError) as err:
        parse_quadexpr("1/0")
    assert err.value.offset == 2
    with pytest.raises(QuadExprParseError) as err:
        parse_quadexpr("1/4*sqrt(2) + + 3")
    assert err.value.offset == 14
    with pytest.raises(QuadExprParseError):
        parse_quadexpr("sqrt(x)")
    with pytest.raises(QuadExprParseError):
        parse_quadexpr("1/4*cbrt(2)")


def test_format_parse_round_trip():
    rng = random.Random(13)
    for _ in range(400):
        x = random_expr(rng)
        assert parse_quadexpr(format_quadexpr(x)) == x


def test_decimal_rendering_frozen():
    a = QuadExpr.sqrt(2, Fraction(1, 4))
    assert a.decimal(30) == "0.353553390593273762200422181052"
    g = QuadExpr(1) - a - QuadExpr.sqrt(3, Fraction(1, 8))
    assert g.decimal(30) == "0.429940258460616576108647026259"
    assert QuadExpr(Fraction(1, 4)).decimal(30) == "0.25"
    assert QuadExpr(0).decimal() == "0"
    assert (-a).decimal(10) == "-0.3535533906"


def test_comparison_operators():
    a = QuadExpr.sqrt(2, Fraction(1, 4))
    b = QuadExpr.sqrt(3, Fraction(1, 8))
    assert b < a < QuadExpr(Fraction(1, 2))
    assert a <= a
    assert QuadExpr(1) > a
    assert a != b


def test_hash_consistency():
    a1 = QuadExpr.sqrt(2, Fraction(1, 4))
    a2 = QuadExpr(0, ((Fraction(2, 8), 2),))
    assert a1 == a2
    assert hash(a1) == hash(a2)
    assert len({a1, a2}) == 1
