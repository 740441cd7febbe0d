r"""Exact arithmetic over numbers of the form p + q1*sqrt(d1) + q2*sqrt(d2).

The coefficients p, q1, q2 are arbitrary-precision rationals and the radicands
d1, d2 are distinct square-free integers >= 2.  Expressions of this shape are
closed under addition, subtraction, and rational scaling, and they admit exact
sign, floor, and fractional-part computation.  That is all the comparison
machinery the sequence-partition code needs: every strict inequality it
evaluates is decided without rounding error.

Design notes:

* Values are immutable and canonical: zero coefficients are dropped, like
  radicands merged, radicands reduced to square-free form and kept sorted.
  Canonical forms are unique because 1, sqrt(d1), sqrt(d2) are linearly
  independent over the rationals for distinct square-free d1, d2 >= 2.
* The sign algorithm tests the symbolic zero first (possible only when all
  coefficients vanish, by the independence above), then refines an exact
  rational interval enclosure with doubling precision until it excludes zero.
  Nonzero is guaranteed at that point, so the loop terminates; a hard cap of
  4096 bits raises :class:`InternalPrecisionExceeded` as a safety boundary.
* Floors use a coarse float estimate bracketed by +/-2 and verified by exact
  sign tests, falling back to interval refinement when the estimate is bad
  (e.g. for values too large for a float to resolve integers).
* Multiplication is supported because products of at most two radicals stay
  in some quadratic-expression ring; when the canonical result would need
  more than two radicands, :class:`RadicandOverflow` is raised.

The text literal format is ``"p/q"`` for rationals and
``"a/b + c/d*sqrt(D)"`` with optionally two square-root terms; whitespace is
ignored and parse errors carry the offending offset.
"""

from __future__ import annotations

import math
from decimal import Context, Decimal, ROUND_HALF_EVEN
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Union

from .errors import InternalPrecisionExceeded, QuadExprParseError, RadicandOverflow

#: Alias documenting that rationals are stdlib fractions: the numerator is an
#: arbitrary-precision integer and the denominator a positive integer with
#: gcd(numerator, denominator) = 1, which is exactly the canonical form the
#: rest of the package relies on.
Rational = Fraction

RationalLike = Union[int, Fraction]

_PRECISION_CAP = 4096
_START_BITS = 64

_MAX_RADICANDS = 2


@lru_cache(maxsize=None)
def _squarefree_split(d: int) -> tuple[int, int]:
    """Return ``(s, r)`` with ``d == s*s*r`` and ``r`` square-free."""
    if d < 0:
        raise ValueError(f"radicand must be nonnegative, got {d}")
    s, r = 1, 1
    f = 2
    rem = d
    while f * f <= rem:
        if rem % f == 0:
            e = 0
            while rem % f == 0:
                rem //= f
                e += 1
            s *= f ** (e // 2)
            if e % 2:
                r *= f
        f += 1 if f == 2 else 2
    r *= rem
    return s, r


@lru_cache(maxsize=None)
def _sqrt_enclosure(d: int, bits: int) -> int:
    """Largest integer ``s`` with ``s <= sqrt(d) * 2**bits``.

    Since d is never a perfect square here, ``s < sqrt(d)*2**bits < s+1``
    holds strictly, giving a width-1 integer enclosure.
    """
    return math.isqrt(d << (2 * bits))


class QuadExpr:
    """An immutable, canonical quadratic expression ``p + sum(q*sqrt(d))``."""

    __slots__ = ("p", "terms", "_hash")

    p: Fraction
    terms: tuple[tuple[Fraction, int], ...]

    def __init__(self, p: RationalLike = 0, terms: Iterable[tuple[RationalLike, int]] = ()):
        rat = Fraction(p)
        acc: dict[int, Fraction] = {}
        for q, d in terms:
            q = Fraction(q)
            if q == 0:
                continue
            s, r = _squarefree_split(int(d))
            if r == 1:
                rat += q * s
                continue
            acc[r] = acc.get(r, Fraction(0)) + q * s
        canon = tuple(sorted((d, q) for d, q in acc.items() if q != 0))
        if len(canon) > _MAX_RADICANDS:
            raise RadicandOverflow(
                f"expression needs {len(canon)} radicands {[d for d, _ in canon]}, at most "
                f"{_MAX_RADICANDS} supported"
            )
        object.__setattr__(self, "p", rat)
        object.__setattr__(self, "terms", tuple((q, d) for d, q in canon))
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):  # pragma: no cover - guard only
        raise AttributeError("QuadExpr is immutable")

    # ------------------------------------------------------------------
    # constructors
    # ------------------------------------------------------------------

    @classmethod
    def from_rational(cls, value: RationalLike) -> "QuadExpr":
        return cls(Fraction(value))

    @classmethod
    def sqrt(cls, d: int, coeff: RationalLike = 1) -> "QuadExpr":
        """The value ``coeff * sqrt(d)`` (d reduced to square-free form)."""
        return cls(0, ((Fraction(coeff), d),))

    # ------------------------------------------------------------------
    # structure predicates
    # ------------------------------------------------------------------

    def is_rational(self) -> bool:
        return not self.terms

    def is_zero(self) -> bool:
        return not self.terms and self.p == 0

    def is_integer(self) -> bool:
        return not self.terms and self.p.denominator == 1

    # ------------------------------------------------------------------
    # arithmetic
    # ------------------------------------------------------------------

    def _coerce(self, other) -> "QuadExpr | None":
        if isinstance(other, QuadExpr):
            return other
        if isinstance(other, (int, Fraction)):
            return QuadExpr(other)
        return None

    def __add__(self, other) -> "QuadExpr":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadExpr(self.p + o.p, self.terms + o.terms)

    __radd__ = __add__

    def __sub__(self, other) -> "QuadExpr":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadExpr(self.p - o.p, self.terms + tuple((-q, d) for q, d in o.terms))

    def __rsub__(self, other) -> "QuadExpr":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __neg__(self) -> "QuadExpr":
        return QuadExpr(-self.p, tuple((-q, d) for q, d in self.terms))

    def __mul__(self, other) -> "QuadExpr":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if not o.terms:
            c = o.p
            return QuadExpr(self.p * c, tuple((q * c, d) for q, d in self.terms))
        if not self.terms:
            return o * self.p
        prod_terms: list[tuple[Fraction, int]] = []
        rational = self.p * o.p
        prod_terms.extend((q * o.p, d) for q, d in self.terms)
        prod_terms.extend((q * self.p, d) for q, d in o.terms)
        for q1, d1 in self.terms:
            for q2, d2 in o.terms:
                if d1 == d2:
                    rational += q1 * q2 * d1
                else:
                    prod_terms.append((q1 * q2, d1 * d2))
        return QuadExpr(rational, prod_terms)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "QuadExpr":
        # Division is deliberately restricted to rational divisors: a general
        # reciprocal of a two-radicand value leaves the representable ring.
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / Fraction(other))
        return NotImplemented

    # ------------------------------------------------------------------
    # exact decision procedures
    # ------------------------------------------------------------------

    def interval(self, bits: int) -> tuple[Fraction, Fraction]:
        """An exact rational enclosure ``lo <= value <= hi`` at 2**-bits width per term."""
        lo = self.p
        hi = self.p
        scale = 1 << bits
        for q, d in self.terms:
            s = _sqrt_enclosure(d, bits)
            if q >= 0:
                lo += q * Fraction(s, scale)
                hi += q * Fraction(s + 1, scale)
            else:
                lo += q * Fraction(s + 1, scale)
                hi += q * Fraction(s, scale)
        return lo, hi

    def sign(self) -> int:
        """Exact sign in {-1, 0, +1}.

        Zero is decidable symbolically: a canonical expression vanishes iff it
        has no radical terms and p == 0.
        """
        if not self.terms:
            p = self.p
            return (p > 0) - (p < 0)
        bits = _START_BITS
        while bits <= _PRECISION_CAP:
            lo, hi = self.interval(bits)
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            bits *= 2
        raise InternalPrecisionExceeded(
            f"sign of {self!r} undecided at {_PRECISION_CAP} bits"
        )

    def floor(self) -> int:
        """Greatest integer <= value."""
        if not self.terms:
            return self.p.numerator // self.p.denominator
        est = math.floor(float(self))
        for f in range(est - 2, est + 3):
            if (self - f).sign() >= 0 and (self - (f + 1)).sign() < 0:
                return f
        # Float estimate was off (huge magnitudes); interval refinement is
        # guaranteed to separate an irrational value from the integers.
        bits = _START_BITS
        while bits <= _PRECISION_CAP:
            lo, hi = self.interval(bits)
            flo = lo.numerator // lo.denominator
            fhi = hi.numerator // hi.denominator
            if flo == fhi:
                return flo
            bits *= 2
        raise InternalPrecisionExceeded(f"floor of {self!r} undecided")

    def frac(self) -> "QuadExpr":
        """Fractional part ``value - floor(value)``, exactly; lies in [0, 1)."""
        return self - self.floor()

    # ------------------------------------------------------------------
    # comparisons
    # ------------------------------------------------------------------

    def __eq__(self, other) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.p == o.p and self.terms == o.terms

    def __lt__(self, other) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).sign() < 0

    def __le__(self, other) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).sign() <= 0

    def __gt__(self, other) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).sign() > 0

    def __ge__(self, other) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).sign() >= 0

    def __hash__(self):
        h = object.__getattribute__(self, "_hash")
        if h is None:
            h = hash((self.p, self.terms))
            object.__setattr__(self, "_hash", h)
        return h

    def __reduce__(self):
        # immutability guard blocks default slot-based pickling
        return (QuadExpr, (self.p, self.terms))

    # ------------------------------------------------------------------
    # conversions and rendering
    # ------------------------------------------------------------------

    def __float__(self) -> float:
        lo, hi = self.interval(_START_BITS)
        return float((lo + hi) / 2)

    def __bool__(self) -> bool:
        return not self.is_zero()

    def decimal(self, digits: int = 30) -> str:
        """Decimal rendering at ``digits`` significant digits, round-half-even.

        The rendering is exact-driven: the enclosure is refined until both
        endpoints round to the same string, so the output is the correctly
        rounded value and is stable across runs.
        """
        ctx = Context(prec=digits, rounding=ROUND_HALF_EVEN)
        if not self.terms:
            return str(ctx.divide(Decimal(self.p.numerator), Decimal(self.p.denominator)))
        bits = 128
        while bits <= _PRECISION_CAP:
            lo, hi = self.interval(bits)
            slo = str(ctx.divide(Decimal(lo.numerator), Decimal(lo.denominator)))
            shi = str(ctx.divide(Decimal(hi.numerator), Decimal(hi.denominator)))
            if slo == shi:
                return slo
            bits *= 2
        raise InternalPrecisionExceeded(f"decimal rendering of {self!r} undecided")

    def __str__(self) -> str:
        return format_quadexpr(self)

    def __repr__(self) -> str:
        return f"QuadExpr({format_quadexpr(self)!r})"


ZERO = QuadExpr(0)
ONE = QuadExpr(1)
HALF = QuadExpr(Fraction(1, 2))


def floor_div(num: QuadExpr | RationalLike, den: QuadExpr) -> int:
    """Exact ``floor(num / den)`` for ``den > 0`` without forming the quotient.

    Reciprocals of two-radicand values are not representable in this ring, so
    the quotient floor is found by bracketing: ``k = floor(num/den)`` is the
    unique integer with ``k*den <= num < (k+1)*den``, each side an exact sign
    test.  A coarse interval quotient supplies the initial bracket.
    """
    if not isinstance(num, QuadExpr):
        num = QuadExpr(num)
    if num.is_zero():
        return 0
    bits = _START_BITS
    while True:
        nlo, nhi = num.interval(bits)
        dlo, dhi = den.interval(bits)
        if dlo > 0:
            break
        bits *= 2
        if bits > _PRECISION_CAP:
            raise InternalPrecisionExceeded("divisor enclosure did not clear zero")
    while True:
        cands = (nlo / dlo, nlo / dhi, nhi / dlo, nhi / dhi)
        k_lo = min(c.numerator // c.denominator for c in cands)
        k_hi = max(c.numerator // c.denominator for c in cands)
        if k_hi - k_lo <= 2:
            break
        bits *= 2
        if bits > _PRECISION_CAP:
            raise InternalPrecisionExceeded("quotient bracket did not converge")
        nlo, nhi = num.interval(bits)
        dlo, dhi = den.interval(bits)
    for k in range(k_lo, k_hi + 1):
        if (num - den * k).sign() >= 0 and (num - den * (k + 1)).sign() < 0:
            return k
    raise InternalPrecisionExceeded("quotient floor verification failed")


def ceil_div(num: QuadExpr | RationalLike, den: QuadExpr) -> int:
    """Exact ``ceil(num / den)`` via the identity ``ceil(x) = -floor(-x)``."""
    if not isinstance(num, QuadExpr):
        num = QuadExpr(num)
    return -floor_div(-num, den)


# ----------------------------------------------------------------------
# text literals
# ----------------------------------------------------------------------


def format_quadexpr(x: QuadExpr) -> str:
    """Canonical literal, e.g. ``1/2 + 1/4*sqrt(2) - 1/8*sqrt(3)``."""
    parts: list[tuple[int, str]] = []
    if x.p != 0 or not x.terms:
        sign = -1 if x.p < 0 else 1
        parts.append((sign, _format_rational(abs(x.p))))
    for q, d in x.terms:
        sign = -1 if q < 0 else 1
        mag = abs(q)
        if mag == 1:
            parts.append((sign, f"sqrt({d})"))
        else:
            parts.append((sign, f"{_format_rational(mag)}*sqrt({d})"))
    out = []
    for i, (sign, text) in enumerate(parts):
        if i == 0:
            out.append(("-" if sign < 0 else "") + text)
        else:
            out.append((" - " if sign < 0 else " + ") + text)
    return "".join(out)


def _format_rational(r: Fraction) -> str:
    if r.denominator == 1:
        return str(r.numerator)
    return f"{r.numerator}/{r.denominator}"


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def done(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str):
        self.skip_ws()
        if self.pos >= len(self.text) or self.text[self.pos] != ch:
            raise QuadExprParseError(f"expected '{ch}'", self.pos)
        self.pos += 1

    def integer(self) -> int:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == start:
            raise QuadExprParseError("expected an integer", start)
        return int(self.text[start:self.pos])

    def rational(self) -> Fraction:
        num = self.integer()
        self.skip_ws()
        if self.pos < len(self.text) and self.text[self.pos] == "/":
            self.pos += 1
            denom_at = self.pos
            den = self.integer()
            if den == 0:
                raise QuadExprParseError("zero denominator", denom_at)
            return Fraction(num, den)
        return Fraction(num)

    def match_word(self, word: str) -> bool:
        self.skip_ws()
        if self.text.startswith(word, self.pos):
            self.pos += len(word)
            return True
        return False


def parse_quadexpr(text: str) -> QuadExpr:
    """Parse a quadratic-expression literal.

    Accepted terms: ``p``, ``p/q``, ``p/q*sqrt(D)``, ``sqrt(D)``, joined by
    ``+`` or ``-`` and optionally signed at the front.  Whitespace anywhere is
    ignored.  Raises :class:`QuadExprParseError` with offset and reason.
    """
    sc = _Scanner(text)
    if sc.done():
        raise QuadExprParseError("empty literal", 0)
    total = QuadExpr(0)
    first = True
    while True:
        sc.skip_ws()
        sign = 1
        if sc.peek() == "+" or sc.peek() == "-":
            if sc.peek() == "-":
                sign = -1
            sc.pos += 1
        elif not first:
            raise QuadExprParseError("expected '+' or '-' between terms", sc.pos)
        sc.skip_ws()
        term_at = sc.pos
        if sc.match_word("sqrt"):
            sc.expect("(")
            d = sc.integer()
            sc.expect(")")
            total = total + QuadExpr.sqrt(d, sign)
        else:
            if not sc.peek().isdigit():
                raise QuadExprParseError("expected a rational or sqrt(...)", term_at)
            coeff = sc.rational() * sign
            sc.skip_ws()
            if sc.pos < len(sc.text) and sc.text[sc.pos] == "*":
                sc.pos += 1
                if not sc.match_word("sqrt"):
                    raise QuadExprParseError("expected sqrt(...) after '*'", sc.pos)
                sc.expect("(")
                d = sc.integer()
                sc.expect(")")
                total = total + QuadExpr.sqrt(d, coeff)
            else:
                total = total + coeff
        first = False
        if sc.done():
            return total
