"""Exact comparison of products of rational powers of rationals.

Quantities of the form prod_i b_i^(e_i) with positive rational bases b_i and
rational exponents e_i cover every ordering decision in this package:
theta-weights, qualities, the p^(1+tau/4) loss factors, and the C-constant
formulas.  Two such products are compared exactly by clearing exponent
denominators (raising both sides to the lcm power) when the resulting
integers stay manageable, and otherwise by certified interval arithmetic on
logarithms with escalating precision.  A comparison is never allowed to be
silently wrong: if intervals cannot separate the sides, we fall back to the
exact path regardless of size, and raise if even that is impossible.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm, log10

import mpmath

from .errors import AmbiguousComparison

_EXACT_BIT_LIMIT = 6_000_000  # max estimated bits for the exact path
_PRECISIONS = (64, 128, 256, 512, 1024, 2048, 4096)


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    return Fraction(x)


@dataclass(frozen=True)
class PowProduct:
    """A positive real number prod b_i^(e_i), or exactly zero.

    Bases are positive rationals, exponents rationals.  The neutral product
    (no factors) is 1.  A zero flag represents the exact value 0 (used for
    trivial graphs).
    """

    factors: tuple[tuple[Fraction, Fraction], ...] = ()
    zero: bool = False

    @staticmethod
    def from_rational(x) -> "PowProduct":
        x = _as_fraction(x)
        if x == 0:
            return PowProduct(zero=True)
        if x < 0:
            raise ValueError("PowProduct represents nonnegative values only")
        return PowProduct(((x, Fraction(1)),))

    @staticmethod
    def build(*pairs) -> "PowProduct":
        """Build from (base, exponent) pairs; zero base with positive exponent
        collapses the whole product to zero.  Exponents of equal bases are
        combined, so a product times its own inverse is literally 1."""
        merged: dict[Fraction, Fraction] = {}
        order: list[Fraction] = []
        for base, expo in pairs:
            base = _as_fraction(base)
            expo = _as_fraction(expo)
            if expo == 0 or base == 1:
                continue
            if base == 0:
                if expo < 0:
                    raise ZeroDivisionError("0 to a negative power")
                return PowProduct(zero=True)
            if base < 0:
                raise ValueError("negative base")
            if base not in merged:
                merged[base] = Fraction(0)
                order.append(base)
            merged[base] += expo
        return PowProduct(tuple((b, merged[b]) for b in order if merged[b] != 0))

    def __mul__(self, other: "PowProduct") -> "PowProduct":
        if self.zero or other.zero:
            return PowProduct(zero=True)
        return PowProduct.build(*self.factors, *other.factors)

    def __pow__(self, e) -> "PowProduct":
        e = _as_fraction(e)
        if self.zero:
            if e <= 0:
                raise ZeroDivisionError("0 to a nonpositive power")
            return self
        return PowProduct.build(*((b, x * e) for b, x in self.factors))

    def inverse(self) -> "PowProduct":
        return self**-1

    # -- numeric views -------------------------------------------------------

    def log10(self) -> float:
        if self.zero:
            return float("-inf")
        return float(
            sum(float(e) * (log10(b.numerator) - log10(b.denominator)) for b, e in self.factors)
        )

    def exact_power(self, k: int) -> Fraction:
        """The exact rational value of self**k; k must clear all exponent
        denominators."""
        if self.zero:
            return Fraction(0)
        out = Fraction(1)
        for b, e in self.factors:
            ek = e * k
            if ek.denominator != 1:
                raise ValueError("power does not clear exponents")
            out *= b ** int(ek)
        return out

    def power_denominator(self) -> int:
        """Least k >= 1 with self**k rational."""
        k = 1
        for _, e in self.factors:
            k = lcm(k, e.denominator)
        return k

    # -- comparisons ----------------------------------------------------------

    def _exact_sign_vs_one(self) -> int | None:
        """Sign of self - 1 by the clear-denominators route, or None if the
        integers would be too large."""
        k = self.power_denominator()
        bits = 0.0
        for b, e in self.factors:
            bits += abs(float(e * k)) * abs(
                b.numerator.bit_length() - b.denominator.bit_length() + 1
            )
        if bits > _EXACT_BIT_LIMIT:
            return None
        v = self.exact_power(k)
        return (v > 1) - (v < 1)

    def _interval_sign_vs_one(self) -> int | None:
        """Sign of log(self) by certified interval arithmetic, or None."""
        for prec in _PRECISIONS:
            iv = mpmath.iv
            old = iv.prec
            try:
                iv.prec = prec
                total = iv.mpf(0)
                for b, e in self.factors:
                    lg = iv.log(iv.mpf(b.numerator)) - iv.log(iv.mpf(b.denominator))
                    total += (iv.mpf(e.numerator) / iv.mpf(e.denominator)) * lg
                if total.a > 0:
                    return 1
                if total.b < 0:
                    return -1
            finally:
                iv.prec = old
        return None

    def compare_to_one(self) -> int:
        """-1, 0, or 1 according to self <, ==, > 1. Exact."""
        if self.zero:
            return -1
        if not self.factors:
            return 0
        sign = self._exact_sign_vs_one()
        if sign is not None:
            return sign
        sign = self._interval_sign_vs_one()
        if sign is not None:
            return sign
        # interval arithmetic cannot certify equality; force the exact path
        k = self.power_denominator()
        try:
            v = self.exact_power(k)
        except (OverflowError, MemoryError) as exc:  # pragma: no cover
            raise AmbiguousComparison(str(self)) from exc
        return (v > 1) - (v < 1)

    def compare(self, other: "PowProduct") -> int:
        if self.zero and other.zero:
            return 0
        if self.zero:
            return -1
        if other.zero:
            return 1
        return (self * other.inverse()).compare_to_one()

    def __lt__(self, other):
        return self.compare(other) < 0

    def __le__(self, other):
        return self.compare(other) <= 0

    def __gt__(self, other):
        return self.compare(other) > 0

    def __ge__(self, other):
        return self.compare(other) >= 0

    def eq(self, other: "PowProduct") -> bool:
        return self.compare(other) == 0


ONE = PowProduct()
ZERO = PowProduct(zero=True)


def _interval_value(x: PowProduct, iv):
    total = iv.mpf(1)
    for b, e in x.factors:
        lg = iv.log(iv.mpf(b.numerator)) - iv.log(iv.mpf(b.denominator))
        total *= iv.exp((iv.mpf(e.numerator) / iv.mpf(e.denominator)) * lg)
    return total


def compare_sum_to_one(terms: list[PowProduct]) -> int:
    """Sign of (sum of the products) - 1, by certified interval arithmetic.

    Used for mixed-irrationality inequalities such as
    q-ratio + p^-(1+tau/4) >= 1, where the summands are individually exact
    power products but their sum is not.  Escalates precision; a genuine
    equality cannot be certified and raises.
    """
    nonzero = [t for t in terms if not t.zero]
    for prec in _PRECISIONS:
        iv = mpmath.iv
        old = iv.prec
        try:
            iv.prec = prec
            total = iv.mpf(0)
            for t in nonzero:
                total += _interval_value(t, iv)
            total -= 1
            if total.a > 0:
                return 1
            if total.b < 0:
                return -1
        finally:
            iv.prec = old
    raise AmbiguousComparison("sum comparison undecided at maximum precision")


def log10_compare(lhs_log10: Fraction, rhs_log10: Fraction) -> int:
    """Compare two quantities given by exact base-10 logarithms."""
    return (lhs_log10 > rhs_log10) - (lhs_log10 < rhs_log10)


def compare_value_to_pow10(value: Fraction, exponent: Fraction) -> int:
    """Sign of value - 10^exponent for positive rational value.

    Used for denominator-cap tests of the form q <= 10^alpha * (rational),
    where 10^alpha is far too large to materialize.
    """
    if value <= 0:
        return -1
    return PowProduct.build((value, Fraction(1)), (Fraction(10), -exponent)).compare_to_one()
