"""Canonical finite unions of disjoint open intervals with exact rational
endpoints, plus the dilate-interval sets they are built from.

A union stores one positive integer denominator D and a sorted list of
integer endpoint pairs (lo, hi) with lo < hi, representing the open set
union of (lo/D, hi/D).  Touching intervals (hi_i == lo_{i+1}) stay separate:
these are open sets and merging would add a point.  Keeping endpoints as
integers over a common denominator makes million-interval unions cheap while
staying exact.

The two set families of interest are unions of unit intervals centered at
multiples n*alpha: over all n >= 1 ("plain"), or over the alpha-rough n only
("rough", least prime factor > alpha, including n = 1).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm

from .errors import DomainError
from .rationals import as_fraction
from .sieve import TABLE, rough_flags


@dataclass(frozen=True)
class IntervalUnion:
    """Disjoint sorted open intervals (lo/den, hi/den)."""

    den: int
    pairs: tuple[tuple[int, int], ...]

    @staticmethod
    def empty() -> "IntervalUnion":
        return IntervalUnion(1, ())

    @staticmethod
    def from_fractions(intervals) -> "IntervalUnion":
        """Canonicalize an arbitrary iterable of (lo, hi) rational pairs."""
        items = [(as_fraction(lo), as_fraction(hi)) for lo, hi in intervals]
        items = [(lo, hi) for lo, hi in items if lo < hi]
        if not items:
            return IntervalUnion.empty()
        den = 1
        for lo, hi in items:
            den = lcm(den, lcm(lo.denominator, hi.denominator))
        scaled = sorted(
            (int(lo * den), int(hi * den)) for lo, hi in items
        )
        merged: list[list[int]] = []
        for lo, hi in scaled:
            if merged and lo < merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], hi)
            else:
                merged.append([lo, hi])
        return IntervalUnion(den, tuple((a, b) for a, b in merged))

    def rescaled(self, den: int) -> tuple[tuple[int, int], ...]:
        if den == self.den:
            return self.pairs
        if den % self.den:
            raise ValueError("target denominator must be a multiple")
        f = den // self.den
        return tuple((a * f, b * f) for a, b in self.pairs)

    def intervals(self) -> list[tuple[Fraction, Fraction]]:
        return [(Fraction(a, self.den), Fraction(b, self.den)) for a, b in self.pairs]

    def measure(self) -> Fraction:
        return Fraction(sum(b - a for a, b in self.pairs), self.den)

    def clip_measure(self, lo: Fraction, hi: Fraction) -> Fraction:
        """Lebesgue measure of the union intersected with [lo, hi]."""
        lo, hi = as_fraction(lo), as_fraction(hi)
        den = lcm(self.den, lcm(lo.denominator, hi.denominator))
        li, hs = int(lo * den), int(hi * den)
        total = 0
        for a, b in self.rescaled(den):
            if b <= li:
                continue
            if a >= hs:
                break
            total += min(b, hs) - max(a, li)
        return Fraction(total, den)

    def intersect(self, other: "IntervalUnion") -> "IntervalUnion":
        den = lcm(self.den, other.den)
        xs, ys = self.rescaled(den), other.rescaled(den)
        out: list[tuple[int, int]] = []
        i = j = 0
        while i < len(xs) and j < len(ys):
            a = max(xs[i][0], ys[j][0])
            b = min(xs[i][1], ys[j][1])
            if a < b:
                out.append((a, b))
            if xs[i][1] <= ys[j][1]:
                i += 1
            else:
                j += 1
        g = den
        for a, b in out:
            g = gcd(g, gcd(a, b))
            if g == 1:
                break
        if g > 1:
            return IntervalUnion(den // g, tuple((a // g, b // g) for a, b in out))
        return IntervalUnion(den, tuple(out))

    def union(self, other: "IntervalUnion") -> "IntervalUnion":
        den = lcm(self.den, other.den)
        items = sorted(self.rescaled(den) + other.rescaled(den))
        merged: list[list[int]] = []
        for lo, hi in items:
            if merged and lo < merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], hi)
            else:
                merged.append([lo, hi])
        return IntervalUnion(den, tuple((a, b) for a, b in merged))

    def __len__(self) -> int:
        return len(self.pairs)


def normalized_measure(u: IntervalUnion, t) -> Fraction:
    """measure(u intersected with [0, t]) / t, exactly."""
    t = as_fraction(t)
    if t <= 0:
        raise DomainError("normalized measure requires t > 0")
    return u.clip_measure(Fraction(0), t) / t


def _center_count(alpha: Fraction, t: Fraction) -> int:
    # largest n with n*alpha - 1/2 < t
    z = (t + Fraction(1, 2)) / alpha
    return (z.numerator - 1) // z.denominator


def multiple_intervals(alpha, t) -> IntervalUnion:
    """Union of (n*alpha - 1/2, n*alpha + 1/2) over n >= 1 touching [0, t).

    Only centers with n*alpha - 1/2 < t contribute.  Since alpha >= 1 the
    intervals are pairwise disjoint (touching at endpoints when alpha = 1).
    """
    alpha, t = as_fraction(alpha), as_fraction(t)
    if alpha < 1 or t < 1:
        raise DomainError("multiple_intervals requires alpha >= 1 and t >= 1")
    nmax = _center_count(alpha, t)
    a, q = alpha.numerator, alpha.denominator
    den = 2 * q
    pairs = tuple((2 * n * a - q, 2 * n * a + q) for n in range(1, nmax + 1))
    return IntervalUnion(den, pairs)


def rough_multiple_intervals(alpha, t) -> IntervalUnion:
    """Same as multiple_intervals but keeping only alpha-rough n.

    n = 1 is always alpha-rough; otherwise the least prime factor of n must
    exceed alpha.
    """
    alpha, t = as_fraction(alpha), as_fraction(t)
    if alpha < 1 or t < 1:
        raise DomainError("rough_multiple_intervals requires alpha >= 1 and t >= 1")
    nmax = _center_count(alpha, t)
    a, q = alpha.numerator, alpha.denominator
    den = 2 * q
    if nmax >= 512:
        flags = rough_flags(nmax, alpha)
        ns = (n for n in range(1, nmax + 1) if flags[n])
    else:
        ns = (n for n in range(1, nmax + 1) if TABLE.least_prime_factor_exceeds(n, alpha))
    pairs = tuple((2 * n * a - q, 2 * n * a + q) for n in ns)
    return IntervalUnion(den, pairs)


def build_dilate_union(alpha, t, variant: str) -> IntervalUnion:
    """Dispatch on variant: 'plain' for all multiples, 'rough' for rough ones."""
    if variant == "plain":
        return multiple_intervals(alpha, t)
    if variant == "rough":
        return rough_multiple_intervals(alpha, t)
    raise DomainError(f"unknown variant {variant!r}; expected 'plain' or 'rough'")


def second_moment_lower_bound(sets: list[IntervalUnion], t) -> Fraction:
    """(sum_j P(E_j))^2 / (sum_ij P(E_i cap E_j)) with P the normalized
    measure on [0, t]; a lower bound for P of the union.

    All-empty input returns 0.
    """
    t = as_fraction(t)
    if not sets:
        raise DomainError("second moment bound needs at least one set")
    singles = [normalized_measure(u, t) for u in sets]
    num = sum(singles, Fraction(0)) ** 2
    if num == 0:
        return Fraction(0)
    den = Fraction(0)
    k = len(sets)
    for i in range(k):
        den += singles[i]
        for j in range(i + 1, k):
            den += 2 * normalized_measure(sets[i].intersect(sets[j]), t)
    return num / den


def union_of(sets: list[IntervalUnion]) -> IntervalUnion:
    out = IntervalUnion.empty()
    for u in sets:
        out = out.union(u)
    return out
