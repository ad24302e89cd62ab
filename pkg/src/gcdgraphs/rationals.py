"""Exact arithmetic on positive rationals and elementary prime-counting
functions built on them.

A reduced positive rational a/q is carried by ``fractions.Fraction``, which
maintains lowest terms; ``reduce`` is the validating constructor.  On top of
that sit the height H(a/q) = max(a, q), the bracket
[alpha, beta] = H(alpha/beta) / max(alpha, beta), p-adic valuations, the
prime support of a rational, rough-number predicates, Mertens-type products,
Fejer-weighted sums, and exact sums of divisor-bounded multiplicative
functions.  All return values are exact (Fraction or int) unless a function
is explicitly a floating diagnostic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, exp, gcd, log

from .errors import ContractViolation, DomainError
from .sieve import TABLE, rough_flags

Rational = Fraction

# Empirical constant for the Fejer sum error |fejer_a(t) - (t-1)| <= c/t.
# The sweep over t in {1, 1.5, 2, ..., 1000} attains its maximum 1/4 at
# half-integers; the closed form of the error is {t}(1-{t})/t.
FEJER_A_ERROR_CONSTANT = Fraction(1, 4)


def as_fraction(x) -> Fraction:
    """Coerce int/str/float/Fraction to an exact Fraction.

    Floats convert exactly (binary value); pass Fractions or strings for
    decimal parameters.
    """
    if isinstance(x, Fraction):
        return x
    return Fraction(x)


def reduce(n: int, d: int) -> Fraction:
    """Lowest-terms representative of n/d for positive integers n, d."""
    if n < 1 or d < 1:
        raise DomainError(f"reduce requires positive integers, got {n}/{d}")
    return Fraction(n, d)


def height(rho: Fraction) -> int:
    """H(a/q) = max(a, q) for rho = a/q in lowest terms."""
    rho = as_fraction(rho)
    if rho <= 0:
        raise DomainError("height requires a positive rational")
    return max(rho.numerator, rho.denominator)


def bracket(alpha: Fraction, beta: Fraction) -> Fraction:
    """[alpha, beta] = H(alpha/beta) / max(alpha, beta).

    Symmetric in its arguments, and equal to qr/(gcd(q,r)*gcd(a,b)) for
    alpha = a/q, beta = b/r (see ``bracket_gcd_formula``).
    """
    alpha, beta = as_fraction(alpha), as_fraction(beta)
    if alpha <= 0 or beta <= 0:
        raise DomainError("bracket requires positive rationals")
    return Fraction(height(alpha / beta)) / max(alpha, beta)


def bracket_gcd_formula(alpha: Fraction, beta: Fraction) -> Fraction:
    """The gcd form qr / (gcd(q,r) * gcd(a,b)) of the bracket."""
    alpha, beta = as_fraction(alpha), as_fraction(beta)
    if alpha <= 0 or beta <= 0:
        raise DomainError("bracket requires positive rationals")
    a, q = alpha.numerator, alpha.denominator
    b, r = beta.numerator, beta.denominator
    return Fraction(q * r, gcd(q, r) * gcd(a, b))


def val_p(rho: Fraction, p: int) -> int:
    """The exponent k with rho = p^k * (a/q), p dividing neither a nor q."""
    if not TABLE.is_prime(p):
        raise DomainError(f"{p} is not prime")
    rho = as_fraction(rho)
    if rho <= 0:
        raise DomainError("val_p requires a positive rational")
    k = 0
    n = rho.numerator
    while n % p == 0:
        n //= p
        k += 1
    d = rho.denominator
    while d % p == 0:
        d //= p
        k -= 1
    return k


def primes_of(rho: Fraction) -> list[int]:
    """Ascending primes dividing numerator * denominator of rho."""
    rho = as_fraction(rho)
    if rho <= 0:
        raise DomainError("primes_of requires a positive rational")
    return sorted(TABLE.factor(rho.numerator * rho.denominator))


def omega_below(rho: Fraction, z) -> int:
    """Number of primes of rho that are <= z."""
    z = as_fraction(z)
    return sum(1 for p in primes_of(rho) if p <= z)


def prime_tail_sum(rho: Fraction, z) -> Fraction:
    """Sum of 1/p over primes p of rho with p > z, as an exact rational."""
    z = as_fraction(z)
    return sum((Fraction(1, p) for p in primes_of(rho) if p > z), Fraction(0))


def mertens_product(x) -> Fraction:
    """prod_{p <= x} (1 - 1/p), exactly."""
    x = as_fraction(x)
    out = Fraction(1)
    for p in TABLE.primes(int(x)) if x >= 2 else []:
        if p <= x:
            out *= Fraction(p - 1, p)
    return out


def rough_density(alpha) -> Fraction:
    """kappa(alpha) = (1/alpha) * prod_{p <= alpha} (1 - 1/p).

    This is the limiting normalized measure of the rough dilate set of alpha.
    """
    alpha = as_fraction(alpha)
    if alpha < 1:
        raise DomainError("rough_density requires alpha >= 1")
    return mertens_product(alpha) / alpha


def is_rough(n: int, y) -> bool:
    """Whether P^-(n) > y; 1 is y-rough for every y."""
    if n < 1:
        raise DomainError("is_rough requires n >= 1")
    return TABLE.least_prime_factor_exceeds(n, as_fraction(y))


def rough_list(y, t) -> list[int]:
    """All y-rough integers n <= t, ascending."""
    limit = int(as_fraction(t))
    if limit < 1:
        return []
    flags = rough_flags(limit, as_fraction(y))
    return [n for n in range(1, limit + 1) if flags[n]]


# -- Fejer-weighted sums ----------------------------------------------------


def fejer_a(t) -> Fraction:
    """sum_{1 <= |j| <= t} (1 - |j|/t), exactly.

    Equals (t - 1) + {t}(1 - {t})/t, so the error against t - 1 is at most
    1/(4t) (see FEJER_A_ERROR_CONSTANT).
    """
    t = as_fraction(t)
    if t < 1:
        raise DomainError("fejer_a requires t >= 1")
    n = t.numerator // t.denominator
    return 2 * n - Fraction(n * (n + 1)) / t


def fejer_b(t, q: int) -> Fraction:
    """sum over 1 <= |j| <= t with gcd(j, q) = 1 of (1 - |j|/t)."""
    t = as_fraction(t)
    if t < 1 or q < 1:
        raise DomainError("fejer_b requires t >= 1 and q >= 1")
    n = t.numerator // t.denominator
    total = Fraction(0)
    for j in range(1, n + 1):
        if gcd(j, q) == 1:
            total += 1 - Fraction(j) / t
    return 2 * total


def fejer_c(t, q: int) -> Fraction:
    """sum over 1 <= |j| <= t, gcd(j, q) = 1 of prod_{p | j, p > 2} (p-1)/(p-2)."""
    t = as_fraction(t)
    if t < 1 or q < 1:
        raise DomainError("fejer_c requires t >= 1 and q >= 1")
    n = t.numerator // t.denominator
    total = Fraction(0)
    for j in range(1, n + 1):
        if gcd(j, q) != 1:
            continue
        term = Fraction(1)
        for p in TABLE.factor(j):
            if p > 2:
                term *= Fraction(p - 1, p - 2)
        total += term
    return 2 * total


# -- divisor-bounded multiplicative functions --------------------------------


def tau_k(k: int, p: int, j: int) -> int:
    """The k-th divisor function on a prime power: tau_k(p^j) = C(j+k-1, k-1)."""
    return comb(j + k - 1, k - 1)


@dataclass(frozen=True)
class MultSpec:
    """A multiplicative function given by its values on prime powers.

    ``values`` maps (p, j) to an exact rational; unlisted prime powers take
    the value 1, or tau_k(p^j) when ``full_tau`` is set.  The function must
    satisfy 0 <= f <= tau_k for the declared k; violations raise
    ContractViolation at evaluation time.
    """

    k: int
    values: tuple[tuple[tuple[int, int], Fraction], ...] = ()
    full_tau: bool = False

    @staticmethod
    def one(k: int = 1) -> "MultSpec":
        return MultSpec(k=k)

    @staticmethod
    def tau(k: int) -> "MultSpec":
        """The full divisor function tau_k itself (values computed on demand)."""
        return MultSpec(k=k, full_tau=True)

    @staticmethod
    def from_dict(k: int, values: dict[tuple[int, int], Fraction]) -> "MultSpec":
        items = tuple(sorted((pq, as_fraction(v)) for pq, v in values.items()))
        return MultSpec(k=k, values=items)

    def _value(self, p: int, j: int) -> Fraction:
        if self.full_tau:
            return Fraction(tau_k(self.k, p, j))
        v = dict(self.values).get((p, j), Fraction(1))
        cap = tau_k(self.k, p, j)
        if v < 0 or v > cap:
            raise ContractViolation(
                f"f({p}^{j}) = {v} outside [0, tau_{self.k}({p}^{j}) = {cap}]"
            )
        return v

    def __call__(self, n: int) -> Fraction:
        if n < 1:
            raise DomainError("multiplicative functions take n >= 1")
        out = Fraction(1)
        for p, j in TABLE.factor(n).items():
            out *= self._value(p, j)
        return out

    def at_prime(self, p: int) -> Fraction:
        return self._value(p, 1)


def mult_sum(f: MultSpec, x) -> Fraction:
    """sum_{n <= x} f(n), exactly."""
    limit = int(as_fraction(x))
    return sum((f(n) for n in range(1, limit + 1)), Fraction(0))


def mult_harmonic_sum(f: MultSpec, x) -> Fraction:
    """sum_{n <= x} f(n)/n, exactly."""
    limit = int(as_fraction(x))
    return sum((f(n) / n for n in range(1, limit + 1)), Fraction(0))


def mult_sum_comparator(f: MultSpec, x) -> dict:
    """Diagnostic ratios of the exact sums to their Euler-product shapes.

    The shapes are x * exp(sum_{p<=x} (f(p)-1)/p) for the plain sum and
    exp(sum_{p<=x} f(p)/p) for the harmonic sum.  The implied constants are
    never asserted; this reports the realized ratios.
    """
    xf = as_fraction(x)
    limit = int(xf)
    prime_sum = sum(float(f.at_prime(p)) / p for p in TABLE.primes(limit))
    prime_sum_minus = sum((float(f.at_prime(p)) - 1.0) / p for p in TABLE.primes(limit))
    plain = mult_sum(f, x)
    harmonic = mult_harmonic_sum(f, x)
    shape_plain = float(xf) * exp(prime_sum_minus)
    shape_harmonic = exp(prime_sum)
    return {
        "sum": plain,
        "harmonic_sum": harmonic,
        "sum_shape": shape_plain,
        "harmonic_shape": shape_harmonic,
        "sum_ratio": float(plain) / shape_plain,
        "harmonic_ratio": float(harmonic) / shape_harmonic,
    }


def prime_harmonic(x) -> float:
    """Floating sum of 1/p over p <= x (diagnostic helper)."""
    return sum(1.0 / p for p in TABLE.primes(int(as_fraction(x))))


def log_float(x) -> float:
    x = as_fraction(x)
    return log(x.numerator) - log(x.denominator)
