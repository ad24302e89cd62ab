"""Shared prime machinery: a grow-only prime table, smallest-prime-factor
lookups, rough-number sieves and integer factorization by trial division.

Everything here is deterministic and exact; the global table only ever grows,
so concurrent readers see a consistent prefix.
"""

from __future__ import annotations

import threading
from bisect import bisect_right
from fractions import Fraction

_HARD_LIMIT = 10**8  # plain sieve cap; beyond this we extend segment by segment


class PrimeTable:
    """Cached sieve of Eratosthenes, extended on demand.

    ``primes(limit)`` returns the ascending list of primes <= limit backed by a
    shared cache; ``spf(n)`` returns the smallest prime factor of n (n >= 2)
    via a separate smallest-prime-factor array that also grows on demand.
    """

    def __init__(self, initial: int = 1 << 12):
        self._lock = threading.RLock()
        self._limit = 0
        self._primes: list[int] = []
        self._spf_limit = 0
        self._spf: list[int] = []
        self.extend(initial)

    # -- plain prime list ---------------------------------------------------

    def extend(self, limit: int) -> None:
        limit = int(limit)
        if limit <= self._limit:
            return
        with self._lock:
            if limit <= self._limit:
                return
            if limit > _HARD_LIMIT:
                self._extend_segmented(limit)
                return
            flags = bytearray([1]) * (limit + 1)
            flags[0:2] = b"\x00\x00"
            p = 2
            while p * p <= limit:
                if flags[p]:
                    flags[p * p :: p] = b"\x00" * len(range(p * p, limit + 1, p))
                p += 1
            new_primes = [i for i in range(2, limit + 1) if flags[i]]
            self._primes = new_primes
            self._limit = limit

    def _extend_segmented(self, limit: int) -> None:
        # segmented sieve; only reached for limits beyond the plain cap
        self.extend(min(_HARD_LIMIT, int(limit**0.5) + 1))
        base = self._primes[:]
        lo = self._limit + 1
        out = self._primes
        seg = 1 << 20
        while lo <= limit:
            hi = min(lo + seg - 1, limit)
            flags = bytearray([1]) * (hi - lo + 1)
            for p in base:
                if p * p > hi:
                    break
                start = max(p * p, ((lo + p - 1) // p) * p)
                flags[start - lo :: p] = b"\x00" * len(range(start, hi + 1, p))
            out.extend(i + lo for i, f in enumerate(flags) if f)
            lo = hi + 1
        self._limit = limit

    def primes(self, limit: int) -> list[int]:
        """Ascending primes <= limit (a list slice of the shared cache)."""
        limit = int(limit)
        if limit > self._limit:
            self.extend(max(limit, 2 * self._limit))
        return self._primes[: bisect_right(self._primes, limit)]

    def is_prime(self, n: int) -> bool:
        if n < 2:
            return False
        if n <= self._limit:
            i = bisect_right(self._primes, n)
            return i > 0 and self._primes[i - 1] == n
        return self.spf(n) == n

    # -- smallest prime factors --------------------------------------------

    def _extend_spf(self, limit: int) -> None:
        with self._lock:
            if limit <= self._spf_limit:
                return
            limit = max(limit, 2 * self._spf_limit, 1 << 12)
            spf = list(range(limit + 1))
            for p in range(2, int(limit**0.5) + 1):
                if spf[p] == p:
                    for m in range(p * p, limit + 1, p):
                        if spf[m] == m:
                            spf[m] = p
            self._spf = spf
            self._spf_limit = limit

    def spf(self, n: int) -> int:
        """Smallest prime factor of n >= 2.

        Uses the cached array when n fits, trial division otherwise.
        """
        if n < 2:
            raise ValueError("spf requires n >= 2")
        if n <= self._spf_limit:
            return self._spf[n]
        if n <= 10**7:
            self._extend_spf(n)
            return self._spf[n]
        for p in self.primes(int(n**0.5) + 1):
            if n % p == 0:
                return p
        return n

    def factor(self, n: int) -> dict[int, int]:
        """Prime factorization of n >= 1 as {prime: exponent}."""
        if n < 1:
            raise ValueError("factor requires n >= 1")
        out: dict[int, int] = {}
        while n > 1:
            p = self.spf(n)
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out[p] = e
        return out

    def least_prime_factor_exceeds(self, n: int, bound: Fraction) -> bool:
        """Whether P^-(n) > bound, with the convention P^-(1) = infinity."""
        if n == 1:
            return True
        return Fraction(self.spf(n)) > bound


TABLE = PrimeTable()


def rough_flags(limit: int, y: Fraction | int) -> bytearray:
    """Byte flags over [0, limit]: flags[n] == 1 iff n is y-rough.

    n is y-rough when its least prime factor exceeds y; 1 is y-rough for
    every y.  flags[0] is meaningless and set to 0.
    """
    y = Fraction(y)
    flags = bytearray([1]) * (limit + 1)
    if limit >= 0:
        flags[0] = 0
    for p in TABLE.primes(int(y)) if y >= 2 else []:
        if Fraction(p) <= y:
            flags[p::p] = b"\x00" * len(range(p, limit + 1, p))
    return flags
