"""Rational core: heights, brackets, valuations, products, Fejer sums, and
multiplicative-function sums, each against an independent oracle."""

import math
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gcdgraphs.errors import ContractViolation, DomainError
from gcdgraphs.rationals import (
    FEJER_A_ERROR_CONSTANT,
    MultSpec,
    bracket,
    bracket_gcd_formula,
    fejer_a,
    fejer_b,
    fejer_c,
    height,
    is_rough,
    mertens_product,
    mult_harmonic_sum,
    mult_sum,
    mult_sum_comparator,
    omega_below,
    prime_tail_sum,
    primes_of,
    reduce,
    rough_density,
    rough_list,
    val_p,
)
from gcdgraphs.sieve import TABLE


def euclid_gcd(a, b):
    while b:
        a, b = b, a % b
    return a


class TestReduceHeight:
    def test_reduce_examples(self):
        assert reduce(6, 4) == F(3, 2)
        assert reduce(7, 1) == F(7)
        # oracle: Euclid gcd
        g = euclid_gcd(30, 12)
        assert reduce(30, 12) == F(30 // g, 12 // g) == F(5, 2)

    def test_reduce_guards(self):
        for bad in [(0, 1), (1, 0), (-2, 3)]:
            with pytest.raises(DomainError):
                reduce(*bad)

    def test_height(self):
        assert height(F(6, 5)) == 6
        assert height(F(1)) == 1
        assert height(F(3, 7)) == 7


class TestBracket:
    def test_examples(self):
        assert bracket(F(3, 2), F(5, 4)) == 4
        assert bracket(F(2), F(2)) == F(1, 2)
        assert bracket(F(6), F(4)) == F(1, 2)

    @settings(max_examples=300, deadline=None)
    @given(
        st.integers(1, 10**6), st.integers(1, 10**6),
        st.integers(1, 10**6), st.integers(1, 10**6),
    )
    def test_symmetry_and_gcd_formula(self, a, q, b, r):
        alpha, beta = F(a, q), F(b, r)
        lhs = bracket(alpha, beta)
        assert lhs == bracket(beta, alpha)
        assert lhs == bracket_gcd_formula(alpha, beta)

    def test_rescaling_identity(self):
        rho, sigma = F(9, 2), F(2)
        for gamma in (F(2), F(3, 2), F(7, 5)):
            assert bracket(gamma * rho, gamma * sigma) == bracket(rho, sigma) / gamma


class TestValuations:
    def test_examples(self):
        assert val_p(F(3, 2), 2) == -1
        assert val_p(F(9, 2), 3) == 2
        assert val_p(F(7, 5), 3) == 0

    def test_non_prime_guard(self):
        with pytest.raises(DomainError):
            val_p(F(3, 2), 4)

    def test_reconstruction(self):
        rng = random.Random(7)
        for _ in range(200):
            rho = F(rng.randint(1, 5000), rng.randint(1, 5000))
            prod = F(1)
            for p in primes_of(rho):
                prod *= F(p) ** val_p(rho, p)
            assert prod == rho

    def test_primes_of(self):
        assert primes_of(F(6, 5)) == [2, 3, 5]
        assert primes_of(F(1)) == []
        # oracle: trial division of 280
        n = 35 * 8
        trial = sorted({p for p in range(2, n + 1) if n % p == 0 and TABLE.is_prime(p)})
        assert primes_of(F(35, 8)) == trial == [2, 5, 7]


class TestArithmeticFunctions:
    def test_omega_and_tail(self):
        assert omega_below(F(6, 5), 2) == 1
        assert prime_tail_sum(F(6, 5), 2) == F(1, 3) + F(1, 5) == F(8, 15)
        assert prime_tail_sum(F(6, 5), 7) == 0

    def test_kappa_mertens(self):
        assert rough_density(F(1)) == 1
        assert rough_density(F(3)) == F(1, 9)
        assert mertens_product(10) == F(1, 2) * F(2, 3) * F(4, 5) * F(6, 7) == F(8, 35)

    def test_rough(self):
        assert is_rough(1, 100)
        assert is_rough(9, 2) and not is_rough(9, 3)
        # oracle: per-element trial division
        def least_factor(n):
            for d in range(2, n + 1):
                if n % d == 0:
                    return d
            return float("inf")

        expected = [n for n in range(1, 11) if n == 1 or least_factor(n) > 2]
        assert rough_list(2, 10) == expected == [1, 3, 5, 7, 9]

    def test_rough_fractional_bound(self):
        assert rough_list(F(5, 2), 12) == [n for n in range(1, 13)
                                           if n == 1 or min(TABLE.factor(n)) > 2.5]


def fejer_a_oracle(t: F) -> F:
    total = F(0)
    j = 1
    while j <= t:
        total += 2 * (1 - F(j) / t)
        j += 1
    return total


class TestFejer:
    def test_examples(self):
        assert fejer_a(1) == 0
        assert fejer_a(2) == 1
        assert fejer_b(4, 2) == 2

    def test_oracle(self):
        rng = random.Random(3)
        for _ in range(50):
            t = F(rng.randint(2, 400), rng.randint(1, 7))
            if t < 1:
                continue
            assert fejer_a(t) == fejer_a_oracle(t)

    def test_error_constant(self):
        # sweep t in {1, 1.5, ..., 1000}: the recorded constant is attained
        worst = max(
            abs(fejer_a(F(k, 2)) - (F(k, 2) - 1)) * F(k, 2) for k in range(2, 2001)
        )
        assert worst == FEJER_A_ERROR_CONSTANT == F(1, 4)

    def test_fejer_b_oracle(self):
        for t, q in [(F(7), 6), (F(19, 2), 4), (F(12), 1)]:
            direct = F(0)
            j = 1
            while j <= t:
                if math.gcd(j, q) == 1:
                    direct += 2 * (1 - F(j) / t)
                j += 1
            assert fejer_b(t, q) == direct

    def test_fejer_c_oracle(self):
        for t, q in [(F(30), 5), (F(45, 2), 6)]:
            direct = F(0)
            j = 1
            while j <= t:
                if math.gcd(j, q) == 1:
                    term = F(1)
                    for p in TABLE.factor(j):
                        if p > 2:
                            term *= F(p - 1, p - 2)
                    direct += 2 * term
                j += 1
            assert fejer_c(t, q) == direct


class TestMultiplicative:
    def test_examples(self):
        assert mult_sum(MultSpec.one(), 10) == 10
        assert mult_harmonic_sum(MultSpec.one(), 4) == F(25, 12)

    def test_tau2_vs_sympy(self):
        import sympy

        tau2 = MultSpec.tau(2)
        assert mult_sum(tau2, 6) == 14
        for x in (30, 100):
            assert mult_sum(tau2, x) == sum(sympy.divisor_count(n) for n in range(1, x + 1))

    def test_contract_violation(self):
        bad = MultSpec.from_dict(1, {(2, 1): F(5)})  # tau_1(2) = 1 < 5
        with pytest.raises(ContractViolation):
            bad(2)

    def test_comparator_band(self):
        # f = 1: harmonic ratio to exp(sum 1/p) stays within [0.1, 10]
        for x in (10, 100, 1000, 10**4):
            rep = mult_sum_comparator(MultSpec.one(), x)
            assert 0.1 <= rep["harmonic_ratio"] <= 10


class TestPrimeTable:
    def test_prime_counts(self):
        assert len(TABLE.primes(10**6)) == 78498
        assert TABLE.primes(10)[-1] == 7
        assert TABLE.is_prime(999983) and not TABLE.is_prime(999981)

    def test_concurrent_growth_consistent(self):
        from concurrent.futures import ThreadPoolExecutor

        from gcdgraphs.sieve import PrimeTable

        table = PrimeTable(16)
        with ThreadPoolExecutor(8) as pool:
            results = list(pool.map(lambda n: table.primes(n),
                                    [10**4, 10**5, 5 * 10**4, 10**5] * 4))
        reference = table.primes(10**5)
        for limit, got in zip([10**4, 10**5, 5 * 10**4, 10**5] * 4, results):
            assert got == [p for p in reference if p <= limit]
