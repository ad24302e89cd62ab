"""Overlap machinery: three-way agreement, disjointness, the diagonal probe,
the shifted-count structure, and the asymptotic predictor."""

import random
from fractions import Fraction as F
from math import gcd

import pytest

from gcdgraphs.errors import DomainError
from gcdgraphs.intervals import build_dilate_union, normalized_measure
from gcdgraphs.overlap import (
    check_no_diagonal,
    overlap_direct,
    overlap_report,
    overlap_shifted,
    overlap_sum_formula,
    predictor,
    predictor_empirical,
    union_experiment,
)
from gcdgraphs.rationals import bracket, rough_density
from gcdgraphs.sieve import TABLE


def admissible_pairs(rng: random.Random, count: int, hmax: int):
    """Pairs with alpha > beta >= 2, non-integer ratio, bracket > 1."""
    out = []
    while len(out) < count:
        a, q = rng.randint(2 * 2, hmax), rng.randint(1, hmax // 2)
        b, r = rng.randint(2 * 2, hmax), rng.randint(1, hmax // 2)
        alpha, beta = F(a, q), F(b, r)
        if alpha < beta:
            alpha, beta = beta, alpha
        if alpha == beta or beta < 2:
            continue
        ratio = alpha / beta
        if ratio.denominator == 1:
            continue
        if bracket(alpha, beta) <= 1:
            continue
        out.append((alpha, beta))
    return out


class TestDirectAndSum:
    def test_plain_examples(self):
        assert overlap_direct(2, 3, 60, "plain") == F(19, 120)
        assert overlap_direct(2, 2, 100, "plain") == normalized_measure(
            build_dilate_union(2, 100, "plain"), 100
        )

    def test_rough_disjoint_example(self):
        assert bracket(F(3), F(2)) == 1
        assert overlap_direct(3, 2, 10**4, "rough") == 0

    def test_boundary_bound_scaling(self):
        rep = overlap_shifted(F(9, 2), 2, 1000)
        assert F(2) / rep.t == F(2, 1000)
        rep4 = overlap_shifted(F(9, 2), 2, 4000)
        assert F(2) / rep4.t == F(2, 1000) / 4

    def test_three_way_small_corpus(self):
        rng = random.Random(101)
        for alpha, beta in admissible_pairs(rng, 25, 60):
            for t in (500, 2003):
                rep = overlap_shifted(alpha, beta, t)
                direct = overlap_direct(alpha, beta, t, "rough")
                sum_f = overlap_sum_formula(alpha, beta, t, "rough")
                assert rep.shifted_formula == direct
                assert rep.sum_formula == sum_f
                assert abs(direct - sum_f) <= F(2, t)

    def test_fractional_t_boundary(self):
        # T with an awkward denominator exercises the exact clipping path
        t = F(100001, 7)
        rep = overlap_shifted(F(9, 2), 2, t)
        assert rep.shifted_formula == overlap_direct(F(9, 2), 2, t, "rough")

    def test_shifted_examples(self):
        rep = overlap_shifted(F(9, 2), 2, 10**4)
        assert (rep.s, rep.ratio_r) == (9, 2)
        assert rep.shifted_formula == overlap_direct(F(9, 2), 2, 10**4, "rough")
        rep2 = overlap_shifted(F(5, 2), 2, 10**4)
        assert rep2.ratio_r == 2
        assert rep2.shifted_formula == overlap_direct(F(5, 2), 2, 10**4, "rough")

    def test_bracket_below_one_disjoint_flag(self):
        rep = overlap_shifted(F(7, 2), 3, 5000)  # ratio 7/6, bracket 2 > 1? H(7/6)/max = 7/(7/2) = 2
        assert not rep.disjoint
        rep2 = overlap_shifted(F(11, 3), F(11, 4), 5000)  # ratio 4/3, bracket = 4/(11/3) = 12/11 > 1
        assert not rep2.disjoint
        rep3 = overlap_shifted(F(9, 2), F(7, 2), 5000)  # ratio 9/7: bracket = 9/(9/2) = 2 > 1
        assert not rep3.disjoint
        rep4 = overlap_shifted(F(5, 2), F(9, 4), 5000)  # ratio 10/9: bracket = 10/(5/2) = 4 > 1
        assert not rep4.disjoint
        # engineered bracket <= 1: alpha = 21/2, beta = 9 -> ratio 7/6, bracket = 7/(21/2) = 2/3
        rep5 = overlap_shifted(F(21, 2), 9, 5000)
        assert rep5.disjoint and rep5.shifted_formula == 0
        assert overlap_direct(F(21, 2), 9, 5000, "rough") == 0

    def test_integer_ratio_guard(self):
        with pytest.raises(DomainError):
            overlap_shifted(4, 2, 100)


class TestShiftedStructure:
    def test_s0_gating(self):
        rng = random.Random(77)
        for alpha, beta in admissible_pairs(rng, 40, 40):
            rep = overlap_shifted(alpha, beta, 3000)
            if rep.disjoint:
                continue
            if rep.s0_count > 0:
                assert rep.s0_gate, (alpha, beta)

    def test_excluded_j_vanish(self):
        # S_j = 0 whenever gcd(j, Q1*Q2) > 1 or j*Q1 is odd
        rng = random.Random(13)
        for alpha, beta in admissible_pairs(rng, 30, 40):
            rep = overlap_shifted(alpha, beta, 4000)
            if rep.disjoint:
                continue
            s, t_red = rep.s, (alpha / beta).denominator
            q1 = 1
            for p in sorted(TABLE.factor(s * t_red)):
                if F(p) <= beta:
                    q1 *= p
            q2 = 1
            for p in sorted(TABLE.factor(t_red)):
                if beta < F(p) <= alpha:
                    q2 *= p
            for j, count in rep.shifted_counts.items():
                if j == 0:
                    continue
                if gcd(abs(j), q1 * q2) > 1 or (j * q1) % 2 != 0:
                    assert count == 0, (alpha, beta, j)


class TestNoDiagonal:
    def test_examples(self):
        assert check_no_diagonal(F(9, 4), F(3, 2), 10**6)
        for alpha, beta in [(F(5, 2), F(2)), (F(7, 3), F(2))]:
            with pytest.raises(DomainError):
                check_no_diagonal(alpha, beta, 100)

    def test_brute_force_oracle(self):
        # small-bound double loop agrees with the probe
        alpha, beta = F(9, 4), F(3, 2)
        found = False
        for m in range(1, 200):
            for n in range(1, 200):
                if m * alpha == n * beta and TABLE.least_prime_factor_exceeds(m, alpha):
                    found = True
        assert not found
        assert check_no_diagonal(alpha, beta, 200)


class TestPredictor:
    def test_guards(self):
        with pytest.raises(DomainError):
            predictor(4, 2)
        with pytest.raises(DomainError):
            predictor(F(9, 2), 2, y=50)
        with pytest.raises(DomainError):
            predictor(F(21, 2), 9)  # bracket <= 1

    def test_error_term_monotone(self):
        # beta fixed, alpha/beta growing: the reported O-term shrinks
        beta = F(2)
        errs = []
        for a in (9, 19, 39, 79):
            errs.append(predictor(F(a, 2), beta)["error_term_bound"])
        assert errs == sorted(errs, reverse=True)

    def test_large_prime_pair_main_term_near_one(self):
        # s, t with only large prime factors and R large: main term ~ 1
        alpha, beta = F(1009, 2), F(1013, 3)  # ratio 3027/2026 = 3*1009/(2*1013)
        rep = predictor(alpha, beta, y=100)
        assert 0.5 <= float(rep["main_term"]) <= 2.0

    def test_empirical_quotient_positive(self):
        rep = predictor_empirical(F(9, 2), 2, 10**4)
        assert rep["quotient"] is not None and rep["quotient"] > 0

    def test_report_assembly(self):
        rep = overlap_report(F(9, 2), 2, 2000, y=100)
        agree = rep.agreement()
        assert agree["direct_eq_shifted"] and agree["sum_within_bound"]
        assert rep.predictor is not None


class TestUnionExperiment:
    def test_single_set(self):
        rep = union_experiment([F(2)], 10**4)
        assert rep["union_measure"] == rep["single_measures"][0]
        assert abs(rep["union_measure"] / rough_density(2) - 1) < F(1, 100)

    def test_disjoint_pair_sums(self):
        rep = union_experiment([F(2), F(3)], 2000)
        assert rep["overlap_matrix"][0][1] == 0
        assert rep["union_measure"] == rep["sum_of_singles"]
        assert rep["second_moment_bound"] <= rep["union_measure"]

    def test_overlapping_family(self):
        rep = union_experiment([F(2), F(9, 2)], 2000)
        assert rep["overlap_matrix"][0][1] > 0
        assert rep["second_moment_bound"] <= rep["union_measure"]
