"""GCD graphs: validation, density and quality identities, special
subgraphs, prime classification, structure detection, and the constants."""

from fractions import Fraction as F

import pytest

from gcdgraphs.errors import DomainError
from gcdgraphs.gcdgraph import (
    GcdGraph,
    compute_constants,
    concentration_witness,
    edge_density,
    exactness,
    quality,
    realized_valuation_pairs,
    signed_unaccounted,
    special,
    split_unaccounted,
    structure_witness,
    subgraph_relation,
    theta_weight,
    toy_constants,
    quality_variation,
    unaccounted_primes,
    validate,
)
from gcdgraphs.powcmp import PowProduct
from gcdgraphs.rationals import val_p
from conftest import random_weighted_graph


def graph(weights, v, w, e, p=(), f=None, g=None) -> GcdGraph:
    return GcdGraph.make(weights, v, w, e, p, f, g)


class TestValidate:
    def test_empty_primes_always_valid(self):
        g = graph({F(2): 1, F(3): 1}, [2], [3], [(2, 3)])
        assert validate(g)[0]

    def test_edge_content_example(self):
        g = graph({F(2): 1}, [2], [2], [(2, 2)], [2], {2: 1}, {2: 1})
        assert validate(g)[0]
        bad = graph({F(2): 1}, [2], [2], [(2, 2)], [2], {2: 2}, {2: 2})
        ok, viol = validate(bad)
        assert not ok and "p=2" in viol[0]

    def test_denominator_side(self):
        g = graph({F(3, 2): 1, F(5, 2): 1}, [F(3, 2)], [F(5, 2)],
                  [(F(3, 2), F(5, 2))], [2], {2: -1}, {2: -1})
        assert validate(g)[0]


class TestDensityWeightQuality:
    def test_single_edge_identity(self):
        g = graph({F(2): 1, F(3): 1}, [2], [3], [(2, 3)])
        assert edge_density(g) == 1
        for theta in (F(1), F(9, 4), F(3)):
            assert quality(g, theta).compare(PowProduct.from_rational(1)) == 0

    def test_two_by_two_half_density(self):
        g = graph({F(1): 1, F(2): 1, F(3): 1, F(5): 1}, [1, 2], [3, 5],
                  [(1, 3), (2, 5)])
        assert edge_density(g) == F(1, 2)
        # mu^theta = delta^theta * mu(V) mu(W) = 2^(2-theta); at theta = 3: 1/2
        assert theta_weight(g, 3).compare(PowProduct.from_rational(F(1, 2))) == 0

    def test_asymmetric_prime_multiplies_quality(self):
        base = graph({F(6): 1, F(3): 1}, [6], [3], [(6, 3)])
        lifted = graph({F(6): 1, F(3): 1}, [6], [3], [(6, 3)], [3], {3: 1}, {3: 0})
        # f - g = 1 at p = 3 multiplies the quality by 3... but first the
        # data must be consistent with the edge gcd: gcd(6,3) = 3, so
        # min(f+, g+) must be 1; instead certify (1,1) and compare with the
        # valid asymmetric variant on vertices 6 and 9
        asym = graph({F(6): 1, F(9): 1}, [6], [9], [(6, 9)], [3], {3: 1}, {3: 2})
        assert validate(asym)[0]
        q0 = quality(base, F(5, 2))
        q1 = quality(asym, F(5, 2))
        assert q1.compare(q0 * PowProduct.from_rational(3)) == 0

    def test_weight_ordering_invariant(self, rng):
        # mu^theta' <= mu^theta <= mu(E) for theta' >= theta >= 1
        for _ in range(60):
            g = random_weighted_graph(rng, rng.randint(1, 3), rng.randint(1, 3))
            t1 = F(rng.randint(4, 12), 4)
            t2 = t1 + F(rng.randint(1, 8), 4)
            w1, w2 = theta_weight(g, t1), theta_weight(g, t2)
            mu_e = PowProduct.from_rational(g.mu_e())
            assert w2.compare(w1) <= 0
            assert w1.compare(mu_e) <= 0


class TestSpecial:
    def test_restriction_example(self):
        g = graph({F(2): 1, F(4): 1}, [2, 4], [2], [(2, 2), (4, 2)])
        s = special(g, 2, 1, 1)
        assert s.v_set == (F(2),) and s.edges == ((F(2), F(2)),)
        assert validate(s)[0]
        assert subgraph_relation(s, g)["exact_sub"]

    def test_negative_valuation(self):
        g = graph({F(3, 2): 1, F(5): 1}, [F(3, 2)], [5], [(F(3, 2), 5)])
        assert special(g, 2, -1, 0).v_set == (F(3, 2),)

    def test_empty_is_trivial(self):
        g = graph({F(2): 1, F(4): 1}, [2, 4], [2], [(2, 2), (4, 2)])
        assert quality(special(g, 2, 5, 1), F(9, 4)).zero

    def test_guard_on_accounted_prime(self):
        g = graph({F(2): 1}, [2], [2], [(2, 2)], [2], {2: 1}, {2: 1})
        with pytest.raises(DomainError):
            special(g, 2, 1, 1)

    def test_partition_of_edge_mass(self, rng):
        for _ in range(40):
            g = random_weighted_graph(rng, rng.randint(1, 3), rng.randint(1, 3))
            p = rng.choice([2, 3, 5])
            total = F(0)
            for k, ell in realized_valuation_pairs(g, p):
                total += special(g, p, k, ell).mu_e()
            assert total == g.mu_e()


class TestQualityVariation:
    def test_identity_random(self, rng):
        for _ in range(150):
            g = random_weighted_graph(rng, rng.randint(1, 3), rng.randint(1, 3))
            p = rng.choice([2, 3, 5, 7])
            pairs = [
                (val_p(v, p), val_p(w, p))
                for v in g.v_set
                for w in g.w_set
            ]
            k, ell = rng.choice(pairs)
            theta = 2 + F(rng.randint(1, 8), 8)
            rep = quality_variation(g, p, k, ell, theta)
            assert rep["equal"]

    def test_identity_at_paper_theta(self, rng):
        g = random_weighted_graph(rng, 2, 2)
        rep = quality_variation(g, 2, val_p(g.v_set[0], 2), val_p(g.w_set[0], 2),
                                F(2001, 1000))
        assert rep["equal"]

    def test_same_valuation_whole_graph_ratio_one(self):
        g = graph({F(6): 2, F(15): 3}, [6], [15], [(6, 15)])
        rep = quality_variation(g, 3, 1, 1, F(9, 4))
        assert rep["lhs"].compare(PowProduct.from_rational(1)) == 0


class TestUnaccounted:
    def test_r_of_example(self):
        g = graph({F(6): 1}, [6], [6], [(6, 6)], [2], {2: 1}, {2: 1})
        assert unaccounted_primes(g) == [3]
        full = graph({F(6): 1}, [6], [6], [(6, 6)], [2, 3], {2: 1, 3: 1},
                     {2: 1, 3: 1})
        assert unaccounted_primes(full) == []

    def test_split_with_generous_c2(self):
        g = graph({F(6): 1}, [6], [6], [(6, 6)])
        bal, unbal = split_unaccounted(g, toy_constants(c2=1000))
        assert bal == [2, 3] and unbal == []

    def test_split_concentration_failure(self):
        # equal-weight split of 29-valuations on V: no common concentration
        g = graph(
            {F(29): 1, F(2): 1, F(58): 1},
            [29, 2], [58], [(29, 58), (2, 58)],
        )
        bal, unbal = split_unaccounted(g, toy_constants())
        assert 29 in unbal

    def test_concentration_witness(self):
        g = graph({F(29): 3, F(2): 1, F(58): 1}, [29, 2], [58],
                  [(29, 58), (2, 58)])
        assert concentration_witness(g, 29, F(3, 4)) == 1
        assert concentration_witness(g, 29, F(99, 100)) is None


class TestStructured:
    def test_uniform_valuation(self):
        g = graph({F(58): 1, F(29): 1}, [58], [29], [(58, 29)])
        ok, wit = structure_witness(g)
        assert ok and wit[29] == 1
        pos, neg = signed_unaccounted(g)
        assert pos == [29] and neg == []

    def test_swap_pattern_witness(self):
        g = graph({F(2): 1, F(4): 1, F(6): 1, F(12): 1}, [2, 4], [6, 12],
                  [(2, 12), (4, 6)])
        ok, wit = structure_witness(g)
        assert ok and wit[2] in (1, 2)

    def test_wide_spread_not_structured(self):
        g = graph({F(2): 1, F(8): 1, F(6): 1, F(24): 1}, [2, 8], [6, 24],
                  [(2, 6), (8, 24)])
        # pairs (1,1) and (3,3) at p = 2: no k fits
        ok, _ = structure_witness(g)
        assert not ok

    def test_denominator_prime_negative_class(self):
        g = graph({F(3, 23): 1, F(5, 23): 1}, [F(3, 23)], [F(5, 23)],
                  [(F(3, 23), F(5, 23))])
        ok, wit = structure_witness(g)
        assert ok and wit[23] == -1
        pos, neg = signed_unaccounted(g)
        assert neg == [23] and pos == []

    def test_partition_for_structured(self, rng):
        for _ in range(40):
            g = random_weighted_graph(rng, 2, 2)
            ok, _ = structure_witness(g)
            if ok:
                pos, neg = signed_unaccounted(g)
                assert sorted(pos + neg) == unaccounted_primes(g)


class TestExactness:
    def test_valid_but_not_exact(self):
        g = graph({F(4): 1, F(3): 1}, [4], [3], [], [2], {2: 1}, {2: 0})
        assert validate(g)[0]
        flags = exactness(g)
        assert not flags["exact"] and not flags["numerator_exact"]

    def test_special_always_exact_sub(self, rng):
        for _ in range(30):
            g = random_weighted_graph(rng, 2, 2)
            p = rng.choice([2, 3, 5])
            pairs = realized_valuation_pairs(g, p)
            if not pairs:
                continue
            k, ell = rng.choice(pairs)
            s = special(g, p, k, ell)
            rel = subgraph_relation(s, g)
            assert rel["subgraph"] and rel["exact_sub"]
            assert validate(s)[0]

    def test_trivial_primes_subgraph(self):
        g = graph({F(2): 1, F(3): 1, F(5): 1}, [2, 3], [5], [(2, 5), (3, 5)])
        sub = g.induced([F(2)], [F(5)])
        assert subgraph_relation(sub, g)["subgraph"]


class TestConstants:
    def test_paper_mode_tau_milli(self):
        c = compute_constants(F(2001, 1000), 2)
        assert c.c1.exact == F(10**7)
        assert c.c2 == 10 * 2 * F(10**7) ** 3
        assert c.c8 == 100 * 2 * c.c2

    def test_formula_relations(self):
        c = compute_constants(F(29, 10), 2)  # tau = 9/10
        tau = F(9, 10)
        c1 = F(10**4) / tau
        assert c.c1.exact == c1
        assert c.c2 == 10 * 2 * c1**3
        assert c.c3.exact == 1000 * c1**3
        assert c.c4 == F(10) ** 10 * 4 * c.c2**2
        assert c.c8 == 100 * 2 * c.c2

    def test_m_enclosure(self):
        c = compute_constants(F(2001, 1000))
        assert c.m_lo < c.m_hi
        assert abs(float(c.m_lo) - 54.598150033144236) < 1e-9

    def test_c7_log_only(self):
        c = compute_constants(F(2001, 1000), 2)
        assert c.c7_log10 == float("inf") or c.c7_log10 > 100

    def test_theta_guard(self):
        with pytest.raises(DomainError):
            compute_constants(F(2))
        with pytest.raises(DomainError):
            toy_constants(theta=F(7, 2))
