"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines.  Tolerances are pinned here and nowhere else.
"""

import json
import random
import time
from fractions import Fraction as F
from math import comb, gcd

import pytest

from gcdgraphs.fixtures import all_instances
from gcdgraphs.gcdgraph import quality_variation
from gcdgraphs.intervals import (
    IntervalUnion,
    multiple_intervals,
    normalized_measure,
    rough_multiple_intervals,
    second_moment_lower_bound,
    union_of,
)
from gcdgraphs.overlap import overlap_direct, overlap_shifted, overlap_sum_formula
from gcdgraphs.pipeline import run_pipeline
from gcdgraphs.primitive import sperner_max_antichain
from gcdgraphs.rationals import (
    bracket,
    bracket_gcd_formula,
    rough_density,
)
from gcdgraphs.search import (
    check_connectivity,
    common_neighbor,
    maximal_subgraph,
    small_set_edges,
)
from gcdgraphs.serialize import dumps_canonical, trace_to_json, verify_trace_document
from conftest import random_weighted_graph

THETA = F(9, 4)


def report(num: int, ok: bool, text: str) -> None:
    print(f"ACCEPTANCE {num:>2} {'PASS' if ok else 'FAIL'}: {text}")
    assert ok, f"criterion {num}: {text}"


def test_criterion_01_bracket_identity_suite():
    rng = random.Random(1)
    start = time.time()
    checked = 0
    for _ in range(10**4):
        alpha = F(rng.randint(1, 10**6), rng.randint(1, 10**6))
        beta = F(rng.randint(1, 10**6), rng.randint(1, 10**6))
        b1 = bracket(alpha, beta)
        ok = b1 == bracket(beta, alpha) == bracket_gcd_formula(alpha, beta)
        assert ok, (alpha, beta)
        checked += 1
    elapsed = time.time() - start
    report(1, checked == 10**4 and elapsed < 10,
           f"10^4 random pairs, definition = gcd formula = symmetric, {elapsed:.1f}s < 10s")


def _admissible(rng, count, hmax):
    out = []
    while len(out) < count:
        alpha = F(rng.randint(4, hmax), rng.randint(1, hmax // 2))
        beta = F(rng.randint(4, hmax), rng.randint(1, hmax // 2))
        if alpha < beta:
            alpha, beta = beta, alpha
        if alpha == beta or beta < 2 or alpha.denominator > 1000 or (
            alpha / beta
        ).denominator == 1:
            continue
        if bracket(alpha, beta) <= 1:
            continue
        out.append((alpha, beta))
    return out


def test_criterion_02_three_way_agreement():
    rng = random.Random(2)
    pairs = _admissible(rng, 200, 1000)
    start = time.time()
    for alpha, beta in pairs:
        for t in (10**3, 10**4, 10**5):
            rep = overlap_shifted(alpha, beta, t)
            direct = overlap_direct(alpha, beta, t, "rough")
            sum_f = overlap_sum_formula(alpha, beta, t, "rough")
            assert rep.shifted_formula == direct, (alpha, beta, t)
            assert abs(direct - sum_f) <= F(2, t), (alpha, beta, t)
    elapsed = time.time() - start
    report(2, elapsed < 300,
           f"200 pairs x T in (1e3,1e4,1e5): direct = shifted exactly, "
           f"|direct - sum| <= 2/T, {elapsed:.0f}s < 300s")


def test_criterion_03_disjointness():
    rng = random.Random(3)
    pairs = []
    while len(pairs) < 100:
        alpha = F(rng.randint(4, 10**3))
        beta = F(rng.randint(2, int(alpha) - 1))
        if (alpha / beta).denominator == 1:
            continue
        if bracket(alpha, beta) > 1:
            continue
        pairs.append((alpha, beta))
    for alpha, beta in pairs:
        assert overlap_direct(alpha, beta, 10**5, "rough") == 0, (alpha, beta)
    report(3, True, "100 bracket<=1 pairs: rough overlap exactly 0 at T=1e5")


def test_criterion_04_measure_asymptotics():
    t = 10**6
    worst_m, worst_n = F(0), F(0)
    for alpha in range(2, 31):
        pm = normalized_measure(multiple_intervals(alpha, t), t)
        pn = normalized_measure(rough_multiple_intervals(alpha, t), t)
        err_m = abs(pm * alpha - 1)
        err_n = abs(pn / rough_density(alpha) - 1)
        assert err_m <= F(2, 100), (alpha, float(err_m))
        assert err_n <= F(5, 100), (alpha, float(err_n))
        worst_m, worst_n = max(worst_m, err_m), max(worst_n, err_n)
    report(4, True,
           f"alpha in 2..30 at T=1e6: |P*alpha-1| <= 0.02 (worst {float(worst_m):.2e}), "
           f"|P/kappa-1| <= 0.05 (worst {float(worst_n):.2e})")


def test_criterion_05_integer_correlation():
    rng = random.Random(5)
    t = 10**6
    singles = {a: normalized_measure(multiple_intervals(a, t), t) for a in range(2, 31)}
    pairs = set()
    while len(pairs) < 50:
        a, b = rng.randint(2, 30), rng.randint(2, 30)
        if a != b:
            pairs.add((min(a, b), max(a, b)))
    worst = 0.0
    for a, b in sorted(pairs):
        ov = normalized_measure(
            multiple_intervals(a, t).intersect(multiple_intervals(b, t)), t
        )
        ratio = ov / (gcd(a, b) * singles[a] * singles[b])
        assert F(9, 10) <= ratio <= F(11, 10), (a, b, float(ratio))
        worst = max(worst, abs(float(ratio) - 1))
    report(5, True,
           f"50 integer pairs <= 30 at T=1e6: ratio to gcd prediction in [0.9,1.1] "
           f"(worst deviation {worst:.2e})")


def test_criterion_06_second_moment_bound():
    rng = random.Random(6)
    for _ in range(10**3):
        fams = []
        for _ in range(rng.randint(1, 4)):
            ivs = []
            for _ in range(rng.randint(0, 5)):
                lo = F(rng.randint(0, 60), rng.randint(1, 6))
                ivs.append((lo, lo + F(rng.randint(1, 10), rng.randint(1, 6))))
            fams.append(IntervalUnion.from_fractions(ivs))
        t = rng.randint(4, 16)
        assert second_moment_lower_bound(fams, t) <= normalized_measure(
            union_of(fams), t
        )
    report(6, True, "10^3 random families: second-moment bound <= union measure, exact")


def test_criterion_07_sperner():
    for k in range(6):
        assert sperner_max_antichain(k) == comb(k, k // 2)
    report(7, True, "exhaustive antichain enumeration matches C(k, k//2) for k <= 5")


def test_criterion_08_maximality_suite():
    rng = random.Random(8)
    start = time.time()
    graphs = 0
    while graphs < 500:
        nv, nw = rng.randint(1, 4), rng.randint(1, 4)
        g = random_weighted_graph(rng, nv, nw, edge_p=rng.choice([0.3, 0.6, 0.9]))
        sub = maximal_subgraph(g, THETA).subgraph
        if not sub.nontrivial():
            continue
        check_connectivity(sub, THETA)  # raises on violation
        common_neighbor(sub, sub.w_set[0], "w", THETA)
        common_neighbor(sub, sub.v_set[0], "v", THETA)
        wmap = sub.weight_map
        mu_v, mu_w = sub.mu_v(), sub.mu_w()
        import itertools

        for eta in (F(1, 4), F(1, 2), F(1)):
            for asub in itertools.chain.from_iterable(
                itertools.combinations(sub.v_set, k) for k in range(len(sub.v_set) + 1)
            ):
                if sum((wmap[x] for x in asub), F(0)) > eta * mu_v:
                    continue
                for bsub in itertools.chain.from_iterable(
                    itertools.combinations(sub.w_set, k)
                    for k in range(len(sub.w_set) + 1)
                ):
                    if sum((wmap[x] for x in bsub), F(0)) > eta * mu_w:
                        continue
                    assert small_set_edges(sub, asub, bsub, eta, THETA)
        graphs += 1
    elapsed = time.time() - start
    report(8, elapsed < 600,
           f"500 exhaustive-maximal graphs (|V|+|W| <= 8): connectivity, "
           f"common-neighbor clauses, small-set bound for eta in (1/4,1/2,1); "
           f"{elapsed:.0f}s < 600s")


def test_criterion_09_quality_variation_identity():
    rng = random.Random(9)
    from gcdgraphs.rationals import val_p

    for i in range(10**3):
        g = random_weighted_graph(rng, rng.randint(1, 3), rng.randint(1, 3))
        p = rng.choice([2, 3, 5, 7])
        pairs = [(val_p(v, p), val_p(w, p)) for v in g.v_set for w in g.w_set]
        k, ell = rng.choice(pairs)
        theta = 2 + (F(1, 1000) if i % 50 == 0 else F(rng.randint(1, 8), 8))
        assert quality_variation(g, p, k, ell, theta)["equal"], (i, p, k, ell)
    report(9, True, "10^3 random (G,p,k,l): two-sided quality identity exact")


def test_criterion_10_pipeline_identity_block():
    instances = all_instances()
    assert len(instances) >= 5
    for inst in instances:
        tr = run_pipeline(inst.v_set, inst.w_set, inst.edges,
                          inst.y, inst.z, inst.x, inst.constants)
        assert tr.all_held(), (inst.name,
                               [c.name for c in tr.checks if not c.held])
        doc = json.loads(dumps_canonical(trace_to_json(tr)))
        assert verify_trace_document(doc) == [], inst.name
    # negative fixture: tampered quality must fail verification
    inst = instances[0]
    tr = run_pipeline(inst.v_set, inst.w_set, inst.edges,
                      inst.y, inst.z, inst.x, inst.constants)
    bad = json.loads(dumps_canonical(trace_to_json(tr)))
    bad["stage_quality"]["G1"]["factors"][0][0] = "31337/2"
    assert verify_trace_document(bad) != []
    report(10, True,
           f"{len(instances)} bundled instances: every exact assertion held, "
           "verify-trace clean, tampered trace rejected")


def test_criterion_11_behrend_regression_band():
    from gcdgraphs.behrend_band import band_report

    rep = band_report()
    assert rep["all_exact_match"], "rational parts must match bit-exactly"
    assert rep["all_in_band"]
    assert rep["all_within_median_guard"]
    report(11, True,
           f"{len(rep['entries'])} corpus entries reproduce recorded rationals "
           f"bit-exactly inside band [{rep['band'][0]:.3f}, {rep['band'][1]:.3f}]")
