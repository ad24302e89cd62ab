"""Quality-iteration steps on GCD graphs and the end-to-end pipeline.

The iteration machinery transforms a GCD graph through exact subgraphs that
account for one unaccounted prime at a time, trading edge mass for certified
prime-power structure while tracking the quality q(G) exactly:

* ``absorb_prime``        - adjoin any one prime with loss at most c5;
* ``clear_small_primes``  - run absorb_prime over all unaccounted primes up
                            to c6, cumulative loss at most c5^steps;
* ``jump_or_concentration`` - the central dichotomy: either some special
                            subgraph refines to quality >= M^(f'!=g') * q(G),
                            or one valuation carries almost all weight on
                            both sides;
* ``tail_band_dichotomy`` - far-from-k valuations either produce a quality
                            jump or carry at most mu(E)/(4 p^(1+tau/4));
* ``iterate_unbalanced``  - one dichotomy application at an unbalanced prime,
                            shrinking R(G) with quality gain M^U;
* ``enforce_structure``   - when every unaccounted prime is balanced, filter
                            edges into the five-pattern band and the
                            per-row weight condition, losing at most half
                            the quality;
* ``structured_prime_step`` / ``iterate_signed`` - absorb a structured prime
                            with one-sided exactness and near-unit loss.

``run_pipeline`` drives an admissible bipartite instance through the staged
composition, extracts the factorization invariants of the final graph, and
asserts every identity edge by edge; the result is a fully serializable
trace that ``verify_trace`` can re-audit without re-running any search.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, log

from .errors import ComplianceError, DomainError, ValidationError
from .gcdgraph import (
    Constants,
    GcdGraph,
    concentration_witness,
    exactness,
    quality,
    realized_valuation_pairs,
    signed_unaccounted,
    special,
    split_unaccounted,
    structure_witness,
    subgraph_relation,
    unaccounted_primes,
    validate,
)
from .powcmp import PowProduct, compare_sum_to_one
from .rationals import as_fraction, bracket, height, prime_tail_sum, val_p
from .search import common_neighbor, is_single_deletion_stable, maximal_subgraph
from .sieve import TABLE


# -- bookkeeping ---------------------------------------------------------------


@dataclass
class Check:
    """One recorded inequality or identity with its outcome."""

    name: str
    held: bool
    lhs: str = ""
    rhs: str = ""
    note: str = ""


class CheckLog:
    """Collects checks; raises on violation under paper constants unless
    ``strict`` overrides that default."""

    def __init__(self, constants: Constants, strict: bool | None = None):
        self.constants = constants
        self.strict = (constants.mode == "paper") if strict is None else strict
        self.checks: list[Check] = []

    def record(self, name: str, held: bool, lhs="", rhs="", note="") -> bool:
        self.checks.append(Check(name, bool(held), str(lhs), str(rhs), note))
        if not held and self.strict:
            raise ComplianceError(f"{name}: {lhs} vs {rhs} {note}")
        return bool(held)


@dataclass
class DichotomyOutcome:
    branch: str  # "A" (quality jump) or "B" (concentration / tail bound)
    witness_graph: GcdGraph | None
    witness_k: int | None
    quality_before: PowProduct
    quality_after: PowProduct | None
    status: str  # "held" or "violated"
    detail: str = ""


def _maximal_refinement(graph: GcdGraph, theta) -> GcdGraph:
    return maximal_subgraph(graph, theta, "exhaustive").subgraph


def _quality_loss_ok(q_new: PowProduct, q_old: PowProduct, cap: Fraction) -> bool:
    """q_new >= q_old / cap, exactly."""
    bound = q_old * PowProduct.from_rational(cap).inverse()
    return q_new.compare(bound) >= 0


def _tau_exponent(constants: Constants) -> Fraction:
    return 1 + constants.tau / 4


def _power_bound_ok(
    mass: Fraction, total: Fraction, p: int, expo: Fraction, scale: int
) -> bool:
    """mass <= total / (scale * p^expo), exactly via cross-powers."""
    if mass == 0:
        return True
    lhs = PowProduct.from_rational(mass * scale) * PowProduct.build((Fraction(p), expo))
    return lhs.compare(PowProduct.from_rational(total)) <= 0


def _quality_clause_ok(
    q_after: PowProduct, q_before: PowProduct, p: int, same: int, expo: Fraction
) -> bool:
    """q_after >= q_before * (1 - same/p)^2 * (1 - p^-expo).

    The last factor is irrational; the inequality is rearranged to
    X + p^-expo >= 1 with X = q_after / (q_before * (1 - same/p)^2) and
    decided by certified intervals (with the exact shortcut X >= 1).
    """
    k = (1 - Fraction(same, p)) ** 2
    x = q_after * (q_before * PowProduct.from_rational(k)).inverse()
    if x.compare_to_one() >= 0:
        return True
    return compare_sum_to_one([x, PowProduct.build((Fraction(p), -expo))]) >= 0


# -- dichotomies -----------------------------------------------------------------


def tail_band_dichotomy(
    graph: GcdGraph, p: int, r: int, k: int, constants: Constants
) -> DichotomyOutcome:
    """Far-valuation dichotomy at a concentrated prime.

    Preconditions: p unaccounted, p^r > c4, and the W side has weight share
    at least 1 - c2/p at valuation k.  Either some special subgraph at
    distance > r from k jumps above M * q(G) (branch A), or the total edge
    mass at those distances is at most mu(E)/(4 p^(1 + tau/4)) (branch B).
    """
    if p not in unaccounted_primes(graph):
        raise DomainError(f"p = {p} is accounted for or absent")
    if r < 1 or Fraction(p) ** r <= constants.c4:
        raise DomainError("need p^r > c4")
    wmap = graph.weight_map
    mu_w = graph.mu_w()
    mass_k = sum((wmap[w] for w in graph.w_set if val_p(w, p) == k), Fraction(0))
    if mass_k < (1 - constants.c2 / p) * mu_w:
        raise DomainError("W side is not concentrated at valuation k")
    q_full = quality(graph, constants.theta)
    theta = constants.theta
    far_pairs = [
        (i, j)
        for i, j in realized_valuation_pairs(graph, p)
        if i == k and abs(j - k) >= r + 1
    ]
    for i, j in far_pairs:
        q_ij = quality(special(graph, p, i, j), theta)
        if constants.compare_vs_m_power(q_ij, q_full) > 0:
            return DichotomyOutcome(
                "A", special(graph, p, i, j), None, q_full, q_ij, "held",
                detail=f"special ({i},{j}) exceeds M*q",
            )
    tail_mass = Fraction(0)
    wmap = graph.weight_map
    for a, b in graph.edges:
        if val_p(a, p) == k and abs(val_p(b, p) - k) >= r + 1:
            tail_mass += wmap[a] * wmap[b]
    ok = _power_bound_ok(tail_mass, graph.mu_e(), p, _tau_exponent(constants), 4)
    if ok:
        return DichotomyOutcome("B", None, k, q_full, None, "held",
                                detail=f"tail mass {tail_mass}")
    if constants.mode == "paper":
        raise ComplianceError("tail-band dichotomy failed under paper constants")
    return DichotomyOutcome("B", None, k, q_full, None, "violated",
                            detail=f"tail mass {tail_mass} exceeds bound")


def jump_or_concentration(
    graph: GcdGraph, p: int, constants: Constants, require_exceeds_c2: bool = True
) -> DichotomyOutcome:
    """Central dichotomy at an unaccounted prime p.

    Branch A: some realized special subgraph, refined to a maximal one, has
    quality >= M^(f'(p) != g'(p)) * q(G); the witness is exact and maximal
    with R(witness) inside R(G) minus p.  Branch B: a common valuation k
    holds weight share >= 1 - c2/p on both sides.
    """
    if p not in unaccounted_primes(graph):
        raise DomainError(f"p = {p} is accounted for or absent")
    if require_exceeds_c2 and not Fraction(p) > constants.c2:
        raise DomainError("dichotomy requires p > c2")
    theta = constants.theta
    q_full = quality(graph, theta)
    best = None  # (is_asym, quality, (k,l), refined)
    for k, ell in realized_valuation_pairs(graph, p):
        refined = _maximal_refinement(special(graph, p, k, ell), theta)
        q_ref = quality(refined, theta)
        needed = 1 if k != ell else 0
        if constants.compare_vs_m_power(q_ref, q_full, needed) >= 0:
            cand = (q_ref, (k, ell), refined)
            if best is None or q_ref.compare(best[0]) > 0:
                best = cand
    if best is not None:
        _, (k, ell), refined = best
        return DichotomyOutcome(
            "A", refined, None, q_full, quality(refined, theta), "held",
            detail=f"maximal refinement of special ({k},{ell})",
        )
    conc = concentration_witness(graph, p, 1 - constants.c2 / p)
    if conc is not None:
        return DichotomyOutcome("B", None, conc, q_full, None, "held")
    if constants.mode == "paper":
        raise ComplianceError(f"dichotomy at p = {p} found neither branch")
    return DichotomyOutcome("B", None, None, q_full, None, "violated",
                            detail="neither quality jump nor concentration")


# -- single-prime absorption steps --------------------------------------------------


def absorb_prime(graph: GcdGraph, p: int, constants: Constants, log_: CheckLog) -> GcdGraph:
    """Adjoin one unaccounted prime via the best special subgraph of a
    maximal refinement; exact subgraph, quality loss at most c5."""
    if p not in unaccounted_primes(graph):
        raise DomainError(f"p = {p} not unaccounted in this graph")
    theta = constants.theta
    refined = _maximal_refinement(graph, theta)
    best = None
    for k, ell in realized_valuation_pairs(refined, p):
        cand = special(refined, p, k, ell)
        q_c = quality(cand, theta)
        if best is None or q_c.compare(best[0]) > 0:
            best = (q_c, cand)
    q_old = quality(graph, theta)
    out = best[1]
    cap = constants.c5.exact if constants.c5.exact is not None else constants.c3.exact
    log_.record(
        f"absorb_prime:{p}:loss<=c5",
        _quality_loss_ok(quality(out, theta), q_old, cap),
        lhs=f"q after absorbing {p}",
        rhs="q before / c5",
    )
    log_.record(
        f"absorb_prime:{p}:exact_subgraph",
        subgraph_relation(out, graph)["exact_sub"] and p not in unaccounted_primes(out),
    )
    return out


def clear_small_primes(graph: GcdGraph, constants: Constants, log_: CheckLog) -> GcdGraph:
    """Absorb every unaccounted prime up to c6; the final graph has
    R(G) beyond c6 and cumulative loss at most c5^steps (<= c7 in log form)."""
    if not graph.nontrivial():
        raise DomainError("clear_small_primes needs a non-trivial graph")
    current = graph
    steps = 0
    q_start = quality(current, constants.theta)
    while True:
        small = [p for p in unaccounted_primes(current) if not constants.c6 < p]
        if not small:
            break
        current = absorb_prime(current, small[0], constants, log_)
        steps += 1
    cap = constants.c5.exact if constants.c5.exact is not None else constants.c3.exact
    log_.record(
        "clear_small_primes:cumulative",
        _quality_loss_ok(quality(current, constants.theta), q_start, cap**max(steps, 1)),
        lhs="q after clearing small primes",
        rhs=f"q before / c5^{steps}",
        note=f"{steps} steps",
    )
    return current


def iterate_unbalanced(graph: GcdGraph, constants: Constants, log_: CheckLog) -> GcdGraph:
    """One dichotomy application at the smallest unbalanced prime.

    Branch A must apply (concentration together with no quality jump would
    make the prime balanced); the witness is exact, maximal, R(G) strictly
    shrinks, and quality gains M when the new data is asymmetric.
    """
    primes = unaccounted_primes(graph)
    if any(not constants.c6 < p for p in primes):
        raise DomainError("clear small primes first: R(G) must sit above c6")
    _, unbal = split_unaccounted(graph, constants)
    if not unbal:
        raise DomainError("no unbalanced prime to iterate on")
    p = unbal[0]
    outcome = jump_or_concentration(graph, p, constants)
    if outcome.branch != "A":
        log_.record(
            f"iterate_unbalanced:{p}:branch_a",
            False,
            note="dichotomy returned concentration at an unbalanced prime",
        )
        raise DomainError(f"no quality-jump witness at unbalanced prime {p}")
    out = outcome.witness_graph
    fm, gm = out.f_map, out.g_map
    asym = 1 if fm[p] != gm[p] else 0
    log_.record(
        f"iterate_unbalanced:{p}:gain",
        constants.compare_vs_m_power(
            quality(out, constants.theta), quality(graph, constants.theta), asym
        )
        >= 0,
        lhs="q after",
        rhs=f"M^{asym} * q before",
    )
    rel = subgraph_relation(out, graph)
    log_.record(f"iterate_unbalanced:{p}:exact_subgraph", rel["exact_sub"])
    log_.record(
        f"iterate_unbalanced:{p}:r_shrinks",
        set(unaccounted_primes(out)) < set(primes) or (
            set(unaccounted_primes(out)) <= set(primes) - {p}
        ),
    )
    return out


# -- structure stage -----------------------------------------------------------------


def enforce_structure(
    graph: GcdGraph, weight_rows, constants: Constants, log_: CheckLog
) -> GcdGraph:
    """Filter a balanced maximal graph into a structured one.

    For each unaccounted prime p the concentration valuation k_p defines a
    band; edges outside every band are discarded (their mass is provably
    small), then the per-row weight condition
    sum_{p in v/w, p in R(G)} a_{p,i} <= c8 * n * sum_{p in R(G)} a_{p,i}/p
    prunes the rest.  The result is a maximal refinement with quality at
    least half the input's.
    """
    if not graph.nontrivial():
        raise DomainError("structure stage needs a non-trivial graph")
    primes = unaccounted_primes(graph)
    if any(not constants.c6 < p for p in primes):
        raise DomainError("structure stage requires R(G) above c6")
    bal, unbal = split_unaccounted(graph, constants)
    if unbal:
        raise DomainError(f"unbalanced primes remain: {unbal}")
    theta = constants.theta
    q_before = quality(graph, theta)
    if not primes:
        log_.record("enforce_structure:trivial", True, note="R(G) empty")
        return graph

    wmap = graph.weight_map
    mu_e = graph.mu_e()
    expo = _tau_exponent(constants)
    edge_sets = []
    k_of: dict[int, int] = {}
    for p in primes:
        k_p = concentration_witness(graph, p, 1 - constants.c2 / p)
        if k_p is None:
            raise DomainError(f"balanced prime {p} lost its concentration witness")
        k_of[p] = k_p
        band: set = set()
        corner = far_v = far_w = off_band = Fraction(0)
        for a, b in graph.edges:
            ea, eb = val_p(a, p) - k_p, val_p(b, p) - k_p
            wt = wmap[a] * wmap[b]
            if (ea, eb) in {(-1, 0), (0, -1), (0, 0), (0, 1), (1, 0)}:
                band.add((a, b))
                continue
            off_band += wt
            if ea != 0 and eb != 0:
                corner += wt
            elif eb == 0:
                far_v += wt
            else:
                far_w += wt
        log_.record(
            f"enforce_structure:{p}:corner",
            _power_bound_ok(corner, mu_e, p, expo, 2),
            note="edges off the concentrated valuation on both sides",
        )
        log_.record(
            f"enforce_structure:{p}:far_rows",
            _power_bound_ok(far_v, mu_e, p, expo, 4),
            note="edges from distant V valuations into the concentrated W band",
        )
        log_.record(
            f"enforce_structure:{p}:far_cols",
            _power_bound_ok(far_w, mu_e, p, expo, 4),
            note="edges from the concentrated V band into distant W valuations",
        )
        log_.record(
            f"enforce_structure:{p}:off_band",
            _power_bound_ok(off_band, mu_e, p, expo, 1),
            note="total mass outside the five-pattern band",
        )
        edge_sets.append(band)

    core = set(graph.edges)
    for band in edge_sets:
        core &= band

    rows = [dict(row) for row in weight_rows]
    n_rows = max(len(rows), 1)
    bounds = []
    for row in rows:
        bounds.append(
            constants.c8
            * n_rows
            * sum((as_fraction(row.get(p, 0)) / p for p in primes), Fraction(0))
        )
    kept = []
    for a, b in sorted(core):
        ratio = a / b
        ok = True
        for row, bound in zip(rows, bounds):
            load = sum(
                (as_fraction(row.get(p, 0)) for p in primes if val_p(ratio, p) != 0),
                Fraction(0),
            )
            if load > bound:
                ok = False
                break
        if ok:
            kept.append((a, b))

    pruned = GcdGraph.make(
        graph.weights, graph.v_set, graph.w_set, kept, graph.primes, graph.f, graph.g
    )
    out = _maximal_refinement(pruned, theta)
    structured, witness = structure_witness(out)
    log_.record("enforce_structure:structured", structured, note=str(witness))
    log_.record(
        "enforce_structure:half_quality",
        _quality_loss_ok(quality(out, theta), q_before, Fraction(2)),
        lhs="q after structuring",
        rhs="q before / 2",
    )
    return out


# -- structured single-prime step ------------------------------------------------------


def structured_prime_step(
    graph: GcdGraph, p: int, constants: Constants, log_: CheckLog, k_p: int | None = None
) -> GcdGraph:
    """Absorb one structured prime with one-sided exactness.

    Case split on where the concentrated valuation k sits relative to the
    band center k_p: at k_p - 1 or k_p + 1 only two asymmetric specials can
    carry mass; at k_p the three candidates (the two-valuation block graph
    and the two adjacent specials) are scanned for the quality clause.
    Unbalanced p falls back to the central dichotomy.  The witness's new
    data lies within one of k_p, is denominator-exact when k_p > 0 and
    numerator-exact when k_p < 0, and loses quality at most
    (1 - [f'=g'=k_p]/p)^2 (1 - 1/p^(1+tau/4)).
    """
    structured, witness = structure_witness(graph)
    if not structured:
        raise DomainError("structured step requires a structured graph")
    if p not in witness:
        raise DomainError(f"p = {p} is not an unaccounted prime here")
    if k_p is None:
        k_p = witness[p]
    theta = constants.theta
    q_before = quality(graph, theta)

    def finish(candidate: GcdGraph, label: str) -> GcdGraph:
        out = _maximal_refinement(candidate, theta)
        fm, gm = out.f_map, out.g_map
        fp, gp = fm[p], gm[p]
        log_.record(
            f"structured_step:{p}:data_in_band",
            fp in (k_p - 1, k_p, k_p + 1) and gp in (k_p - 1, k_p, k_p + 1),
            note=f"f'={fp}, g'={gp}, k_p={k_p}",
        )
        rel = subgraph_relation(out, graph)
        if k_p > 0:
            log_.record(f"structured_step:{p}:denominator_exact", rel["denominator_exact_sub"])
        else:
            log_.record(f"structured_step:{p}:numerator_exact", rel["numerator_exact_sub"])
        same = 1 if fp == gp == k_p else 0
        held = _quality_clause_ok(
            quality(out, theta), q_before, p, same, _tau_exponent(constants)
        )
        log_.record(
            f"structured_step:{p}:quality_clause",
            held,
            lhs="q after",
            rhs="q before * (1 - [f'=g'=k]/p)^2 (1 - p^-(1+tau/4))",
            note=label,
        )
        log_.record(
            f"structured_step:{p}:r_shrinks",
            p not in unaccounted_primes(out),
        )
        return out

    bal, unbal = split_unaccounted(graph, constants)
    if p in unbal:
        # either an asymmetric special jumps by M, or the central dichotomy
        # provides the exact maximal witness
        for i, j in realized_valuation_pairs(graph, p):
            if i == j:
                continue
            q_ij = quality(special(graph, p, i, j), theta)
            if constants.compare_vs_m_power(q_ij, q_before) >= 0:
                return finish(special(graph, p, i, j), f"unbalanced special ({i},{j})")
        outcome = jump_or_concentration(graph, p, constants, require_exceeds_c2=False)
        if outcome.branch != "A":
            log_.record(f"structured_step:{p}:dichotomy", False,
                        note="no witness at unbalanced structured prime")
            raise DomainError(f"no witness at unbalanced structured prime {p}")
        return finish(outcome.witness_graph, "central dichotomy witness")

    k = concentration_witness(graph, p, 1 - constants.c2 / p)
    if k == k_p - 1:
        cands = [special(graph, p, k, k + 1), special(graph, p, k + 1, k)]
    elif k == k_p + 1:
        cands = [special(graph, p, k - 1, k), special(graph, p, k, k - 1)]
    elif k == k_p and k > 0:
        cands = [
            _block_graph(graph, p, k, k + 1, data=k),
            special(graph, p, k, k - 1),
            special(graph, p, k - 1, k),
        ]
    elif k == k_p and k < 0:
        cands = [
            _block_graph(graph, p, k - 1, k, data=k),
            special(graph, p, k, k + 1),
            special(graph, p, k + 1, k),
        ]
    else:
        # concentration fell outside the band; treat as a plain absorption
        cands = [special(graph, p, i, j) for i, j in realized_valuation_pairs(graph, p)]
    # first candidate whose maximal refinement meets the quality clause, in
    # the fixed case order
    fallback = None
    for cand in cands:
        refined = _maximal_refinement(cand, theta)
        q_ref = quality(refined, theta)
        if fallback is None or q_ref.compare(fallback[0]) > 0:
            fallback = (q_ref, cand)
        same_kp = 1 if cand.f_map[p] == cand.g_map[p] == k_p else 0
        if _quality_clause_ok(q_ref, q_before, p, same_kp, _tau_exponent(constants)):
            return finish(cand, f"case k={k}, k_p={k_p}")
    # none met the clause: fall back to the best and let the record show it
    log_.record(
        f"structured_step:{p}:clause_scan",
        False,
        note="no candidate met the quality clause",
    )
    return finish(fallback[1], "best-effort candidate")


def _block_graph(graph: GcdGraph, p: int, lo: int, hi: int, data: int) -> GcdGraph:
    """Two-valuation block: both sides restricted to valuations {lo, hi}
    with f(p) = g(p) = data.

    Valid because a structured band admits no (lo, lo) edges when data = hi
    and no (hi, hi) edges when data = lo, keeping the edge gcd content at
    exactly min(f, g)."""
    vs = [v for v in graph.v_set if val_p(v, p) in (lo, hi)]
    ws = [w for w in graph.w_set if val_p(w, p) in (lo, hi)]
    es = [
        (a, b)
        for a, b in graph.edges
        if val_p(a, p) in (lo, hi) and val_p(b, p) in (lo, hi)
    ]
    f = dict(graph.f)
    g = dict(graph.g)
    f[p] = g[p] = data
    return GcdGraph.make(graph.weights, vs, ws, es, graph.primes + (p,), f, g)


def iterate_signed(graph: GcdGraph, sign: str, constants: Constants, log_: CheckLog) -> GcdGraph:
    """One structured step at the smallest prime of the requested sign class.

    Asserts the sign of the new data (nonpositive for 'minus', nonnegative
    for 'plus'), the shrink of the sign class, and the one-sided exactness.
    """
    if sign not in ("minus", "plus"):
        raise DomainError("sign must be 'minus' or 'plus'")
    structured, witness = structure_witness(graph)
    if not structured:
        raise DomainError("iterate_signed requires a structured graph")
    primes = unaccounted_primes(graph)
    if any(not constants.c6 < p for p in primes):
        raise DomainError("iterate_signed requires R(G) above c6")
    pos, neg = signed_unaccounted(graph)
    pool = neg if sign == "minus" else pos
    if not pool:
        raise DomainError(f"no primes in the {sign} class")
    p = pool[0]
    out = structured_prime_step(graph, p, constants, log_)
    fm, gm = out.f_map, out.g_map
    if sign == "minus":
        log_.record(f"iterate_signed:{p}:sign", fm[p] <= 0 and gm[p] <= 0,
                    note=f"f'={fm[p]}, g'={gm[p]}")
    else:
        log_.record(f"iterate_signed:{p}:sign", fm[p] >= 0 and gm[p] >= 0,
                    note=f"f'={fm[p]}, g'={gm[p]}")
    pos2, neg2 = signed_unaccounted(out)
    if sign == "minus":
        log_.record(f"iterate_signed:{p}:class_shrinks",
                    set(neg2) < set(neg) and set(pos2) <= set(pos))
    else:
        log_.record(f"iterate_signed:{p}:class_shrinks",
                    set(pos2) < set(pos) and set(neg2) <= set(neg))
    return out


# -- the full pipeline ----------------------------------------------------------


@dataclass
class PipelineTrace:
    """Complete, serializable record of one pipeline run."""

    y: Fraction
    z: Fraction
    x: Fraction
    constants: Constants
    input_v: tuple
    input_w: tuple
    input_edges: tuple
    stages: dict = field(default_factory=dict)  # name -> GcdGraph
    stage_quality: dict = field(default_factory=dict)  # name -> PowProduct
    stage_flags: dict = field(default_factory=dict)
    extracted: dict = field(default_factory=dict)
    per_vertex: dict = field(default_factory=dict)
    bracket_factors: list = field(default_factory=list)
    x_ratios: list = field(default_factory=list)
    y_ratios: list = field(default_factory=list)
    checks: list = field(default_factory=list)
    final_report: dict = field(default_factory=dict)

    def all_held(self) -> bool:
        return all(c.held for c in self.checks)


def _lambda_weights(values) -> dict:
    return {v: 1 / as_fraction(v) for v in values}


def validate_pipeline_input(r_set, s_set, edge_set, y, z, x) -> None:
    """Admissibility of a pipeline instance.

    Both vertex families must be sets of primitive numerators with heights
    at most x; every edge must satisfy y < [rho, sigma] <= 2y and
    L(rho/sigma; z) > 1.  The first offending item is reported.
    """
    from .primitive import is_primitive_numerators

    y, z, x = as_fraction(y), as_fraction(z), as_fraction(x)
    r_set = [as_fraction(v) for v in r_set]
    s_set = [as_fraction(v) for v in s_set]
    if not is_primitive_numerators(r_set):
        raise ValidationError("left family is not a set of primitive numerators")
    if not is_primitive_numerators(s_set):
        raise ValidationError("right family is not a set of primitive numerators")
    for v in r_set + s_set:
        if v < 1:
            raise ValidationError(f"element {v} below 1")
        if height(v) > x:
            raise ValidationError(f"element {v} exceeds height bound {x}")
    for rho, sigma in edge_set:
        rho, sigma = as_fraction(rho), as_fraction(sigma)
        br = bracket(rho, sigma)
        if not (y < br <= 2 * y):
            raise ValidationError(
                f"edge ({rho},{sigma}) bracket {br} outside ({y}, {2*y}]"
            )
        if prime_tail_sum(rho / sigma, z) <= 1:
            raise ValidationError(
                f"edge ({rho},{sigma}) prime tail sum at z={z} not above 1"
            )
    # scale-invariance spot check: [g*rho, g*sigma] = [rho, sigma]/g exactly
    if edge_set:
        rho, sigma = (as_fraction(t) for t in sorted(edge_set)[0])
        for gamma in (Fraction(2), Fraction(3, 2)):
            if bracket(gamma * rho, gamma * sigma) != bracket(rho, sigma) / gamma:
                raise ValidationError("bracket rescaling identity failed")


def _stage_flags(graph: GcdGraph, theta) -> dict:
    structured, witness = structure_witness(graph)
    ex = exactness(graph)
    pos, neg = signed_unaccounted(graph)
    return {
        "valid": validate(graph)[0],
        "nontrivial": graph.nontrivial(),
        "deletion_stable": is_single_deletion_stable(graph, theta),
        "exact": ex["exact"],
        "numerator_exact": ex["numerator_exact"],
        "denominator_exact": ex["denominator_exact"],
        "structured": structured,
        "structure_witness": {str(p): k for p, k in witness.items()},
        "r_plus": pos,
        "r_minus": neg,
    }


def run_pipeline(r_set, s_set, edge_set, y, z, x, constants: Constants) -> PipelineTrace:
    """Drive an admissible instance through the staged quality iteration.

    Stage 1 clears small primes and iterates the central dichotomy at
    unbalanced primes until every unaccounted prime is balanced; stage 2
    enforces structure with the weight row a_p = [p > z]/p; stage 3 iterates
    signed steps at negative primes until none remain; stage 4 passes to the
    common-neighbor subgraph at the least edge's right endpoint.  Every
    claimed identity is asserted exactly along the way and recorded.
    """
    y, z, x = as_fraction(y), as_fraction(z), as_fraction(x)
    validate_pipeline_input(r_set, s_set, edge_set, y, z, x)
    theta = constants.theta
    log_ = CheckLog(constants)

    weights = _lambda_weights(list(r_set) + list(s_set))
    g0 = GcdGraph.make(weights, r_set, s_set, edge_set)
    if not g0.nontrivial():
        raise ValidationError("pipeline needs at least one edge")
    trace = PipelineTrace(
        y=y, z=z, x=x, constants=constants,
        input_v=g0.v_set, input_w=g0.w_set, input_edges=g0.edges,
    )
    trace.stages["G"] = g0
    trace.stage_quality["G"] = quality(g0, theta)

    # stage 1: small primes, then unbalanced iteration to a balanced graph
    g = clear_small_primes(g0, constants, log_)
    small_steps = len([c for c in log_.checks if c.name.endswith(":loss<=c5")])
    while True:
        g = _maximal_refinement(g, theta)
        _, unbal = split_unaccounted(g, constants)
        if not unbal:
            break
        g = iterate_unbalanced(g, constants, log_)
    g1 = g
    fm1, gm1 = g1.f_map, g1.g_map
    u_count = sum(1 for p in g1.primes if fm1[p] != gm1[p] and constants.c6 < p)
    trace.stages["G1"] = g1
    trace.stage_quality["G1"] = quality(g1, theta)
    trace.stage_flags["G1"] = _stage_flags(g1, theta)
    log_.record("G1:exact", trace.stage_flags["G1"]["exact"])
    log_.record("G1:deletion_stable", trace.stage_flags["G1"]["deletion_stable"])
    log_.record(
        "G1:balanced", not split_unaccounted(g1, constants)[1],
        note="no unbalanced primes remain",
    )
    cap = constants.c5.exact if constants.c5.exact is not None else None
    if cap is not None:
        ledger_ok = (
            constants.compare_vs_m_power(
                quality(g1, theta) * PowProduct.from_rational(cap ** max(small_steps, 0)),
                quality(g0, theta),
                u_count,
            )
            >= 0
        )
        log_.record(
            "G1:quality_ledger",
            ledger_ok,
            lhs=f"q(G1) * c5^{small_steps}",
            rhs=f"M^{u_count} * q(G)",
        )

    # stage 2: structure with the weight row [p > z]/p
    row = {
        p: Fraction(1, p)
        for p in unaccounted_primes(g1)
        if Fraction(p) > z
    }
    g2 = enforce_structure(g1, [row], constants, log_)
    trace.stages["G2"] = g2
    trace.stage_quality["G2"] = quality(g2, theta)
    trace.stage_flags["G2"] = _stage_flags(g2, theta)
    log_.record("G2:structured", trace.stage_flags["G2"]["structured"])
    log_.record(
        "G2:half_quality_vs_G1",
        _quality_loss_ok(quality(g2, theta), quality(g1, theta), Fraction(2)),
    )

    # stage 3: clear the negative class
    g = g2
    while True:
        _, neg = signed_unaccounted(g)
        if not neg:
            break
        g = iterate_signed(g, "minus", constants, log_)
    g3 = g
    trace.stages["G3"] = g3
    trace.stage_quality["G3"] = quality(g3, theta)
    trace.stage_flags["G3"] = _stage_flags(g3, theta)
    log_.record("G3:numerator_exact", trace.stage_flags["G3"]["numerator_exact"])
    log_.record("G3:structured", trace.stage_flags["G3"]["structured"])
    log_.record("G3:r_minus_empty", not signed_unaccounted(g3)[1])

    # stage 4: common-neighbor subgraph at the least edge's right endpoint
    anchor_edge = min(g3.edges)
    cn = common_neighbor(g3, anchor_edge[1], "w", theta)
    g4 = cn["subgraph"]
    trace.stages["G4"] = g4
    trace.stage_quality["G4"] = quality(g4, theta)
    trace.stage_flags["G4"] = _stage_flags(g4, theta)
    log_.record(
        "G4:anchor_adjacency",
        all(anchor_edge[1] in g4.neighborhood(v, "v") for v in g4.v_set),
    )

    # extraction and the identity block
    extracted = extract_invariants(
        g0, g1, g2, g3, g4, anchor_edge, y, z, x, u_count, constants, log_
    )
    trace.extracted = extracted["scalars"]
    trace.per_vertex = extracted["per_vertex"]
    trace.bracket_factors = extracted["bracket_factors"]
    trace.x_ratios = extracted["x_ratios"]
    trace.y_ratios = extracted["y_ratios"]
    trace.final_report = extracted["final_report"]
    trace.checks = log_.checks
    return trace


def extract_invariants(
    g0, g1, g2, g3, g4, anchor_edge, y, z, x, u_count, constants, log_: CheckLog
) -> dict:
    """Factorization invariants of the final stages and the edge-by-edge
    identity block; pure in its inputs so a verifier can replay it."""
    theta = constants.theta
    p2 = set(g2.primes)
    p3 = set(g3.primes)
    fm, gm = g3.f_map, g3.g_map

    def prod(primes, expo) -> int:
        out = 1
        for p in primes:
            out *= p ** expo(p)
        return out

    d_plus = prod(sorted(p2), lambda p: max(fm[p], 0))
    d_minus = prod(sorted(p2), lambda p: max(-fm[p], 0))
    e_plus = prod(sorted(p2), lambda p: max(gm[p], 0))
    e_minus = prod(sorted(p2), lambda p: max(-gm[p], 0))
    j_plus, j_minus = gcd(d_plus, e_plus), gcd(d_minus, e_minus)
    new3 = sorted(p3 - p2)
    dd_plus = prod(new3, lambda p: max(fm[p], 0))
    dd_minus = prod(new3, lambda p: max(-fm[p], 0))
    ee_plus = prod(new3, lambda p: max(gm[p], 0))
    ee_minus = prod(new3, lambda p: max(-gm[p], 0))
    jj_plus, jj_minus = gcd(dd_plus, ee_plus), gcd(dd_minus, ee_minus)

    log_.record("extract:D+E+J+=1", dd_plus == ee_plus == jj_plus == 1,
                lhs=f"D+={dd_plus}, E+={ee_plus}, J+={jj_plus}")

    structured, witness = structure_witness(g3)
    if not structured:
        log_.record("extract:final_stage_structured", False)
        raise DomainError("extraction requires a structured final stage")
    n_exponents = {p: witness[p] for p in unaccounted_primes(g3)}
    positive = all(k > 0 for k in n_exponents.values())
    log_.record("extract:core_exponents_positive", positive, lhs=str(n_exponents))
    if not positive:
        raise DomainError("core exponents must be positive after the minus stage")
    n_core = 1
    n_star = 1
    for p, k in sorted(n_exponents.items()):
        n_core *= p**k
        n_star *= p
    log_.record("extract:gcd(N,J-)=1", gcd(n_core, jj_minus) == 1,
                lhs=f"N={n_core}, J-={jj_minus}")
    log_.record("extract:J-<=x", Fraction(jj_minus) <= x, lhs=f"J-={jj_minus}")

    # the prime-power quality factor in factored form
    pp = 1
    for p in sorted(p3):
        pp *= p ** abs(fm[p] - gm[p])
    rhs_pp = Fraction(d_plus * e_plus * d_minus * dd_minus * e_minus * ee_minus,
                      (j_plus * j_minus * jj_minus) ** 2)
    log_.record("extract:prime_power_identity", Fraction(pp) == rhs_pp,
                lhs=str(pp), rhs=str(rhs_pp))

    def a_parts(v) -> tuple[int, int]:
        up = dn = 1
        for p, k in n_exponents.items():
            e = val_p(v, p)
            if e == k + 1:
                up *= p
            elif e == k - 1:
                dn *= p
        return up, dn

    per_vertex = {"a_plus": {}, "a_minus": {}, "b_plus": {}, "b_minus": {}}
    for v in g3.v_set:
        up, dn = a_parts(v)
        per_vertex["a_plus"][v] = up
        per_vertex["a_minus"][v] = dn
    for w in g3.w_set:
        up, dn = a_parts(w)
        per_vertex["b_plus"][w] = up
        per_vertex["b_minus"][w] = dn

    phi = Fraction(d_minus * dd_minus * e_minus * ee_minus,
                   j_plus * j_minus * jj_minus * n_core)
    bracket_factors = []
    r1_primes = set(unaccounted_primes(g1))
    tail_sq = sum(
        (Fraction(1, p * p) for p in r1_primes if Fraction(p) > z), Fraction(0)
    )
    small_extra_cap = Fraction(0)
    factor_ok = True
    for a_v, b_w in g3.edges:
        a, q = a_v.numerator, a_v.denominator
        b, r = b_w.numerator, b_w.denominator
        au, ad = per_vertex["a_plus"][a_v], per_vertex["a_minus"][a_v]
        bu, bd = per_vertex["b_plus"][b_w], per_vertex["b_minus"][b_w]
        # the four band parts are pairwise coprime and divide the radical
        quad = [au, ad, bu, bd]
        coprime = all(
            gcd(quad[i], quad[j]) == 1 for i in range(4) for j in range(i + 1, 4)
        )
        log_.record(f"edge{(a_v, b_w)}:mutual_coprime", coprime, lhs=str(quad))
        log_.record(f"edge{(a_v, b_w)}:radical_divides",
                    n_star % (au * ad * bu * bd) == 0)
        # factorization of the four integer parts
        nv = n_core * au
        ok_int = nv % ad == 0
        nv //= ad
        a1, rem_a = divmod(a, d_plus * nv)
        nw = n_core * bu
        ok_int = ok_int and nw % bd == 0
        nw //= bd
        b1, rem_b = divmod(b, e_plus * nw)
        q1, rem_q = divmod(q, d_minus * dd_minus)
        r1, rem_r = divmod(r, e_minus * ee_minus)
        log_.record(
            f"edge{(a_v, b_w)}:factorization",
            ok_int and rem_a == rem_b == rem_q == rem_r == 0,
            lhs=f"a'={a1}, b'={b1}, q'={q1}, r'={r1}",
        )
        log_.record(
            f"edge{(a_v, b_w)}:reduced_parts",
            gcd(a1, q1) == 1 and gcd(b1, r1) == 1,
        )
        # coprimality of the reduced parts with every certified block
        log_.record(f"edge{(a_v, b_w)}:coprime_to_core",
                    gcd(a1 * q1, n_core) == 1 and gcd(b1 * r1, n_core) == 1)
        log_.record(f"edge{(a_v, b_w)}:coprime_to_denominator_parts",
                    gcd(a1, d_minus * dd_minus) == 1 and gcd(b1, e_minus * ee_minus) == 1)
        log_.record(f"edge{(a_v, b_w)}:coprime_to_numerator_parts",
                    gcd(a1, d_plus) == 1 and gcd(b1, e_plus) == 1)
        # both gcds in certified factored form
        log_.record(
            f"edge{(a_v, b_w)}:gcd_identities",
            gcd(a, b) * ad * bd == j_plus * n_core
            and gcd(q, r) == j_minus * jj_minus,
            lhs=f"gcd(a,b)={gcd(a,b)}, gcd(q,r)={gcd(q,r)}",
            rhs=f"j+N/(A-B-)={Fraction(j_plus*n_core, ad*bd)}, j-J-={j_minus*jj_minus}",
        )
        # height conditions
        log_.record(
            f"edge{(a_v, b_w)}:height_bounds",
            Fraction(nv * a1) <= x and Fraction(nw * b1) <= x,
        )
        # bracket identity and the window factor
        br = bracket(a_v, b_w)
        ident = phi * (q1 * ad) * (r1 * bd)
        log_.record(f"edge{(a_v, b_w)}:bracket_identity", br == ident,
                    lhs=str(br), rhs=str(ident))
        factor = br / y
        bracket_factors.append(((a_v, b_w), factor))
        if not Fraction(1) < factor <= 2:
            factor_ok = False
        # the prime tail inequality, exact, with the explicit sub-threshold
        # term that appears only when z is below the small-prime cutoff
        lhs_tail = prime_tail_sum(a_v / b_w, z)
        u_term = Fraction(u_count) / z if z > 0 else Fraction(0)
        small_extra = sum(
            (
                Fraction(1, p)
                for p in p2
                if fm[p] != gm[p] and z < p and not constants.c6 < p
            ),
            Fraction(0),
        )
        small_extra_cap = max(small_extra_cap, small_extra)
        structure_term = constants.c8 * tail_sq
        factor_term = Fraction(0)
        for n in (au, ad, bu, bd, a1, q1, b1, r1):
            if n > 1:
                factor_term += sum(
                    (Fraction(1, p) for p in TABLE.factor(n) if Fraction(p) > z),
                    Fraction(0),
                )
        rhs_tail = u_term + small_extra + structure_term + factor_term
        log_.record(
            f"edge{(a_v, b_w)}:prime_tail_bound",
            lhs_tail <= rhs_tail,
            lhs=str(lhs_tail),
            rhs=str(rhs_tail),
            note="includes explicit sub-cutoff term in toy mode",
        )
    log_.record("extract:bracket_factors_in_window", factor_ok)

    # anchor quantities and the two-sided size bounds on the final stage
    v0, w0 = anchor_edge
    q0p = anchor_edge[0].denominator // (d_minus * dd_minus)
    r0p = anchor_edge[1].denominator // (e_minus * ee_minus)
    x_anchor = q0p * per_vertex["a_minus"][v0]
    y_anchor = r0p * per_vertex["b_minus"][w0]
    x_ratios, y_ratios = [], []
    for v in g4.v_set:
        qp = v.denominator // (d_minus * dd_minus)
        ratio = Fraction(qp * per_vertex["a_minus"][v], x_anchor)
        x_ratios.append((v, ratio))
    for w in g4.w_set:
        rp = w.denominator // (e_minus * ee_minus)
        ratio = Fraction(rp * per_vertex["b_minus"][w], y_anchor)
        y_ratios.append((w, ratio))
    log_.record(
        "G4:x_ratios_bounded",
        all(Fraction(1, 2) < t < 2 for _, t in x_ratios),
        lhs=str([str(t) for _, t in x_ratios]),
    )
    log_.record(
        "G4:y_ratios_bounded",
        all(Fraction(1, 4) < t < 4 for _, t in y_ratios),
        lhs=str([str(t) for _, t in y_ratios]),
    )

    # final bound components: q(G) against (y log x)^2 e^(-4z), reported
    q_g = quality(g0, theta)
    lx = log(float(x))
    shape = (float(y) * lx) ** 2 * _exp_neg(4 * float(z))
    final_report = {
        "q_log10": q_g.log10(),
        "shape_log10": log(shape, 10) if shape > 0 else float("-inf"),
        "ratio_log10": q_g.log10() - (log(shape, 10) if shape > 0 else float("-inf")),
        "u_count": u_count,
    }
    scalars = {
        "d_plus": d_plus, "d_minus": d_minus,
        "e_plus": e_plus, "e_minus": e_minus,
        "j_plus": j_plus, "j_minus": j_minus,
        "dd_plus": dd_plus, "dd_minus": dd_minus,
        "ee_plus": ee_plus, "ee_minus": ee_minus,
        "jj_plus": jj_plus, "jj_minus": jj_minus,
        "n_core_exponents": n_exponents,
        "n_core": n_core, "n_star": n_star,
        "u_count": u_count,
        "anchor_edge": anchor_edge,
        "x_anchor": x_anchor, "y_anchor": y_anchor,
    }
    return {
        "scalars": scalars,
        "per_vertex": per_vertex,
        "bracket_factors": bracket_factors,
        "x_ratios": x_ratios,
        "y_ratios": y_ratios,
        "final_report": final_report,
    }


def _exp_neg(t: float) -> float:
    from math import exp

    return exp(-t) if t < 700 else 0.0


# -- the qualifying-pair weight --------------------------------------------------


def qualifying_pair_weight(family, x, y, z) -> dict:
    """Exact lambda-mass of the qualifying ordered pairs of a family.

    Pairs (alpha, beta) qualify when H(alpha/beta) <= x^3,
    y < [alpha, beta] <= 2y, and L(alpha/beta; z) > 1; the mass is
    sum lambda(alpha) lambda(beta) with lambda = 1/alpha.  The reported
    ratio compares against y e^(-z) (log x)^2.
    """
    x, y, z = as_fraction(x), as_fraction(y), as_fraction(z)
    elems = sorted(as_fraction(v) for v in family)
    if any(v < 1 or v > x for v in elems):
        raise DomainError("family must sit inside [1, x]")
    total = Fraction(0)
    pairs = []
    for alpha in elems:
        for beta in elems:
            if alpha == beta:
                continue
            ratio = alpha / beta
            if ratio.denominator == 1 or ratio.numerator == 1:
                raise DomainError(f"integer ratio {alpha}/{beta} violates the precondition")
            if Fraction(height(ratio)) > x**3:
                continue
            br = bracket(alpha, beta)
            if not (y < br <= 2 * y):
                continue
            if prime_tail_sum(ratio, z) <= 1:
                continue
            total += 1 / (alpha * beta)
            pairs.append((alpha, beta))
    lx = log(float(x)) if x > 1 else 1.0
    shape = float(y) * _exp_neg(float(z)) * lx * lx
    return {
        "mass": total,
        "pairs": pairs,
        "shape": shape,
        "ratio": float(total) / shape if shape else float("inf"),
    }
