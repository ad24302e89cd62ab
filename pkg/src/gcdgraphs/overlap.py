"""Exact overlap measures for dilate-interval sets, computed three ways.

For alpha > beta the normalized measure of the intersection of the two
interval families restricted to [0, T] is computed:

* ``overlap_direct``    - the oracle: intersect the two IntervalUnions, measure;
* ``overlap_sum_formula`` - the double sum (1/T) sum_n sum_m (1 - |m*alpha - n*beta|)^+
  over admissible (rough) n with n*beta <= T, with the m-side cutoff dropped;
  agrees with the direct value up to the boundary slack 2/T;
* ``overlap_shifted``   - the residue-class decomposition: writing
  alpha/beta = s/t reduced and R = [alpha, beta] = s/alpha, each admissible n
  determines j == n*t (mod s) centered in (-s/2, s/2], a unique partner
  m = (n*t - j)/s, and a pair contribution of length (1 - |j|/R) clipped to
  [0, T].  Grouping by j yields the shifted counts S_j; summed exactly with
  clipping, the result equals the direct oracle bit for bit.

The asymptotic main-term predictor for the ratio
P(N_a cap N_b) / (P(N_a) P(N_b)) and the second-moment experiment driver
live here as well.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from .errors import DomainError
from .intervals import (
    build_dilate_union,
    normalized_measure,
    second_moment_lower_bound,
    union_of,
)
from .rationals import as_fraction, bracket, rough_density
from .sieve import TABLE


def _require_pair(alpha: Fraction, beta: Fraction, floor: int) -> None:
    if alpha < floor or beta < floor:
        raise DomainError(f"pair must satisfy alpha, beta >= {floor}")


def overlap_direct(alpha, beta, t, variant: str = "rough") -> Fraction:
    """Normalized measure of the intersection, via interval arithmetic."""
    alpha, beta, t = as_fraction(alpha), as_fraction(beta), as_fraction(t)
    _require_pair(alpha, beta, 1)
    if t < 1:
        raise DomainError("overlap_direct requires t >= 1")
    ua = build_dilate_union(alpha, t, variant)
    ub = build_dilate_union(beta, t, variant)
    return normalized_measure(ua.intersect(ub), t)


def _rough_tester(bound: Fraction):
    num, den = bound.numerator, bound.denominator
    spf = TABLE.spf

    def ok(n: int) -> bool:
        return n == 1 or spf(n) * den > num

    return ok


def overlap_sum_formula(alpha, beta, t, variant: str = "rough") -> Fraction:
    """The unclipped double sum; within 2/T of the direct value.

    The inner m ranges over all of N (its cutoff m*alpha <= T is dropped),
    while n is restricted by n*beta <= T, which is what produces the
    documented boundary discrepancy.
    """
    alpha, beta, tt = as_fraction(alpha), as_fraction(beta), as_fraction(t)
    _require_pair(alpha, beta, 1)
    rough = variant == "rough"
    if rough and alpha <= beta:
        raise DomainError("rough variant expects alpha > beta")
    n_ok = _rough_tester(beta) if rough else (lambda n: True)
    m_ok = _rough_tester(alpha) if rough else (lambda n: True)
    nmax = (tt / beta).numerator // (tt / beta).denominator
    total = Fraction(0)
    a_num, a_den = alpha.numerator, alpha.denominator
    b_num, b_den = beta.numerator, beta.denominator
    den = a_den * b_den
    for n in range(1, nmax + 1):
        if not n_ok(n):
            continue
        nb = n * b_num * a_den  # n*beta scaled by den
        # m with |m*alpha - n*beta| < 1: scaled, |m*a_num*b_den - nb| < den
        lo = (nb - den) // (a_num * b_den) + 1
        hi = (nb + den + a_num * b_den - 1) // (a_num * b_den) - 1
        for m in range(max(lo, 1), hi + 1):
            diff = abs(m * a_num * b_den - nb)
            if diff < den and m_ok(m):
                total += 1 - Fraction(diff, den)
    return total / tt


@dataclass
class ShiftedOverlap:
    """Residue-class evaluation of one admissible pair's overlap."""

    alpha: Fraction
    beta: Fraction
    t: Fraction
    s: int
    u: int
    v: int
    ratio_r: Fraction  # the bracket R = s/alpha
    shifted_formula: Fraction  # exact clipped measure; equals the direct oracle
    sum_formula: Fraction  # the unclipped double sum, grouped by j
    shifted_counts: dict[int, int] = field(default_factory=dict)
    disjoint: bool = False
    s0_count: int = 0
    s0_gate: bool = False


@dataclass
class OverlapReport:
    """The three independent overlap computations for one admissible pair,
    with the predicted main-term ratio when defined."""

    alpha: Fraction
    beta: Fraction
    t: Fraction
    direct: Fraction
    sum_formula: Fraction
    shifted_formula: Fraction
    predictor: Fraction | None = None
    ratio_to_predictor: Fraction | None = None
    disjoint: bool = False

    @property
    def boundary_bound(self) -> Fraction:
        return Fraction(2) / self.t

    def agreement(self) -> dict:
        return {
            "direct_eq_shifted": self.direct == self.shifted_formula,
            "sum_within_bound": abs(self.direct - self.sum_formula) <= self.boundary_bound,
        }


def _shift_setup(alpha: Fraction, beta: Fraction):
    ratio = alpha / beta
    s, tt = ratio.numerator, ratio.denominator
    if tt == 1:
        raise DomainError("alpha/beta must not be an integer")
    r_val = Fraction(s) / alpha
    u = pow(tt, -1, s)
    v = (u * tt - 1) // s
    return s, tt, u, v, r_val


def overlap_shifted(alpha, beta, t) -> ShiftedOverlap:
    """Residue-class evaluation of the rough-variant overlap.

    Requires alpha > beta >= 2 with non-integer rational ratio.  When the
    bracket R is <= 1 the two interval families are disjoint and the report
    carries a zero measure with the ``disjoint`` flag set.
    """
    alpha, beta, tt = as_fraction(alpha), as_fraction(beta), as_fraction(t)
    if not alpha > beta:
        raise DomainError("overlap_shifted requires alpha > beta")
    _require_pair(alpha, beta, 2)
    s, t_red, u, v, r_val = _shift_setup(alpha, beta)
    if r_val <= 1:
        return ShiftedOverlap(
            alpha, beta, tt, s, u, v, r_val,
            shifted_formula=Fraction(0), sum_formula=Fraction(0), disjoint=True,
        )

    a_num, a_den = alpha.numerator, alpha.denominator
    b_num, b_den = beta.numerator, beta.denominator
    den = 2 * a_den * b_den  # endpoints of pair intersections live over this
    t_times_den = tt * den
    t_floor = t_times_den.numerator // t_times_den.denominator
    n_ok = _rough_tester(beta)
    m_ok = _rough_tester(alpha)

    # r_val = s/alpha: |j| < R  <=>  |j| * a_num < s * a_den
    j_cap_num, j_cap_den = s * a_den, a_num

    # n must reach every pair whose clipped contribution is nonzero:
    # n*beta - 1/2 < T + 1, generously n <= (T + 2)/beta
    z = (tt + 2) / beta
    nmax = z.numerator // z.denominator
    half = s // 2

    total_scaled = 0  # clipped measure times den, interior pairs (integer)
    boundary = Fraction(0)  # pairs straddling T, measured exactly
    unclipped = Fraction(0)
    counts: dict[int, int] = {}
    s0_count = 0
    s_mod = s
    for n in range(1, nmax + 1):
        if not n_ok(n):
            continue
        jr = (n * t_red) % s_mod
        j = jr if jr <= half else jr - s_mod
        if abs(j) * j_cap_den >= j_cap_num:
            continue
        m = (n * t_red - j) // s_mod
        if m < 1 or not m_ok(m):
            continue
        # exact endpoints over den: centers m*alpha, n*beta; lo is always > 0
        cm = m * a_num * 2 * b_den
        cn = n * b_num * 2 * a_den
        lo = max(cm, cn) - a_den * b_den
        hi = min(cm, cn) + a_den * b_den
        if hi <= t_floor:
            total_scaled += hi - lo
        else:
            piece = min(Fraction(hi), t_times_den) - lo
            if piece > 0:
                boundary += piece
        # the unclipped sum keeps the n-side cutoff n*beta <= T only
        if n * b_num * tt.denominator <= tt.numerator * b_den:
            unclipped += 1 - Fraction(abs(j)) * alpha / s
            counts[j] = counts.get(j, 0) + 1
            if j == 0:
                s0_count += 1

    s0_gate = (
        TABLE.least_prime_factor_exceeds(s, beta)
        and TABLE.least_prime_factor_exceeds(t_red, alpha)
        and r_val > alpha / beta
    )
    measure = (Fraction(total_scaled, den) + boundary / den) / tt
    return ShiftedOverlap(
        alpha, beta, tt, s, u, v, r_val,
        shifted_formula=measure,
        sum_formula=unclipped / tt,
        shifted_counts=dict(sorted(counts.items())),
        s0_count=s0_count,
        s0_gate=s0_gate,
    )


def overlap_report(alpha, beta, t, y=None) -> OverlapReport:
    """Assemble the three independent overlap computations into one report.

    The direct oracle, the unclipped double sum, and the residue-class
    formula are each computed on their own path; the predictor main term is
    attached when the pair admits it (bracket > 1 and y >= 100 supplied).
    """
    alpha, beta, tt = as_fraction(alpha), as_fraction(beta), as_fraction(t)
    shifted = overlap_shifted(alpha, beta, tt)
    if shifted.disjoint:
        direct = overlap_direct(alpha, beta, tt, "rough")
        return OverlapReport(
            alpha, beta, tt,
            direct=direct, sum_formula=Fraction(0),
            shifted_formula=Fraction(0), disjoint=True,
        )
    direct = overlap_direct(alpha, beta, tt, "rough")
    sum_f = overlap_sum_formula(alpha, beta, tt, "rough")
    pred = ratio_to_pred = None
    if y is not None:
        pred = predictor(alpha, beta, y)["main_term"]
        from .intervals import build_dilate_union as _bdu

        pa = normalized_measure(_bdu(alpha, tt, "rough"), tt)
        pb = normalized_measure(_bdu(beta, tt, "rough"), tt)
        if pa and pb and pred:
            ratio_to_pred = (direct / (pa * pb)) / pred
    return OverlapReport(
        alpha, beta, tt,
        direct=direct, sum_formula=sum_f,
        shifted_formula=shifted.shifted_formula,
        predictor=pred, ratio_to_predictor=ratio_to_pred,
    )


def check_no_diagonal(alpha, beta, bound: int) -> bool:
    """Falsification probe for the diagonal equation m*alpha = n*beta.

    Preconditions: alpha > beta >= 1, alpha/beta not an integer, and
    [alpha, beta] <= alpha/beta.  Under these there must be no m, n <= bound
    with m*alpha = n*beta and P^-(m) > alpha; the probe searches anyway and
    returns True when (as the theory demands) nothing is found.
    """
    alpha, beta = as_fraction(alpha), as_fraction(beta)
    if not (alpha > beta >= 1):
        raise DomainError("need alpha > beta >= 1")
    ratio = alpha / beta
    if ratio.denominator == 1:
        raise DomainError("alpha/beta must not be an integer")
    if bracket(alpha, beta) > ratio:
        raise DomainError("need [alpha, beta] <= alpha/beta")
    s, t_red = ratio.numerator, ratio.denominator
    # m*alpha = n*beta forces m = t*k, n = s*k
    for k in range(1, bound // t_red + 1):
        if TABLE.least_prime_factor_exceeds(t_red * k, alpha):
            return False
    return True


# -- asymptotic predictor -----------------------------------------------------


def predictor(alpha, beta, y=100) -> dict:
    """Main term of the predicted overlap ratio for a rational-ratio pair.

    Returns the exact main term (2*C*S/R) * prod_{p | Q1, p > 2} (p-1)/(p-2)
    * prod_{p | Q2} p/(p-1), together with its exact ingredients, and the
    explicit size of the neglected error term log(2*beta)/(alpha/beta).  The
    error term is reported, never folded into the prediction.
    """
    alpha, beta, y = as_fraction(alpha), as_fraction(beta), as_fraction(y)
    if not alpha > beta:
        raise DomainError("predictor requires alpha > beta")
    _require_pair(alpha, beta, 2)
    if y < 100:
        raise DomainError("predictor requires y >= 100")
    s, t_red, _, _, r_val = _shift_setup(alpha, beta)
    if r_val <= 1:
        raise DomainError("predictor requires bracket > 1")

    st_primes = sorted(TABLE.factor(s * t_red))
    t_primes = set(TABLE.factor(t_red))
    q1 = 1
    for p in st_primes:
        if Fraction(p) <= beta:
            q1 *= p
    q2 = 1
    for p in sorted(t_primes):
        if beta < Fraction(p) <= alpha:
            q2 *= p

    c_const = Fraction(1)
    for p in TABLE.primes(int(beta)):
        if p >= 3 and Fraction(p) <= beta:
            c_const *= Fraction((p - 2) * p, (p - 1) * (p - 1))

    # S = sum over 1 <= |j| <= R, gcd(j, Q1*Q2) = 1, 2 | j*Q1 of
    #     (1 - |j|/R) prod_{3 <= p <= beta, p | j} (p-1)/(p-2)
    q12 = q1 * q2
    jmax = (r_val.numerator) // (r_val.denominator)
    s_sum = Fraction(0)
    for j in range(1, jmax + 1):
        if gcd(j, q12) != 1:
            continue
        if (j * q1) % 2 != 0:
            continue
        w = 1 - Fraction(j) / r_val
        term = Fraction(1)
        for p in TABLE.factor(j):
            if p >= 3 and Fraction(p) <= beta:
                term *= Fraction(p - 1, p - 2)
        s_sum += 2 * w * term

    main = (2 * c_const * s_sum / r_val)
    for p in TABLE.factor(q1):
        if p > 2:
            main *= Fraction(p - 1, p - 2)
    for p in TABLE.factor(q2):
        main *= Fraction(p, p - 1)

    # explicit size log(2*beta)/(alpha/beta), reported as a float diagnostic
    from math import log as _log

    err_float = _log(float(2 * beta)) / float(alpha / beta)
    return {
        "main_term": main,
        "r": r_val,
        "q1": q1,
        "q2": q2,
        "c": c_const,
        "s_sum": s_sum,
        "error_term_bound": err_float,
        "excluded_j_rule": "S_j = 0 when gcd(j, Q1*Q2) > 1 or 2 does not divide j*Q1",
    }


def predictor_empirical(alpha, beta, t, y=100) -> dict:
    """Predictor main term next to the realized finite-T ratio."""
    rep = overlap_shifted(alpha, beta, t)
    tt = as_fraction(t)
    pa = normalized_measure(build_dilate_union(alpha, tt, "rough"), tt)
    pb = normalized_measure(build_dilate_union(beta, tt, "rough"), tt)
    pred = predictor(alpha, beta, y)
    realized = rep.shifted_formula / (pa * pb) if pa and pb else Fraction(0)
    main = pred["main_term"]
    return {
        **pred,
        "t": tt,
        "realized_ratio": realized,
        "quotient": realized / main if main else None,
    }


# -- union experiments --------------------------------------------------------


def union_experiment(family, t) -> dict:
    """Measure data for the union of rough dilate sets of a finite family.

    Returns the union measure, the sum of individual measures, the
    second-moment lower bound, and the full pairwise overlap matrix, all
    exact.
    """
    tt = as_fraction(t)
    alphas = [as_fraction(a) for a in family]
    sets = [build_dilate_union(a, tt, "rough") for a in alphas]
    singles = [normalized_measure(u, tt) for u in sets]
    k = len(sets)
    matrix = [[Fraction(0)] * k for _ in range(k)]
    for i in range(k):
        matrix[i][i] = singles[i]
        for j in range(i + 1, k):
            ov = normalized_measure(sets[i].intersect(sets[j]), tt)
            matrix[i][j] = matrix[j][i] = ov
    union_measure = normalized_measure(union_of(sets), tt)
    return {
        "alphas": alphas,
        "t": tt,
        "union_measure": union_measure,
        "single_measures": singles,
        "sum_of_singles": sum(singles, Fraction(0)),
        "second_moment_bound": second_moment_lower_bound(sets, tt),
        "overlap_matrix": matrix,
        "kappa": [rough_density(a) for a in alphas],
    }
