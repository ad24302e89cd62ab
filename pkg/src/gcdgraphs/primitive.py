"""Primitive sets, divisibility-antichain tooling, weighted window sums with
their square-root-of-L shapes, and the nested level-set construction that
selects well-separated subfamilies of a rational family.

A set of naturals is primitive when no element divides another.  A set of
rationals has primitive numerators when, for each denominator q, the
numerators appearing over q form a primitive set.  The level-set
construction partitions a family into commensurability classes (elements
whose ratio is rational), picks window sets A_j = A cap [x_j^c, x_j] along a
rapidly growing sequence x_j, and removes from each window the elements
whose ratio to an earlier class representative has a small denominator; the
trace records every intermediate so the selection can be audited.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import exp, gcd, log, sqrt

from .errors import DomainError
from .powcmp import PowProduct, compare_value_to_pow10
from .rationals import MultSpec, as_fraction, rough_density
from .sieve import TABLE


# -- predicates ---------------------------------------------------------------


def is_primitive(elements) -> bool:
    """Divisibility-antichain test for a finite set of naturals."""
    elems = sorted(set(int(a) for a in elements))
    if any(a < 1 for a in elems):
        raise DomainError("primitive sets contain positive integers")
    elem_set = set(elems)
    for a in elems:
        m = 2 * a
        top = elems[-1]
        while m <= top:
            if m in elem_set:
                return False
            m += a
    return True


def is_primitive_numerators(rationals) -> bool:
    """Group by denominator and test each numerator set for primitivity."""
    by_q: dict[int, list[int]] = {}
    for r in rationals:
        r = as_fraction(r)
        if r <= 0:
            raise DomainError("rationals must be positive")
        by_q.setdefault(r.denominator, []).append(r.numerator)
    return all(is_primitive(nums) for nums in by_q.values())


@dataclass(frozen=True)
class PrimitiveSet:
    """Ascending naturals with the antichain invariant checked on construction."""

    elements: tuple[int, ...]

    def __init__(self, elements):
        elems = tuple(sorted(set(int(a) for a in elements)))
        if not is_primitive(elems):
            raise DomainError("not a primitive set: some element divides another")
        object.__setattr__(self, "elements", elems)

    def __iter__(self):
        return iter(self.elements)

    def __len__(self):
        return len(self.elements)


# -- classical sums -----------------------------------------------------------


def erdos_sum(a: PrimitiveSet) -> float:
    """sum over the set of 1/(a log a); requires 1 not in the set."""
    if 1 in a.elements:
        raise DomainError("erdos_sum undefined when 1 is an element (log 1 = 0)")
    return sum(1.0 / (n * log(n)) for n in a)


def behrend_log_sum(a: PrimitiveSet, x) -> Fraction:
    """Exact sum of 1/a over the window [1, x]."""
    xf = as_fraction(x)
    return sum((Fraction(1, n) for n in a if n <= xf), Fraction(0))


def behrend_log_sum_ratio(a: PrimitiveSet, x) -> float:
    """Diagnostic: the window sum against log(x)/sqrt(log log x)."""
    xf = float(as_fraction(x))
    if xf < 3:
        raise DomainError("ratio diagnostic needs x >= 3")
    shape = log(xf) / sqrt(max(log(log(xf)), 1e-9))
    return float(behrend_log_sum(a, x)) / shape


def aks_window_sum(a: PrimitiveSet, y, x) -> Fraction:
    """Exact sum of 1/a over the window [y, y*x]."""
    yf, xf = as_fraction(y), as_fraction(x)
    if yf < 1 or xf < 1:
        raise DomainError("window requires y >= 1 and x >= 1")
    hi = yf * xf
    return sum((Fraction(1, n) for n in a if yf <= n <= hi), Fraction(0))


# -- the generalized weighted window estimate ----------------------------------


def behrend_weighted_sum(a: PrimitiveSet, f: MultSpec, y, z) -> dict:
    """Exact lhs = sum_{a in A cap [z/y, z]} f(a)/a with its predicted shape.

    The shape is (log y / sqrt(L + 1)) * exp(sum_{p <= z} (f(p) - 1)/p) with
    L = sum_{p <= y} f(p)/p.  The implied constant of the estimate is
    empirical; only the ratio is reported.
    """
    yf, zf = as_fraction(y), as_fraction(z)
    if not (zf >= yf >= 2):
        raise DomainError("need z >= y >= 2")
    lo, hi = zf / yf, zf
    lhs = sum((f(n) / n for n in a if lo <= n <= hi), Fraction(0))
    big_l = sum((f.at_prime(p) / p for p in TABLE.primes(int(yf))), Fraction(0))
    expo = sum((float(f.at_prime(p)) - 1.0) / p for p in TABLE.primes(int(zf)))
    shape = log(float(yf)) / sqrt(float(big_l) + 1.0) * exp(expo)
    return {
        "lhs": lhs,
        "L": big_l,
        "rhs_shape": shape,
        "ratio": float(lhs) / shape if shape else float("inf"),
    }


def coprime_window_sum(a: PrimitiveSet, f: MultSpec, y, z, q: int, c=1) -> dict:
    """The q-coprime variant: lhs restricted to gcd(a, q) = 1.

    Requires 1 <= f <= tau_k and q <= y^C; the shape gains the factor
    phi(q)/q and uses sqrt(log log y).
    """
    yf, zf, cf = as_fraction(y), as_fraction(z), as_fraction(c)
    if not (zf >= yf >= 3):
        raise DomainError("need z >= y >= 3")
    if cf < 1 or q < 1:
        raise DomainError("need C >= 1 and q >= 1")
    # q <= y^C, decided exactly on rational powers
    if PowProduct.build((Fraction(q), Fraction(1)), (yf, -cf)).compare_to_one() > 0:
        raise DomainError(f"q = {q} exceeds y^C")
    for p in TABLE.primes(int(zf)):
        if f.at_prime(p) < 1:
            raise DomainError("coprime window sum requires f >= 1")
    lo, hi = zf / yf, zf
    lhs = sum((f(n) / n for n in a if lo <= n <= hi and gcd(n, q) == 1), Fraction(0))
    phi_over_q = Fraction(1)
    for p in TABLE.factor(q):
        phi_over_q *= Fraction(p - 1, p)
    expo = sum((float(f.at_prime(p)) - 1.0) / p for p in TABLE.primes(int(zf)))
    loglog = max(log(log(float(yf))), 1e-9)
    shape = float(phi_over_q) * log(float(yf)) / sqrt(loglog) * exp(expo)
    return {
        "lhs": lhs,
        "rhs_shape": shape,
        "ratio": float(lhs) / shape if shape else float("inf"),
        "phi_over_q": phi_over_q,
    }


# -- maximum antichains in squarefree divisor lattices --------------------------


def sperner_max_antichain(k: int) -> int:
    """Maximum antichain size in the divisor lattice of a product of k
    distinct primes, found by exhaustive backtracking over antichains.

    The lattice is the Boolean lattice on k bits; the answer equals
    C(k, floor(k/2)).  Brute-force scale: k <= 6.
    """
    if not 0 <= k <= 6:
        raise DomainError("exhaustive antichain search supports k <= 6")
    masks = list(range(1 << k))
    n = len(masks)
    best = 0

    def comparable(a: int, b: int) -> bool:
        return a & b == a or a & b == b

    def extend(idx: int, chosen: list[int]):
        nonlocal best
        if len(chosen) + (n - idx) <= best:
            return
        if idx == n:
            best = max(best, len(chosen))
            return
        m = masks[idx]
        if all(not comparable(m, c) for c in chosen):
            chosen.append(m)
            extend(idx + 1, chosen)
            chosen.pop()
        extend(idx + 1, chosen)

    extend(0, [])
    return best


# -- level-set construction -----------------------------------------------------


@dataclass(frozen=True)
class RationalFamily:
    """A finite set of positive rationals sharing one commensurability tag.

    Elements within a family have rational ratios; ratios across families
    with distinct tags are treated as irrational (the tag stands for a
    formal scale factor).  ``one_spaced`` and ``no_integer_ratios`` validate
    the declared invariants.
    """

    elements: tuple[Fraction, ...]
    tag: str | None = None

    def __init__(self, elements, tag: str | None = None):
        elems = tuple(sorted(as_fraction(e) for e in elements))
        if any(e <= 0 for e in elems):
            raise DomainError("family elements must be positive")
        object.__setattr__(self, "elements", elems)
        object.__setattr__(self, "tag", tag)

    def one_spaced(self) -> bool:
        return all(b - a >= 1 for a, b in zip(self.elements, self.elements[1:]))

    def no_integer_ratios(self) -> bool:
        es = self.elements
        for i, a in enumerate(es):
            for b in es[i + 1 :]:
                if (b / a).denominator == 1:
                    return False
        return True

    def __iter__(self):
        return iter(self.elements)

    def __len__(self):
        return len(self.elements)


def _lam(values) -> Fraction:
    return sum((1 / as_fraction(v) for v in values), Fraction(0))


@dataclass
class LevelTrace:
    """Full record of the level-set construction.

    ``selected[j]`` is the j-th retained level (window minus exclusions);
    ``excluded_memberships[j]`` lists, per level, the elements barred by the
    denominator cap of level j.  Cap and size quantities are carried in
    base-10 log form since the caps contain a 10^alpha factor.
    """

    c: Fraction
    xs: list[int] = field(default_factory=list)
    windows: list[list[tuple[str | None, Fraction]]] = field(default_factory=list)
    selected: list[list[tuple[str | None, Fraction]]] = field(default_factory=list)
    class_minima: dict[str | None, Fraction] = field(default_factory=dict)
    cap_log10: list[float] = field(default_factory=list)
    size_log10: list[float] = field(default_factory=list)
    excluded_memberships: list[list[tuple[str | None, Fraction]]] = field(
        default_factory=list
    )
    complete: bool = True
    shortfall_reason: str | None = None

    def level_lambda(self, j: int) -> Fraction:
        return _lam(v for _, v in self.selected[j])


def _window_lambda(tagged: list[tuple[str | None, Fraction]], xc: float, x: int) -> Fraction:
    return _lam(v for _, v in tagged if float(v) >= xc and v <= x)


def _find_level_x(tagged, c: Fraction, lower: int) -> int | None:
    """Smallest integer x > lower with lambda(A cap [x^c, x]) >= 2c log x.

    The left side changes only when an element enters the window at
    x = ceil(v) or leaves it just past v^(1/c); between events it is constant
    while the right side grows, so within each event interval the admissible
    x form a prefix and only interval starts need checking.
    """
    cf = float(c)
    lam_total = float(_lam(v for _, v in tagged))
    # beyond this the right side exceeds any achievable window mass
    x_bound = exp(min(lam_total / (2 * cf), 64.0))
    events: set[int] = {lower + 1}
    for _, v in tagged:
        events.add(max(lower + 1, -(-v.numerator // v.denominator)))
        leave = float(v) ** (1.0 / cf)
        if leave <= x_bound:
            events.add(max(lower + 1, int(leave) + 1))
    for x in sorted(events):
        lam = _window_lambda(tagged, x**cf, x)
        if lam > 0 and float(lam) >= 2 * cf * log(x):
            return x
    return None


def construct_level_sets(families, c, levels: int) -> LevelTrace:
    """Run the nested level-set selection on one or more tagged families.

    ``c`` must lie in (0, 1/10).  Levels are built while the input supports
    them; a shortfall yields a flagged partial trace, not an exception.
    The j-th denominator cap is 10^alpha * alpha * H(alpha/gamma) maximized
    over the windows so far, handled in log10 form throughout.
    """
    c = as_fraction(c)
    if not Fraction(0) < c < Fraction(1, 10):
        raise DomainError("c must lie in (0, 1/10)")
    if isinstance(families, RationalFamily):
        families = [families]
    if levels < 1:
        raise DomainError("need at least one level")

    tagged: list[tuple[str | None, Fraction]] = []
    for fam in families:
        if not fam.one_spaced():
            raise DomainError("families must be 1-spaced")
        tagged.extend((fam.tag, v) for v in fam)
    tagged.sort(key=lambda tv: tv[1])
    if any(v < 2 for _, v in tagged):
        raise DomainError("elements must be >= 2")

    trace = LevelTrace(c=c)
    by_tag: dict[str | None, list[Fraction]] = {}
    for tag, v in tagged:
        by_tag.setdefault(tag, []).append(v)
    trace.class_minima = {tag: min(vs) for tag, vs in by_tag.items()}

    cf = float(c)

    def window(x: int) -> list[tuple[str | None, Fraction]]:
        xc = x**cf
        return [(tag, v) for tag, v in tagged if float(v) >= xc and v <= x]

    # level 1
    x1 = _find_level_x(tagged, c, lower=1)
    if x1 is None:
        trace.complete = False
        trace.shortfall_reason = "no level-1 window satisfies the lambda bound"
        return trace
    trace.xs.append(x1)
    trace.windows.append(window(x1))
    trace.selected.append(list(trace.windows[0]))
    trace.excluded_memberships.append([])

    for _ in range(1, levels):
        j = len(trace.xs)
        # cap Q_j = max over union of windows of 10^alpha * alpha * H(alpha/gamma)
        cap_lg = None
        pool = [tv for w in trace.windows for tv in w]
        for tag, v in pool:
            ratio = v / trace.class_minima[tag]
            h = max(ratio.numerator, ratio.denominator)
            lg = float(v) + log(float(v) * h, 10)
            cap_lg = lg if cap_lg is None else max(cap_lg, lg)
        trace.cap_log10.append(cap_lg)

        # exclusion set: alpha = gamma * a/q with gamma a class minimum
        # within reach and q below the cap; q <= cap decided in log10 form
        excluded = []
        for tag, v in tagged:
            gamma = trace.class_minima[tag]
            if gamma > trace.xs[-1]:
                continue
            q = (v / gamma).denominator
            if log(q, 10) <= cap_lg:
                excluded.append((tag, v))
        size_lg = cap_lg * 2 + log(
            float(_lam(g for g in trace.class_minima.values() if g <= trace.xs[-1])), 10
        )
        trace.size_log10.append(size_lg)

        # threshold past which the excluded mass stays under c log x
        lam_excl = _lam(v for _, v in excluded)
        y_j = exp(float(lam_excl) / cf) if lam_excl > 0 else 1.0
        lower = max(int(y_j), int(float(trace.xs[-1]) ** (1.0 / cf)))
        x_next = _find_level_x(tagged, c, lower=lower)
        # the growth requirement x_next^c > x_prev is exact; bump past any
        # float-rounding shortfall near the boundary
        while x_next is not None and (
            PowProduct.build((Fraction(x_next), c)).compare(
                PowProduct.from_rational(trace.xs[-1])
            )
            <= 0
        ):
            x_next = _find_level_x(tagged, c, lower=x_next)
        if x_next is None:
            trace.complete = False
            trace.shortfall_reason = f"no admissible x after level {j}"
            trace.excluded_memberships.append(excluded)
            return trace
        trace.xs.append(x_next)
        win = window(x_next)
        excl_set = {(tag, v) for tag, v in excluded}
        sel = [tv for tv in win if tv not in excl_set]
        trace.windows.append(win)
        trace.selected.append(sel)
        trace.excluded_memberships.append(excluded)
        if float(trace.level_lambda(j)) < cf * log(x_next):
            trace.complete = False
            trace.shortfall_reason = f"selected level {j} misses the lambda bound"
            return trace
    return trace


# band of empirical constants for the level-sum check, recorded once for the
# bundled corpora; a genuinely new regime may need re-recording
LEVEL_SUM_BAND = (Fraction(1, 100), Fraction(100))


def check_level_trace(trace: LevelTrace, c=None) -> dict:
    """Audit a level trace against its two structural guarantees.

    (a) the total kappa mass over the selected levels sits inside the
        recorded empirical band around [c*J, J*log(1/c)];
    (b) any same-tag pair alpha > beta from the selected union whose bracket
        is at most 10^beta must share a level.  This is a theorem for valid
        traces; a violation indicates an implementation bug and is returned,
        never silently dropped.
    """
    c = trace.c if c is None else as_fraction(c)
    j_count = len(trace.selected)
    kappa_sum = sum(
        (rough_density(v) for level in trace.selected for _, v in level), Fraction(0)
    )
    lo_ref = float(c) * j_count
    hi_ref = j_count * log(1.0 / float(c))
    band_ok = (
        float(kappa_sum) >= float(LEVEL_SUM_BAND[0]) * lo_ref
        and float(kappa_sum) <= float(LEVEL_SUM_BAND[1]) * hi_ref
    )

    level_of: dict[tuple[str | None, Fraction], set[int]] = {}
    for j, level in enumerate(trace.selected):
        for tv in level:
            level_of.setdefault(tv, set()).add(j)
    union = sorted(level_of, key=lambda tv: tv[1])
    violations = []
    checked_pairs = 0
    for i, (tag_b, beta) in enumerate(union):
        for tag_a, alpha in union[i + 1 :]:
            if tag_a != tag_b or alpha == beta:
                continue
            ratio = alpha / beta
            h = max(ratio.numerator, ratio.denominator)
            br = Fraction(h) / alpha  # bracket for same-tag rationals
            if compare_value_to_pow10(br, beta) > 0:  # bracket > 10^beta: exempt
                continue
            checked_pairs += 1
            if not (level_of[(tag_a, alpha)] & level_of[(tag_b, beta)]):
                violations.append((alpha, beta))
    return {
        "kappa_sum": kappa_sum,
        "lower_reference": lo_ref,
        "upper_reference": hi_ref,
        "band": LEVEL_SUM_BAND,
        "band_ok": band_ok,
        "small_bracket_pairs_checked": checked_pairs,
        "shared_level_violations": violations,
        "complete": trace.complete,
    }
