"""Weighted bipartite graphs over positive rationals with multiplicative
data certifying prime-power divisibility, and the quality calculus on them.

A GCD graph is (mu, V, W, E, P, f, g): a weighted bipartite graph whose
vertex sets are positive rationals, a finite prime set P, and functions
f, g: P -> Z such that for every p in P and every vertex a/q in V (b/r in W)
the positive part of f (g) divides the numerator and the negative part the
denominator, and along every edge the prime content of gcd(numerator pair)
and gcd(denominator pair) is exactly min(f+, g+) resp. min(f-, g-).

Derived quantities: edge density delta = mu(E)/(mu(V) mu(W)), theta-weight
mu^theta = delta^theta mu(V) mu(W), and the theta-quality
q(G) = mu^theta(G) * prod_{p in P} p^|f(p) - g(p)|.  Qualities and weights
are compared exactly through PowProduct values (rational powers of
rationals); no ordering decision ever rides on floating arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .errors import DomainError
from .powcmp import ZERO, PowProduct
from .rationals import as_fraction, val_p
from .sieve import TABLE

Vertex = Fraction


def _pos(k: int) -> int:
    return k if k > 0 else 0


def _neg(k: int) -> int:
    return -k if k < 0 else 0


@dataclass(frozen=True)
class GcdGraph:
    """Immutable GCD graph; vertex weights are positive rationals.

    ``weights`` must cover V union W.  Vertices, edges and primes are stored
    sorted for deterministic iteration and hashing.
    """

    weights: tuple[tuple[Vertex, Fraction], ...]
    v_set: tuple[Vertex, ...]
    w_set: tuple[Vertex, ...]
    edges: tuple[tuple[Vertex, Vertex], ...]
    primes: tuple[int, ...]
    f: tuple[tuple[int, int], ...]
    g: tuple[tuple[int, int], ...]

    @staticmethod
    def make(weights, v_set, w_set, edges, primes=(), f=None, g=None) -> "GcdGraph":
        wmap = {as_fraction(k): as_fraction(v) for k, v in dict(weights).items()}
        vs = tuple(sorted({as_fraction(v) for v in v_set}))
        ws = tuple(sorted({as_fraction(w) for w in w_set}))
        es = tuple(sorted((as_fraction(a), as_fraction(b)) for a, b in set(edges)))
        ps = tuple(sorted(set(int(p) for p in primes)))
        fmap = {int(p): int(k) for p, k in dict(f or {}).items()}
        gmap = {int(p): int(k) for p, k in dict(g or {}).items()}
        for x in vs + ws:
            if x <= 0:
                raise DomainError("vertices must be positive rationals")
            if x not in wmap:
                raise DomainError(f"vertex {x} has no weight")
            if wmap[x] <= 0:
                raise DomainError(f"vertex {x} must have positive weight")
        for a, b in es:
            if a not in vs or b not in ws:
                raise DomainError(f"edge ({a},{b}) not inside V x W")
        for p in ps:
            if not TABLE.is_prime(p):
                raise DomainError(f"{p} in prime set is not prime")
            if p not in fmap or p not in gmap:
                raise DomainError(f"multiplicative data missing at p = {p}")
        return GcdGraph(
            weights=tuple(sorted((k, wmap[k]) for k in set(vs + ws))),
            v_set=vs,
            w_set=ws,
            edges=es,
            primes=ps,
            f=tuple(sorted((p, fmap[p]) for p in ps)),
            g=tuple(sorted((p, gmap[p]) for p in ps)),
        )

    # -- views ---------------------------------------------------------------

    @property
    def weight_map(self) -> dict[Vertex, Fraction]:
        return dict(self.weights)

    @property
    def f_map(self) -> dict[int, int]:
        return dict(self.f)

    @property
    def g_map(self) -> dict[int, int]:
        return dict(self.g)

    def mu_v(self) -> Fraction:
        w = self.weight_map
        return sum((w[v] for v in self.v_set), Fraction(0))

    def mu_w(self) -> Fraction:
        w = self.weight_map
        return sum((w[x] for x in self.w_set), Fraction(0))

    def mu_e(self) -> Fraction:
        w = self.weight_map
        return sum((w[a] * w[b] for a, b in self.edges), Fraction(0))

    def nontrivial(self) -> bool:
        return bool(self.edges)

    def neighborhood(self, x: Vertex, side: str) -> list[Vertex]:
        if side == "v":
            return [b for a, b in self.edges if a == x]
        return [a for a, b in self.edges if b == x]

    def induced(self, v_sub, w_sub) -> "GcdGraph":
        vs = set(v_sub) & set(self.v_set)
        ws = set(w_sub) & set(self.w_set)
        es = [(a, b) for a, b in self.edges if a in vs and b in ws]
        return GcdGraph.make(self.weights, vs, ws, es, self.primes, self.f, self.g)

    def with_data(self, primes, f, g) -> "GcdGraph":
        return GcdGraph.make(
            self.weights, self.v_set, self.w_set, self.edges, primes, f, g
        )


# -- validation ----------------------------------------------------------------


def validate(graph: GcdGraph) -> tuple[bool, list[str]]:
    """Check the vertex divisibility and edge gcd-content conditions.

    Returns (ok, violations); each violation names the prime, the vertex or
    edge, and the clause that failed.
    """
    out: list[str] = []
    fm, gm = graph.f_map, graph.g_map
    for p in graph.primes:
        fp, gp = fm[p], gm[p]
        for v in graph.v_set:
            ev = val_p(v, p)
            if fp > 0 and ev < fp:
                out.append(f"p={p} vertex {v} in V: p^{fp} does not divide numerator")
            if fp < 0 and ev > fp:
                out.append(f"p={p} vertex {v} in V: p^{-fp} does not divide denominator")
        for w in graph.w_set:
            ew = val_p(w, p)
            if gp > 0 and ew < gp:
                out.append(f"p={p} vertex {w} in W: p^{gp} does not divide numerator")
            if gp < 0 and ew > gp:
                out.append(f"p={p} vertex {w} in W: p^{-gp} does not divide denominator")
        for a, b in graph.edges:
            ea, eb = val_p(a, p), val_p(b, p)
            if min(_pos(ea), _pos(eb)) != min(_pos(fp), _pos(gp)):
                out.append(
                    f"p={p} edge ({a},{b}): numerator gcd content "
                    f"{min(_pos(ea), _pos(eb))} != min(f+,g+) = {min(_pos(fp), _pos(gp))}"
                )
            if min(_neg(ea), _neg(eb)) != min(_neg(fp), _neg(gp)):
                out.append(
                    f"p={p} edge ({a},{b}): denominator gcd content "
                    f"{min(_neg(ea), _neg(eb))} != min(f-,g-) = {min(_neg(fp), _neg(gp))}"
                )
    return (not out, out)


# -- density, weights, quality ---------------------------------------------------


def edge_density(graph: GcdGraph) -> Fraction:
    if not graph.nontrivial():
        return Fraction(0)
    return graph.mu_e() / (graph.mu_v() * graph.mu_w())


def theta_weight(graph: GcdGraph, theta) -> PowProduct:
    """mu^theta(G) = mu(E)^theta / (mu(V) mu(W))^(theta-1) as a PowProduct."""
    theta = as_fraction(theta)
    if theta < 1:
        raise DomainError("theta-weight requires theta >= 1")
    if not graph.nontrivial():
        return ZERO
    return PowProduct.build(
        (graph.mu_e(), theta), (graph.mu_v() * graph.mu_w(), 1 - theta)
    )


def prime_power_factor(graph: GcdGraph) -> PowProduct:
    fm, gm = graph.f_map, graph.g_map
    return PowProduct.build(
        *(((Fraction(p), Fraction(abs(fm[p] - gm[p]))) for p in graph.primes))
    )


def quality(graph: GcdGraph, theta) -> PowProduct:
    """theta-quality: theta-weight times prod p^|f(p)-g(p)|."""
    w = theta_weight(graph, theta)
    if w.zero:
        return ZERO
    return w * prime_power_factor(graph)


# -- special subgraphs -------------------------------------------------------------


def vertices_at_valuation(vertices, p: int, k: int) -> list[Vertex]:
    return [v for v in vertices if val_p(v, p) == k]


def special(graph: GcdGraph, p: int, k: int, ell: int) -> GcdGraph:
    """Restrict both sides to given p-adic valuations and adjoin p to P with
    f(p) = k, g(p) = ell.  Always a valid, exact GCD subgraph of its input."""
    if p in graph.primes:
        raise DomainError(f"p = {p} already accounted for")
    if not TABLE.is_prime(p):
        raise DomainError(f"{p} is not prime")
    vs = vertices_at_valuation(graph.v_set, p, k)
    ws = vertices_at_valuation(graph.w_set, p, ell)
    es = [(a, b) for a, b in graph.edges if val_p(a, p) == k and val_p(b, p) == ell]
    f = dict(graph.f)
    g = dict(graph.g)
    f[p], g[p] = k, ell
    return GcdGraph.make(
        graph.weights, vs, ws, es, graph.primes + (p,), f, g
    )


def quality_variation(graph: GcdGraph, p: int, k: int, ell: int, theta) -> dict:
    """Both sides of the special-subgraph quality identity, independently.

    Left: q(G_{p^k, p^ell}) / q(G).  Right: (mu ratios)^powers * p^|k-ell|.
    They must be exactly equal; the comparison result is included.
    """
    theta = as_fraction(theta)
    if not graph.nontrivial():
        raise DomainError("quality variation needs a non-trivial graph")
    sub = special(graph, p, k, ell)
    mu_vk = sub.mu_v()
    mu_wl = sub.mu_w()
    if mu_vk == 0 or mu_wl == 0:
        raise DomainError("restricted vertex parts must have positive weight")
    q_sub = quality(sub, theta)
    q_full = quality(graph, theta)
    lhs = q_sub * q_full.inverse() if not q_sub.zero else ZERO
    if sub.mu_e() == 0:
        rhs = ZERO
    else:
        rhs = PowProduct.build(
            (sub.mu_e() / graph.mu_e(), theta),
            (graph.mu_v() / mu_vk, theta - 1),
            (graph.mu_w() / mu_wl, theta - 1),
            (Fraction(p), Fraction(abs(k - ell))),
        )
    equal = lhs.compare(rhs) == 0 if not (lhs.zero and rhs.zero) else True
    return {"lhs": lhs, "rhs": rhs, "equal": equal, "subgraph": sub}


# -- unaccounted primes and their classification -------------------------------------


def unaccounted_primes(graph: GcdGraph) -> list[int]:
    """Primes dividing an edge's gcd(numerators)*gcd(denominators) that are
    not yet in P."""
    found: set[int] = set()
    pset = set(graph.primes)
    for a, b in graph.edges:
        num_gcd = gcd(a.numerator, b.numerator)
        den_gcd = gcd(a.denominator, b.denominator)
        for p in TABLE.factor(num_gcd * den_gcd):
            if p not in pset:
                found.add(p)
    return sorted(found)


def realized_valuation_pairs(graph: GcdGraph, p: int) -> list[tuple[int, int]]:
    """Distinct (val_p on V side, val_p on W side) pairs over the edges."""
    return sorted({(val_p(a, p), val_p(b, p)) for a, b in graph.edges})


def concentration_witness(graph: GcdGraph, p: int, threshold: Fraction) -> int | None:
    """Some k with both mu(V_{p^k})/mu(V) and mu(W_{p^k})/mu(W) >= threshold.

    With threshold <= 0 any valuation qualifies; the most concentrated
    realized k is returned for determinism.
    """
    wmap = graph.weight_map
    mu_v, mu_w = graph.mu_v(), graph.mu_w()
    ks = sorted({val_p(x, p) for x in graph.v_set} | {val_p(x, p) for x in graph.w_set})
    best = None
    best_mass = None
    for k in ks:
        mv = sum((wmap[x] for x in graph.v_set if val_p(x, p) == k), Fraction(0))
        mw = sum((wmap[x] for x in graph.w_set if val_p(x, p) == k), Fraction(0))
        if mv >= threshold * mu_v and mw >= threshold * mu_w:
            mass = mv / mu_v + mw / mu_w
            if best_mass is None or mass > best_mass:
                best, best_mass = k, mass
    return best


def split_unaccounted(graph: GcdGraph, constants) -> tuple[list[int], list[int]]:
    """Classify each unaccounted prime as balanced or unbalanced.

    Balanced requires (i) a common concentrated valuation k on both sides at
    threshold 1 - C2/p and (ii) no off-diagonal special subgraph with
    quality >= M * q(G); everything else is unbalanced.  Only valuation pairs
    realized by V x W matter: all other special subgraphs are trivial.
    """
    theta = constants.theta
    q_full = quality(graph, theta)
    balanced, unbalanced = [], []
    for p in unaccounted_primes(graph):
        thr = 1 - constants.c2 / p
        conc = concentration_witness(graph, p, thr)
        ok = conc is not None
        if ok:
            for i, j in realized_valuation_pairs(graph, p):
                if i == j:
                    continue
                q_ij = quality(special(graph, p, i, j), theta)
                if constants.compare_vs_m_power(q_ij, q_full) >= 0:
                    ok = False
                    break
        (balanced if ok else unbalanced).append(p)
    return balanced, unbalanced


# -- structured graphs ------------------------------------------------------------


FIVE_PATTERN = {(-1, 0), (0, -1), (0, 0), (0, 1), (1, 0)}


def structure_witness(graph: GcdGraph) -> tuple[bool, dict[int, int]]:
    """Search for per-prime offsets k_p putting every edge's valuation pair
    inside the five-pattern band; k_p = 0 is impossible for unaccounted
    primes and is excluded from the candidates.

    Returns (is_structured, witness map); the witness picks the smallest
    admissible k_p.
    """
    witness: dict[int, int] = {}
    for p in unaccounted_primes(graph):
        pairs = realized_valuation_pairs(graph, p)
        vals = [x for kv in pairs for x in kv]
        found = None
        for k in range(min(vals) - 1, max(vals) + 2):
            if k == 0:
                continue
            if all((i - k, j - k) in FIVE_PATTERN for i, j in pairs):
                found = k
                break
        if found is None:
            return False, {}
        witness[p] = found
    return True, witness


def signed_unaccounted(graph: GcdGraph) -> tuple[list[int], list[int]]:
    """Split R(G) of a structured graph into sign classes.

    positive: every edge valuation is >= 0 on both sides; negative: <= 0 on
    both sides.  For structured graphs this is a partition of R(G).
    """
    pos, neg = [], []
    for p in unaccounted_primes(graph):
        pairs = realized_valuation_pairs(graph, p)
        if all(i >= 0 and j >= 0 for i, j in pairs):
            pos.append(p)
        elif all(i <= 0 and j <= 0 for i, j in pairs):
            neg.append(p)
    return pos, neg


# -- exactness and subgraph relations -----------------------------------------------


def exactness(graph: GcdGraph) -> dict[str, bool]:
    """Whether the certified prime powers divide with equality.

    exact: val_p(vertex) == f(p)/g(p) for all vertices and p in P;
    numerator_exact / denominator_exact check only the respective parts.
    """
    fm, gm = graph.f_map, graph.g_map
    exact = num_exact = den_exact = True
    for p in graph.primes:
        for side_set, data in ((graph.v_set, fm[p]), (graph.w_set, gm[p])):
            for x in side_set:
                e = val_p(x, p)
                if e != data:
                    exact = False
                if _pos(e) != _pos(data):
                    num_exact = False
                if _neg(e) != _neg(data):
                    den_exact = False
    return {"exact": exact, "numerator_exact": num_exact, "denominator_exact": den_exact}


def subgraph_relation(sub: GcdGraph, sup: GcdGraph) -> dict[str, bool]:
    """Containment flags of sub inside sup, including the exactness of the
    newly adjoined primes only."""
    ok_v = set(sub.v_set) <= set(sup.v_set)
    ok_w = set(sub.w_set) <= set(sup.w_set)
    ok_e = set(sub.edges) <= set(sup.edges)
    ok_p = set(sub.primes) >= set(sup.primes)
    fm_sub, gm_sub = sub.f_map, sub.g_map
    fm_sup, gm_sup = sup.f_map, sup.g_map
    ok_restrict = all(
        fm_sub.get(p) == fm_sup[p] and gm_sub.get(p) == gm_sup[p] for p in sup.primes
    )
    ok_weights = all(dict(sup.weights).get(v) == wt for v, wt in sub.weights)
    is_sub = ok_v and ok_w and ok_e and ok_p and ok_restrict and ok_weights
    new_primes = [p for p in sub.primes if p not in set(sup.primes)]
    num_exact = den_exact = True
    for p in new_primes:
        for side_set, data in ((sub.v_set, fm_sub[p]), (sub.w_set, gm_sub[p])):
            for x in side_set:
                e = val_p(x, p)
                if _pos(e) != _pos(data):
                    num_exact = False
                if _neg(e) != _neg(data):
                    den_exact = False
    return {
        "subgraph": is_sub,
        "exact_sub": is_sub and num_exact and den_exact,
        "numerator_exact_sub": is_sub and num_exact,
        "denominator_exact_sub": is_sub and den_exact,
    }


# -- the constant family ---------------------------------------------------------


@dataclass(frozen=True)
class ConstVal:
    """One threshold constant: base-10 log always, exact rational when the
    value fits comfortably (roughly below 2^256)."""

    log10: float
    exact: Fraction | None = None

    @staticmethod
    def of(x: Fraction) -> "ConstVal":
        from math import log10 as _lg

        lg = _lg(x.numerator) - _lg(x.denominator)
        return ConstVal(log10=lg, exact=x if lg < 77 else None)

    @staticmethod
    def log_only(lg: float) -> "ConstVal":
        return ConstVal(log10=lg, exact=None)

    def exceeded_by(self, x) -> bool:
        """Whether x > the constant; exact when possible, otherwise by log
        with a wide sanity margin (log-only constants are astronomically far
        from desk-scale operands, so the margin never decides)."""
        x = as_fraction(x)
        if self.exact is not None:
            return x > self.exact
        from math import log10 as _lg

        return _lg(x.numerator) - _lg(x.denominator) > self.log10


def _e4_enclosure(digits: int = 40) -> tuple[Fraction, Fraction]:
    import mpmath

    with mpmath.workdps(digits + 10):
        val = mpmath.exp(4)
        lo = Fraction(mpmath.nstr(val, digits, strip_zeros=False))
    eps = Fraction(1, 10 ** (digits - 5))
    return lo - eps, lo + eps


@dataclass(frozen=True)
class Constants:
    """Threshold constants parameterizing the iteration propositions.

    ``paper`` mode derives c1..c8 from theta and M by the standard formulas,
    with M = e^4 held as a high-precision rational enclosure; ``toy`` mode
    substitutes small c2/c4/c6 thresholds so that desk-scale primes can
    exceed them, while the quality-loss caps c3/c5 keep their full-size
    values and the loss ledgers stay honest.  c7 = c5^c6 is carried in log10
    form only.
    """

    theta: Fraction
    m_lo: Fraction  # enclosure of M; equal endpoints when M is rational
    m_hi: Fraction
    c1: ConstVal
    c2: Fraction
    c3: ConstVal
    c4: Fraction
    c5: ConstVal
    c6: Fraction
    c7_log10: float
    c8: Fraction
    mode: str = "paper"

    @property
    def tau(self) -> Fraction:
        return self.theta - 2

    def compare_vs_m_power(self, x: PowProduct, base: PowProduct, k: int = 1) -> int:
        """Sign of x - M^k * base, decided against the M enclosure;
        escalates the enclosure if the comparison lands inside it."""
        if self.m_lo == self.m_hi:
            return x.compare(PowProduct.from_rational(self.m_lo**k) * base)
        digits = 40
        lo, hi = self.m_lo, self.m_hi
        while digits <= 640:
            if x.compare(PowProduct.from_rational(hi**k) * base) >= 0:
                return 1
            if x.compare(PowProduct.from_rational(lo**k) * base) < 0:
                return -1
            digits *= 2
            lo, hi = _e4_enclosure(digits)
        from .errors import AmbiguousComparison

        raise AmbiguousComparison("operand equals M^k * base within max enclosure")

    def c6_log10(self) -> float:
        n, d = self.c6.numerator, self.c6.denominator
        return (n.bit_length() - d.bit_length()) * 0.30102999566398114

    def describe(self) -> dict:
        return {
            "mode": self.mode,
            "theta": str(self.theta),
            "tau": str(self.tau),
            "m": [str(self.m_lo), str(self.m_hi)],
            "c1": str(self.c1.exact) if self.c1.exact is not None else None,
            "c1_log10": self.c1.log10,
            "c2": str(self.c2),
            "c3_log10": self.c3.log10,
            "c4": str(self.c4),
            "c5_log10": self.c5.log10,
            "c6": str(self.c6) if self.c6_log10() < 100 else None,
            "c6_log10": self.c6_log10(),
            "c7_log10": self.c7_log10,
            "c8": str(self.c8),
        }


def compute_constants(theta, m="e4") -> Constants:
    """The eight iteration constants from theta in (2, 3) and M >= 2.

    c1 = 10^4/tau, c2 = 10 M c1^3, c3 = 10^3 c1^3, c4 = 10^10 M^2 c2^2,
    c5 = max(c3, (50 ln c4)^3), c6 = max(c4, 10^4 M c2, c2^(10/tau)),
    c7 = c5^c6 (log form), c8 = 100 M c2.  With M = e^4 the M-dependent
    entries use the upper enclosure endpoint; thresholds differing by
    10^-35 are indistinguishable to every consumer.
    """
    from math import log as _ln
    from math import log10 as _lg

    theta = as_fraction(theta)
    if not Fraction(2) < theta < Fraction(3):
        raise DomainError("theta must lie in (2, 3)")
    tau = theta - 2
    if isinstance(m, str) and m == "e4":
        m_lo, m_hi = _e4_enclosure()
    else:
        m_lo = m_hi = as_fraction(m)
        if m_lo < 2:
            raise DomainError("M must be at least 2")
    c1 = Fraction(10_000) / tau
    c2 = 10 * m_hi * c1**3
    c3 = 1000 * c1**3
    c4 = Fraction(10) ** 10 * m_hi**2 * c2**2
    ln_c4 = _ln(c4.numerator) - _ln(c4.denominator)
    alt_log10 = 3 * _lg(50 * ln_c4)
    c3_log10 = _lg(c3.numerator) - _lg(c3.denominator)
    c5 = ConstVal.of(c3) if c3_log10 >= alt_log10 else ConstVal.log_only(alt_log10)
    c2_log10 = _lg(c2.numerator) - _lg(c2.denominator)
    cand = {
        "c4": _lg(c4.numerator) - _lg(c4.denominator),
        "mc2": _lg((10**4 * m_hi * c2).numerator) - _lg((10**4 * m_hi * c2).denominator),
        "pow": float(10 / tau) * c2_log10,
    }
    big = max(cand, key=cand.get)
    if big == "c4":
        c6 = c4
    elif big == "mc2":
        c6 = 10**4 * m_hi * c2
    else:
        e = Fraction(10) / tau
        if e.denominator == 1 and cand["pow"] < 4000:
            c6 = c2 ** int(e)
        else:
            # keep the threshold a definite rational: round the cap up to the
            # next power of ten (only the ordering vs primes matters)
            c6 = Fraction(10) ** (int(cand["pow"]) + 1)
    c7_log10 = 10.0 ** cand[big] * c5.log10 if cand[big] < 17 else float("inf")
    c8 = 100 * m_hi * c2
    return Constants(
        theta=theta, m_lo=m_lo, m_hi=m_hi,
        c1=ConstVal.of(c1), c2=c2, c3=ConstVal.of(c3), c4=c4,
        c5=c5, c6=c6, c7_log10=c7_log10, c8=c8, mode="paper",
    )


def toy_constants(theta=Fraction(2001, 1000), m=2, c2=5, c4=16, c6=20, c8=None) -> Constants:
    """Small thresholds for desk-scale runs.

    c2/c4/c6/c8 shrink to make p > c6 satisfiable by desk primes; the
    quality-loss caps c3 and c5 keep their formula values so that loss
    assertions are never weakened.
    """
    theta = as_fraction(theta)
    if not Fraction(2) < theta < Fraction(3):
        raise DomainError("theta must lie in (2, 3)")
    m = as_fraction(m)
    if m < 2:
        raise DomainError("M must be at least 2")
    tau = theta - 2
    c1 = Fraction(10_000) / tau
    c3 = 1000 * c1**3
    c8_val = as_fraction(c8) if c8 is not None else 100 * m * as_fraction(c2)
    return Constants(
        theta=theta, m_lo=m, m_hi=m,
        c1=ConstVal.of(c1), c2=as_fraction(c2), c3=ConstVal.of(c3),
        c4=as_fraction(c4), c5=ConstVal.of(c3), c6=as_fraction(c6),
        c7_log10=float("inf"), c8=c8_val, mode="toy",
    )
