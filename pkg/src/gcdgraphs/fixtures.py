"""Bundled pipeline instances at desk scale.

Each instance is admissible (primitive numerators, brackets inside one
(y, 2y] window, prime tail sums above 1) and drives a different path through
the iteration: lossless or lossy small-prime absorption, the unbalanced
quality jump on either side, the balanced star that carries a two-prime core
all the way to the factorization stage, and the no-structure smoke case.

The common numerator block m = 2*5*7*11*13 supplies the tail-sum mass
(1/2 + 1/5 + 1/7 + 1/11 + 1/13 > 1) without ever entering an edge gcd.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .gcdgraph import Constants, toy_constants

M_BLOCK = 2 * 5 * 7 * 11 * 13  # 10010


@dataclass(frozen=True)
class PipelineInstance:
    name: str
    description: str
    v_set: tuple
    w_set: tuple
    edges: tuple
    y: Fraction
    z: Fraction
    x: Fraction
    constants: Constants


def _inst(name, desc, v, w, e, y, z, x, consts) -> PipelineInstance:
    return PipelineInstance(
        name=name, description=desc,
        v_set=tuple(v), w_set=tuple(w), edges=tuple(e),
        y=Fraction(y), z=Fraction(z), x=Fraction(x), constants=consts,
    )


def two_track() -> PipelineInstance:
    """Two disjoint edges; the maximal refinement inside the small-prime
    step collapses to the heavier track and the 23-denominator is absorbed
    with no loss (negative-side step at the band center)."""
    va, vb = Fraction(870, 23), Fraction(2790, 23)
    wa, wb = Fraction(261, 23), Fraction(93, 23)
    return _inst(
        "two_track",
        "disjoint pair collapsing to one edge; asymmetric 3-data (1 vs 2)",
        [va, vb], [wa, wb], [(va, wa), (vb, wb)],
        Fraction(23, 100), 1, 10**4, toy_constants(),
    )


def unbalanced_left() -> PipelineInstance:
    """Complete 2x2 with compensating primes 29/31/43/47; no common
    concentrated valuation at 29, so the central dichotomy fires with an
    asymmetric jump (U = 1) on the left factor."""
    m = M_BLOCK
    v1, v2 = Fraction(m * 3 * 29 * 31, 23), Fraction(m * 3 * 43 * 47, 23)
    w1, w2 = Fraction(3 * 29 * 43, 23), Fraction(3 * 31 * 47, 23)
    return _inst(
        "unbalanced_left",
        "unbalanced prime on the numerator-left; quality jump with U = 1",
        [v1, v2], [w1, w2],
        [(v1, w1), (v1, w2), (v2, w1), (v2, w2)],
        Fraction(3, 20), 1, 10**8, toy_constants(),
    )


def unbalanced_right() -> PipelineInstance:
    """Star whose right vertex carries both core primes; 31 has no common
    concentration and jumps on the (0,1) side, leaving asymmetric g-data."""
    m = M_BLOCK
    vp = Fraction(m * 3 * 29, 23)
    vq = Fraction(m * 3 * 31 * 53, 23)
    wr = Fraction(3 * 29 * 31, 23)
    return _inst(
        "unbalanced_right",
        "jump at 31 with the asymmetry on the g side",
        [vp, vq], [wr], [(vp, wr), (vq, wr)],
        Fraction(23, 100), 1, 10**8, toy_constants(),
    )


def no_core() -> PipelineInstance:
    """Coprime integer pair: R(G) is empty, every stage is the identity and
    all extracted integers collapse to 1."""
    v = Fraction(M_BLOCK)
    w = Fraction(3)
    return _inst(
        "no_core",
        "no unaccounted primes; smoke case for the identity block",
        [v], [w], [(v, w)],
        Fraction(3, 4), 1, 10**5, toy_constants(),
    )


def a_minus_star() -> PipelineInstance:
    """Balanced 2-to-1 star surviving every stage intact: core N = 29*31
    with both lower-valuation parts non-trivial (A- in {29, 31}) and a
    two-vertex final stage with distinct anchor ratios.

    Needs M = 17 (the off-diagonal specials reach 961/60 times the quality)
    and c2 = 17 (valuation shares are 31/60 and 29/60).
    """
    m = M_BLOCK
    va = Fraction(m * 3 * 29, 23)
    vb = Fraction(m * 3 * 31, 23)
    wa = Fraction(3 * 29 * 31, 23)
    return _inst(
        "a_minus_star",
        "two-prime core with nontrivial lower parts and 2-vertex final stage",
        [va, vb], [wa], [(va, wa), (vb, wa)],
        Fraction(23, 100), 1, 10**6, toy_constants(m=17, c2=17, c4=16, c6=20),
    )


def lossy_small_prime() -> PipelineInstance:
    """The small prime 3 carries split data (1,2)/(2,1); absorbing it picks
    the better special subgraph and genuinely loses edge mass."""
    m = M_BLOCK
    va = Fraction(m * 3 * 29, 23)       # e3 = 1
    vb = Fraction(m * 9 * 31, 23)       # e3 = 2
    wa = Fraction(9 * 29, 23)           # e3 = 2
    wb = Fraction(3 * 31, 23)           # e3 = 1
    return _inst(
        "lossy_small_prime",
        "split small-prime data; absorption restricts to one valuation pair",
        [va, vb], [wa, wb], [(va, wa), (vb, wb)],
        Fraction(23, 100), 1, 10**7, toy_constants(),
    )


def all_instances() -> list[PipelineInstance]:
    return [
        two_track(),
        unbalanced_left(),
        unbalanced_right(),
        no_core(),
        a_minus_star(),
        lossy_small_prime(),
    ]
