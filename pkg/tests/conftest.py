"""Shared corpora builders: deterministic random graphs, reduced pairs, and
interval families used across the suite."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from gcdgraphs.gcdgraph import GcdGraph


def random_reduced(rng: random.Random, hmax: int) -> Fraction:
    while True:
        num = rng.randint(1, hmax)
        den = rng.randint(1, hmax)
        f = Fraction(num, den)
        if f.numerator <= hmax and f.denominator <= hmax:
            return f


def random_weighted_graph(rng: random.Random, nv: int, nw: int, edge_p=0.6) -> GcdGraph:
    """Random bipartite graph over small integer vertices with small
    rational weights and at least one edge."""
    vs = rng.sample(range(2, 120), nv)
    ws = rng.sample(range(121, 260), nw)
    weights = {Fraction(x): Fraction(rng.randint(1, 12), rng.randint(1, 12))
               for x in vs + ws}
    edges = [(Fraction(v), Fraction(w)) for v in vs for w in ws
             if rng.random() < edge_p]
    if not edges:
        edges = [(Fraction(vs[0]), Fraction(ws[0]))]
    return GcdGraph.make(weights, [Fraction(v) for v in vs],
                         [Fraction(w) for w in ws], edges)


@pytest.fixture
def rng() -> random.Random:
    return random.Random(0xC0FFEE)
