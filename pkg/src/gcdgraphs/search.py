"""Maximal-subgraph search for weighted bipartite graphs and the structural
consequences of maximality: connectivity, common-neighbor subgraphs, and the
few-edges-between-small-sets bound.

A graph is theta-maximal when no subgraph has a larger theta-weight.  For a
fixed vertex subset the induced edge set dominates every smaller edge set
(the theta-weight is increasing in mu(E) with vertex weights fixed), so
exhaustive search enumerates vertex subsets only.  All comparisons are exact
through PowProduct.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import ComplianceError, DomainError
from .gcdgraph import GcdGraph, edge_density, theta_weight
from .powcmp import PowProduct
from .rationals import as_fraction

EXHAUSTIVE_CAP = 16  # total vertices; 2^cap subset evaluations


@dataclass
class MaximalSearchResult:
    subgraph: GcdGraph
    theta: Fraction
    method: str
    candidates_examined: int = 0
    deletion_sequence: tuple = ()


def maximal_subgraph(
    graph: GcdGraph, theta, mode: str = "exhaustive", cap: int = EXHAUSTIVE_CAP
) -> MaximalSearchResult:
    """Search for a theta-maximal subgraph.

    ``exhaustive`` enumerates every vertex subset pair with induced edges and
    returns a certified maximum (ties broken toward larger mu(E), then more
    vertices, then lexicographically smallest vertex sets).  ``greedy``
    deletes, while it strictly improves the theta-weight, the single vertex
    whose removal improves it most, and stops at a fixed point.
    """
    theta = as_fraction(theta)
    if mode == "greedy":
        return _greedy(graph, theta)
    if mode != "exhaustive":
        raise DomainError(f"unknown mode {mode!r}")
    nv, nw = len(graph.v_set), len(graph.w_set)
    if nv + nw > cap:
        raise DomainError(
            f"exhaustive search capped at {cap} vertices; use greedy mode"
        )
    wmap = graph.weight_map
    vs, ws = graph.v_set, graph.w_set
    edges = graph.edges
    v_index = {v: i for i, v in enumerate(vs)}
    w_index = {w: i for i, w in enumerate(ws)}
    edge_bits = [(v_index[a], w_index[b], wmap[a] * wmap[b]) for a, b in edges]
    v_wts = [wmap[v] for v in vs]
    w_wts = [wmap[w] for w in ws]

    best = None  # (weight PowProduct, mu_e, size, neg-lex key, vmask, wmask)
    examined = 0
    for vmask in range(1 << nv):
        mu_v = sum((v_wts[i] for i in range(nv) if vmask >> i & 1), Fraction(0))
        for wmask in range(1 << nw):
            examined += 1
            mu_w = sum((w_wts[i] for i in range(nw) if wmask >> i & 1), Fraction(0))
            mu_e = sum(
                (wt for i, j, wt in edge_bits if vmask >> i & 1 and wmask >> j & 1),
                Fraction(0),
            )
            if mu_e == 0:
                weight = PowProduct(zero=True)
            else:
                weight = PowProduct.build((mu_e, theta), (mu_v * mu_w, 1 - theta))
            size = bin(vmask).count("1") + bin(wmask).count("1")
            if best is None:
                best = (weight, mu_e, size, vmask, wmask)
                continue
            cmp = weight.compare(best[0])
            if cmp > 0 or (
                cmp == 0
                and (mu_e, size) > (best[1], best[2])
            ):
                best = (weight, mu_e, size, vmask, wmask)
    v_sel = [v for i, v in enumerate(vs) if best[3] >> i & 1]
    w_sel = [w for i, w in enumerate(ws) if best[4] >> i & 1]
    sub = graph.induced(v_sel, w_sel)
    return MaximalSearchResult(sub, theta, "exhaustive", candidates_examined=examined)


def _greedy(graph: GcdGraph, theta: Fraction) -> MaximalSearchResult:
    current = graph
    weight = theta_weight(current, theta)
    deletions: list[Fraction] = []
    while True:
        best = None
        for side, vertices in (("v", current.v_set), ("w", current.w_set)):
            for x in vertices:
                if side == "v":
                    cand = current.induced([v for v in current.v_set if v != x], current.w_set)
                else:
                    cand = current.induced(current.v_set, [w for w in current.w_set if w != x])
                cw = theta_weight(cand, theta)
                if cw.compare(weight) > 0 and (
                    best is None or cw.compare(best[0]) > 0
                ):
                    best = (cw, cand, x)
        if best is None:
            break
        weight, current, removed = best
        deletions.append(removed)
    return MaximalSearchResult(
        current, theta, "greedy", deletion_sequence=tuple(deletions)
    )


def is_single_deletion_stable(graph: GcdGraph, theta) -> bool:
    """No single-vertex deletion strictly improves the theta-weight."""
    theta = as_fraction(theta)
    weight = theta_weight(graph, theta)
    for x in graph.v_set:
        cand = graph.induced([v for v in graph.v_set if v != x], graph.w_set)
        if theta_weight(cand, theta).compare(weight) > 0:
            return False
    for x in graph.w_set:
        cand = graph.induced(graph.v_set, [w for w in graph.w_set if w != x])
        if theta_weight(cand, theta).compare(weight) > 0:
            return False
    return True


def check_connectivity(graph: GcdGraph, theta) -> dict:
    """Exact check that a maximal graph is ((theta-1)/theta * delta)-connected.

    Every vertex's neighborhood weight must be at least
    ((theta-1)/theta) * delta * (opposite side weight).  Failure on a
    certified-maximal input indicates an implementation bug, so it raises.
    """
    theta = as_fraction(theta)
    if not graph.nontrivial():
        raise DomainError("connectivity check needs a non-trivial graph")
    wmap = graph.weight_map
    delta = edge_density(graph)
    frac = (theta - 1) / theta
    mu_v, mu_w = graph.mu_v(), graph.mu_w()
    worst = None
    for v in graph.v_set:
        nbhd = sum((wmap[w] for w in graph.neighborhood(v, "v")), Fraction(0))
        bound = frac * delta * mu_w
        if nbhd < bound:
            raise ComplianceError(
                f"maximal graph fails connectivity at v = {v}: {nbhd} < {bound}"
            )
        margin = nbhd - bound
        worst = margin if worst is None else min(worst, margin)
    for w in graph.w_set:
        nbhd = sum((wmap[v] for v in graph.neighborhood(w, "w")), Fraction(0))
        bound = frac * delta * mu_v
        if nbhd < bound:
            raise ComplianceError(
                f"maximal graph fails connectivity at w = {w}: {nbhd} < {bound}"
            )
        margin = nbhd - bound
        worst = margin if worst is None else min(worst, margin)
    return {"eta": frac * delta, "worst_margin": worst}


def common_neighbor(graph: GcdGraph, anchor, side: str, theta) -> dict:
    """Construct the common-neighbor subgraph at an anchor vertex.

    For a theta-maximal non-trivial graph with theta > 2: restrict the
    opposite side to the anchor's neighborhood, take a (theta-1)-maximal
    subgraph of that restriction, and verify the three guarantees:
    (a) every vertex of the restricted side is adjacent to the anchor,
    (b) no vertex of the anchor's side is isolated,
    (c) mu^theta(G) <= (1 - 1/theta)^(-theta) * mu^(theta-1)(G').
    All three are theorems for certified-maximal inputs; violations raise.
    """
    theta = as_fraction(theta)
    if theta <= 2:
        raise DomainError("common-neighbor construction requires theta > 2")
    if not graph.nontrivial():
        raise DomainError("common-neighbor construction needs a non-trivial graph")
    anchor = as_fraction(anchor)
    if side == "w":
        if anchor not in graph.w_set:
            raise DomainError("anchor not on the designated side")
        restricted = graph.induced(graph.neighborhood(anchor, "w"), graph.w_set)
    elif side == "v":
        if anchor not in graph.v_set:
            raise DomainError("anchor not on the designated side")
        restricted = graph.induced(graph.v_set, graph.neighborhood(anchor, "v"))
    else:
        raise DomainError("side must be 'v' or 'w'")
    result = maximal_subgraph(restricted, theta - 1, "exhaustive")
    sub = result.subgraph

    if side == "w":
        adjacent_ok = all(anchor in sub.neighborhood(v, "v") for v in sub.v_set)
        no_isolated = all(sub.neighborhood(w, "w") for w in sub.w_set)
    else:
        adjacent_ok = all(anchor in sub.neighborhood(w, "w") for w in sub.w_set)
        no_isolated = all(sub.neighborhood(v, "v") for v in sub.v_set)
    if not adjacent_ok:
        raise ComplianceError("common-neighbor subgraph lost the anchor adjacency")
    if not no_isolated:
        raise ComplianceError("common-neighbor subgraph has an isolated vertex")

    # (1 - 1/theta)^(-theta) = (theta/(theta-1))^theta
    factor = PowProduct.build((theta / (theta - 1), theta))
    lhs = theta_weight(graph, theta)
    rhs = factor * theta_weight(sub, theta - 1)
    if lhs.compare(rhs) > 0:
        raise ComplianceError("common-neighbor weight inequality failed")
    return {
        "subgraph": sub,
        "factor": factor,
        "anchor": anchor,
        "side": side,
        "weight_before": lhs,
        "weight_after_scaled": rhs,
    }


def small_set_edges(graph: GcdGraph, a_sub, b_sub, eta, theta) -> bool:
    """Exact check of mu(E(A,B)) <= eta^(2 - 2/theta) * mu(E) for a maximal
    graph and small sets A, B (weight at most eta times their side)."""
    theta = as_fraction(theta)
    eta = as_fraction(eta)
    if not Fraction(0) < eta <= 1:
        raise DomainError("eta must lie in (0, 1]")
    wmap = graph.weight_map
    a_sub = [as_fraction(x) for x in a_sub]
    b_sub = [as_fraction(x) for x in b_sub]
    if not set(a_sub) <= set(graph.v_set) or not set(b_sub) <= set(graph.w_set):
        raise DomainError("A, B must be subsets of V, W")
    mu_a = sum((wmap[x] for x in a_sub), Fraction(0))
    mu_b = sum((wmap[x] for x in b_sub), Fraction(0))
    if mu_a > eta * graph.mu_v() or mu_b > eta * graph.mu_w():
        raise DomainError("A or B exceeds the eta weight bound")
    a_set, b_set = set(a_sub), set(b_sub)
    mu_ab = sum(
        (wmap[a] * wmap[b] for a, b in graph.edges if a in a_set and b in b_set),
        Fraction(0),
    )
    if mu_ab == 0:
        return True
    lhs = PowProduct.from_rational(mu_ab)
    rhs = PowProduct.build((eta, 2 - 2 / theta), (graph.mu_e(), Fraction(1)))
    return lhs.compare(rhs) <= 0


def weight_monotonicity(graph: GcdGraph, sub: GcdGraph, theta, theta_prime) -> dict:
    """Given mu^theta(sub) > mu^theta(graph), verify the two consequences:
    delta(sub) > delta(graph), and the theta'-weight ratio dominates the
    theta-weight ratio for every theta' >= theta.  Exact."""
    theta, theta_prime = as_fraction(theta), as_fraction(theta_prime)
    if theta_prime < theta or theta < 1:
        raise DomainError("need theta' >= theta >= 1")
    w_sub = theta_weight(sub, theta)
    w_full = theta_weight(graph, theta)
    if w_sub.compare(w_full) <= 0:
        raise DomainError("precondition mu^theta(sub) > mu^theta(graph) fails")
    d_sub, d_full = edge_density(sub), edge_density(graph)
    density_up = d_sub > d_full
    lhs = theta_weight(sub, theta_prime) * theta_weight(graph, theta_prime).inverse()
    rhs = w_sub * w_full.inverse()
    ratio_ok = lhs.compare(rhs) >= 0
    return {
        "density_increased": density_up,
        "ratio_dominates": ratio_ok,
        "holds": density_up and ratio_ok,
    }
