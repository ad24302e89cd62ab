"""Round trips for every JSON encoding: rationals (both forms), graphs,
multiplicative-function tables, families, power products, and the
union-experiment report."""

import json
from fractions import Fraction as F

from gcdgraphs.gcdgraph import GcdGraph
from gcdgraphs.overlap import union_experiment
from gcdgraphs.powcmp import PowProduct
from gcdgraphs.primitive import RationalFamily
from gcdgraphs.rationals import MultSpec
from gcdgraphs.serialize import (
    dumps_canonical,
    family_from_json,
    family_to_json,
    graph_from_json,
    graph_to_json,
    mult_spec_from_json,
    mult_spec_to_json,
    powprod_from_json,
    powprod_to_json,
    rat,
    rational_from_obj,
    rational_obj,
    union_report_to_json,
    unrat,
)


def test_rational_string_roundtrip():
    for x in (F(3, 2), F(7), F(1, 10**9)):
        assert unrat(rat(x)) == x


def test_rational_object_form():
    doc = rational_obj(F(30, 12))
    assert doc == {"num": "5", "den": "2"}
    assert rational_from_obj(doc) == F(5, 2)


def test_graph_roundtrip():
    g = GcdGraph.make(
        {F(6): F(2, 3), F(3, 2): F(5), F(9): 1},
        [6, F(3, 2)], [9],
        [(6, 9)], [3], {3: 1}, {3: 2},
    )
    doc = json.loads(dumps_canonical(graph_to_json(g)))
    assert graph_from_json(doc) == g


def test_mult_spec_roundtrip():
    f = MultSpec.from_dict(2, {(2, 1): F(3, 2), (3, 2): F(1, 4)})
    doc = mult_spec_to_json(f)
    assert doc["values"] == {"2^1": "3/2", "3^2": "1/4"} and doc["default"] == "one"
    back = mult_spec_from_json(doc)
    for n in range(1, 40):
        assert back(n) == f(n)
    tau = MultSpec.tau(3)
    assert mult_spec_from_json(mult_spec_to_json(tau))(12) == tau(12)


def test_family_roundtrip():
    fam = RationalFamily([F(5, 2), 4, 7], tag="left")
    assert family_from_json(family_to_json(fam)) == fam


def test_powprod_roundtrip():
    p = PowProduct.build((F(3, 2), F(9, 4)), (F(7), F(-1, 3)))
    back = powprod_from_json(powprod_to_json(p))
    assert back.eq(p)
    zero = PowProduct(zero=True)
    assert powprod_from_json(powprod_to_json(zero)).zero


def test_union_report_serializes():
    rep = union_experiment([F(2), F(3)], 500)
    doc = union_report_to_json(rep)
    assert doc["overlap_matrix"][0][1] == "0"
    assert unrat(doc["union_measure"]) == rep["union_measure"]
