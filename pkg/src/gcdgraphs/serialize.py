"""JSON views of every value the package exchanges: rationals as exact
"num/den" strings, graphs, power products, pipeline traces, and reports.

Serialization is canonical: keys are emitted in sorted order and rationals
never pass through floats, so identical inputs produce byte-identical
documents.  ``content_hash`` covers everything except the timestamp field.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict
from fractions import Fraction

from .errors import ValidationError
from .gcdgraph import Constants, ConstVal, GcdGraph
from .pipeline import PipelineTrace
from .powcmp import PowProduct

SCHEMA_TRACE = "gcdgraphs-trace/1"
SCHEMA_REPORT = "gcdgraphs-report/1"


def rat(x) -> str:
    return str(Fraction(x))


def unrat(s) -> Fraction:
    return Fraction(s)


def rational_obj(x) -> dict:
    """Object encoding of a reduced positive rational."""
    x = Fraction(x)
    return {"num": str(x.numerator), "den": str(x.denominator)}


def rational_from_obj(d: dict) -> Fraction:
    return Fraction(int(d["num"]), int(d["den"]))


def mult_spec_to_json(f) -> dict:
    """Multiplicative-function table: prime-power keys "p^j", value strings,
    unlisted powers defaulting to one (or the full divisor bound)."""
    return {
        "k": f.k,
        "values": {f"{p}^{j}": rat(v) for (p, j), v in f.values},
        "default": "tau_k" if f.full_tau else "one",
    }


def mult_spec_from_json(d: dict):
    from .rationals import MultSpec

    if d.get("default") == "tau_k":
        return MultSpec.tau(int(d["k"]))
    values = {}
    for key, v in d.get("values", {}).items():
        p, j = key.split("^")
        values[(int(p), int(j))] = unrat(v)
    return MultSpec.from_dict(int(d["k"]), values)


def family_to_json(fam) -> dict:
    return {"scale_tag": fam.tag, "elements": [rat(v) for v in fam.elements]}


def family_from_json(d: dict):
    from .primitive import RationalFamily

    return RationalFamily([unrat(e) for e in d["elements"]], tag=d.get("scale_tag"))


def union_report_to_json(rep: dict) -> dict:
    """JSON view of a union-of-rough-dilate-sets experiment."""
    return {
        "alphas": [rat(a) for a in rep["alphas"]],
        "t": rat(rep["t"]),
        "union_measure": rat(rep["union_measure"]),
        "sum_of_singles": rat(rep["sum_of_singles"]),
        "single_measures": [rat(m) for m in rep["single_measures"]],
        "second_moment_bound": rat(rep["second_moment_bound"]),
        "overlap_matrix": [[rat(x) for x in row] for row in rep["overlap_matrix"]],
        "kappa": [rat(k) for k in rep["kappa"]],
    }


def powprod_to_json(p: PowProduct) -> dict:
    return {
        "zero": p.zero,
        "factors": [[rat(b), rat(e)] for b, e in p.factors],
        "log10": p.log10(),
    }


def powprod_from_json(d: dict) -> PowProduct:
    if d["zero"]:
        return PowProduct(zero=True)
    return PowProduct.build(*((unrat(b), unrat(e)) for b, e in d["factors"]))


def graph_to_json(g: GcdGraph) -> dict:
    return {
        "weights": {rat(v): rat(w) for v, w in g.weights},
        "V": [rat(v) for v in g.v_set],
        "W": [rat(w) for w in g.w_set],
        "E": [[rat(a), rat(b)] for a, b in g.edges],
        "P": list(g.primes),
        "f": {str(p): k for p, k in g.f},
        "g": {str(p): k for p, k in g.g},
    }


def graph_from_json(d: dict) -> GcdGraph:
    try:
        return GcdGraph.make(
            {unrat(k): unrat(v) for k, v in d["weights"].items()},
            [unrat(v) for v in d["V"]],
            [unrat(w) for w in d["W"]],
            [(unrat(a), unrat(b)) for a, b in d["E"]],
            [int(p) for p in d["P"]],
            {int(p): int(k) for p, k in d["f"].items()},
            {int(p): int(k) for p, k in d["g"].items()},
        )
    except (KeyError, ValueError) as exc:
        raise ValidationError(f"bad graph document: {exc}") from exc


def _pow10_exponent(n: int) -> int | None:
    if n <= 0:
        return None
    k = round(n.bit_length() * 0.30102999566398114)
    for cand in (k - 1, k, k + 1):
        if cand >= 0 and 10**cand == n:
            return cand
    return None


def _big_rat(x: Fraction) -> str:
    """Exact encoding that stays short for pure powers of ten (which can be
    too large for integer-to-string conversion)."""
    if x.denominator == 1:
        k = _pow10_exponent(x.numerator)
        if k is not None and k > 40:
            return f"10^{k}"
    return rat(x)


def _big_unrat(s: str) -> Fraction:
    if s.startswith("10^"):
        return Fraction(10) ** int(s[3:])
    return unrat(s)


def constants_to_json(c: Constants) -> dict:
    return {
        "mode": c.mode,
        "theta": rat(c.theta),
        "m_lo": rat(c.m_lo),
        "m_hi": rat(c.m_hi),
        "c1": rat(c.c1.exact) if c.c1.exact is not None else None,
        "c1_log10": c.c1.log10,
        "c2": rat(c.c2),
        "c3": rat(c.c3.exact) if c.c3.exact is not None else None,
        "c3_log10": c.c3.log10,
        "c4": rat(c.c4),
        "c5": rat(c.c5.exact) if c.c5.exact is not None else None,
        "c5_log10": c.c5.log10,
        "c6": _big_rat(c.c6),
        "c6_log10": c.c6_log10(),
        "c7_log10": c.c7_log10,
        "c8": rat(c.c8),
    }


def constants_from_json(d: dict) -> Constants:
    def cv(key) -> ConstVal:
        if d.get(key) is not None:
            return ConstVal.of(unrat(d[key]))
        return ConstVal.log_only(float(d[f"{key}_log10"]))

    if d.get("c6") is None:
        raise ValidationError("cannot rebuild constants without c6")
    return Constants(
        theta=unrat(d["theta"]),
        m_lo=unrat(d["m_lo"]),
        m_hi=unrat(d["m_hi"]),
        c1=cv("c1"),
        c2=unrat(d["c2"]),
        c3=cv("c3"),
        c4=unrat(d["c4"]),
        c5=cv("c5"),
        c6=_big_unrat(d["c6"]),
        c7_log10=float(d["c7_log10"]),
        c8=unrat(d["c8"]),
        mode=d["mode"],
    )


def _vertex_map_to_json(m: dict) -> dict:
    return {rat(k): str(v) for k, v in m.items()}


def trace_to_json(t: PipelineTrace) -> dict:
    return {
        "schema": SCHEMA_TRACE,
        "params": {"y": rat(t.y), "z": rat(t.z), "x": rat(t.x)},
        "constants": constants_to_json(t.constants),
        "input": {
            "V": [rat(v) for v in t.input_v],
            "W": [rat(w) for w in t.input_w],
            "E": [[rat(a), rat(b)] for a, b in t.input_edges],
        },
        "stages": {k: graph_to_json(g) for k, g in t.stages.items()},
        "stage_quality": {k: powprod_to_json(q) for k, q in t.stage_quality.items()},
        "stage_flags": t.stage_flags,
        "extracted": {
            **{
                k: str(v)
                for k, v in t.extracted.items()
                if k not in ("n_core_exponents", "anchor_edge")
            },
            "n_core_exponents": {
                str(p): k for p, k in t.extracted["n_core_exponents"].items()
            },
            "anchor_edge": [rat(t.extracted["anchor_edge"][0]),
                            rat(t.extracted["anchor_edge"][1])],
        },
        "per_vertex": {k: _vertex_map_to_json(m) for k, m in t.per_vertex.items()},
        "bracket_factors": [
            [[rat(e[0]), rat(e[1])], rat(f)] for e, f in t.bracket_factors
        ],
        "x_ratios": [[rat(v), rat(r)] for v, r in t.x_ratios],
        "y_ratios": [[rat(w), rat(r)] for w, r in t.y_ratios],
        "checks": [asdict(c) for c in t.checks],
        "final_report": t.final_report,
    }


def dumps_canonical(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def content_hash(doc: dict) -> str:
    pruned = {k: v for k, v in doc.items() if k not in ("timestamp", "content_hash")}
    return hashlib.sha256(
        json.dumps(pruned, sort_keys=True, separators=(",", ":")).encode()
    ).hexdigest()


def verify_trace_document(doc: dict) -> list[str]:
    """Re-audit a serialized pipeline trace without re-running any search.

    Rebuilds the stage graphs, revalidates them, recomputes qualities,
    flags, and the whole extraction/identity block, and compares against
    the recorded values.  Returns a list of discrepancies (empty means the
    trace verifies).
    """
    from .gcdgraph import quality, validate
    from .pipeline import CheckLog, extract_invariants, _stage_flags

    problems: list[str] = []
    if doc.get("schema") != SCHEMA_TRACE:
        return [f"unknown schema {doc.get('schema')!r}"]
    try:
        constants = constants_from_json(doc["constants"])
        y, z, x = (unrat(doc["params"][k]) for k in ("y", "z", "x"))
        stages = {k: graph_from_json(g) for k, g in doc["stages"].items()}
    except (KeyError, ValidationError, ValueError) as exc:
        return [f"malformed trace: {exc}"]
    for name in ("G", "G1", "G2", "G3", "G4"):
        if name not in stages:
            return [f"missing stage {name}"]
    for name, g in stages.items():
        ok, viol = validate(g)
        if not ok:
            problems.append(f"stage {name} invalid: {viol[0]}")
    theta = constants.theta
    for name, g in stages.items():
        recomputed = quality(g, theta)
        recorded = powprod_from_json(doc["stage_quality"][name])
        if not recomputed.eq(recorded):
            problems.append(f"stage {name} quality mismatch")
    for name in ("G1", "G2", "G3", "G4"):
        flags = _stage_flags(stages[name], theta)
        recorded_flags = doc["stage_flags"].get(name, {})
        for key, val in recorded_flags.items():
            if key in flags and flags[key] != val:
                problems.append(f"stage {name} flag {key} mismatch")
    # replay the extraction and assertion block; u_count is recomputed from
    # the first stage's data, never trusted from the document
    anchor = tuple(unrat(s) for s in doc["extracted"]["anchor_edge"])
    g1 = stages["G1"]
    fm1, gm1 = g1.f_map, g1.g_map
    u_count = sum(1 for p in g1.primes if fm1[p] != gm1[p] and constants.c6 < p)
    if str(u_count) != doc["extracted"].get("u_count"):
        problems.append(
            f"recorded u_count {doc['extracted'].get('u_count')} != recomputed {u_count}"
        )
    log_ = CheckLog(constants, strict=False)
    try:
        fresh = extract_invariants(
            stages["G"], stages["G1"], stages["G2"], stages["G3"], stages["G4"],
            anchor, y, z, x, u_count, constants, log_,
        )
    except Exception as exc:  # noqa: BLE001 - any replay failure is a finding
        return problems + [f"extraction replay failed: {exc}"]
    for c in log_.checks:
        if not c.held:
            problems.append(f"replayed assertion failed: {c.name}")
    recorded_scalars = doc["extracted"]
    for key, val in fresh["scalars"].items():
        if key in ("n_core_exponents", "anchor_edge"):
            continue
        if str(val) != recorded_scalars.get(key):
            problems.append(f"extracted {key} mismatch: {val} vs {recorded_scalars.get(key)}")
    fresh_exp = {str(p): k for p, k in fresh["scalars"]["n_core_exponents"].items()}
    if fresh_exp != recorded_scalars["n_core_exponents"]:
        problems.append("core exponent map mismatch")
    for side in ("a_plus", "a_minus", "b_plus", "b_minus"):
        fresh_map = _vertex_map_to_json(fresh["per_vertex"][side])
        if fresh_map != doc["per_vertex"][side]:
            problems.append(f"per-vertex {side} mismatch")
    fresh_bf = [[[rat(e[0]), rat(e[1])], rat(f)] for e, f in fresh["bracket_factors"]]
    if fresh_bf != doc["bracket_factors"]:
        problems.append("bracket factor table mismatch")
    for name, fresh_pairs in (("x_ratios", fresh["x_ratios"]), ("y_ratios", fresh["y_ratios"])):
        if [[rat(a), rat(b)] for a, b in fresh_pairs] != doc[name]:
            problems.append(f"{name} mismatch")
    for c in doc["checks"]:
        if not c["held"]:
            problems.append(f"recorded assertion {c['name']} is marked violated")
    return problems
