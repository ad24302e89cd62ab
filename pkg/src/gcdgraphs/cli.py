"""Batch front-end.

Subcommands:
  overlap       three-way overlap study over a T sweep (CSV + JSON)
  behrend       weighted window sums over the bundled corpus vs the recorded band
  aprime        nested level-set construction from a families file
  graph         validate | quality | maximal | structure on a graph document
  pipeline      run a bundled or user instance, write the trace
  verify-trace  replay a serialized trace's assertions

Exit codes: 0 success, 1 assertion or verification failure, 2 input error.
Reports are deterministic for fixed config and inputs; the timestamp field
is excluded from the content hash.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from fractions import Fraction

from .errors import ComplianceError, ContractViolation, DomainError, ValidationError
from .gcdgraph import compute_constants, toy_constants
from .serialize import (
    SCHEMA_REPORT,
    content_hash,
    dumps_canonical,
    graph_from_json,
    rat,
    trace_to_json,
    verify_trace_document,
)

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def _parse_rational(text: str) -> Fraction:
    try:
        if "e" in text.lower() and "/" not in text:
            from decimal import Decimal

            return Fraction(Decimal(text))
        return Fraction(text)
    except (ValueError, ArithmeticError) as exc:
        raise ValidationError(f"cannot parse rational {text!r}") from exc


def _parse_rational_list(text: str) -> list[Fraction]:
    return [_parse_rational(part) for part in text.split(",") if part]


def _constants_from_args(args):
    if args.constants == "paper":
        return compute_constants(Fraction(2001, 1000))
    return toy_constants()


def _load_config(args) -> None:
    if not getattr(args, "config", None):
        return
    path = args.config
    with open(path, "rb") as fh:
        if path.endswith(".json"):
            data = json.load(fh)
        else:
            try:
                import tomllib as toml  # py311+
            except ModuleNotFoundError:
                import tomli as toml
            data = toml.load(fh)
    for key, val in data.items():
        attr = key.replace("-", "_")
        if hasattr(args, attr) and getattr(args, attr) in (None, []):
            setattr(args, attr, val)


def _emit(args, name: str, doc: dict) -> str:
    doc.setdefault("schema", SCHEMA_REPORT)
    doc["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    doc["content_hash"] = content_hash(doc)
    out_dir = args.out or "."
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, name)
    with open(path, "w") as fh:
        fh.write(dumps_canonical(doc))
    return path


def _overlap_row(task):
    alpha, beta, t, y, variant = task
    if variant == "plain":
        from fractions import Fraction as _F

        from .overlap import overlap_direct, overlap_sum_formula

        direct = overlap_direct(alpha, beta, t, "plain")
        sum_f = overlap_sum_formula(alpha, beta, t, "plain")
        return {
            "alpha": rat(alpha), "beta": rat(beta), "t": rat(t),
            "variant": "plain",
            "direct": rat(direct),
            "sum_formula": rat(sum_f),
            "shifted_formula": None,
            "disjoint": direct == 0,
            "direct_eq_shifted": True,
            "sum_within_bound": abs(direct - sum_f) <= _F(2) / t,
            "predictor": None,
            "ratio_to_predictor": None,
        }
    from .overlap import overlap_report

    rep = overlap_report(alpha, beta, t, y)
    agree = rep.agreement()
    return {
        "alpha": rat(alpha),
        "beta": rat(beta),
        "t": rat(t),
        "variant": "rough",
        "direct": rat(rep.direct),
        "sum_formula": rat(rep.sum_formula),
        "shifted_formula": rat(rep.shifted_formula),
        "disjoint": rep.disjoint,
        "direct_eq_shifted": agree["direct_eq_shifted"],
        "sum_within_bound": agree["sum_within_bound"],
        "predictor": rat(rep.predictor) if rep.predictor is not None else None,
        "ratio_to_predictor": (
            float(rep.ratio_to_predictor) if rep.ratio_to_predictor is not None else None
        ),
    }


def cmd_overlap(args) -> int:
    alpha, beta = _parse_rational(args.alpha), _parse_rational(args.beta)
    if alpha <= beta:
        alpha, beta = max(alpha, beta), min(alpha, beta)
    ratio = alpha / beta
    if ratio.denominator == 1:
        print("error: alpha/beta is an integer; the pair is inadmissible", file=sys.stderr)
        return EXIT_INPUT
    ts = _parse_rational_list(args.t)
    y = _parse_rational(args.y) if args.y else None
    tasks = [(alpha, beta, t, y, args.variant) for t in ts]
    if args.workers and args.workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            rows = list(pool.map(_overlap_row, tasks))
    else:
        rows = [_overlap_row(t) for t in tasks]
    doc = {"command": "overlap", "rows": rows}
    path = _emit(args, "overlap.json", doc)
    csv_path = os.path.join(args.out or ".", "overlap.csv")
    with open(csv_path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)
    print(f"wrote {path} and {csv_path}")
    all_ok = all(r["direct_eq_shifted"] and r["sum_within_bound"] for r in rows)
    return EXIT_OK if all_ok else EXIT_FAIL


def cmd_behrend(args) -> int:
    from .behrend_band import band_report

    rep = band_report()
    path = _emit(args, "behrend.json", {"command": "behrend", **rep})
    print(f"wrote {path}")
    return EXIT_OK if rep["all_exact_match"] and rep["all_in_band"] else EXIT_FAIL


def cmd_aprime(args) -> int:
    from .primitive import RationalFamily, check_level_trace, construct_level_sets

    with open(args.input) as fh:
        data = json.load(fh)
    families = [
        RationalFamily([Fraction(e) for e in fam["elements"]], tag=fam.get("scale_tag"))
        for fam in data["families"]
    ]
    c = _parse_rational(args.c)
    trace = construct_level_sets(families, c, args.levels)
    audit = check_level_trace(trace)
    def tagged(level):
        return [[tag, rat(v)] for tag, v in level]

    doc = {
        "command": "aprime",
        "c": rat(c),
        "levels_requested": args.levels,
        "complete": trace.complete,
        "shortfall": trace.shortfall_reason,
        "xs": trace.xs,
        "cap_log10": trace.cap_log10,
        "size_log10": trace.size_log10,
        "class_minima": {str(tag): rat(v) for tag, v in trace.class_minima.items()},
        "windows": [tagged(level) for level in trace.windows],
        "selected": [tagged(level) for level in trace.selected],
        "excluded_memberships": [tagged(level) for level in trace.excluded_memberships],
        "selected_sizes": [len(level) for level in trace.selected],
        "kappa_sum": rat(audit["kappa_sum"]),
        "band_ok": audit["band_ok"],
        "shared_level_violations": [
            [rat(a), rat(b)] for a, b in audit["shared_level_violations"]
        ],
    }
    path = _emit(args, "aprime.json", doc)
    print(f"wrote {path}")
    return EXIT_OK if not audit["shared_level_violations"] else EXIT_FAIL


def cmd_graph(args) -> int:
    from .gcdgraph import edge_density, quality, validate
    from .search import maximal_subgraph
    from .serialize import graph_to_json, powprod_to_json

    with open(args.input) as fh:
        g = graph_from_json(json.load(fh))
    theta = _parse_rational(args.theta)
    if args.action == "validate":
        ok, violations = validate(g)
        doc = {"command": "graph/validate", "ok": ok, "violations": violations}
        _emit(args, "graph_validate.json", doc)
        print("valid" if ok else f"invalid: {violations[0]}")
        return EXIT_OK if ok else EXIT_FAIL
    if args.action == "quality":
        doc = {
            "command": "graph/quality",
            "density": rat(edge_density(g)),
            "quality": powprod_to_json(quality(g, theta)),
        }
        _emit(args, "graph_quality.json", doc)
        print(f"density {doc['density']}, quality log10 {doc['quality']['log10']:.6f}")
        return EXIT_OK
    if args.action == "maximal":
        res = maximal_subgraph(g, theta, args.mode)
        doc = {
            "command": "graph/maximal",
            "method": res.method,
            "candidates_examined": res.candidates_examined,
            "deletions": [rat(v) for v in res.deletion_sequence],
            "subgraph": graph_to_json(res.subgraph),
        }
        _emit(args, "graph_maximal.json", doc)
        print(f"maximal subgraph: |V|={len(res.subgraph.v_set)}, "
              f"|W|={len(res.subgraph.w_set)}, |E|={len(res.subgraph.edges)}")
        return EXIT_OK
    if args.action == "structure":
        from .gcdgraph import structure_witness, unaccounted_primes

        structured, witness = structure_witness(g)
        doc = {
            "command": "graph/structure",
            "unaccounted": unaccounted_primes(g),
            "structured": structured,
            "witness": {str(p): k for p, k in witness.items()},
        }
        _emit(args, "graph_structure.json", doc)
        print("structured" if structured else "not structured")
        return EXIT_OK
    if args.action == "verify-maximal":
        from .gcdgraph import subgraph_relation, theta_weight
        from .search import is_single_deletion_stable

        with open(args.result) as fh:
            result_doc = json.load(fh)
        sub = graph_from_json(result_doc["subgraph"])
        problems = []
        if not subgraph_relation(sub, g)["subgraph"]:
            problems.append("result is not a subgraph of the input")
        if not is_single_deletion_stable(sub, theta):
            problems.append("result is not single-deletion stable")
        if result_doc.get("method") == "exhaustive":
            span = len(g.v_set) + len(g.w_set)
            if span <= 16:
                best = maximal_subgraph(g, theta).subgraph
                if theta_weight(sub, theta).compare(theta_weight(best, theta)) != 0:
                    problems.append("re-enumeration found a heavier subgraph")
        for p in problems:
            print(f"FAIL {p}")
        print("certificate verifies" if not problems else "certificate rejected")
        return EXIT_OK if not problems else EXIT_FAIL
    raise ValidationError(f"unknown graph action {args.action!r}")


def cmd_pipeline(args) -> int:
    from .pipeline import run_pipeline

    if args.instance:
        from .fixtures import all_instances

        table = {inst.name: inst for inst in all_instances()}
        if args.instance not in table:
            print(f"error: unknown instance {args.instance!r}; "
                  f"available: {sorted(table)}", file=sys.stderr)
            return EXIT_INPUT
        inst = table[args.instance]
        v_set, w_set, edges = inst.v_set, inst.w_set, inst.edges
        y, z, x = inst.y, inst.z, inst.x
        constants = inst.constants
    else:
        with open(args.input) as fh:
            data = json.load(fh)
        v_set = [Fraction(v) for v in data["V"]]
        w_set = [Fraction(w) for w in data["W"]]
        edges = [(Fraction(a), Fraction(b)) for a, b in data["E"]]
        y, z, x = (Fraction(data[k]) for k in ("y", "z", "x"))
        constants = _constants_from_args(args)
    trace = run_pipeline(v_set, w_set, edges, y, z, x, constants)
    doc = trace_to_json(trace)
    name = f"trace_{args.instance or 'custom'}.json"
    path = _emit(args, name, doc)
    held = trace.all_held()
    print(f"wrote {path}; assertions {'all held' if held else 'VIOLATED'}")
    return EXIT_OK if held else EXIT_FAIL


def cmd_verify_trace(args) -> int:
    with open(args.path) as fh:
        doc = json.load(fh)
    problems = verify_trace_document(doc)
    if problems:
        for p in problems:
            print(f"FAIL {p}")
        return EXIT_FAIL
    print("trace verifies")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gcdgraphs",
        description="Exact overlap measures, primitive-set sums, and GCD-graph iteration",
        allow_abbrev=False,
    )
    parser.add_argument("--config", help="TOML or JSON file with default options")
    parser.add_argument("--out", help="output directory (default: current)")
    parser.add_argument("--workers", type=int,
                        default=int(os.environ.get("GCDGRAPHS_WORKERS", "1")))
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--constants", choices=["paper", "toy"], default="toy")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("overlap", help="three-way overlap study")
    p.add_argument("--alpha", required=True)
    p.add_argument("--beta", required=True)
    p.add_argument("--t", required=True, help="comma-separated T values (1e4 allowed)")
    p.add_argument("--y", help="predictor parameter (>= 100) to include main terms")
    p.add_argument("--variant", choices=["plain", "rough"], default="rough")
    p.set_defaults(func=cmd_overlap)

    p = sub.add_parser("behrend", help="window sums vs the recorded band")
    p.set_defaults(func=cmd_behrend)

    p = sub.add_parser("aprime", help="level-set construction")
    p.add_argument("--input", required=True, help="families JSON")
    p.add_argument("--c", required=True)
    p.add_argument("--levels", type=int, required=True)
    p.set_defaults(func=cmd_aprime)

    p = sub.add_parser("graph", help="graph document operations")
    p.add_argument("action", choices=["validate", "quality", "maximal",
                                      "structure", "verify-maximal"])
    p.add_argument("--input", required=True)
    p.add_argument("--result", help="search result to re-verify")
    p.add_argument("--theta", default="9/4")
    p.add_argument("--mode", choices=["exhaustive", "greedy"], default="exhaustive")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("pipeline", help="run the staged iteration")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--instance", help="bundled instance name")
    group.add_argument("--input", help="instance JSON (V, W, E, y, z, x)")
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("verify-trace", help="replay a trace's assertions")
    p.add_argument("path")
    p.set_defaults(func=cmd_verify_trace)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _load_config(args)
        return args.func(args)
    except (ValidationError, DomainError, ContractViolation, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ComplianceError as exc:
        print(f"assertion failure: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
