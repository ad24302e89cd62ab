"""Bundled primitive-set corpus for the weighted window estimate, with a
recorded regression band.

The corpus spans the shapes the estimate is used on: half-open dyadic
intervals, primes, squarefree fixed-omega slices, and divisor-function
weights.  The recorded file stores each entry's exact lhs (a rational
string) and its float ratio to the shape; a rebuild must reproduce the
rationals bit for bit and keep every ratio inside the band.  The band is
empirical bookkeeping, not a theorem.
"""

from __future__ import annotations

import json
from importlib import resources

from .primitive import PrimitiveSet, behrend_weighted_sum
from .rationals import MultSpec
from .sieve import TABLE

MEDIAN_GUARD = 10  # no ratio may exceed this multiple of the corpus median


def _squarefree_omega(limit: int, m: int) -> list[int]:
    out = []
    for n in range(2, limit + 1):
        fac = TABLE.factor(n)
        if len(fac) == m and all(e == 1 for e in fac.values()):
            out.append(n)
    return out


def corpus() -> list[dict]:
    """Deterministic corpus entries: (name, elements, f, y, z)."""
    one = MultSpec.one()
    tau2 = MultSpec.tau(2)
    entries = [
        ("half_interval", list(range(51, 101)), one, 2, 100),
        ("primes", TABLE.primes(500), one, 10, 500),
        ("primes_tau2", TABLE.primes(500), tau2, 10, 500),
        ("squarefree_omega3", _squarefree_omega(1000, 3), one, 5, 1000),
        ("large_primes", [p for p in TABLE.primes(300) if p > 100], one, 3, 300),
        ("tau2_interval", list(range(501, 1001)), tau2, 2, 1000),
    ]
    return [
        {"name": name, "set": PrimitiveSet(elems), "f": f, "y": y, "z": z}
        for name, elems, f, y, z in entries
    ]


def compute_entries() -> list[dict]:
    out = []
    for entry in corpus():
        res = behrend_weighted_sum(entry["set"], entry["f"], entry["y"], entry["z"])
        out.append(
            {
                "name": entry["name"],
                "lhs": str(res["lhs"]),
                "ratio": res["ratio"],
            }
        )
    return out


def recorded() -> dict:
    with resources.files("gcdgraphs.data").joinpath("behrend_band.json").open() as fh:
        return json.load(fh)


def band_report() -> dict:
    """Recompute the corpus and compare against the recorded metadata."""
    fresh = compute_entries()
    rec = recorded()
    rec_by_name = {e["name"]: e for e in rec["entries"]}
    rows = []
    lo, hi = rec["band"]
    ratios = sorted(e["ratio"] for e in fresh)
    median = ratios[len(ratios) // 2]
    for entry in fresh:
        prev = rec_by_name.get(entry["name"])
        exact = prev is not None and prev["lhs"] == entry["lhs"]
        in_band = lo <= entry["ratio"] <= hi
        rows.append(
            {
                **entry,
                "recorded_lhs": prev["lhs"] if prev else None,
                "exact_match": exact,
                "in_band": in_band,
                "within_median_guard": entry["ratio"] <= MEDIAN_GUARD * median,
            }
        )
    return {
        "band": rec["band"],
        "median": median,
        "entries": rows,
        "all_exact_match": all(r["exact_match"] for r in rows),
        "all_in_band": all(r["in_band"] for r in rows),
        "all_within_median_guard": all(r["within_median_guard"] for r in rows),
    }


def write_recorded(path: str) -> dict:
    """Freeze the current corpus values (maintainer tool)."""
    entries = compute_entries()
    ratios = [e["ratio"] for e in entries]
    doc = {
        "schema": "gcdgraphs-behrend-band/1",
        "band": [min(ratios) / 2, max(ratios) * 2],
        "entries": entries,
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return doc
