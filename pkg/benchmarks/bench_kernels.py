"""Compare the numba and numpy kernel backends.

Times protected-account generation end to end, plus the reachability and
component-labelling kernels, on synthetic graphs of growing size. Two marking
regimes are measured: the experiment marking (a share of edges protected with
Visible/Surrogate) and a worst case where every edge is Surrogate-classified,
with one random side Surrogate and the other Visible, so walks run long.

    python benchmarks/bench_kernels.py
    python benchmarks/bench_kernels.py --sizes 100 200 400 --csv bench.csv
"""

from __future__ import annotations

import argparse
import csv
import sys

import numpy as np

from surrogate_accounts import PUBLIC, Mark, generate_protected_account
from surrogate_accounts import _kernels
from surrogate_accounts.evalbench import SynthSpec, gen_synthetic, strategy_graph
from surrogate_accounts.evalbench.experiments import median_time_us


def _all_surrogate(g, seed):
    rng = np.random.default_rng(seed)
    marks = {(e[int(rng.integers(2))], e, PUBLIC): Mark.SURROGATE for e in g.edges}
    return g.replace(markings=marks)


def _cases(sizes, seed):
    for n in sizes:
        sg = gen_synthetic(SynthSpec(n, 0.15 * n, 0.3, seed))
        yield n, "experiment", strategy_graph(sg.graph, sg.protected, "surrogate")
        yield n, "all-surrogate", _all_surrogate(sg.graph, seed)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[50, 100, 200, 400])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--repeats", type=int, default=11)
    ap.add_argument("--csv", help="also write the results here")
    args = ap.parse_args(argv)

    backends = ["numpy"] + (["numba"] if _kernels.HAVE_NUMBA else [])
    if "numba" not in backends:
        print("numba is not installed; timing the numpy backend only", file=sys.stderr)

    rows = []
    for n, regime, g in _cases(args.sizes, args.seed):
        results = {b: generate_protected_account(g, PUBLIC, backend=b) for b in backends}
        if len({frozenset(r.edges.items()) for r in results.values()}) != 1:
            print(f"backends disagree on n={n} {regime}", file=sys.stderr)
            return 1
        surrogate_edges = len(results[backends[0]].edges_of_kind("surrogate"))
        for b in backends:
            row = {
                "nodes": n,
                "edges": len(g.edges),
                "regime": regime,
                "backend": b,
                "surrogate_edges": surrogate_edges,
                "generate_us": median_time_us(
                    lambda: generate_protected_account(g, PUBLIC, backend=b), repeats=args.repeats
                ),
                "reachability_us": median_time_us(
                    lambda: _kernels.reachability(n, g.edge_src, g.edge_dst, backend=b), repeats=args.repeats
                ),
                "components_us": median_time_us(
                    lambda: _kernels.component_labels(n, g.edge_src, g.edge_dst, backend=b), repeats=args.repeats
                ),
            }
            rows.append(row)

    header = list(rows[0])
    widths = {h: max(len(h), *(len(_cell(r[h])) for r in rows)) for h in header}
    print("  ".join(h.rjust(widths[h]) for h in header))
    for r in rows:
        print("  ".join(_cell(r[h]).rjust(widths[h]) for h in header))

    if len(backends) == 2:
        print()
        for n, regime in dict.fromkeys((r["nodes"], r["regime"]) for r in rows):
            by = {r["backend"]: r for r in rows if r["nodes"] == n and r["regime"] == regime}
            speedup = by["numpy"]["generate_us"] / by["numba"]["generate_us"]
            print(f"n={n:<4} {regime:<13} numba speed-up on generation: {speedup:5.1f}x")

    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=header)
            w.writeheader()
            w.writerows(rows)
    return 0


def _cell(v) -> str:
    return f"{v:.1f}" if isinstance(v, float) else str(v)


if __name__ == "__main__":
    sys.exit(main())
