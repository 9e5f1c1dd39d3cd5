"""Query-counter scaling table for the worst-case engine at d = 2 log2 n.

Prints the bench CSV and, per consecutive pair of rows, the growth of the
maximum candidate checks next to the growth of ceil(n^(1-1/i)).

    python3 scripts/scaling_table.py --exps 10 12 14 --i 2
"""

from __future__ import annotations

import argparse
import csv
import sys

from oov.cli import BENCH_HEADER, bench_rows
from oov.worstcase import ceil_root, query_bound


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--exps", type=int, nargs="+", default=[10, 12, 14])
    ap.add_argument("--i", type=int, default=2)
    ap.add_argument("--queries", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    ns = [1 << e for e in args.exps]
    rows = bench_rows("worst", ns, "2log", {"i": args.i}, seed=args.seed, queries=args.queries)
    w = csv.DictWriter(sys.stdout, fieldnames=BENCH_HEADER)
    w.writeheader()
    w.writerows(rows)

    print()
    print(f"{'n':>8} {'d':>4} {'maxChecks':>10} {'bound':>10} {'m':>6}")
    for r in rows:
        m = ceil_root(r["n"] ** (args.i - 1), args.i)
        print(f"{r['n']:>8} {r['d']:>4} {r['maxCandidateChecks']:>10} {query_bound(r['n'], r['d'], args.i):>10} {m:>6}")
    for a, b in zip(rows, rows[1:]):
        ma = ceil_root(a["n"] ** (args.i - 1), args.i)
        mb = ceil_root(b["n"] ** (args.i - 1), args.i)
        got = max(b["maxCandidateChecks"], 1) / max(a["maxCandidateChecks"], 1)
        print(f"n {a['n']} -> {b['n']}: checks x{got:.2f}, ceil(n^(1-1/i)) x{mb / ma:.2f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
