"""Command-line front end (``oov``).

Subcommands::

    gen       write a B_p instance              oov gen --n 64 --d 12 --p 1/2 --seed 7 --out x.oov
    build     preprocess into a container       oov build --engine worst --i 3 --instance x.oov --out x.oovs
    query     answer a query file               oov query --structure x.oovs --queries q.txt [--stats] [--no-shortcircuit]
    verify    compare against linear scan       oov verify --instance x.oov --engine worst --i 2 --mode exhaustive
    bench     CSV scaling table                 oov bench --engine worst --i 2 --n 1024,4096 --d-rule 2log
    match     reduction demos                   oov match --kind pm --data d.txt --queries q.txt
    hardest   hardest-instance SAT check        oov hardest --n 4 --k 2 --delta 1/2 [--cnf f.cnf]
    hampath   HamPath through kSUM              oov hampath --graph g.txt --k 3

Text formats:

* instance: ``OOV <n> <d>`` then ``n`` lines of ``d`` characters in ``{0,1}``;
  character ``j`` is coordinate ``j``.  ``--binary`` writes ``OOVB``.
* queries: one ``{0,1}^d`` string per line; blank lines are skipped.
* ``match`` data and queries: PM data rows are ``{0,1}`` strings and patterns
  use ``{0,1,*}``; subset and containment sets are ``{0,1}`` indicator
  strings; DNF data is ``p dnf <vars> <clauses>`` followed by clauses of
  signed 1-based literals ending in ``0``, and queries are ``{0,1}``
  assignments.
* CNF: DIMACS ``p cnf``.  Digraph: one ``u v`` edge per line, 0-based, with an
  optional ``n <count>`` line.

Exit status: 0 on success or agreement, 1 on a verification mismatch, 2 on a
usage or contract error.
"""

from __future__ import annotations

import argparse
import csv
import math
import random
import sys
import time
from dataclasses import dataclass, field
from typing import Sequence

from . import serialize as ser
from .avgcase import sample_instance
from .core import BitVec, ContractError, CoordSet, OVInstance
from .engines import ENGINES, Engine, WorstEngine, make_engine
from .hardness import (
    build_hardest_instance,
    encode_cnf_query,
    hampath_oracle,
    hampath_via_ksum,
    parse_dimacs,
    parse_edge_list,
    random_cnf,
    sat_oracle,
)
from .oracle import linear_scan_bits
from .reductions import (
    ContainmentQueryIndex,
    DNFFormula,
    DNFIndex,
    PartialMatchIndex,
    PMPattern,
    SubsetQueryIndex,
)
from .tables import BuildStats, QueryStats
from .worstcase import build_ops_bound, query_bound, space_bound

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE = 0, 1, 2
EXHAUSTIVE_DIM_CAP = 16


# ---------------------------------------------------------------------------
# helpers


def _read_text(path: str) -> str:
    try:
        with open(path, encoding="ascii") as fh:
            return fh.read()
    except OSError as exc:
        raise ContractError(f"{path}: {exc.strerror or exc}") from exc


def _write_bytes(path: str, data: bytes) -> None:
    try:
        with open(path, "wb") as fh:
            fh.write(data)
    except OSError as exc:
        raise ContractError(f"{path}: {exc.strerror or exc}") from exc


def _read_instance(path: str) -> OVInstance:
    try:
        return ser.read_instance(path)
    except OSError as exc:
        raise ContractError(f"{path}: {exc.strerror or exc}") from exc


def engine_params(args: argparse.Namespace) -> dict:
    out: dict = {}
    for key in ("t", "i", "p", "eps"):
        val = getattr(args, key, None)
        if val is not None:
            out[key] = val
    if args.engine == "avg":
        out.pop("i", None)
    elif args.engine == "worst":
        for key in ("t", "p", "eps"):
            out.pop(key, None)
    else:
        out = {}
    return out


def parse_queries(text: str, d: int) -> list[int]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if len(line) != d or set(line) - {"0", "1"}:
            raise ContractError(f"query line {lineno}: expected {d} characters from {{0,1}}, got {line!r}")
        out.append(int(line[::-1], 2))
    return out


def sample_queries(d: int, count: int, seed: int) -> list[int]:
    if count <= 0:
        return []
    return list(sample_instance(count, d, "1/2", seed).rows)


# ---------------------------------------------------------------------------
# verify / bench (importable)


@dataclass
class LedgerRow:
    metric: str
    measured: int
    bound: int | None

    @property
    def ok(self) -> bool:
        return self.bound is None or self.measured <= self.bound


@dataclass
class VerifyReport:
    engine: str
    params: dict
    queries: int
    mismatches: int
    firstMismatch: int | None
    ledger: list[LedgerRow] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.mismatches == 0 and all(r.ok for r in self.ledger)


def verify_engine(
    X: OVInstance, engine: Engine, queries: Sequence[int], build_ops: int | None = None
) -> VerifyReport:
    """Answers against linear scan, plus measured-vs-bound counters."""
    mismatches = 0
    first = None
    max_checks = 0
    for q in queries:
        st = QueryStats()
        got = engine.query_bits(q, st, shortcircuit=False)
        if got != linear_scan_bits(X.rows, q):
            mismatches += 1
            if first is None:
                first = q
        max_checks = max(max_checks, st.candidateChecks)
    rep = VerifyReport(engine.kind, engine.params, len(queries), mismatches, first)
    bits = engine.accounted_bits
    if isinstance(engine, WorstEngine):
        n, d, i = X.n, X.dim, engine.i
        rep.ledger.append(LedgerRow("accountedBits", bits, space_bound(n, d, i)))
        rep.ledger.append(LedgerRow("maxCandidateChecks", max_checks, query_bound(n, d, i)))
        if build_ops is not None:
            rep.ledger.append(LedgerRow("buildOps", build_ops, build_ops_bound(n, d, i)))
    else:
        rep.ledger.append(LedgerRow("accountedBits", bits, None))
        rep.ledger.append(LedgerRow("maxCandidateChecks", max_checks, None))
    return rep


BENCH_HEADER = [
    "engine",
    "n",
    "d",
    "params",
    "accountedBits",
    "buildOps",
    "queries",
    "meanCandidateChecks",
    "maxCandidateChecks",
    "ceilSqrtN",
    "buildSeconds_nondet",
]


def d_for_rule(rule: str, n: int) -> int:
    """``"24"`` is a fixed dimension; ``"2log"`` is ``round(2 * log2 n)``."""
    rule = rule.strip()
    if rule.endswith("log"):
        c = float(rule[:-3] or 1)
        return max(1, round(c * math.log2(max(n, 2))))
    return int(rule)


def bench_rows(
    engine: str, ns: Sequence[int], d_rule: str, params: dict, seed: int, p="1/2", queries: int = 1000
) -> list[dict]:
    rows = []
    for n in ns:
        d = d_for_rule(d_rule, n)
        X = sample_instance(n, d, p, seed)
        stats = BuildStats()
        t0 = time.perf_counter()
        if engine == "oracle":
            e = make_engine("oracle", X)
        else:
            e = make_engine(engine, X, stats=stats, **params)
        elapsed = time.perf_counter() - t0
        qs = sample_queries(d, queries, seed + 1)
        total = worst = 0
        for q in qs:
            st = QueryStats()
            e.query_bits(q, st, shortcircuit=False)
            total += st.candidateChecks
            worst = max(worst, st.candidateChecks)
        rows.append(
            {
                "engine": engine,
                "n": n,
                "d": d,
                "params": ";".join(f"{k}={v}" for k, v in sorted(e.params.items())),
                "accountedBits": e.accounted_bits,
                "buildOps": stats.ops,
                "queries": len(qs),
                "meanCandidateChecks": f"{total / len(qs):.4f}" if qs else "0",
                "maxCandidateChecks": worst,
                "ceilSqrtN": math.isqrt(n - 1) + 1 if n > 0 else 0,
                "buildSeconds_nondet": f"{elapsed:.3f}",
            }
        )
        del e
    return rows


# ---------------------------------------------------------------------------
# subcommands


def cmd_gen(args) -> int:
    X = sample_instance(args.n, args.d, args.p, args.seed)
    data = ser.dump_instance_binary(X) if args.binary else ser.format_instance(X).encode("ascii")
    if args.out == "-":
        sys.stdout.buffer.write(data)
    else:
        _write_bytes(args.out, data)
    return EXIT_OK


def cmd_build(args) -> int:
    X = _read_instance(args.instance)
    e = make_engine(args.engine, X, **engine_params(args))
    blob = ser.serialize(e)
    _write_bytes(args.out, blob)
    kind, params = ser.read_header(blob)
    print(f"engine={kind} " + " ".join(f"{k}={v}" for k, v in sorted(params.items())) + f" accountedBits={e.accounted_bits}")
    return EXIT_OK


def cmd_query(args) -> int:
    try:
        with open(args.structure, "rb") as fh:
            e = ser.deserialize(fh.read())
    except OSError as exc:
        raise ContractError(f"{args.structure}: {exc.strerror or exc}") from exc
    qs = parse_queries(_read_text(args.queries), e.dim)
    out = sys.stdout
    for q in qs:
        if args.stats or args.no_shortcircuit:
            st = QueryStats()
            ans = e.query_bits(q, st, shortcircuit=not args.no_shortcircuit)
        else:
            ans = e.query_bits(q)
        if args.stats:
            out.write(f"{int(ans)} checks={st.candidateChecks} lookups={st.bitmapLookups} nodes={st.nodesVisited}\n")
        else:
            out.write(f"{int(ans)}\n")
    return EXIT_OK


def cmd_verify(args) -> int:
    X = _read_instance(args.instance)
    stats = BuildStats()
    params = engine_params(args)
    e = make_engine(args.engine, X, **params) if args.engine == "oracle" else make_engine(args.engine, X, stats=stats, **params)
    if args.mode == "exhaustive":
        if X.dim > EXHAUSTIVE_DIM_CAP:
            raise ContractError(f"exhaustive mode needs d <= {EXHAUSTIVE_DIM_CAP}; use --mode sampled")
        qs = list(range(1 << X.dim))
    else:
        qs = sample_queries(X.dim, args.samples, args.seed)
    rep = verify_engine(X, e, qs, stats.ops if args.engine != "oracle" else None)
    pstr = " ".join(f"{k}={v}" for k, v in sorted(rep.params.items()))
    print(f"engine={rep.engine} {pstr} n={X.n} d={X.dim} queries={rep.queries} mismatches={rep.mismatches}".replace("  ", " "))
    if rep.firstMismatch is not None:
        print(f"first mismatch: {BitVec(X.dim, rep.firstMismatch)}")
    print(f"{'metric':<20}{'measured':>16}{'bound':>20}  ok")
    for r in rep.ledger:
        b = "-" if r.bound is None else str(r.bound)
        print(f"{r.metric:<20}{r.measured:>16}{b:>20}  {'yes' if r.ok else 'NO'}")
    return EXIT_OK if rep.ok else EXIT_MISMATCH


def cmd_bench(args) -> int:
    ns = [int(x) for x in args.n.split(",") if x.strip()] if args.n else []
    params = engine_params(args)
    rows = bench_rows(args.engine, ns, args.d_rule, params, args.seed, args.p_instance, args.queries)
    sinks = [sys.stdout] if args.csv in (None, "-") else []
    fh = None
    if args.csv not in (None, "-"):
        fh = open(args.csv, "w", newline="")
        sinks.append(fh)
    try:
        for sink in sinks:
            w = csv.DictWriter(sink, fieldnames=BENCH_HEADER, lineterminator="\n")
            w.writeheader()
            w.writerows(rows)
    finally:
        if fh is not None:
            fh.close()
    if fh is not None:
        # human-readable copy on stdout when the CSV went to a file
        for r in rows:
            print("  ".join(f"{k}={r[k]}" for k in BENCH_HEADER))
    return EXIT_OK


def _parse_dnf(text: str) -> DNFFormula:
    var_count = None
    clauses = []
    cur: list[tuple[int, bool]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "dnf":
                raise ContractError(f"line {lineno}: expected 'p dnf <vars> <clauses>'")
            var_count = int(parts[2])
            continue
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                clauses.append(cur)
                cur = []
            else:
                cur.append((abs(lit) - 1, lit > 0))
    if cur:
        clauses.append(cur)
    if var_count is None:
        raise ContractError("missing 'p dnf' line")
    return DNFFormula.of(var_count, clauses)


def _lines(text: str) -> list[str]:
    return [ln.strip() for ln in text.splitlines() if ln.strip()]


def cmd_match(args) -> int:
    data = _read_text(args.data)
    qlines = _lines(_read_text(args.queries))
    params = engine_params(args)
    if args.kind == "pm":
        vecs = [BitVec.from_str(s) for s in _lines(data)]
        idx = PartialMatchIndex(vecs, args.engine, **params)
        truth = lambda y: any(y.matches(x) for x in vecs)  # noqa: E731
        qs = [PMPattern.parse(s) for s in qlines]
    elif args.kind in ("subset", "containment"):
        sets = [CoordSet.from_mask(len(s), BitVec.from_str(s).bits) for s in _lines(data)]
        cls = SubsetQueryIndex if args.kind == "subset" else ContainmentQueryIndex
        idx = cls(sets, args.engine, **params)
        qs = [CoordSet.from_mask(len(s), BitVec.from_str(s).bits) for s in qlines]
        if args.kind == "subset":
            truth = lambda q: any(q.mask & ~S.mask == 0 for S in sets)  # noqa: E731
        else:
            truth = lambda q: any(S.mask & ~q.mask == 0 for S in sets)  # noqa: E731
    else:
        phi = _parse_dnf(data)
        idx = DNFIndex(phi, args.engine, **params)
        qs = [BitVec.from_str(s) for s in qlines]
        truth = phi.evaluate
    bad = 0
    for q in qs:
        ans = idx.query(q)
        bad += ans != truth(q)
        print(int(ans))
    if args.check:
        print(f"{args.kind} agrees" if not bad else f"{args.kind} MISMATCH on {bad} queries", file=sys.stderr)
    return EXIT_OK if not bad else EXIT_MISMATCH


def cmd_hardest(args) -> int:
    H = build_hardest_instance(args.n, args.k, args.delta)
    print(f"N={H.N} d={H.dim} w={H.w}")
    if args.cnf:
        formulas = [parse_dimacs(_read_text(args.cnf))]
    else:
        rng = random.Random(args.seed)
        formulas = [random_cnf(args.n, args.k, rng.randint(0, 4 * args.n), rng) for _ in range(args.samples)]
    engine = make_engine(args.engine, H.instance, **engine_params(args)) if args.engine != "oracle" else None
    bad = 0
    for phi in formulas:
        q = encode_cnf_query(H, phi)
        scan = linear_scan_bits(H.instance.rows, q)
        via = engine.query_bits(q) if engine is not None else scan
        sat = sat_oracle(phi)
        ok = scan == via == sat
        bad += not ok
        if args.cnf:
            label = "SAT" if sat else "UNSAT"
            print(f"{label} agrees" if ok else f"{label} MISMATCH (orthogonal={scan})")
    if not args.cnf:
        print(f"{len(formulas)} formulas, {bad} mismatches" + (", all agree" if not bad else ""))
    return EXIT_OK if not bad else EXIT_MISMATCH


def cmd_hampath(args) -> int:
    G = parse_edge_list(_read_text(args.graph))
    rep = hampath_via_ksum(G, args.k)
    truth = hampath_oracle(G)
    print(f"n={rep.vertexCount} padded={rep.paddedCount} k={rep.k} queries={rep.queries} positive={rep.positive}")
    label = "HAMPATH" if truth else "NO-HAMPATH"
    if rep.answer == truth:
        print(f"{label} agrees")
        return EXIT_OK
    print(f"{label} MISMATCH (reduction says {int(rep.answer)})")
    return EXIT_MISMATCH


# ---------------------------------------------------------------------------
# parser


def _engine_flags(p: argparse.ArgumentParser, default: str | None = None) -> None:
    p.add_argument("--engine", choices=ENGINES, default=default, required=default is None)
    p.add_argument("--t", type=int, help="avg: explicit threshold")
    p.add_argument("--p", help="avg: zero probability used to choose t (default 1/2)")
    p.add_argument("--eps", help="avg: exponent used to choose t (default 1/2)")
    p.add_argument("--i", type=int, help="worst: recursion levels (default min(2, d))")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="oov", description="Online orthogonal vectors: build, query, verify, bench.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("gen", help="write a B_p instance")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--p", default="1/2", help="probability that a bit is 0")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--binary", action="store_true")
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("build", help="preprocess an instance into a structure container")
    _engine_flags(p)
    p.add_argument("--instance", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_build)

    p = sub.add_parser("query", help="answer one query per line")
    p.add_argument("--structure", required=True)
    p.add_argument("--queries", required=True)
    p.add_argument("--stats", action="store_true")
    p.add_argument("--no-shortcircuit", action="store_true")
    p.set_defaults(fn=cmd_query)

    p = sub.add_parser("verify", help="compare an engine against linear scan")
    _engine_flags(p)
    p.add_argument("--instance", required=True)
    p.add_argument("--mode", choices=("exhaustive", "sampled"), default="exhaustive")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("bench", help="CSV scaling table over n")
    _engine_flags(p)
    p.add_argument("--n", default="", help="comma-separated instance sizes")
    p.add_argument("--d-rule", default="2log", help="'24' for fixed d, '2log' for d = 2 log2 n")
    p.add_argument("--p-instance", default="1/2", help="zero probability of the generated instances")
    p.add_argument("--queries", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", help="output path ('-' or omitted: stdout)")
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("match", help="partial match / subset / containment / DNF through an OV engine")
    _engine_flags(p, default="worst")
    p.add_argument("--kind", choices=("pm", "subset", "containment", "dnf"), required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--queries", required=True)
    p.add_argument("--check", action="store_true", help="also compare with direct evaluation")
    p.set_defaults(fn=cmd_match)

    p = sub.add_parser("hardest", help="hardest-instance construction and SAT equivalence")
    _engine_flags(p, default="oracle")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--delta", required=True)
    p.add_argument("--cnf")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_hardest)

    p = sub.add_parser("hampath", help="Hamiltonian path through the kSUM reduction")
    p.add_argument("--graph", required=True)
    p.add_argument("--k", type=int, default=3)
    p.set_defaults(fn=cmd_hampath)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ContractError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
