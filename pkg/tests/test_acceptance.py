"""End-to-end acceptance checks, one test per criterion.

Each test prints a single ``[PASS]``/``[FAIL]`` line (visible even under
captured output) and then asserts. Expected answers always come from an
independent vectorised linear scan or a brute-force checker, never from the
structure under test.
"""

from __future__ import annotations

import itertools
import os
import random
import time
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest

from oov.avgcase import sample_instance
from oov.cli import bench_rows
from oov.core import BitVec, CoordSet, OVInstance, binom, binom_leq
from oov.engines import ENGINES, make_engine
from oov.hardness import (
    CNF,
    Digraph,
    build_hardest_instance,
    encode_cnf_query,
    hampath_oracle,
    hampath_via_ksum,
    hard_orthogonal,
    random_cnf,
    sat_bruteforce,
    sat_oracle,
)
from oov.partition import is_pseudorandom, pseudorandom_partition
from oov.reductions import (
    ContainmentQueryIndex,
    DNFFormula,
    DNFIndex,
    PartialMatchIndex,
    PMPattern,
    SubsetQueryIndex,
)
from oov.serialize import deserialize, read_instance, serialize
from oov.tables import QueryStats
from oov.worstcase import rounded_params, query_bound, space_bound

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


def report(capsys, num: int, title: str, ok: bool, detail: str) -> None:
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {num}: {title} ({detail})")


def scan_all(rows, d: int) -> np.ndarray:
    """Answers to every query in ``{0,1}^d`` by direct inner products."""
    qs = np.arange(1 << d, dtype=np.int64)
    if not rows:
        return np.zeros(1 << d, dtype=bool)
    arr = np.asarray(rows, dtype=np.int64)
    return ((qs[:, None] & arr[None, :]) == 0).any(axis=1)


# ---------------------------------------------------------------------------
# criteria 1-3 share one sweep over the small grid


SEEDS = range(50)
GRID_N = (1, 2, 17, 64)
GRID_D = (1, 4, 8, 12)
GRID_P = ("1/4", "1/2", "3/4")


@pytest.fixture(scope="module")
def sweep():
    mismatches: list[tuple] = []
    space_viol: list[tuple] = []
    query_viol: list[tuple] = []
    cells = 0
    t0 = time.perf_counter()
    for seed, n, d, p in itertools.product(SEEDS, GRID_N, GRID_D, GRID_P):
        X = sample_instance(n, d, p, seed)
        expect = scan_all(X.rows, d)
        configs = [("worst", {"i": i}) for i in range(1, min(d, 5) + 1)] + [("avg", {"p": p})]
        for kind, params in configs:
            e = make_engine(kind, X, **params)
            worst_checks = 0
            for q in range(1 << d):
                st = QueryStats()
                got = e.query_bits(q, st, shortcircuit=False)
                worst_checks = max(worst_checks, st.candidateChecks)
                if got != bool(expect[q]):
                    mismatches.append((seed, n, d, p, kind, params, q))
            cells += 1
            if kind == "worst":
                i = params["i"]
                if e.accounted_bits > space_bound(n, d, i):
                    space_viol.append((seed, n, d, p, i, e.accounted_bits, space_bound(n, d, i)))
                if worst_checks > query_bound(n, d, i):
                    query_viol.append((seed, n, d, p, i, worst_checks, query_bound(n, d, i)))
    return {
        "cells": cells,
        "mismatches": mismatches,
        "space": space_viol,
        "query": query_viol,
        "seconds": time.perf_counter() - t0,
    }


def test_criterion_1_oracle_equivalence(sweep, capsys):
    bad = sweep["mismatches"]
    report(
        capsys, 1, "exhaustive oracle equivalence", not bad,
        f"{sweep['cells']} structures, {len(bad)} mismatches, {sweep['seconds']:.0f}s",
    )
    assert not bad, bad[:5]


def test_criterion_2_space_bound(sweep, capsys):
    bad = sweep["space"]
    report(capsys, 2, "worst-case space bound", not bad, f"{len(bad)} violations")
    assert not bad, bad[:5]


def test_space_bound_formula_matches_parameters():
    for n, d, i in [(64, 12, 2), (17, 8, 3), (2, 4, 4), (1, 1, 1)]:
        m, t = rounded_params(n, d, i)
        assert space_bound(n, d, i) == binom_leq(d, t) * i * d * m
        assert query_bound(n, d, i) == 2 * i * d * m


SCALING_NS = (1 << 10, 1 << 12, 1 << 14)


def test_criterion_3_query_bound(sweep, capsys):
    bad = list(sweep["query"])
    rows = bench_rows("worst", SCALING_NS, "2log", {"i": 2}, seed=0, queries=1000)
    for r in rows:
        if int(r["maxCandidateChecks"]) > query_bound(r["n"], r["d"], 2):
            bad.append(("scaling", r["n"], r["maxCandidateChecks"]))
    ratios = []
    for a, b in zip(rows, rows[1:]):
        want = b["ceilSqrtN"] / a["ceilSqrtN"]
        got = max(int(b["maxCandidateChecks"]), 1) / max(int(a["maxCandidateChecks"]), 1)
        ratios.append(got)
        if not want / 4 <= got <= want * 4:
            bad.append(("ratio", a["n"], b["n"], got, want))
    table = ", ".join(f"n={r['n']} d={r['d']} max={r['maxCandidateChecks']}" for r in rows)
    report(capsys, 3, "worst-case query bound and scaling", not bad, f"{table}; ratios {ratios}")
    assert not bad, bad[:5]


# ---------------------------------------------------------------------------


def test_criterion_4_partition(capsys):
    rng = random.Random(4)
    bad = []
    blocks = 0
    for trial in range(200):
        d = rng.randint(1, 14)
        t = rng.randint(1, min(4, d))
        n = rng.randint(1, 120)
        m = rng.randint(1, min(16, n))
        X = sample_instance(n, d, rng.choice(["1/4", "1/2", "3/4"]), trial)
        R = pseudorandom_partition(X, m, t)
        if not is_pseudorandom(R.residual, m, t, dim=d):
            bad.append((trial, "residual"))
        pieces = list(R.residual_indices) + [j for part in R.parts for j in part.indices]
        if sorted(pieces) != list(range(n)):
            bad.append((trial, "cover"))
        union = Counter(R.residual_rows)
        for j in range(R.k):
            union.update(R.block(j).rows)
        if union != Counter(X.rows):
            bad.append((trial, "multiset"))
        for part in R.parts:
            blocks += 1
            if len(part.indices) != m or len(part.zero_set) != t:
                bad.append((trial, "sizes"))
            if any(X.rows[j] & part.zero_set.mask for j in part.indices):
                bad.append((trial, "zero set"))
    report(capsys, 4, "partition lemma", not bad, f"200 instances, {blocks} blocks, {len(bad)} violations")
    assert not bad, bad[:5]


def test_criterion_5_average_case_concentration(capsys):
    n, d, t, m = 1 << 14, 24, 7, 384
    assert m >= 3 * n * Fraction(1, 2) ** t
    events = 0
    peak = 0
    for seed in range(20):
        rows = np.asarray(sample_instance(n, d, "1/2", seed).rows, dtype=np.int64)
        rng = random.Random(1000 + seed)
        masks = np.asarray([sum(1 << c for c in rng.sample(range(d), t)) for _ in range(1000)], dtype=np.int64)
        sizes = ((rows[None, :] & masks[:, None]) == 0).sum(axis=1)
        events += int((sizes >= m).sum())
        peak = max(peak, int(sizes.max()))
    report(capsys, 5, "average-case candidate lists", events == 0, f"{events} events, largest |Y_C| {peak}")
    assert events == 0


# ---------------------------------------------------------------------------


def _small_clauses(n: int, k: int) -> list[frozenset]:
    out = []
    for w in range(1, k + 1):
        for vs in itertools.combinations(range(n), w):
            for signs in itertools.product((True, False), repeat=w):
                out.append(frozenset(zip(vs, signs)))
    return out


def test_criterion_6_hardest_instance(capsys):
    bad = []
    checked = 0
    for n, k in [(4, 2), (6, 3)]:
        H = build_hardest_instance(n, k, "1/2")
        if H.dim != binom(H.theta, k) * 2 ** (n // 2):
            bad.append((n, k, "dimension", H.dim))
        if any(x.bit_count() != H.w for x in H.instance.rows):
            bad.append((n, k, "popcount"))
        rng = random.Random(n * 100 + k)
        formulas: list[CNF] = []
        if k == 2:
            pool = _small_clauses(n, k)
            seen = set()
            while len(formulas) < 500:
                phi = CNF.of(n, rng.sample(pool, rng.randint(0, 6)), width=k)
                if phi.key() not in seen:
                    seen.add(phi.key())
                    formulas.append(phi)
        else:
            formulas = [random_cnf(n, k, rng.randint(0, 5 * n), rng) for _ in range(300)]
        engine = make_engine("worst", H.instance, i=6 if k == 2 else H.dim)
        for phi in formulas:
            sat = sat_oracle(phi)
            q = encode_cnf_query(H, phi)
            if not sat == sat_bruteforce(phi) == hard_orthogonal(H, q) == engine.query_bits(q):
                bad.append((n, k, phi))
            checked += 1
    report(capsys, 6, "hardest-instance equivalence", not bad, f"{checked} formulas, {len(bad)} mismatches")
    assert not bad, bad[:5]


def test_criterion_7_hampath(capsys):
    rng = random.Random(7)
    graphs = [Digraph.random(6, rng.choice([0.1, 0.2, 0.3, 0.45, 0.6]), rng) for _ in range(300)]
    structured = [Digraph.path(6), Digraph.cycle(6), Digraph.complete(6), Digraph.of(6, [])]
    structured += [Digraph.of(6, [(v, u) for u, v in Digraph.path(6).edges])]
    for seed in range(15):
        perm = random.Random(seed).sample(range(6), 6)
        base = [Digraph.path(6), Digraph.cycle(6), Digraph.of(6, [(0, 1), (1, 2), (3, 4)])][seed % 3]
        structured.append(Digraph.of(6, [(perm[u], perm[v]) for u, v in base.edges]))
    bad = []
    positives = 0
    for G in graphs + structured:
        rep = hampath_via_ksum(G, 3)
        if rep.queries != 6**4 or rep.answer != hampath_oracle(G):
            bad.append(G)
        positives += rep.answer
    report(
        capsys, 7, "HamPath reduction equivalence", not bad,
        f"{len(graphs) + len(structured)} graphs, {positives} with a path, {len(bad)} mismatches",
    )
    assert not bad, bad[:5]


# ---------------------------------------------------------------------------


def _adapter_round(seed: int, kind: str) -> list[tuple]:
    rng = random.Random(seed * 31 + len(kind))
    bad = []
    if kind == "pm":
        d = rng.randint(1, 10)
        data = [BitVec(d, rng.getrandbits(d)) for _ in range(rng.randint(1, 200))]
        queries = [PMPattern(d, "".join(rng.choice("01**") for _ in range(d))) for _ in range(500)]
        for engine in ENGINES:
            idx = PartialMatchIndex(data, engine=engine)
            for y in queries:
                if idx.query(y) != any(y.matches(x) for x in data):
                    bad.append((seed, kind, engine, y))
    elif kind in ("subset", "containment"):
        d = rng.randint(1, 20)
        dens = rng.random()
        sets = [CoordSet.from_mask(d, sum(1 << j for j in range(d) if rng.random() < dens)) for _ in range(rng.randint(1, 200))]
        queries = [CoordSet.from_mask(d, rng.getrandbits(d) & rng.getrandbits(d)) for _ in range(500)]
        if kind == "containment":
            queries = [q.complement() for q in queries]
        for engine in ENGINES:
            cls = SubsetQueryIndex if kind == "subset" else ContainmentQueryIndex
            idx = cls(sets, engine=engine)
            for q in queries:
                if kind == "subset":
                    expect = any(q.mask & ~S.mask == 0 for S in sets)
                else:
                    expect = any(S.mask & ~q.mask == 0 for S in sets)
                if idx.query(q) != expect:
                    bad.append((seed, kind, engine, q))
    else:
        v = rng.randint(1, 10)
        clauses = []
        for _ in range(rng.randint(1, 200)):
            vs = rng.sample(range(v), rng.randint(1, min(v, 4)))
            clauses.append([(x, rng.random() < 0.5) for x in vs])
        phi = DNFFormula.of(v, clauses)
        assigns = [BitVec(v, rng.getrandbits(v)) for _ in range(500)]
        for engine in ENGINES:
            idx = DNFIndex(phi, engine=engine)
            for a in assigns:
                if idx.query(a) != phi.evaluate(a):
                    bad.append((seed, kind, engine, a))
    return bad


def test_criterion_8_reduction_adapters(capsys):
    bad = []
    for seed in range(50):
        for kind in ("pm", "subset", "containment", "dnf"):
            bad += _adapter_round(seed, kind)
    report(capsys, 8, "reduction adapters", not bad, f"50 seeds x 4 problems x 3 engines, {len(bad)} mismatches")
    assert not bad, bad[:5]


# ---------------------------------------------------------------------------


def _serialization_fixtures() -> list[OVInstance]:
    out = [read_instance(os.path.join(FIXTURES, "gen_n3_d4_seed7.oov"))]
    out.append(OVInstance.from_strings(["0011", "0000", "0001"]))
    out.append(build_hardest_instance(4, 2, "1/2").instance)
    for seed, (n, d, p) in enumerate([(1, 1, "1/2"), (17, 8, "1/4"), (64, 12, "3/4"), (200, 16, "1/2"), (500, 20, "1/2")]):
        out.append(sample_instance(n, d, p, seed))
    return out


def test_criterion_9_serialization(capsys):
    bad = []
    built = 0
    rng = random.Random(9)
    for X in _serialization_fixtures():
        d = X.dim
        configs = [("oracle", {}), ("avg", {})] + [("worst", {"i": i}) for i in range(1, min(d, 4) + 1)]
        queries = range(1 << d) if d <= 12 else [rng.getrandbits(d) for _ in range(2000)]
        for kind, params in configs:
            e = make_engine(kind, X, **params)
            blob = serialize(e)
            back = deserialize(blob)
            built += 1
            if serialize(back) != blob or back.params != e.params:
                bad.append((kind, params, d, "bytes"))
            if any(back.query_bits(q) != e.query_bits(q) for q in queries):
                bad.append((kind, params, d, "answers"))
    report(capsys, 9, "serialization round trip", not bad, f"{built} structures, {len(bad)} failures")
    assert not bad, bad[:5]
