"""Lower-bound constructions at desk scale.

* the sparse "hardest" OV instance over all assignments to ``n`` variables,
  with the k-CNF query encoder and a SAT oracle to check it against;
* the simple-path subset DP, and the reduction from Hamiltonian Path to kSUM
  with preprocessing, with a meet-in-the-middle kSUM solver and a Held-Karp
  oracle.

Conventions: variable ``j`` of an assignment is bit ``j`` of an integer, and
vertex ``v`` of a set ``S`` is bit ``v`` of ``Int(S)``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .avgcase import as_fraction
from .core import ContractError, OVInstance, binom, binom_leq, compressor, iter_weight_masks, set_positions

HARD_VAR_CAP = 16
PATH_VERTEX_CAP = 12
SAT_VAR_CAP = 24
HAMPATH_ORACLE_CAP = 20

Literal = tuple[int, bool]


# ---------------------------------------------------------------------------
# CNF


@dataclass(frozen=True)
class CNF:
    varCount: int
    width: int
    clauses: tuple[frozenset[Literal], ...]

    def __post_init__(self) -> None:
        for clause in self.clauses:
            if len(clause) > self.width:
                raise ContractError(f"clause of {len(clause)} literals exceeds width {self.width}")
            for var, _ in clause:
                if not 0 <= var < self.varCount:
                    raise ContractError(f"variable {var} out of range for {self.varCount} variables")

    @classmethod
    def of(cls, var_count: int, clauses: Iterable[Iterable[Literal]], width: int | None = None) -> CNF:
        cl = tuple(frozenset(c) for c in clauses)
        if width is None:
            width = max((len(c) for c in cl), default=0)
        return cls(var_count, width, cl)

    def evaluate(self, mu: int) -> bool:
        return all(any(((mu >> v) & 1) == int(pos) for v, pos in c) for c in self.clauses)

    def key(self) -> tuple:
        """Order-insensitive identity, used to deduplicate random samples."""
        return (self.varCount, tuple(sorted(tuple(sorted(c)) for c in self.clauses)))


def random_cnf(n: int, k: int, clauses: int, rng: random.Random) -> CNF:
    """Clauses of exactly ``min(k, n)`` distinct variables with random signs."""
    width = min(k, n)
    out = []
    for _ in range(clauses):
        vs = rng.sample(range(n), width)
        out.append(frozenset((v, rng.random() < 0.5) for v in vs))
    return CNF(n, k, tuple(out))


def parse_dimacs(text: str) -> CNF:
    """DIMACS ``p cnf`` text; ``c`` lines are comments and every clause ends in ``0``."""
    var_count = None
    clauses: list[frozenset[Literal]] = []
    current: list[Literal] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line[0] in "c%":
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ContractError(f"line {lineno}: malformed problem line {line!r}")
            var_count = int(parts[2])
            continue
        if var_count is None:
            raise ContractError(f"line {lineno}: clause before the 'p cnf' line")
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                clauses.append(frozenset(current))
                current = []
            else:
                if abs(lit) > var_count:
                    raise ContractError(f"line {lineno}: literal {lit} exceeds {var_count} variables")
                current.append((abs(lit) - 1, lit > 0))
    if current:
        clauses.append(frozenset(current))
    if var_count is None:
        raise ContractError("missing 'p cnf' line")
    return CNF.of(var_count, clauses)


def format_dimacs(phi: CNF) -> str:
    lines = [f"p cnf {phi.varCount} {len(phi.clauses)}"]
    for c in phi.clauses:
        lits = [str(v + 1) if pos else str(-(v + 1)) for v, pos in sorted(c)]
        lines.append(" ".join(lits + ["0"]))
    return "\n".join(lines) + "\n"


def sat_bruteforce(phi: CNF) -> bool:
    return any(phi.evaluate(mu) for mu in range(1 << phi.varCount))


def sat_oracle(phi: CNF) -> bool:
    """DPLL with unit propagation."""
    if phi.varCount > SAT_VAR_CAP:
        raise ContractError(f"sat_oracle supports at most {SAT_VAR_CAP} variables")
    clauses = [c for c in phi.clauses if not _tautology(c)]
    return _dpll(clauses, {})


def _tautology(c: frozenset[Literal]) -> bool:
    return any((v, not pos) in c for v, pos in c)


def _dpll(clauses: list[frozenset[Literal]], assign: dict[int, bool]) -> bool:
    assign = dict(assign)
    while True:
        unit = None
        remaining = []
        for c in clauses:
            open_lits = []
            sat = False
            for v, pos in c:
                val = assign.get(v)
                if val is None:
                    open_lits.append((v, pos))
                elif val == pos:
                    sat = True
                    break
            if sat:
                continue
            if not open_lits:
                return False
            if len(open_lits) == 1 and unit is None:
                unit = open_lits[0]
            remaining.append(open_lits)
        if not remaining:
            return True
        if unit is None:
            break
        assign[unit[0]] = unit[1]
    v, pos = remaining[0][0]
    rest = [frozenset(c) for c in remaining]
    return _dpll(rest, {**assign, v: pos}) or _dpll(rest, {**assign, v: not pos})


# ---------------------------------------------------------------------------
# hardest instance


@dataclass(frozen=True)
class HardInstance:
    """Vectors indexed by assignments ``mu``; coordinates by ``(B, mu_B)``.

    ``B`` runs over ``k``-sets of blocks in colex order and ``mu_B`` is the
    restriction of ``mu`` to the variables of ``B``, read as an integer whose
    bit ``j`` is the ``j``-th smallest such variable.
    """

    n: int
    k: int
    delta: Fraction
    theta: int
    blockSize: int
    blockSets: tuple[int, ...]
    instance: OVInstance

    @property
    def w(self) -> int:
        return binom(self.theta, self.k)

    @property
    def dim(self) -> int:
        return self.instance.dim

    @property
    def N(self) -> int:
        return self.instance.n

    @property
    def labelBits(self) -> int:
        return self.k * self.blockSize

    def block_vars(self, blocks: int) -> int:
        """Variable mask covered by a mask of blocks."""
        s = self.blockSize
        out = 0
        for b in set_positions(blocks):
            out |= ((1 << s) - 1) << (b * s)
        return out

    def coord(self, b_rank: int, mu_b: int) -> int:
        return (b_rank << self.labelBits) | mu_b

    def coord_labels(self) -> Iterator[tuple[tuple[int, ...], int]]:
        for B in self.blockSets:
            for mu_b in range(1 << self.labelBits):
                yield tuple(set_positions(B)), mu_b


def hard_params(n: int, k: int, delta) -> tuple[Fraction, int, int]:
    delta = as_fraction(delta)
    if k < 1:
        raise ContractError(f"need k >= 1, got {k}")
    if not 0 < delta <= 1:
        raise ContractError(f"delta must lie in (0, 1], got {delta}")
    theta = Fraction(k) / delta
    if theta.denominator != 1:
        raise ContractError(f"theta = k/delta = {theta} is not an integer")
    theta_i = int(theta)
    if n % theta_i:
        raise ContractError(f"theta = {theta_i} does not divide n = {n}")
    return delta, theta_i, n // theta_i


def build_hardest_instance(n: int, k: int, delta, cap: int = HARD_VAR_CAP) -> HardInstance:
    delta, theta, s = hard_params(n, k, delta)
    if n > cap:
        raise ContractError(f"n = {n} exceeds the desk cap {cap} (2^n vectors)")
    blocks = tuple(iter_weight_masks(theta, k))
    label_bits = k * s
    dim = len(blocks) << label_bits
    var_masks = []
    for B in blocks:
        vm = 0
        for b in set_positions(B):
            vm |= ((1 << s) - 1) << (b * s)
        var_masks.append(compressor(n, vm))
    rows = []
    for mu in range(1 << n):
        x = 0
        for r, comp in enumerate(var_masks):
            x |= 1 << ((r << label_bits) | comp(mu))
        rows.append(x)
    H = HardInstance(n, k, delta, theta, s, blocks, OVInstance(dim, tuple(rows)))
    w = H.w
    for x in rows:
        if x.bit_count() != w:
            raise AssertionError(f"hard vector has {x.bit_count()} set bits, expected {w}")
    return H


def clause_blocks(H: HardInstance, clause: Iterable[Literal]) -> int:
    """Block neighborhood of a clause, padded with the lowest unused blocks up to ``k``."""
    nb = 0
    for v, _ in clause:
        nb |= 1 << (v // H.blockSize)
    b = 0
    while nb.bit_count() < H.k:
        if not nb >> b & 1:
            nb |= 1 << b
        b += 1
    return nb


def encode_cnf_query(H: HardInstance, phi: CNF) -> int:
    """Query bits: coordinate ``(B, mu_B)`` is 1 iff ``mu_B`` falsifies a clause attached to ``B``."""
    if phi.varCount != H.n:
        raise ContractError(f"formula has {phi.varCount} variables, instance has {H.n}")
    if phi.width > H.k:
        raise ContractError(f"formula width {phi.width} exceeds k = {H.k}")
    rank_of = {B: r for r, B in enumerate(H.blockSets)}
    by_block: dict[int, list[tuple[int, int]]] = {}
    for clause in phi.clauses:
        if _tautology(clause):
            continue
        B = clause_blocks(H, clause)
        local = {v: j for j, v in enumerate(set_positions(H.block_vars(B)))}
        pos = neg = 0
        for v, positive in clause:
            if positive:
                pos |= 1 << local[v]
            else:
                neg |= 1 << local[v]
        by_block.setdefault(B, []).append((pos, neg))
    q = 0
    for B, falsifiers in by_block.items():
        r = rank_of[B]
        for mu_b in range(1 << H.labelBits):
            if any(mu_b & pos == 0 and mu_b & neg == neg for pos, neg in falsifiers):
                q |= 1 << H.coord(r, mu_b)
    return q


def hard_orthogonal(H: HardInstance, q: int) -> bool:
    return any(x & q == 0 for x in H.instance.rows)


# ---------------------------------------------------------------------------
# digraphs and simple paths


@dataclass(frozen=True)
class Digraph:
    vertexCount: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self) -> None:
        for u, v in self.edges:
            if not (0 <= u < self.vertexCount and 0 <= v < self.vertexCount):
                raise ContractError(f"edge ({u}, {v}) out of range for {self.vertexCount} vertices")

    @classmethod
    def of(cls, n: int, edges: Iterable[tuple[int, int]]) -> Digraph:
        return cls(n, frozenset((int(u), int(v)) for u, v in edges))

    @property
    def succ(self) -> tuple[int, ...]:
        out = [0] * self.vertexCount
        for u, v in self.edges:
            out[u] |= 1 << v
        return tuple(out)

    @property
    def pred(self) -> tuple[int, ...]:
        out = [0] * self.vertexCount
        for u, v in self.edges:
            out[v] |= 1 << u
        return tuple(out)

    @classmethod
    def path(cls, n: int) -> Digraph:
        return cls.of(n, ((j, j + 1) for j in range(n - 1)))

    @classmethod
    def cycle(cls, n: int) -> Digraph:
        return cls.of(n, ((j, (j + 1) % n) for j in range(n)) if n > 1 else ())

    @classmethod
    def complete(cls, n: int) -> Digraph:
        return cls.of(n, ((u, v) for u in range(n) for v in range(n) if u != v))

    @classmethod
    def random(cls, n: int, p: float, rng: random.Random) -> Digraph:
        return cls.of(n, ((u, v) for u in range(n) for v in range(n) if u != v and rng.random() < p))


def parse_edge_list(text: str, n: int | None = None) -> Digraph:
    """One ``u v`` pair per line, 0-based; ``#`` starts a comment; an optional ``n <count>`` line fixes the order."""
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "n" and len(parts) == 2:
            n = int(parts[1])
            continue
        if len(parts) != 2:
            raise ContractError(f"line {lineno}: expected 'u v', got {raw!r}")
        edges.append((int(parts[0]), int(parts[1])))
    if n is None:
        n = 1 + max((max(e) for e in edges), default=-1)
    return Digraph.of(n, edges)


def pad_graph_for_k(G: Digraph, k: int) -> Digraph:
    """Append a path of ``k - n mod k`` vertices entered from every original vertex."""
    r = G.vertexCount % k
    if r == 0:
        return G
    n, extra = G.vertexCount, k - r
    edges = set(G.edges)
    edges.update((u, n) for u in range(n))
    edges.update((n + j, n + j + 1) for j in range(extra - 1))
    return Digraph.of(n + extra, edges)


@dataclass
class PathTable:
    """``ends[S][u]`` is the mask of ``v`` with a simple ``u -> v`` path covering exactly ``S``."""

    vertexCount: int
    length: int
    ends: dict[int, tuple[int, ...]]
    entries: int = 0

    def has(self, S: int, u: int, v: int) -> bool:
        row = self.ends.get(S)
        return row is not None and bool(row[u] >> v & 1)


def simple_paths_dp(G: Digraph, length: int) -> PathTable:
    """Subset DP over vertex sets of size at most ``length``.

    Cell ``(S, u, v)`` is set iff ``v`` has an in-neighbor ``w`` that ends a
    ``u``-path over ``S - {v}``; each cell costs O(1) word operations.
    """
    n = G.vertexCount
    if not 0 <= length <= n:
        raise ContractError(f"need 0 <= len <= n, got len={length}, n={n}")
    if n > PATH_VERTEX_CAP:
        raise ContractError(f"simple_paths_dp supports at most {PATH_VERTEX_CAP} vertices")
    pred = G.pred
    ends: dict[int, tuple[int, ...]] = {}
    entries = 0
    for size in range(1, length + 1):
        for S in iter_weight_masks(n, size):
            members = set_positions(S)
            row = [0] * n
            for u in members:
                if size == 1:
                    row[u] = S
                    entries += 1
                    continue
                acc = 0
                for v in members:
                    entries += 1
                    if v == u:
                        continue
                    prev = ends[S ^ (1 << v)][u]
                    if prev & pred[v]:
                        acc |= 1 << v
                row[u] = acc
            ends[S] = tuple(row)
    return PathTable(n, length, ends, entries)


def path_dp_entry_bound(n: int, length: int) -> int:
    return binom_leq(n, length) * n * n


def enumerate_simple_paths(G: Digraph, length: int) -> set[tuple[int, int, int]]:
    """Every ``(S, u, v)`` realised by a simple path on at most ``length`` vertices (factorial time)."""
    succ = G.succ
    out = set()
    for size in range(1, length + 1):
        for perm in itertools.permutations(range(G.vertexCount), size):
            if all(succ[a] >> b & 1 for a, b in zip(perm, perm[1:])):
                S = 0
                for a in perm:
                    S |= 1 << a
                out.add((S, perm[0], perm[-1]))
    return out


def hampath_oracle(G: Digraph) -> bool:
    """Held-Karp over all vertex subsets."""
    n = G.vertexCount
    if n > HAMPATH_ORACLE_CAP:
        raise ContractError(f"hampath_oracle supports at most {HAMPATH_ORACLE_CAP} vertices")
    if n <= 1:
        return True
    succ = G.succ
    reach = [0] * (1 << n)  # reach[S] = vertices that end a path covering S
    for v in range(n):
        reach[1 << v] = 1 << v
    for S in range(1, 1 << n):
        ends = reach[S]
        if not ends:
            continue
        nxt = 0
        for v in set_positions(ends):
            nxt |= succ[v]
        nxt &= ~S
        for w in set_positions(nxt):
            reach[S | (1 << w)] |= 1 << w
    return reach[(1 << n) - 1] != 0


def hampath_bruteforce(G: Digraph) -> bool:
    succ = G.succ
    return any(
        all(succ[a] >> b & 1 for a, b in zip(perm, perm[1:])) for perm in itertools.permutations(range(G.vertexCount))
    )


# ---------------------------------------------------------------------------
# kSUM with preprocessing


@dataclass(frozen=True)
class KSumInstance:
    k: int
    lists: tuple[tuple[int, ...], ...]

    @property
    def N(self) -> int:
        return len(self.lists[0]) if self.lists else 0


@dataclass(frozen=True)
class KSumQuery:
    """One selection mask per list; bit ``j`` keeps element ``j``."""

    masks: tuple[int, ...]


@dataclass(frozen=True)
class HamPathKSum:
    n: int
    k: int
    sets: tuple[int, ...]  # the size-n/k vertex sets in colex order, shared index for every list
    instance: KSumInstance


def hampath_reduction_build(n: int, k: int) -> HamPathKSum:
    if k < 2 or n % k:
        raise ContractError(f"need k >= 2 dividing n, got n={n}, k={k}")
    if n > PATH_VERTEX_CAP:
        raise ContractError(f"n = {n} exceeds the desk cap {PATH_VERTEX_CAP}")
    sets = tuple(iter_weight_masks(n, n // k))
    full = (1 << n) - 1
    lists = [sets] * (k - 1) + [tuple(full - s for s in sets)]
    return HamPathKSum(n, k, sets, KSumInstance(k, tuple(lists)))


def hampath_reduction_queries(G: Digraph, k: int, P: PathTable, R: HamPathKSum | None = None) -> Iterator[KSumQuery]:
    """One query per ``(v_1, ..., v_{k+1})`` in ``[n]^{k+1}``.

    Segment ``i < k`` keeps ``S`` when a simple path from ``v_i`` over ``S``
    ends at an in-neighbor of ``v_{i+1}``. The last segment keeps ``S`` when
    any simple path from ``v_k`` covers ``S``: the walk has nowhere left to
    go, so ``v_{k+1}`` is not consulted.
    """
    n = G.vertexCount
    if n % k:
        raise ContractError(f"k = {k} does not divide n = {n}; pad the graph first")
    if P.length != n // k or P.vertexCount != n:
        raise ContractError(f"path table must cover {n} vertices with len = {n // k}")
    if R is None:
        R = hampath_reduction_build(n, k)
    pred = G.pred
    sets = R.sets
    # inner[u][v]: sets with a u-path ending at an in-neighbor of v; last[u]: sets with any u-path
    inner = [[0] * n for _ in range(n)]
    last = [0] * n
    for j, S in enumerate(sets):
        row = P.ends[S]
        for u in set_positions(S):
            e = row[u]
            if not e:
                continue
            last[u] |= 1 << j
            for v in range(n):
                if e & pred[v]:
                    inner[u][v] |= 1 << j
    for vs in itertools.product(range(n), repeat=k + 1):
        masks = tuple(inner[vs[i]][vs[i + 1]] for i in range(k - 1)) + (last[vs[k - 1]],)
        yield KSumQuery(masks)


def ksum_query_solve(I: KSumInstance, Q: KSumQuery) -> bool:
    """Meet in the middle: hash sums over the first ``ceil((k-1)/2)`` lists."""
    k = I.k
    chosen = [[I.lists[i][j] for j in set_positions(Q.masks[i])] for i in range(k)]
    if any(not c for c in chosen):
        return False
    left_count = k // 2
    left = {sum(combo) for combo in itertools.product(*chosen[:left_count])}
    for combo in itertools.product(*chosen[left_count : k - 1]):
        partial = sum(combo)
        for target in chosen[k - 1]:
            if target - partial in left:
                return True
    return False


def ksum_bruteforce(I: KSumInstance, Q: KSumQuery) -> bool:
    chosen = [[I.lists[i][j] for j in set_positions(Q.masks[i])] for i in range(I.k)]
    return any(sum(c[:-1]) == c[-1] for c in itertools.product(*chosen))


@dataclass(frozen=True)
class HamPathReport:
    vertexCount: int
    paddedCount: int
    k: int
    queries: int
    positive: int
    answer: bool
    pathEntries: int


def hampath_via_ksum(G: Digraph, k: int, stop_early: bool = False) -> HamPathReport:
    """Pad, run the path DP, and OR the kSUM answers over every query."""
    H = pad_graph_for_k(G, k)
    n = H.vertexCount
    P = simple_paths_dp(H, n // k)
    R = hampath_reduction_build(n, k)
    queries = positive = 0
    for Q in hampath_reduction_queries(H, k, P, R):
        queries += 1
        if ksum_query_solve(R.instance, Q):
            positive += 1
            if stop_early:
                break
    return HamPathReport(G.vertexCount, n, k, queries, positive, positive > 0, P.entries)


def disjoint_sum_check(sets: Sequence[int], n: int) -> bool:
    return sum(sets) == (1 << n) - 1
