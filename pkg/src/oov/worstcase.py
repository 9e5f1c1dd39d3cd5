"""Recursive worst-case structure.

Each internal node keeps a sparse-query bitmap and candidate lists for the
pseudorandom residual of its input, then recurses on every structured block
with that block's shared zero coordinates dropped. Level ``i`` falls to a
dense all-queries bitmap at ``i = 1`` and a single stored vector at ``n = 1``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from . import _kernels
from .avgcase import as_fraction
from .core import (
    BitVec,
    Compressor,
    ContractError,
    OVInstance,
    binom_leq,
    colex_rank,
    compressor,
    lowest_bits,
)
from .oracle import DENSE_DIM_CAP, FullBitmap, dense_answers
from .partition import split_rows
from .tables import BuildStats, CandidateTable, QueryStats, SparseBitmap, build_candidate_table, build_sparse_bitmap

# documented constant for the preprocessing work bound  ops <= K * binom(d, <=t) * i * d * n
BUILD_OPS_K = 16


class ParameterWarning(UserWarning):
    """A schedule was evaluated outside the hypothesis it was derived under."""


# ---------------------------------------------------------------------------
# parameters


def ceil_root(value: int, k: int) -> int:
    """Smallest integer ``r >= 0`` with ``r**k >= value``."""
    if value <= 0:
        return 0
    if k == 1:
        return value
    r = max(1, int(round(value ** (1.0 / k))) if value.bit_length() < 1000 else math.isqrt(value))
    while r**k < value:
        r += 1
    while r > 1 and (r - 1) ** k >= value:
        r -= 1
    return r


def rounded_params(n: int, d: int, i: int) -> tuple[int, int]:
    """``(m, t) = (ceil(n**(1 - 1/i)), max(1, floor(d / i)))`` in exact integers."""
    t = max(1, d // i)
    m = max(1, ceil_root(n ** (i - 1), i))
    return m, t


def derive_params(n: int, d: int, i: int) -> tuple[int, int]:
    if not 2 <= i <= d:
        raise ContractError(f"need 2 <= i <= d, got i={i}, d={d}")
    if n < 2:
        raise ContractError(f"need n >= 2, got n={n}")
    return rounded_params(n, d, i)


def schedule_for_loglinear(n: int, c, delta, d: int | None = None) -> int:
    """Level for ``d = c log n``: ``round(2 c log2(c) / delta)``, clamped to ``[1, d]``."""
    c = as_fraction(c)
    delta = as_fraction(delta)
    if c < 2 or float(delta) < 2 * math.e * math.log2(float(c)) / float(c):
        warnings.warn(
            f"c={c}, delta={delta} violates c >= 2 and delta >= 2e*log2(c)/c", ParameterWarning, stacklevel=2
        )
    if d is None:
        d = max(1, math.ceil(float(c) * math.log2(max(n, 2))))
    i = round(2 * float(c) * math.log2(float(c)) / float(delta))
    return max(1, min(i, d))


def schedule_for_eps(n: int, eps, d: int | None = None) -> int:
    """Level giving query time ``n^(1-eps) d``: ``floor(log n / (eps log n + log log n))``."""
    eps = as_fraction(eps)
    logn = math.log2(n)
    loglogn = math.log2(logn) if logn > 0 else 0.0
    if not (logn > 0 and loglogn / logn <= eps < Fraction(1, 2)):
        warnings.warn(
            f"eps={eps} is outside [log log n / log n, 1/2) for n={n}", ParameterWarning, stacklevel=2
        )
    denom = float(eps) * logn + loglogn
    i = math.floor(logn / denom) if denom > 0 else 1
    if d is not None:
        i = min(i, d)
    return max(1, i)


# ---------------------------------------------------------------------------
# tree


@dataclass(eq=False)
class LeafNode:
    dim: int
    vector: int

    def contains(self, q: int) -> bool:
        return self.vector & q == 0

    def query(self, q: int, stats: QueryStats, shortcircuit: bool = True) -> bool:
        stats.nodesVisited += 1
        stats.candidateChecks += 1
        return self.vector & q == 0


@dataclass(eq=False)
class DenseNode:
    bitmap: FullBitmap

    @property
    def dim(self) -> int:
        return self.bitmap.dim

    def contains(self, q: int) -> bool:
        return self.bitmap.lookup(q)

    def query(self, q: int, stats: QueryStats, shortcircuit: bool = True) -> bool:
        stats.nodesVisited += 1
        stats.bitmapLookups += 1
        return self.bitmap.lookup(q)


@dataclass(eq=False)
class Child:
    zero_set: int
    node: "WorstNode"
    compress: Compressor


@dataclass(eq=False)
class InternalNode:
    dim: int
    level: int
    n: int
    m: int
    t: int
    sparse: SparseBitmap
    candidates: CandidateTable
    children: tuple[Child, ...]

    def contains(self, q: int) -> bool:
        t = self.t
        if q.bit_count() < t:
            return self.sparse.lookup(q)
        table = self.candidates
        lo, hi = table.span(colex_rank(lowest_bits(q, t)))
        rows = table.rows
        ent = table._ent
        for j in range(lo, hi):
            if rows[ent[j]] & q == 0:
                return True
        for ch in self.children:
            if ch.node.contains(ch.compress(q)):
                return True
        return False

    def query(self, q: int, stats: QueryStats, shortcircuit: bool = True) -> bool:
        stats.nodesVisited += 1
        t = self.t
        if q.bit_count() < t:
            stats.bitmapLookups += 1
            return self.sparse.lookup(q)
        table = self.candidates
        lo, hi = table.span(colex_rank(lowest_bits(q, t)))
        rows = table.rows
        ent = table._ent
        found = False
        for j in range(lo, hi):
            stats.candidateChecks += 1
            if rows[ent[j]] & q == 0:
                found = True
                if shortcircuit:
                    return True
        for ch in self.children:
            if ch.node.query(ch.compress(q), stats, shortcircuit):
                found = True
                if shortcircuit:
                    return True
        return found


WorstNode = Union[LeafNode, DenseNode, InternalNode]


def _pre(rows: Sequence[int], d: int, i: int, stats: BuildStats) -> WorstNode:
    stats.nodes += 1
    n = len(rows)
    if n == 1:
        return LeafNode(d, rows[0])
    if i == 1 or i > d:
        # i > d cannot arise from a valid root; treated as the base case for safety
        if d > DENSE_DIM_CAP:
            raise ContractError(
                f"level-1 node over dimension {d} needs a 2^{d}-bit bitmap (cap 2^{DENSE_DIM_CAP}); use a larger i"
            )
        stats.ops += (1 << d) * d
        return DenseNode(dense_answers(rows, d))

    m, t = derive_params(n, d, i)
    counts = None
    if d <= _kernels.DENSE_DIM_CAP and (1 << d) * d <= 8 * binom_leq(d, t) * n:
        counts = _kernels.superset_counts(rows, d)
        stats.ops += (1 << d) * d
    sparse = build_sparse_bitmap(rows, d, t, counts=counts, stats=stats)
    live, parts, tests = split_rows(rows, d, m, t, counts)
    stats.ops += tests
    del counts
    table = build_candidate_table([rows[j] for j in live], d, t, stats=stats)
    if table.max_length() >= m:
        raise AssertionError(f"residual candidate list of length {table.max_length()} >= m={m}")

    full = (1 << d) - 1
    children = []
    for block, S in parts:
        keep = full ^ S
        comp = compressor(d, keep)
        stats.ops += len(block)
        child = _pre([comp(rows[j]) for j in block], d - t, i - 1, stats)
        children.append(Child(S, child, comp))
    return InternalNode(d, i, n, m, t, sparse, table, tuple(children))


def ov_pre(X: OVInstance, i: int, stats: BuildStats | None = None) -> WorstNode:
    """Preprocess ``X`` into a recursive structure with ``i`` levels."""
    if not 1 <= i <= X.dim:
        raise ContractError(f"need 1 <= i <= d, got i={i}, d={X.dim}")
    return _pre(X.rows, X.dim, i, stats if stats is not None else BuildStats())


def ov_onl(node: WorstNode, q: BitVec, stats: QueryStats | None = None, shortcircuit: bool = True) -> bool:
    if q.dim != node.dim:
        raise ContractError(f"query dimension {q.dim} != structure dimension {node.dim}")
    if stats is None and shortcircuit:
        return node.contains(q.bits)
    return node.query(q.bits, stats if stats is not None else QueryStats(), shortcircuit)


# ---------------------------------------------------------------------------
# accounting


@dataclass(frozen=True)
class SpaceAccount:
    accountedBits: int


def _bits(node: WorstNode) -> int:
    if isinstance(node, LeafNode):
        return node.dim
    if isinstance(node, DenseNode):
        return 1 << node.dim
    total = binom_leq(node.dim, node.t - 1) + node.dim * node.candidates.stored
    for ch in node.children:
        total += node.dim + _bits(ch.node)
    return total


def space_account(node: WorstNode) -> SpaceAccount:
    return SpaceAccount(_bits(node))


def space_bound(n: int, d: int, i: int) -> int:
    m, t = rounded_params(n, d, i)
    return binom_leq(d, t) * i * d * m


def query_bound(n: int, d: int, i: int) -> int:
    m, _ = rounded_params(n, d, i)
    return 2 * i * d * m


def build_ops_bound(n: int, d: int, i: int) -> int:
    _, t = rounded_params(n, d, i)
    return BUILD_OPS_K * binom_leq(d, t) * i * d * n


def iter_nodes(node: WorstNode, depth: int = 0):
    """Pre-order walk yielding ``(depth, node)``."""
    yield depth, node
    if isinstance(node, InternalNode):
        for ch in node.children:
            yield from iter_nodes(ch.node, depth + 1)
