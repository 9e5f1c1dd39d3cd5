"""Lookup tables shared by the average-case and recursive structures.

``SparseBitmap`` stores one answer bit per query of weight ``< t``, indexed by
:func:`oov.core.sparse_rank`. ``CandidateTable`` stores, for every ``t``-set
``C`` of coordinates, the stored vectors that vanish on ``C``; the lists are
kept as CSR arrays of row indices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels
from .core import binom, binom_leq, binom_row_prefix, colex_rank, iter_weight_masks


@dataclass
class QueryStats:
    """Per-query counters; owned by the caller, never shared."""

    candidateChecks: int = 0
    bitmapLookups: int = 0
    nodesVisited: int = 0


@dataclass
class BuildStats:
    """Work units spent by preprocessing (vector tests, table cells, stored pairs)."""

    ops: int = 0
    nodes: int = 0


class SparseBitmap:
    __slots__ = ("dim", "t", "bits", "_prefix")

    def __init__(self, dim: int, t: int, bits: bytes) -> None:
        expected = (binom_leq(dim, t - 1) + 7) // 8
        if len(bits) != expected:
            raise ValueError(f"sparse bitmap has {len(bits)} bytes, expected {expected}")
        self.dim = dim
        self.t = t
        self.bits = bits
        self._prefix = binom_row_prefix(dim)

    @property
    def size(self) -> int:
        return binom_leq(self.dim, self.t - 1)

    def lookup(self, q: int) -> bool:
        r = self._prefix[q.bit_count()] + colex_rank(q)
        return bool(self.bits[r >> 3] >> (r & 7) & 1)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, SparseBitmap)
            and (self.dim, self.t, self.bits) == (other.dim, other.t, other.bits)
        )


def _use_table(d: int, n: int, cells: int) -> bool:
    if d > _kernels.DENSE_DIM_CAP:
        return False
    return (1 << d) * d <= 8 * cells * n


def build_sparse_bitmap(
    rows: Sequence[int], d: int, t: int, counts: np.ndarray | None = None, stats: BuildStats | None = None
) -> SparseBitmap:
    """Answer every query of weight below ``t`` against ``rows``."""
    cells = binom_leq(d, t - 1)
    if counts is not None or _use_table(d, len(rows), cells):
        if counts is None:
            answers = _kernels.orthogonal_table(rows, d)
            if stats is not None:
                stats.ops += (1 << d) * d
        else:
            answers = counts > 0
        flags = _kernels.weight_ordered(answers, d, t)
        return SparseBitmap(d, t, _kernels.pack_bits(flags))

    # few sparse queries: scan distinct rows, sparsest first for early exits
    distinct = sorted(set(rows), key=int.bit_count)
    out = bytearray((cells + 7) // 8)
    r = 0
    ops = 0
    for w in range(min(t, d + 1)):
        for q in iter_weight_masks(d, w):
            for x in distinct:
                ops += 1
                if x & q == 0:
                    out[r >> 3] |= 1 << (r & 7)
                    break
            r += 1
    if stats is not None:
        stats.ops += ops
    return SparseBitmap(d, t, bytes(out))


@dataclass(eq=False)
class CandidateTable:
    dim: int
    t: int
    rows: tuple[int, ...]
    offsets: np.ndarray
    entries: np.ndarray
    _off: memoryview = field(init=False, repr=False)
    _ent: memoryview = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if len(self.offsets) != binom(self.dim, self.t) + 1:
            raise ValueError("offset table does not cover every coordinate set")
        self.offsets = np.ascontiguousarray(self.offsets)
        self.entries = np.ascontiguousarray(self.entries)
        self._off = memoryview(self.offsets)
        self._ent = memoryview(self.entries)

    @property
    def stored(self) -> int:
        return int(self.offsets[-1])

    def max_length(self) -> int:
        if len(self.offsets) < 2:
            return 0
        return int(np.diff(self.offsets.astype(np.int64)).max())

    def candidates(self, rank: int) -> list[int]:
        rows = self.rows
        ent = self._ent
        return [rows[ent[j]] for j in range(self._off[rank], self._off[rank + 1])]

    def span(self, rank: int) -> tuple[int, int]:
        return self._off[rank], self._off[rank + 1]

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, CandidateTable)
            and (self.dim, self.t, self.rows) == (other.dim, other.t, other.rows)
            and np.array_equal(self.offsets, other.offsets)
            and np.array_equal(self.entries, other.entries)
        )


def build_candidate_table(rows: Sequence[int], d: int, t: int, stats: BuildStats | None = None) -> CandidateTable:
    rows = tuple(rows)
    offsets, entries, pairs = _kernels.zero_subset_lists(rows, d, t)
    if stats is not None:
        stats.ops += pairs + len(rows) * d
    return CandidateTable(d, t, rows, offsets, entries)
