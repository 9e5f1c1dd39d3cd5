"""Vectorised building blocks shared by the preprocessing routines.

Everything here is an implementation detail: results are checked against
plain-Python reference loops in the test suite.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from .core import binom, set_positions

# hard ceiling on tables with one entry per vector in {0,1}^d
DENSE_DIM_CAP = 28

_BLOCK_ROWS = 1 << 16
_CHUNK_ELEMS = 1 << 22


def _full(d: int) -> int:
    return (1 << d) - 1


@lru_cache(maxsize=8)
def _popcounts_cached(d: int) -> np.ndarray:
    return _popcounts(d)


def _popcounts(d: int) -> np.ndarray:
    pc = np.zeros(1 << d, dtype=np.uint8)
    for b in range(d):
        h = 1 << b
        pc[h : 2 * h] = pc[:h] + 1
    return pc


def popcounts(d: int) -> np.ndarray:
    """``pc[q] = popcount(q)`` for every ``q < 2**d``."""
    return _popcounts_cached(d) if d <= 20 else _popcounts(d)


def _superset_fold(table: np.ndarray, d: int, op) -> None:
    for b in range(d):
        view = table.reshape(-1, 2, 1 << b)
        op(view[:, 0, :], view[:, 1, :], out=view[:, 0, :])


def orthogonal_table(rows: Sequence[int], d: int) -> np.ndarray:
    """Boolean table over all ``2**d`` queries: is some row orthogonal to ``q``?

    A row ``x`` is orthogonal to exactly the subsets of its zero set, so
    marking every zero set and OR-folding down to subsets answers all queries
    in ``O(2**d * d)``.
    """
    _guard(d)
    table = np.zeros(1 << d, dtype=np.bool_)
    zeros = np.asarray(rows, dtype=np.int64) ^ _full(d)
    table[zeros] = True
    _superset_fold(table, d, np.logical_or)
    return table


def superset_counts(rows: Sequence[int], d: int) -> np.ndarray:
    """``cnt[q] = #{x in rows : x & q == 0}`` for every ``q < 2**d``."""
    _guard(d)
    dtype = np.uint16 if len(rows) < (1 << 16) else np.uint32
    cnt = np.zeros(1 << d, dtype=dtype)
    zeros, mult = np.unique(np.asarray(rows, dtype=np.int64) ^ _full(d), return_counts=True)
    cnt[zeros] = mult.astype(dtype)
    _superset_fold(cnt, d, np.add)
    return cnt


def _guard(d: int) -> None:
    if d > DENSE_DIM_CAP:
        raise ValueError(f"dimension {d} exceeds the dense table cap {DENSE_DIM_CAP}")


def weight_ordered(values: np.ndarray, d: int, below: int) -> np.ndarray:
    """Entries of a ``2**d`` table for masks of weight ``< below``, weight-major, ascending."""
    pc = popcounts(d)
    parts = [values[pc == w] for w in range(min(below, d + 1))]
    if not parts:
        return np.zeros(0, dtype=values.dtype)
    return np.concatenate(parts)


def heavy_masks(cnt: np.ndarray, d: int, t: int, m: int) -> np.ndarray:
    """Masks of weight ``t`` whose count is at least ``m``, ascending."""
    pc = popcounts(d)
    return np.flatnonzero((pc == t) & (cnt >= m))


def pack_bits(flags: np.ndarray) -> bytes:
    return np.packbits(flags.astype(np.bool_), bitorder="little").tobytes()


# ---------------------------------------------------------------------------
# enumeration of (t-subset of zero set, row) pairs


@lru_cache(maxsize=256)
def _combo_table(z: int, t: int) -> np.ndarray:
    """All ``t``-subsets of ``range(z)`` in colex order, one per row."""
    if t == 0:
        return np.zeros((1, 0), dtype=np.int16)
    if z < t:
        return np.zeros((0, t), dtype=np.int16)
    if z == t:
        return np.arange(t, dtype=np.int16)[None, :]
    without = _combo_table(z - 1, t)
    with_top = _combo_table(z - 1, t - 1)
    top = np.full((with_top.shape[0], 1), z - 1, dtype=np.int16)
    return np.vstack([without, np.hstack([with_top, top])])


def combo_blocks(z: int, t: int) -> Iterator[np.ndarray]:
    """Colex-ordered ``t``-subsets of ``range(z)``, split into bounded blocks."""
    if binom(z, t) <= _BLOCK_ROWS or t == 0:
        if z >= t:
            yield _combo_table(z, t)
        return
    yield from combo_blocks(z - 1, t)
    for blk in combo_blocks(z - 1, t - 1):
        top = np.full((blk.shape[0], 1), z - 1, dtype=np.int16)
        yield np.hstack([blk, top])


def _binom_matrix(d: int, t: int) -> np.ndarray:
    cap = 1 << 62
    mat = np.zeros((d + 1, t + 2), dtype=np.int64)
    for c in range(d + 1):
        for j in range(t + 2):
            mat[c, j] = min(binom(c, j), cap)
    return mat


def _zero_positions(rows: Sequence[int], d: int, t: int) -> dict[int, tuple[np.ndarray, np.ndarray]]:
    """Group rows by zero count ``z >= t``: ``z -> (row indices, V x z positions)``."""
    groups: dict[int, tuple[np.ndarray, np.ndarray]] = {}
    if not rows:
        return groups
    if d <= 62:
        arr = np.asarray(rows, dtype=np.int64)
        zero_bits = ((arr[:, None] >> np.arange(d, dtype=np.int64)) & 1) == 0
        z = zero_bits.sum(axis=1)
        for zc in np.unique(z):
            zc = int(zc)
            if zc < t:
                continue
            sel = np.flatnonzero(z == zc)
            _, cols = np.nonzero(zero_bits[sel])
            groups[zc] = (sel, cols.reshape(len(sel), zc).astype(np.int64))
        return groups
    full = _full(d)
    buckets: dict[int, tuple[list[int], list[list[int]]]] = {}
    for idx, x in enumerate(rows):
        pos = set_positions(full ^ x)
        if len(pos) >= t:
            ids, ps = buckets.setdefault(len(pos), ([], []))
            ids.append(idx)
            ps.append(pos)
    for zc, (ids, ps) in buckets.items():
        groups[zc] = (np.asarray(ids, dtype=np.int64), np.asarray(ps, dtype=np.int64).reshape(len(ids), zc))
    return groups


def zero_subset_lists(rows: Sequence[int], d: int, t: int) -> tuple[np.ndarray, np.ndarray, int]:
    """Candidate lists for every ``t``-subset ``C`` of ``[d]``.

    Returns ``(offsets, entries, pairs)`` in CSR form: the rows zero on the
    subset of colex rank ``r`` are ``entries[offsets[r]:offsets[r+1]]``, in
    ascending row order. The work is proportional to the number of stored
    pairs, not to ``binom(d, t) * len(rows)``.
    """
    total_sets = binom(d, t)
    if total_sets >= (1 << 62):
        raise ValueError(f"binom({d}, {t}) is too large to index")
    n = len(rows)
    bmat = _binom_matrix(d, t)
    rank_dtype = np.int32 if total_sets < (1 << 31) else np.int64
    rank_parts: list[np.ndarray] = []
    row_parts: list[np.ndarray] = []
    for zc, (ids, pos) in sorted(_zero_positions(rows, d, t).items()):
        ids = ids.astype(np.int32)
        for blk in combo_blocks(zc, t):
            nb = blk.shape[0]
            step = max(1, _CHUNK_ELEMS // max(nb, 1))
            for lo in range(0, len(ids), step):
                p = pos[lo : lo + step]
                ranks = np.zeros((p.shape[0], nb), dtype=np.int64)
                for j in range(t):
                    ranks += bmat[p[:, blk[:, j]], j + 1]
                rank_parts.append(ranks.ravel().astype(rank_dtype))
                row_parts.append(np.repeat(ids[lo : lo + step], nb))
    counts = np.zeros(total_sets, dtype=np.int64)
    if rank_parts:
        ranks = np.concatenate(rank_parts)
        del rank_parts
        owners = np.concatenate(row_parts)
        del row_parts
        counts += np.bincount(ranks, minlength=total_sets)
        if total_sets * max(n, 1) < (1 << 62):
            key = ranks.astype(np.int64)
            del ranks
            key *= n
            key += owners
            order = np.argsort(key, kind="stable")
            del key
        else:
            order = np.lexsort((owners, ranks))
            del ranks
        entries = owners[order]
        del owners, order
    else:
        entries = np.zeros(0, dtype=np.int32)
    offsets = np.zeros(total_sets + 1, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])
    del counts
    pairs = int(offsets[-1])
    off_dtype = np.uint32 if pairs < (1 << 32) else np.uint64
    ent_dtype = np.uint16 if n <= (1 << 16) else np.uint32
    return offsets.astype(off_dtype), entries.astype(ent_dtype), pairs
