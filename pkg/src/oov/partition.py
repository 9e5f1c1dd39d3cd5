"""Greedy split of an instance into a pseudorandom residual and structured blocks."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels
from .core import ContractError, CoordSet, OVInstance, binom, iter_weight_masks


@dataclass(frozen=True)
class Part:
    """``m`` input positions that all vanish on ``zero_set``."""

    indices: tuple[int, ...]
    zero_set: CoordSet


@dataclass(frozen=True)
class PartitionResult:
    dim: int
    source: tuple[int, ...]
    residual_indices: tuple[int, ...]
    parts: tuple[Part, ...]
    zero_tests: int = field(default=0, compare=False)

    @property
    def k(self) -> int:
        return len(self.parts)

    @property
    def residual_rows(self) -> tuple[int, ...]:
        return tuple(self.source[j] for j in self.residual_indices)

    @property
    def residual(self) -> OVInstance | None:
        rows = self.residual_rows
        return OVInstance(self.dim, rows) if rows else None

    def block(self, j: int) -> OVInstance:
        return OVInstance(self.dim, tuple(self.source[i] for i in self.parts[j].indices))


def _use_counts(d: int, n: int, t: int) -> bool:
    """Pick the table-driven path when it is the cheaper one."""
    if d > _kernels.DENSE_DIM_CAP:
        return False
    return (1 << d) * d <= 8 * binom(d, t) * n


def split_rows(
    rows: Sequence[int],
    d: int,
    m: int,
    t: int,
    counts: np.ndarray | None = None,
) -> tuple[list[int], list[tuple[list[int], int]], int]:
    """Core loop. Returns ``(residual, [(block, zero_mask)], zero_tests)``.

    ``counts`` may hold ``#{x : x & S == 0}`` for every mask ``S`` over the
    full input. Counts only shrink as vectors leave, so sets that start
    below ``m`` never produce a block and can be skipped without changing
    the output.
    """
    n = len(rows)
    tests = 0
    if counts is None and _use_counts(d, n, t):
        counts = _kernels.superset_counts(rows, d)
        tests += (1 << d) * d
    if counts is not None:
        scan = (int(s) for s in _kernels.heavy_masks(counts, d, t, m))
    else:
        scan = iter_weight_masks(d, t)

    live = list(range(n))
    parts: list[tuple[list[int], int]] = []
    for S in scan:
        if len(live) < m:
            break
        tests += len(live)
        hits = [j for j in live if rows[j] & S == 0]
        if len(hits) < m:
            continue
        taken = set()
        while len(hits) >= m:
            block, hits = hits[:m], hits[m:]
            parts.append((block, S))
            taken.update(block)
        live = [j for j in live if j not in taken]
    return live, parts, tests


def pseudorandom_partition(X: OVInstance, m: int, t: int) -> PartitionResult:
    """Split ``X`` into blocks of ``m`` vectors sharing ``t`` zero coordinates.

    Coordinate sets are visited in colex order and each block takes the
    ``m`` lowest-indexed remaining vectors that vanish on the set, so the
    result is a pure function of ``X`` in its stored order.
    """
    if not 1 <= m <= X.n:
        raise ContractError(f"need 1 <= m <= n, got m={m}, n={X.n}")
    if not 1 <= t <= X.dim:
        raise ContractError(f"need 1 <= t <= d, got t={t}, d={X.dim}")
    live, parts, tests = split_rows(X.rows, X.dim, m, t)
    return PartitionResult(
        dim=X.dim,
        source=X.rows,
        residual_indices=tuple(live),
        parts=tuple(Part(tuple(b), CoordSet.from_mask(X.dim, S)) for b, S in parts),
        zero_tests=tests,
    )


def _rows_of(X: OVInstance | Sequence[int] | None) -> Sequence[int]:
    if X is None:
        return ()
    return X.rows if isinstance(X, OVInstance) else X


def is_pseudorandom(X: OVInstance | Sequence[int] | None, m: int, t: int, dim: int | None = None) -> bool:
    """Brute force: no ``t``-set of coordinates is zero on ``m`` or more vectors."""
    rows = _rows_of(X)
    d = X.dim if isinstance(X, OVInstance) else dim
    if d is None:
        raise ContractError("dimension is required when passing raw rows")
    if not rows:
        return True
    return max_zero_count(rows, d, t) < m


def max_zero_count(rows: Sequence[int], d: int, t: int) -> int:
    best = 0
    for C in iter_weight_masks(d, t):
        c = 0
        for x in rows:
            if x & C == 0:
                c += 1
        if c > best:
            best = c
    return best


def max_candidate_count(X: OVInstance, t: int) -> int:
    """Largest candidate list over all ``t``-sets of coordinates."""
    if not 0 <= t <= X.dim:
        raise ContractError(f"need 0 <= t <= d, got t={t}, d={X.dim}")
    return max_zero_count(X.rows, X.dim, t)
